#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lelma/logic/term.hpp"

namespace lelma::logic {

/// Variable bindings. Lookups chase chains, so bindings may point at other variables.
class Substitution {
 public:
  using Map = std::map<Variable, Term>;

  const Term* find(const Variable& v) const {
    auto it = bindings_.find(v);
    return it == bindings_.end() ? nullptr : &it->second;
  }
  void bind(const Variable& v, Term t) { bindings_.insert_or_assign(v, std::move(t)); }

  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  Map::const_iterator begin() const { return bindings_.begin(); }
  Map::const_iterator end() const { return bindings_.end(); }

  const Term* lookup(std::string_view name) const {
    for (const auto& [v, t] : bindings_)
      if (v.name == name && v.ordinal == 0) return &t;
    return nullptr;
  }

  // Fully resolves `t`. Never terminates on cyclic bindings, which unify can
  // build because it skips the occurs check.
  Term apply(const Term& t) const;

  bool operator==(const Substitution&) const = default;

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [v, t] : bindings_) {
      if (!first) out += ", ";
      first = false;
      Term::var(v).write(out);
      out += " = ";
      apply(t).write(out);
    }
    return out + "}";
  }

 private:
  Map bindings_;
};

// Binding store used by the solver: constant-time lookup plus an undo trail.
class TrailedBindings {
 public:
  const Term* find(const Variable& v) const {
    auto it = map_.find(v);
    return it == map_.end() ? nullptr : &it->second;
  }
  void bind(const Variable& v, Term t) {
    map_.emplace(v, std::move(t));
    trail_.push_back(v);
  }
  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      map_.erase(trail_.back());
      trail_.pop_back();
    }
  }

 private:
  std::unordered_map<Variable, Term, VariableHash> map_;
  std::vector<Variable> trail_;
};

template <typename Store>
Term walk(Term t, const Store& s) {
  while (t.is_var()) {
    const Term* bound = s.find(t.variable());
    if (!bound) break;
    t = *bound;
  }
  return t;
}

template <typename Store>
Term resolve(const Term& t, const Store& s) {
  Term w = walk(t, s);
  if (!w.is_compound() || w.is_ground()) return w;
  std::vector<Term> args;
  args.reserve(w.arity());
  bool changed = false;
  for (const auto& a : w.args()) {
    args.push_back(resolve(a, s));
    changed = changed || !args.back().same_node(a);
  }
  if (!changed) return w;
  return Term::compound(w.name(), std::move(args));
}

// Unifies into `s` without an occurs check. On failure `s` may hold partial
// bindings; callers either discard the store or undo to a trail mark.
template <typename Store>
bool unify_in(const Term& a, const Term& b, Store& s) {
  Term x = walk(a, s);
  Term y = walk(b, s);
  if (x.same_node(y)) return true;
  if (x.is_var()) {
    if (y.is_var() && x.variable() == y.variable()) return true;
    s.bind(x.variable(), y);
    return true;
  }
  if (y.is_var()) {
    s.bind(y.variable(), x);
    return true;
  }
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Term::Kind::atom: return x.name() == y.name();
    case Term::Kind::integer: return x.value() == y.value();
    case Term::Kind::compound:
      if (x.name() != y.name() || x.arity() != y.arity()) return false;
      for (std::size_t i = 0; i < x.arity(); ++i)
        if (!unify_in(x.arg(i), y.arg(i), s)) return false;
      return true;
    case Term::Kind::variable: break;
  }
  return false;
}

inline Term Substitution::apply(const Term& t) const { return resolve(t, *this); }

/// Most general unifier of `a` and `b` extending `s`; `s` itself is left untouched.
inline std::optional<Substitution> unify(const Term& a, const Term& b, const Substitution& s = {}) {
  Substitution out = s;
  if (!unify_in(a, b, out)) return std::nullopt;
  return out;
}

}  // namespace lelma::logic
