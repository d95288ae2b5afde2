#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lelma/logic/term.hpp"

namespace lelma::logic {

enum class LiteralKind {
  positive,  // resolved against the rule base
  negative,  // \+ G, negation as failure; G must be ground when called
  ground,    // ground/1 builtin
  unify,     // =/2 builtin
};

struct Literal {
  LiteralKind kind = LiteralKind::positive;
  Term term;

  // Classifies a callable term: ground/1 and =/2 become builtins.
  static Literal from_term(Term t) {
    if (t.is_compound() && t.name() == "ground" && t.arity() == 1) return {LiteralKind::ground, std::move(t)};
    if (t.is_compound() && t.name() == "=" && t.arity() == 2) return {LiteralKind::unify, std::move(t)};
    return {LiteralKind::positive, std::move(t)};
  }
  static Literal negated(Term t) { return {LiteralKind::negative, std::move(t)}; }

  bool operator==(const Literal&) const = default;

  void write(std::string& out) const {
    switch (kind) {
      case LiteralKind::negative:
        out += "\\+ ";
        term.write(out);
        break;
      case LiteralKind::unify:
        term.arg(0).write(out);
        out += '=';
        term.arg(1).write(out);
        break;
      case LiteralKind::positive:
      case LiteralKind::ground: term.write(out); break;
    }
  }
  std::string to_string() const {
    std::string out;
    write(out);
    return out;
  }
};

struct Clause {
  Term head;
  std::vector<Literal> body;

  bool is_fact() const { return body.empty(); }
  bool operator==(const Clause&) const = default;

  // Single-line form by default; `indent` lays the body out one literal per line.
  std::string to_string(bool indent = false) const {
    std::string out;
    head.write(out);
    if (!body.empty()) {
      out += indent ? ":-\n    " : " :- ";
      for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) out += indent ? ",\n    " : ", ";
        body[i].write(out);
      }
    }
    out += '.';
    return out;
  }
};

inline std::string predicate_key(std::string_view name, std::size_t arity) {
  return std::string(name) + "/" + std::to_string(arity);
}

inline std::string predicate_key(const Term& callable) { return predicate_key(callable.name(), callable.arity()); }

class RenameCounter {
 public:
  std::uint64_t next() { return ++value_; }
  std::uint64_t value() const { return value_; }

 private:
  std::uint64_t value_ = 0;
};

namespace detail {

inline Term rename_term(const Term& t, std::uint64_t ordinal) {
  switch (t.kind()) {
    case Term::Kind::variable: return Term::var(t.name(), ordinal);
    case Term::Kind::compound: {
      if (t.is_ground()) return t;
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const auto& a : t.args()) args.push_back(rename_term(a, ordinal));
      return Term::compound(t.name(), std::move(args));
    }
    default: return t;
  }
}

}  // namespace detail

// Every variable of the clause gets the same fresh ordinal. Names are unique
// within a clause, so the mapping is injective.
inline Clause rename_apart(const Clause& c, RenameCounter& counter) {
  const std::uint64_t ordinal = counter.next();
  Clause out{detail::rename_term(c.head, ordinal), {}};
  out.body.reserve(c.body.size());
  for (const auto& lit : c.body) out.body.push_back({lit.kind, detail::rename_term(lit.term, ordinal)});
  return out;
}

/// Ordered clause list indexed by predicate name/arity. Source order is resolution order.
class RuleBase {
 public:
  RuleBase() = default;
  explicit RuleBase(std::vector<Clause> clauses) {
    for (auto& c : clauses) add(std::move(c));
  }

  void add(Clause c) {
    if (!c.head.is_callable()) throw std::invalid_argument("clause head must be an atom or compound: " + c.head.to_string());
    index_[predicate_key(c.head)].push_back(clauses_.size());
    clauses_.push_back(std::move(c));
  }

  void append(std::span<const Clause> cs) {
    for (const auto& c : cs) add(c);
  }

  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(std::size_t i) const { return clauses_.at(i); }
  std::size_t size() const { return clauses_.size(); }

  // Positions of clauses whose head has this name/arity, or nullptr if the predicate is undefined.
  const std::vector<std::size_t>* lookup(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &it->second;
  }
  bool defines(std::string_view name, std::size_t arity) const { return lookup(predicate_key(name, arity)) != nullptr; }

 private:
  std::vector<Clause> clauses_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

}  // namespace lelma::logic
