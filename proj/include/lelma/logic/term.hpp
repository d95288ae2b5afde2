#pragma once

#include <cctype>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lelma::logic {

// A variable is identified by its source name plus a renaming ordinal.
// Ordinal 0 is the name as written; rename_apart hands out fresh ordinals.
struct Variable {
  std::string name;
  std::uint64_t ordinal = 0;

  auto operator<=>(const Variable&) const = default;
  bool operator==(const Variable&) const = default;

  // Anonymous `_` occurrences are given hidden names of the form "_@k".
  bool anonymous() const { return name.size() > 1 && name[0] == '_' && name[1] == '@'; }
};

struct VariableHash {
  std::size_t operator()(const Variable& v) const noexcept {
    return std::hash<std::string>{}(v.name) ^ (std::hash<std::uint64_t>{}(v.ordinal) * 0x9e3779b97f4a7c15ULL);
  }
};

/// Immutable logic term: variable, atom, integer or compound. Copies share structure.
class Term {
 public:
  enum class Kind { variable, atom, integer, compound };

  static Term var(std::string name, std::uint64_t ordinal = 0) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->name = std::move(name);
    n->ordinal = ordinal;
    n->ground = false;
    return Term(std::move(n));
  }
  static Term var(const Variable& v) { return var(v.name, v.ordinal); }

  static Term atom(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::atom;
    n->name = std::move(name);
    return Term(std::move(n));
  }

  static Term integer(std::int64_t value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::integer;
    n->value = value;
    return Term(std::move(n));
  }

  // Zero-arity symbols are atoms, so a compound needs at least one argument.
  static Term compound(std::string functor, std::vector<Term> args) {
    if (args.empty()) throw std::invalid_argument("compound term '" + functor + "' needs at least one argument");
    auto n = std::make_shared<Node>();
    n->kind = Kind::compound;
    n->name = std::move(functor);
    n->ground = true;
    for (const auto& a : args) n->ground = n->ground && a.is_ground();
    n->args = std::move(args);
    return Term(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  bool is_var() const { return node_->kind == Kind::variable; }
  bool is_atom() const { return node_->kind == Kind::atom; }
  bool is_integer() const { return node_->kind == Kind::integer; }
  bool is_compound() const { return node_->kind == Kind::compound; }
  bool is_callable() const { return is_atom() || is_compound(); }

  // Atom name, functor, or variable name.
  const std::string& name() const { return node_->name; }
  Variable variable() const { return Variable{node_->name, node_->ordinal}; }
  std::int64_t value() const { return node_->value; }
  std::span<const Term> args() const { return node_->args; }
  std::size_t arity() const { return node_->args.size(); }
  const Term& arg(std::size_t i) const { return node_->args.at(i); }

  // Ground-ness is a property of the term itself, not of any substitution.
  bool is_ground() const { return node_->ground; }

  bool same_node(const Term& other) const { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case Kind::variable: return a.node_->name == b.node_->name && a.node_->ordinal == b.node_->ordinal;
      case Kind::atom: return a.node_->name == b.node_->name;
      case Kind::integer: return a.node_->value == b.node_->value;
      case Kind::compound:
        if (a.name() != b.name() || a.arity() != b.arity()) return false;
        for (std::size_t i = 0; i < a.arity(); ++i)
          if (!(a.arg(i) == b.arg(i))) return false;
        return true;
    }
    return false;
  }

  // Prolog-style rendering; no spaces after commas so answers print as `do(choice(p1,'D'),s0)`.
  std::string to_string() const {
    std::string out;
    write(out);
    return out;
  }

  void write(std::string& out) const {
    switch (kind()) {
      case Kind::variable: write_variable(out); break;
      case Kind::atom: write_atom(out, name()); break;
      case Kind::integer: out += std::to_string(value()); break;
      case Kind::compound:
        write_atom(out, name());
        out += '(';
        for (std::size_t i = 0; i < arity(); ++i) {
          if (i) out += ',';
          arg(i).write(out);
        }
        out += ')';
        break;
    }
  }

  static bool is_bare_atom(std::string_view s) {
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
  }

  static void write_atom(std::string& out, std::string_view s) {
    if (is_bare_atom(s)) {
      out += s;
      return;
    }
    out += '\'';
    for (char c : s) {
      if (c == '\'' || c == '\\') out += '\\';
      out += c;
    }
    out += '\'';
  }

 private:
  struct Node {
    Kind kind = Kind::atom;
    std::string name;
    std::uint64_t ordinal = 0;
    std::int64_t value = 0;
    std::vector<Term> args;
    bool ground = true;
  };

  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  void write_variable(std::string& out) const {
    const bool anon = node_->name.size() > 1 && node_->name[0] == '_' && node_->name[1] == '@';
    if (anon) {
      out += '_';
      if (node_->ordinal != 0) out += "G" + node_->name.substr(2) + "_" + std::to_string(node_->ordinal);
      return;
    }
    out += node_->name;
    if (node_->ordinal != 0) out += "_" + std::to_string(node_->ordinal);
  }

  std::shared_ptr<const Node> node_;
};

inline Term atom(std::string name) { return Term::atom(std::move(name)); }
inline Term integer(std::int64_t v) { return Term::integer(v); }
inline Term var(std::string name) { return Term::var(std::move(name)); }

template <typename... Args>
Term compound(std::string functor, Args&&... args) {
  return Term::compound(std::move(functor), std::vector<Term>{std::forward<Args>(args)...});
}

// Distinct variables in first-occurrence order.
inline void collect_variables(const Term& t, std::vector<Variable>& out) {
  if (t.is_var()) {
    auto v = t.variable();
    for (const auto& seen : out)
      if (seen == v) return;
    out.push_back(std::move(v));
    return;
  }
  for (const auto& a : t.args()) collect_variables(a, out);
}

}  // namespace lelma::logic
