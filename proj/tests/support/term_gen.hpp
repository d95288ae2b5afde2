#pragma once

#include <functional>
#include <random>
#include <set>

#include "lelma/logic/substitution.hpp"
#include "lelma/logic/term.hpp"

namespace lelma::testing {

using namespace lelma::logic;

inline bool acyclic(const Substitution& s) {
  // Walks every binding; a revisit on the current path is a cycle.
  std::function<bool(const Term&, std::set<Variable>&)> visit = [&](const Term& t, std::set<Variable>& path) {
    if (t.is_var()) {
      auto v = t.variable();
      if (path.count(v)) return false;
      const Term* b = s.find(v);
      if (!b) return true;
      path.insert(v);
      bool ok = visit(*b, path);
      path.erase(v);
      return ok;
    }
    for (const auto& a : t.args())
      if (!visit(a, path)) return false;
    return true;
  };
  for (const auto& [v, t] : s) {
    std::set<Variable> path;
    if (!visit(Term::var(v), path)) return false;
  }
  return true;
}

inline Term random_term(std::mt19937& rng, int depth) {
  static const char* vars[] = {"X", "Y", "Z", "W"};
  static const char* atoms[] = {"a", "b", "D"};
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 2);
  switch (pick(rng)) {
    case 0: return Term::var(vars[rng() % 4]);
    case 1: return Term::atom(atoms[rng() % 3]);
    case 2: return Term::integer(static_cast<int>(rng() % 3));
    case 3: return compound("f", random_term(rng, depth - 1));
    case 4: return compound("f", random_term(rng, depth - 1), random_term(rng, depth - 1));
    default: return compound("g", random_term(rng, depth - 1), random_term(rng, depth - 1));
  }
}

}  // namespace lelma::testing
