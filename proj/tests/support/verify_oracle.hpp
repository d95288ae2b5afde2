#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>

#include "lelma/verify/evaluate.hpp"

namespace lelma::testing {

using namespace lelma::verify;
using lelma::game::GameSpec;

inline const MoveLabel B{"B"}, R{"R"};

struct Cell {
  MoveLabel me, them;
  std::int64_t mine, theirs;
};

// Brute force over the four outcomes, straight from the payoff facts.
struct Oracle {
  std::vector<Cell> cells;

  explicit Oracle(const GameSpec& g) {
    for (const auto& [ml, mm] : g.move_labels())
      for (const auto& [ol, om] : g.move_labels()) {
        const auto& p = g.payoffs().entries.at({mm, om});
        cells.push_back({ml, ol, p.row, p.col});
      }
  }

  std::vector<std::int64_t> mine_for(const MoveLabel& m) const {
    std::vector<std::int64_t> out;
    for (const auto& c : cells)
      if (c.me == m) out.push_back(c.mine);
    return out;
  }
  std::int64_t worst(const MoveLabel& m) const {
    auto v = mine_for(m);
    return *std::min_element(v.begin(), v.end());
  }
  std::int64_t best(const MoveLabel& m) const {
    auto v = mine_for(m);
    return *std::max_element(v.begin(), v.end());
  }
  std::int64_t sum(const MoveLabel& m, const MoveLabel& o) const {
    for (const auto& c : cells)
      if (c.me == m && c.them == o) return c.mine + c.theirs;
    throw std::logic_error("no cell");
  }

  bool holds(const Query& q) const {
    auto a = [&](std::size_t i) { return std::get<std::int64_t>(q.args[i]); };
    auto m = [&](std::size_t i) { return std::get<MoveLabel>(q.args[i]); };
    switch (q.kind) {
      case QueryKind::outcome:
        for (const auto& c : cells)
          if (c.me == m(0) && c.them == m(2) && c.mine == a(1)) return true;
        return false;
      case QueryKind::higher: return a(0) > a(1);
      case QueryKind::lower: return a(0) < a(1);
      case QueryKind::highest_possible_individual_payoff: {
        bool any = false;
        for (const auto& c : cells) {
          if (c.mine > a(0)) return false;
          any |= c.mine == a(0);
        }
        return any;
      }
      case QueryKind::lowest_possible_individual_payoff: {
        bool any = false;
        for (const auto& c : cells) {
          if (c.mine < a(0)) return false;
          any |= c.mine == a(0);
        }
        return any;
      }
      case QueryKind::highest_individual_payoff_for_choice: return a(0) == best(m(1));
      case QueryKind::lowest_individual_payoff_for_choice: return a(0) == worst(m(1));
      case QueryKind::highest_guaranteed_payoff_choice: return worst(m(0)) >= worst(m(0) == B ? R : B);
      case QueryKind::higher_guaranteed_payoff: return worst(m(0)) > worst(m(1));
      case QueryKind::lower_guaranteed_payoff: return worst(m(0)) < worst(m(1));
      case QueryKind::highest_mutual_payoff:
      case QueryKind::lowest_mutual_payoff: {
        const bool hi = q.kind == QueryKind::highest_mutual_payoff;
        for (const auto& c : cells) {
          auto s = c.mine + c.theirs;
          if (hi ? s > sum(m(0), m(1)) : s < sum(m(0), m(1))) return false;
        }
        return true;
      }
    }
    return false;
  }
};

// Every instantiation of every kind over {B,R} and the given payoff values.
inline std::vector<Query> all_queries(const std::vector<std::int64_t>& values) {
  std::vector<Query> out;
  const std::array<MoveLabel, 2> moves{B, R};
  for (const auto& sig : catalogue()) {
    std::vector<std::vector<QueryValue>> partial{{}};
    for (const auto& p : sig.params) {
      std::vector<std::vector<QueryValue>> next;
      for (const auto& prefix : partial) {
        if (p.type == ParamType::move) {
          for (const auto& m : moves) {
            auto v = prefix;
            v.push_back(m);
            next.push_back(v);
          }
        } else {
          for (auto n : values) {
            auto v = prefix;
            v.push_back(n);
            next.push_back(v);
          }
        }
      }
      partial = std::move(next);
    }
    for (auto& args : partial) out.push_back(make_query(sig.kind, std::move(args)));
  }
  return out;
}

inline std::vector<std::int64_t> matrix_values(const GameSpec& g) {
  std::set<std::int64_t> v{99};
  for (const auto& [k, p] : g.payoffs().entries) {
    v.insert(p.row);
    v.insert(p.col);
  }
  return {v.begin(), v.end()};
}

}  // namespace lelma::testing
