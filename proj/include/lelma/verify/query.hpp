#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lelma/game/game_spec.hpp"

namespace lelma::verify {

using game::MoveLabel;

enum class QueryKind {
  outcome,
  higher,
  lower,
  highest_possible_individual_payoff,
  lowest_possible_individual_payoff,
  highest_individual_payoff_for_choice,
  lowest_individual_payoff_for_choice,
  highest_guaranteed_payoff_choice,
  higher_guaranteed_payoff,
  lower_guaranteed_payoff,
  highest_mutual_payoff,
  lowest_mutual_payoff,
};

using QueryValue = std::variant<std::int64_t, MoveLabel>;

enum class ParamType { move, payoff };

struct Param {
  std::string_view role;
  ParamType type;
};

struct QuerySignature {
  QueryKind kind;
  std::string_view predicate;
  std::vector<Param> params;
  // Template line shown to the translator, and what it asserts.
  std::string_view example;
  std::string_view meaning;
};

// Outcome queries are written finally(outcome(you,M,U,them,M2,_),S); every
// other kind is predicate(arg, ...).
inline const std::vector<QuerySignature>& catalogue() {
  static const std::vector<QuerySignature> table{
      {QueryKind::outcome,
       "finally",
       {{"choice", ParamType::move}, {"payoff", ParamType::payoff}, {"opponent_choice", ParamType::move}},
       "finally(outcome(you,B,1,them,R,_),S)",
       "'you' is the reasoner and 'them' the opponent; the reasoner picking B while the opponent picks R is claimed "
       "to give the reasoner a payoff of 1."},
      {QueryKind::higher,
       "higher",
       {{"a", ParamType::payoff}, {"b", ParamType::payoff}},
       "higher(1, 3)",
       "1 and 3 are payoff amounts; 1 is claimed to be higher than 3."},
      {QueryKind::lower,
       "lower",
       {{"a", ParamType::payoff}, {"b", ParamType::payoff}},
       "lower(1, 3)",
       "1 and 3 are payoff amounts; 1 is claimed to be lower than 3."},
      {QueryKind::highest_possible_individual_payoff,
       "highest_possible_individual_payoff",
       {{"payoff", ParamType::payoff}},
       "highest_possible_individual_payoff(1)",
       "1 is claimed to be the highest payoff the reasoner can get in the game."},
      {QueryKind::lowest_possible_individual_payoff,
       "lowest_possible_individual_payoff",
       {{"payoff", ParamType::payoff}},
       "lowest_possible_individual_payoff(1)",
       "1 is claimed to be the lowest payoff the reasoner can get in the game."},
      {QueryKind::highest_individual_payoff_for_choice,
       "highest_individual_payoff_for_choice",
       {{"payoff", ParamType::payoff}, {"choice", ParamType::move}},
       "highest_individual_payoff_for_choice(1,B)",
       "1 is claimed to be the highest payoff the reasoner can get when picking B."},
      {QueryKind::lowest_individual_payoff_for_choice,
       "lowest_individual_payoff_for_choice",
       {{"payoff", ParamType::payoff}, {"choice", ParamType::move}},
       "lowest_individual_payoff_for_choice(1,B)",
       "1 is claimed to be the lowest payoff the reasoner can get when picking B."},
      {QueryKind::highest_guaranteed_payoff_choice,
       "highest_guaranteed_payoff_choice",
       {{"choice", ParamType::move}},
       "highest_guaranteed_payoff_choice(B)",
       "B is claimed to be the choice whose worst-case payoff for the reasoner is the highest."},
      {QueryKind::higher_guaranteed_payoff,
       "higher_guaranteed_payoff",
       {{"first", ParamType::move}, {"second", ParamType::move}},
       "higher_guaranteed_payoff(B,R)",
       "B and R are choices; B is claimed to guarantee a higher worst-case payoff than R."},
      {QueryKind::lower_guaranteed_payoff,
       "lower_guaranteed_payoff",
       {{"first", ParamType::move}, {"second", ParamType::move}},
       "lower_guaranteed_payoff(B,R)",
       "B and R are choices; B is claimed to guarantee a lower worst-case payoff than R."},
      {QueryKind::highest_mutual_payoff,
       "highest_mutual_payoff",
       {{"choice", ParamType::move}, {"opponent_choice", ParamType::move}},
       "highest_mutual_payoff(R,R)",
       "The reasoner picking R and the opponent picking R is claimed to give the highest combined payoff of both "
       "players."},
      {QueryKind::lowest_mutual_payoff,
       "lowest_mutual_payoff",
       {{"choice", ParamType::move}, {"opponent_choice", ParamType::move}},
       "lowest_mutual_payoff(R,R)",
       "The reasoner picking R and the opponent picking R is claimed to give the lowest combined payoff of both "
       "players."},
  };
  return table;
}

inline const QuerySignature& signature(QueryKind kind) {
  for (const auto& s : catalogue())
    if (s.kind == kind) return s;
  throw std::logic_error("query kind missing from catalogue");
}

inline std::string_view kind_name(QueryKind kind) {
  return kind == QueryKind::outcome ? std::string_view("outcome") : signature(kind).predicate;
}

inline std::optional<QueryKind> kind_from_name(std::string_view name) {
  for (const auto& s : catalogue())
    if (kind_name(s.kind) == name) return s.kind;
  return std::nullopt;
}

struct Query {
  QueryKind kind = QueryKind::higher;
  std::vector<QueryValue> args;
  std::string source_text;

  std::optional<std::size_t> position(std::string_view role) const {
    const auto& params = signature(kind).params;
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].role == role) return i;
    return std::nullopt;
  }

  const MoveLabel& move(std::size_t i) const { return std::get<MoveLabel>(args.at(i)); }
  std::int64_t payoff(std::size_t i) const { return std::get<std::int64_t>(args.at(i)); }

  // Source text is provenance only and does not take part in equality.
  friend bool operator==(const Query& a, const Query& b) { return a.kind == b.kind && a.args == b.args; }
};

inline std::string value_text(const QueryValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<MoveLabel>(v).value;
}

/// Canonical template syntax, e.g. `higher(1, 3)` or `finally(outcome(you,B,1,them,R,_),S)`.
inline std::string format_query(const Query& q) {
  if (q.kind == QueryKind::outcome) {
    return "finally(outcome(you," + value_text(q.args.at(0)) + "," + value_text(q.args.at(1)) + ",them," +
           value_text(q.args.at(2)) + ",_),S)";
  }
  std::string out(signature(q.kind).predicate);
  out += '(';
  for (std::size_t i = 0; i < q.args.size(); ++i) {
    if (i) out += ", ";
    out += value_text(q.args[i]);
  }
  return out + ")";
}

inline Query make_query(QueryKind kind, std::vector<QueryValue> args) {
  Query q{kind, std::move(args), {}};
  q.source_text = format_query(q);
  return q;
}

inline MoveLabel label(std::string s) { return MoveLabel{std::move(s)}; }

}  // namespace lelma::verify
