#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lelma/game/game_spec.hpp"
#include "lelma/logic/solver.hpp"
#include "lelma/verify/feedback.hpp"
#include "lelma/verify/query.hpp"

namespace lelma::verify {

// A failed comparison between equal values has no swapped form that holds.
enum class Relation { equal };

using CorrectionValue = std::variant<std::int64_t, MoveLabel, Relation>;

struct Binding {
  std::string role;
  CorrectionValue value;
  bool operator==(const Binding&) const = default;
};

// One alternative: substitute every binding into the failed query.
using Correction = std::vector<Binding>;

enum class Status { holds, fails, error };

struct QueryResult {
  Query query;
  Status status = Status::error;
  std::vector<Correction> corrections;
  std::string template_key;
  Fields fields;
  std::string explanation;
  std::string error;

  bool holds() const { return status == Status::holds; }
  bool failed() const { return status == Status::fails; }
};

struct VerificationReport {
  std::vector<QueryResult> results;
  std::vector<QueryResult> failed;
  std::size_t errors = 0;

  bool all_hold() const { return failed.empty() && errors == 0; }
};

class EmptyFailureSet : public std::logic_error {
 public:
  EmptyFailureSet() : std::logic_error("no failed queries to give feedback on") {}
};

class UnknownMove : public std::invalid_argument {
 public:
  explicit UnknownMove(const MoveLabel& m) : std::invalid_argument("unknown move label '" + m.value + "'") {}
};

class MalformedQuery : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_move(const game::GameSpec& g, const MoveLabel& m) {
  if (!g.has_label(m)) throw UnknownMove(m);
}

/// Reasoner payoff guaranteed by a choice: the worst case over the opponent's moves.
inline std::int64_t guaranteed_payoff(const game::GameSpec& g, const MoveLabel& m) {
  require_move(g, m);
  std::optional<std::int64_t> worst;
  for (const auto& o : g.labels()) {
    auto u = g.payoff(m, o).row;
    if (!worst || u < *worst) worst = u;
  }
  return *worst;
}

inline std::int64_t best_payoff_for_choice(const game::GameSpec& g, const MoveLabel& m) {
  require_move(g, m);
  std::optional<std::int64_t> best;
  for (const auto& o : g.labels()) {
    auto u = g.payoff(m, o).row;
    if (!best || u > *best) best = u;
  }
  return *best;
}

// The worst payoff for a choice is the guaranteed one.
inline std::int64_t worst_payoff_for_choice(const game::GameSpec& g, const MoveLabel& m) { return guaranteed_payoff(g, m); }

inline std::int64_t mutual_payoff(const game::GameSpec& g, const MoveLabel& m, const MoveLabel& o) {
  require_move(g, m);
  require_move(g, o);
  const auto& p = g.payoff(m, o);
  return p.row + p.col;
}

/// Reasoner payoff for a move pair, asked of the solver through the rules.
inline std::optional<std::int64_t> solve_outcome_payoff(const game::GameSpec& g, const MoveLabel& m, const MoveLabel& o,
                                                        std::optional<std::int64_t> claimed = std::nullopt,
                                                        logic::ResolutionLimits limits = {}) {
  using logic::Term;
  Term u = claimed ? Term::integer(*claimed) : Term::var("U");
  Term outcome = logic::compound("outcome", Term::atom(g.roles().reasoner), Term::atom(*g.move_for(m)), u,
                                 Term::atom(g.roles().opponent), Term::atom(*g.move_for(o)), Term::var("_@1"));
  std::vector<logic::Literal> goal{
      logic::Literal::from_term(logic::compound("initial", Term::var("I"))),
      logic::Literal::from_term(logic::compound("game", Term::var("I"), Term::var("F"))),
      logic::Literal::from_term(logic::compound("finally", outcome, Term::var("F"))),
  };
  logic::Solver solver(g.rulebase(), std::move(goal), limits);
  auto answer = solver.next();
  if (!answer) return std::nullopt;
  if (claimed) return claimed;
  return answer->lookup("U")->value();
}

/// Arity, argument types and move labels; throws MalformedQuery or UnknownMove.
inline void validate_query(const Query& q, const game::GameSpec& g) {
  const auto& params = signature(q.kind).params;
  if (q.args.size() != params.size())
    throw MalformedQuery(std::string(kind_name(q.kind)) + " takes " + std::to_string(params.size()) + " arguments");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].type == ParamType::move) {
      auto* m = std::get_if<MoveLabel>(&q.args[i]);
      if (!m) throw MalformedQuery(std::string(params[i].role) + " must be a move label");
      require_move(g, *m);
    } else if (!std::holds_alternative<std::int64_t>(q.args[i])) {
      throw MalformedQuery(std::string(params[i].role) + " must be an integer payoff");
    }
  }
}

namespace detail {

inline std::string join_or(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += " or ";
    out += items[i];
  }
  return out;
}

inline void comparison(QueryResult& r, bool holds, bool equal, const std::string& key) {
  const auto& q = r.query;
  r.fields["a"] = value_text(q.args[0]);
  r.fields["b"] = value_text(q.args[1]);
  if (holds) return;
  if (equal) {
    r.template_key = key + ".equal";
    r.corrections.push_back({{"relation", Relation::equal}});
  } else {
    r.template_key = key;
    r.corrections.push_back({{"a", q.payoff(1)}, {"b", q.payoff(0)}});
  }
}

inline void guaranteed_order(QueryResult& r, const game::GameSpec& g, bool higher) {
  const auto& q = r.query;
  auto v1 = guaranteed_payoff(g, q.move(0)), v2 = guaranteed_payoff(g, q.move(1));
  r.fields["first"] = q.move(0).value;
  r.fields["second"] = q.move(1).value;
  r.fields["first_value"] = std::to_string(v1);
  r.fields["second_value"] = std::to_string(v2);
  bool holds = higher ? v1 > v2 : v1 < v2;
  r.status = holds ? Status::holds : Status::fails;
  if (holds) return;
  if (v1 == v2)
    r.corrections.push_back({{"relation", Relation::equal}});
  else
    r.corrections.push_back({{"first", q.move(1)}, {"second", q.move(0)}});
}

inline void mutual_extremum(QueryResult& r, const game::GameSpec& g, bool highest) {
  const auto& q = r.query;
  std::optional<std::int64_t> target;
  for (const auto& m : g.labels())
    for (const auto& o : g.labels()) {
      auto v = mutual_payoff(g, m, o);
      if (!target || (highest ? v > *target : v < *target)) target = v;
    }
  auto value = mutual_payoff(g, q.move(0), q.move(1));
  r.fields["choice"] = q.move(0).value;
  r.fields["opponent_choice"] = q.move(1).value;
  r.fields["value"] = std::to_string(value);
  r.fields["correct_value"] = std::to_string(*target);
  r.status = value == *target ? Status::holds : Status::fails;
  if (r.holds()) return;
  std::vector<std::string> phrases;
  for (const auto& m : g.labels())
    for (const auto& o : g.labels())
      if (mutual_payoff(g, m, o) == *target) {
        r.corrections.push_back({{"choice", m}, {"opponent_choice", o}});
        phrases.push_back("you picking " + m.value + " and them picking " + o.value);
      }
  r.fields["correct"] = join_or(phrases);
}

}  // namespace detail

/// Checks one query against the game. Failures carry corrections and a
/// feedback sentence; malformed queries come back with status error.
inline QueryResult evaluate_query(const Query& q, const game::GameSpec& g,
                                  const FeedbackTemplates& templates = FeedbackTemplates::defaults()) {
  QueryResult r;
  r.query = q;
  r.template_key = std::string(kind_name(q.kind));
  try {
    validate_query(q, g);
  } catch (const std::invalid_argument& e) {
    r.status = Status::error;
    r.error = e.what();
    return r;
  }
  r.fields["query"] = format_query(q);
  auto set = [&](bool holds) { r.status = holds ? Status::holds : Status::fails; };

  switch (q.kind) {
    case QueryKind::outcome: {
      auto claimed = q.payoff(1);
      auto found = solve_outcome_payoff(g, q.move(0), q.move(2), claimed);
      set(found.has_value());
      r.fields["choice"] = q.move(0).value;
      r.fields["opponent_choice"] = q.move(2).value;
      r.fields["payoff"] = std::to_string(claimed);
      if (!r.holds()) {
        auto actual = solve_outcome_payoff(g, q.move(0), q.move(2));
        if (!actual) {
          r.status = Status::error;
          r.error = "the rules give no outcome for this move pair";
          return r;
        }
        r.fields["actual"] = std::to_string(*actual);
        r.corrections.push_back({{"payoff", *actual}});
      }
      break;
    }
    case QueryKind::higher:
      set(q.payoff(0) > q.payoff(1));
      detail::comparison(r, r.holds(), q.payoff(0) == q.payoff(1), "higher");
      break;
    case QueryKind::lower:
      set(q.payoff(0) < q.payoff(1));
      detail::comparison(r, r.holds(), q.payoff(0) == q.payoff(1), "lower");
      break;
    case QueryKind::highest_possible_individual_payoff:
    case QueryKind::lowest_possible_individual_payoff: {
      const bool highest = q.kind == QueryKind::highest_possible_individual_payoff;
      std::optional<std::int64_t> target;
      for (const auto& m : g.labels()) {
        auto v = highest ? best_payoff_for_choice(g, m) : guaranteed_payoff(g, m);
        if (!target || (highest ? v > *target : v < *target)) target = v;
      }
      set(q.payoff(0) == *target);
      r.fields["payoff"] = std::to_string(q.payoff(0));
      r.fields["correct"] = std::to_string(*target);
      if (!r.holds()) r.corrections.push_back({{"payoff", *target}});
      break;
    }
    case QueryKind::highest_individual_payoff_for_choice:
    case QueryKind::lowest_individual_payoff_for_choice: {
      const auto& m = q.move(1);
      auto target = q.kind == QueryKind::highest_individual_payoff_for_choice ? best_payoff_for_choice(g, m)
                                                                              : worst_payoff_for_choice(g, m);
      set(q.payoff(0) == target);
      r.fields["payoff"] = std::to_string(q.payoff(0));
      r.fields["choice"] = m.value;
      r.fields["correct"] = std::to_string(target);
      if (!r.holds()) r.corrections.push_back({{"payoff", target}});
      break;
    }
    case QueryKind::highest_guaranteed_payoff_choice: {
      std::optional<std::int64_t> best;
      for (const auto& m : g.labels()) {
        auto v = guaranteed_payoff(g, m);
        if (!best || v > *best) best = v;
      }
      auto value = guaranteed_payoff(g, q.move(0));
      set(value == *best);
      r.fields["choice"] = q.move(0).value;
      r.fields["value"] = std::to_string(value);
      r.fields["correct_value"] = std::to_string(*best);
      if (!r.holds()) {
        std::vector<std::string> names;
        for (const auto& m : g.labels())
          if (guaranteed_payoff(g, m) == *best) {
            r.corrections.push_back({{"choice", m}});
            names.push_back(m.value);
          }
        r.fields["correct"] = detail::join_or(names);
      }
      break;
    }
    case QueryKind::higher_guaranteed_payoff: detail::guaranteed_order(r, g, true); break;
    case QueryKind::lower_guaranteed_payoff: detail::guaranteed_order(r, g, false); break;
    case QueryKind::highest_mutual_payoff: detail::mutual_extremum(r, g, true); break;
    case QueryKind::lowest_mutual_payoff: detail::mutual_extremum(r, g, false); break;
  }

  if (r.failed()) r.explanation = templates.render(r.template_key, r.fields);
  return r;
}

inline VerificationReport evaluate_all(std::span<const Query> queries, const game::GameSpec& g,
                                       const FeedbackTemplates& templates = FeedbackTemplates::defaults()) {
  VerificationReport report;
  for (const auto& q : queries) {
    auto r = evaluate_query(q, g, templates);
    if (r.failed()) report.failed.push_back(r);
    if (r.status == Status::error) ++report.errors;
    report.results.push_back(std::move(r));
  }
  return report;
}

/// Applies one correction alternative. Returns nothing for a relation
/// correction, which has no query form.
inline std::optional<Query> substitute(const Query& q, const Correction& c) {
  Query out = q;
  for (const auto& b : c) {
    if (std::holds_alternative<Relation>(b.value)) return std::nullopt;
    auto pos = q.position(b.role);
    if (!pos) throw std::invalid_argument("no parameter named " + b.role);
    if (auto* i = std::get_if<std::int64_t>(&b.value))
      out.args[*pos] = *i;
    else
      out.args[*pos] = std::get<MoveLabel>(b.value);
  }
  out.source_text = format_query(out);
  return out;
}

/// Feedback sentences for the failed queries, one per line.
inline std::string render_feedback(const VerificationReport& report,
                                   const FeedbackTemplates& templates = FeedbackTemplates::defaults()) {
  if (report.failed.empty()) throw EmptyFailureSet();
  std::string out;
  for (const auto& r : report.failed) {
    if (!out.empty()) out += '\n';
    out += templates.render(r.template_key, r.fields);
  }
  return out;
}

inline std::string correction_text(const CorrectionValue& v) {
  if (std::holds_alternative<Relation>(v)) return "equal";
  if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<MoveLabel>(v).value;
}

}  // namespace lelma::verify
