#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lelma/logic/clause.hpp"
#include "lelma/logic/substitution.hpp"

namespace lelma::logic {

struct ResolutionLimits {
  std::size_t max_steps = 100'000;
  std::size_t max_depth = 512;
};

class SolveError : public std::runtime_error {
 public:
  enum class Kind { limit_exceeded, floundered_negation, unknown_predicate };

  SolveError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Depth-first, left-to-right SLD resolution with negation as failure.
///
/// Answers are produced lazily by next(), in clause-source order, each one
/// restricted to the named variables of the goal. Builtins are ground/1 and
/// =/2; every other goal must name a predicate defined in the rule base.
/// A negated goal must be ground when selected.
///
/// The rule base must outlive the solver.
class Solver {
 public:
  Solver(const RuleBase& rules, std::vector<Literal> goal, ResolutionLimits limits = {})
      : rules_(rules), limits_(limits), steps_(std::make_shared<std::size_t>(0)) {
    if (goal.empty()) throw std::invalid_argument("goal must not be empty");
    for (const auto& lit : goal) collect_variables(lit.term, goal_vars_);
    std::erase_if(goal_vars_, [](const Variable& v) { return v.anonymous(); });
    push_body(goal, 0);
  }

  std::optional<Substitution> next() {
    if (exhausted_) return std::nullopt;
    if (started_ && !backtrack()) return finish();
    started_ = true;
    for (;;) {
      if (!goals_) return answer();
      auto node = goals_;
      goals_ = node->next;
      if (!execute(*node) && !backtrack()) return finish();
    }
  }

  // Resolution steps consumed so far, including nested negation calls.
  std::size_t steps() const { return *steps_; }

 private:
  struct GoalNode {
    Literal literal;
    std::size_t depth;
    std::shared_ptr<const GoalNode> next;
  };
  using GoalList = std::shared_ptr<const GoalNode>;

  struct ChoicePoint {
    GoalList continuation;
    Term goal;
    std::size_t depth;
    const std::vector<std::size_t>* candidates;
    std::size_t next_alternative;
    std::size_t trail_mark;
  };

  Solver(const RuleBase& rules, Literal goal, ResolutionLimits limits, std::shared_ptr<std::size_t> steps, std::size_t depth)
      : rules_(rules), limits_(limits), steps_(std::move(steps)) {
    push_body(std::vector<Literal>{std::move(goal)}, depth);
  }

  std::optional<Substitution> finish() {
    exhausted_ = true;
    choices_.clear();
    goals_.reset();
    return std::nullopt;
  }

  std::optional<Substitution> answer() const {
    Substitution s;
    for (const auto& v : goal_vars_) s.bind(v, resolve(Term::var(v), bindings_));
    return s;
  }

  void push_body(const std::vector<Literal>& body, std::size_t depth) {
    for (auto it = body.rbegin(); it != body.rend(); ++it)
      goals_ = std::make_shared<const GoalNode>(GoalNode{*it, depth, goals_});
  }

  void count_step() {
    if (++*steps_ > limits_.max_steps)
      throw SolveError(SolveError::Kind::limit_exceeded,
                       "resolution step budget of " + std::to_string(limits_.max_steps) + " exhausted");
  }

  bool execute(const GoalNode& node) {
    count_step();
    const Term& t = node.literal.term;
    switch (node.literal.kind) {
      case LiteralKind::ground: return resolve(t.arg(0), bindings_).is_ground();
      case LiteralKind::unify: return unify_in(t.arg(0), t.arg(1), bindings_);
      case LiteralKind::negative: return !provable(node);
      case LiteralKind::positive: return call(node);
    }
    return false;
  }

  bool provable(const GoalNode& node) {
    Term g = resolve(node.literal.term, bindings_);
    if (!g.is_ground())
      throw SolveError(SolveError::Kind::floundered_negation, "negated goal is not ground when called: \\+ " + g.to_string());
    if (node.depth + 1 > limits_.max_depth) throw depth_exceeded();
    Solver sub(rules_, Literal::from_term(g), limits_, steps_, node.depth + 1);
    return sub.next().has_value();
  }

  bool call(const GoalNode& node) {
    Term g = walk(node.literal.term, bindings_);
    if (!g.is_callable())
      throw SolveError(SolveError::Kind::unknown_predicate, "goal is not callable: " + g.to_string());
    const auto* candidates = rules_.lookup(predicate_key(g));
    if (!candidates) throw SolveError(SolveError::Kind::unknown_predicate, "unknown predicate " + predicate_key(g));
    if (node.depth + 1 > limits_.max_depth) throw depth_exceeded();
    choices_.push_back(ChoicePoint{goals_, std::move(g), node.depth, candidates, 0, bindings_.mark()});
    return try_alternatives();
  }

  // Tries the remaining clauses of the newest choice point. The point is
  // dropped before its last alternative runs.
  bool try_alternatives() {
    ChoicePoint& cp = choices_.back();
    while (cp.next_alternative < cp.candidates->size()) {
      const std::size_t idx = (*cp.candidates)[cp.next_alternative++];
      count_step();
      bindings_.undo(cp.trail_mark);
      goals_ = cp.continuation;
      Clause c = rename_apart(rules_.clause(idx), counter_);
      if (!unify_in(cp.goal, c.head, bindings_)) continue;
      const std::size_t depth = cp.depth + 1;
      if (cp.next_alternative == cp.candidates->size()) choices_.pop_back();
      push_body(c.body, depth);
      return true;
    }
    bindings_.undo(cp.trail_mark);
    choices_.pop_back();
    return false;
  }

  bool backtrack() {
    while (!choices_.empty())
      if (try_alternatives()) return true;
    return false;
  }

  SolveError depth_exceeded() const {
    return SolveError(SolveError::Kind::limit_exceeded,
                      "resolution depth limit of " + std::to_string(limits_.max_depth) + " exceeded");
  }

  const RuleBase& rules_;
  ResolutionLimits limits_;
  std::shared_ptr<std::size_t> steps_;
  std::vector<Variable> goal_vars_;
  TrailedBindings bindings_;
  RenameCounter counter_;
  GoalList goals_;
  std::vector<ChoicePoint> choices_;
  bool started_ = false;
  bool exhausted_ = false;
};

inline std::vector<Substitution> solve_all(const RuleBase& rules, std::vector<Literal> goal, ResolutionLimits limits = {},
                                           std::size_t max_answers = static_cast<std::size_t>(-1)) {
  Solver solver(rules, std::move(goal), limits);
  std::vector<Substitution> out;
  while (out.size() < max_answers) {
    auto s = solver.next();
    if (!s) break;
    out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace lelma::logic
