#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lelma/orchestrator/session.hpp"

namespace lelma::experiments {

using orchestrator::SessionTranscript;

// ---- attempts -------------------------------------------------------------

struct AttemptsHistogram {
  // Buckets 1..max_attempts, empty ones included.
  std::map<int, std::size_t> counts;
  // Aborted sessions and sessions that never got an attempt in.
  std::size_t excluded = 0;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : counts) n += c;
    return n;
  }
};

inline AttemptsHistogram attempts_distribution(const std::vector<SessionTranscript>& ts, int max_attempts = 5) {
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
  AttemptsHistogram h;
  for (int i = 1; i <= max_attempts; ++i) h.counts[i] = 0;
  for (const auto& t : ts) {
    const int n = static_cast<int>(t.attempts.size());
    if (t.aborted || n == 0) {
      ++h.excluded;
      continue;
    }
    if (n > max_attempts) throw std::invalid_argument("session " + t.session_id + " has more than max_attempts attempts");
    ++h.counts[n];
  }
  return h;
}

// ---- choices --------------------------------------------------------------

struct ChoiceRates {
  std::size_t sessions = 0;  // counted sessions
  std::size_t excluded = 0;  // aborted or without an extractable choice
  std::size_t initial = 0;   // sessions whose first choice was the tracked move
  std::size_t final = 0;

  double initial_percent() const { return sessions ? 100.0 * initial / sessions : 0.0; }
  double final_percent() const { return sessions ? 100.0 * final / sessions : 0.0; }
};

/// Share of sessions picking `tracked`, before and after the feedback loop,
/// per game.
inline std::map<std::string, ChoiceRates> choice_distribution(const std::vector<SessionTranscript>& ts,
                                                              const verify::MoveLabel& tracked = {"B"}) {
  std::map<std::string, ChoiceRates> out;
  for (const auto& t : ts) {
    auto& r = out[t.game];
    if (t.aborted || !t.initial_choice || !t.final_choice) {
      ++r.excluded;
      continue;
    }
    ++r.sessions;
    r.initial += *t.initial_choice == tracked;
    r.final += *t.final_choice == tracked;
  }
  return out;
}

inline std::string format_percent(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f%%", decimals, v);
  return buf;
}

// ---- human labels ---------------------------------------------------------

struct EvaluationLabel {
  std::string sample_id;
  std::string evaluator;
  bool correct = false;
};

class MissingLabels : public std::runtime_error {
 public:
  explicit MissingLabels(std::map<std::string, std::vector<std::string>> missing)
      : std::runtime_error(describe(missing)), missing_(std::move(missing)) {}
  // sample id -> evaluators without a label for it
  const std::map<std::string, std::vector<std::string>>& missing() const { return missing_; }

 private:
  static std::string describe(const std::map<std::string, std::vector<std::string>>& m) {
    std::string s = "missing labels for " + std::to_string(m.size()) + " sample(s):";
    for (const auto& [id, evs] : m) {
      s += " " + id + " (";
      for (std::size_t i = 0; i < evs.size(); ++i) s += (i ? ", " : "") + evs[i];
      s += ")";
    }
    return s;
  }
  std::map<std::string, std::vector<std::string>> missing_;
};

class DuplicateLabel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using LabelTable = std::map<std::string, std::map<std::string, bool>>;

inline LabelTable tabulate(const std::vector<EvaluationLabel>& labels, std::set<std::string>& evaluators) {
  LabelTable t;
  for (const auto& l : labels) {
    evaluators.insert(l.evaluator);
    if (!t[l.sample_id].emplace(l.evaluator, l.correct).second)
      throw DuplicateLabel("sample " + l.sample_id + " labelled twice by " + l.evaluator);
  }
  std::map<std::string, std::vector<std::string>> missing;
  for (const auto& [id, by] : t)
    for (const auto& e : evaluators)
      if (!by.count(e)) missing[id].push_back(e);
  if (!missing.empty()) throw MissingLabels(std::move(missing));
  return t;
}

}  // namespace detail

/// A sample counts as correct only when every evaluator said so.
inline std::map<std::string, bool> aggregate_labels(const std::vector<EvaluationLabel>& labels) {
  std::set<std::string> evaluators;
  std::map<std::string, bool> out;
  for (const auto& [id, by] : detail::tabulate(labels, evaluators)) {
    bool all = true;
    for (const auto& [_, v] : by) all &= v;
    out[id] = all;
  }
  return out;
}

/// Per-sample category counts (correct, incorrect), ready for fleiss_kappa.
inline std::vector<std::vector<int>> label_counts(const std::vector<EvaluationLabel>& labels) {
  std::set<std::string> evaluators;
  std::vector<std::vector<int>> out;
  for (const auto& [id, by] : detail::tabulate(labels, evaluators)) {
    int yes = 0;
    for (const auto& [_, v] : by) yes += v;
    out.push_back({yes, static_cast<int>(by.size()) - yes});
  }
  return out;
}

/// What the verifier said about each attempt: correct when no query failed.
inline std::string sample_id(const SessionTranscript& t, const orchestrator::AttemptRecord& a) {
  return t.session_id + "#" + std::to_string(a.index);
}

inline std::map<std::string, bool> predicted_labels(const std::vector<SessionTranscript>& ts) {
  std::map<std::string, bool> out;
  for (const auto& t : ts)
    for (const auto& a : t.attempts) out[sample_id(t, a)] = a.report.failed.empty();
  return out;
}

// ---- agreement ------------------------------------------------------------

class KeyMismatch : public std::invalid_argument {
 public:
  KeyMismatch(std::vector<std::string> only_actual, std::vector<std::string> only_predicted)
      : std::invalid_argument("sample ids differ: " + std::to_string(only_actual.size()) + " only labelled, " +
                              std::to_string(only_predicted.size()) + " only predicted" +
                              (only_actual.empty() ? "" : " (e.g. " + only_actual.front() + ")") +
                              (only_predicted.empty() ? "" : " (e.g. " + only_predicted.front() + ")")),
        only_actual_(std::move(only_actual)),
        only_predicted_(std::move(only_predicted)) {}
  const std::vector<std::string>& only_actual() const { return only_actual_; }
  const std::vector<std::string>& only_predicted() const { return only_predicted_; }

 private:
  std::vector<std::string> only_actual_, only_predicted_;
};

// Rows are the actual label, columns the prediction.
struct ConfusionMatrix {
  std::size_t tt = 0, tf = 0, ft = 0, ff = 0;

  std::size_t total() const { return tt + tf + ft + ff; }
  double accuracy() const { return total() ? static_cast<double>(tt + ff) / total() : 0.0; }
  // Whole percent, only for display.
  long accuracy_percent() const { return std::lround(100.0 * accuracy()); }
};

inline ConfusionMatrix confusion_matrix(const std::map<std::string, bool>& actual, const std::map<std::string, bool>& predicted) {
  std::vector<std::string> only_a, only_p;
  for (const auto& [k, _] : actual)
    if (!predicted.count(k)) only_a.push_back(k);
  for (const auto& [k, _] : predicted)
    if (!actual.count(k)) only_p.push_back(k);
  if (!only_a.empty() || !only_p.empty()) throw KeyMismatch(std::move(only_a), std::move(only_p));
  ConfusionMatrix m;
  for (const auto& [k, a] : actual) {
    const bool p = predicted.at(k);
    (a ? (p ? m.tt : m.tf) : (p ? m.ft : m.ff))++;
  }
  return m;
}

class RaggedMatrix : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateAgreement : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fleiss' kappa over a samples x categories count matrix; every row must
/// sum to the same number of raters.
inline double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.empty()) throw RaggedMatrix("no samples");
  const std::size_t k = counts.front().size();
  if (k == 0) throw RaggedMatrix("no categories");
  long n = -1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != k) throw RaggedMatrix("row " + std::to_string(i) + " has a different number of categories");
    long s = 0;
    for (int c : counts[i]) {
      if (c < 0) throw RaggedMatrix("row " + std::to_string(i) + " has a negative count");
      s += c;
    }
    if (n < 0) n = s;
    if (s != n) throw RaggedMatrix("row " + std::to_string(i) + " has " + std::to_string(s) + " ratings, expected " + std::to_string(n));
  }
  if (n < 2) throw RaggedMatrix("at least two raters per sample are needed");

  const double N = static_cast<double>(counts.size()), nn = static_cast<double>(n);
  std::vector<double> p(k, 0.0);
  double pbar = 0.0;
  for (const auto& row : counts) {
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      p[j] += row[j];
      sq += static_cast<double>(row[j]) * row[j];
    }
    pbar += (sq - nn) / (nn * (nn - 1));
  }
  pbar /= N;
  double pe = 0.0;
  for (double& pj : p) {
    pj /= N * nn;
    pe += pj * pj;
  }
  if (std::abs(1.0 - pe) < 1e-12) throw DegenerateAgreement("every rating falls in one category, kappa is undefined");
  return (pbar - pe) / (1.0 - pe);
}

}  // namespace lelma::experiments
