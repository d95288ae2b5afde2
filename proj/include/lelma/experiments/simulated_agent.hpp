#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lelma/experiments/config.hpp"
#include "lelma/llm/cassette.hpp"
#include "lelma/llm/providers.hpp"

namespace lelma::experiments {

// Offline stand-in for a reasoning model. It reads the payoff sentences
// out of the prompt, says a few checkable things about the game (some of
// them wrong, less often on later attempts) and picks a move.
class SimulatedReasoner {
 public:
  SimulatedReasoner(std::uint64_t seed, MockSettings settings) : rng_(seed), settings_(settings) {
    cooperative_ = uniform() < 0.5;
  }

  std::string respond(const std::vector<llm::ChatMessage>& messages) {
    std::lock_guard lock(mu_);
    ++calls_;
    const std::string& prompt = messages.back().content;
    read_table(prompt);
    if (labels_.empty()) return "I could not make sense of the rules.\nCHOICE: R";
    if (uniform() < settings_.vague_rate) {
      const auto& pick = labels_[pick_index(labels_.size())];
      return "Hard to say what the other player will do, so I just go with my gut.\nCHOICE: " + pick;
    }
    double p = settings_.error_rate;
    for (int i = 1; i < calls_; ++i) p *= settings_.decay;
    return reason(p);
  }

  int calls() const { return calls_; }

 private:
  using Cell = std::pair<std::int64_t, std::int64_t>;

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::size_t pick_index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  static std::int64_t money(const std::string& s) {
    const bool neg = s[0] == '-';
    return (neg ? -1 : 1) * std::stoll(s.substr(neg ? 2 : 1));
  }

  void read_table(const std::string& prompt) {
    static const std::regex both(R"(If you both pick (\w+), you each get (-?\$\d+)\.)");
    static const std::regex both_split(R"(If you both pick (\w+), you get (-?\$\d+) and they get (-?\$\d+)\.)");
    static const std::regex mixed(R"(If you pick (\w+) and they pick (\w+), you get (-?\$\d+) and they get (-?\$\d+)\.)");
    table_.clear();
    labels_.clear();
    auto add_label = [&](const std::string& l) {
      if (std::find(labels_.begin(), labels_.end(), l) == labels_.end()) labels_.push_back(l);
    };
    auto scan = [&](const std::regex& re, auto&& fn) {
      for (auto it = std::sregex_iterator(prompt.begin(), prompt.end(), re); it != std::sregex_iterator(); ++it) fn(*it);
    };
    // Only the rules block up front counts; the previous answer quoted in a
    // feedback prompt uses different phrasing.
    scan(both, [&](const std::smatch& x) {
      add_label(x[1]);
      table_[{x[1], x[1]}] = {money(x[2]), money(x[2])};
    });
    scan(both_split, [&](const std::smatch& x) {
      add_label(x[1]);
      table_[{x[1], x[1]}] = {money(x[2]), money(x[3])};
    });
    scan(mixed, [&](const std::smatch& x) {
      add_label(x[1]);
      add_label(x[2]);
      table_[{x[1], x[2]}] = {money(x[3]), money(x[4])};
    });
    std::sort(labels_.begin(), labels_.end());
    for (const auto& a : labels_)
      for (const auto& b : labels_)
        if (!table_.count({a, b})) {
          labels_.clear();
          return;
        }
  }

  std::int64_t worst(const std::string& me) const {
    std::int64_t v = table_.at({me, labels_[0]}).first;
    for (const auto& o : labels_) v = std::min(v, table_.at({me, o}).first);
    return v;
  }

  std::int64_t best(const std::string& me) const {
    std::int64_t v = table_.at({me, labels_[0]}).first;
    for (const auto& o : labels_) v = std::max(v, table_.at({me, o}).first);
    return v;
  }

  std::string other(const std::string& l) {
    std::vector<std::string> rest;
    for (const auto& x : labels_)
      if (x != l) rest.push_back(x);
    return rest.empty() ? l : rest[pick_index(rest.size())];
  }

  std::int64_t nudge(std::int64_t v) { return v + 1 + static_cast<std::int64_t>(pick_index(3)); }

  std::string amount(std::int64_t v) { return v < 0 ? "-$" + std::to_string(-v) : "$" + std::to_string(v); }

  std::string reason(double p) {
    std::vector<std::string> lines;
    auto wrong = [&] { return uniform() < p; };

    const std::string me = labels_[pick_index(labels_.size())];
    const std::string them = labels_[pick_index(labels_.size())];
    std::int64_t u = table_.at({me, them}).first;
    if (wrong()) u = nudge(u);
    lines.push_back("If I pick " + me + " and they pick " + them + ", I get " + amount(u) + ".");

    std::string safe = labels_[0];
    for (const auto& l : labels_)
      if (worst(l) > worst(safe)) safe = l;
    if (wrong()) safe = other(safe);
    lines.push_back("Picking " + safe + " guarantees me the most.");

    const std::string c = labels_[pick_index(labels_.size())];
    std::int64_t top = best(c);
    if (wrong()) top = nudge(top);
    lines.push_back("The most I can get by picking " + c + " is " + amount(top) + ".");

    std::pair<std::string, std::string> joint{labels_[0], labels_[0]};
    auto sum = [&](const std::pair<std::string, std::string>& k) { return table_.at(k).first + table_.at(k).second; };
    for (const auto& a : labels_)
      for (const auto& b : labels_)
        if (sum({a, b}) > sum(joint)) joint = {a, b};
    if (wrong()) joint = {other(joint.first), other(joint.second)};
    lines.push_back("Together we earn the most if I pick " + joint.first + " and they pick " + joint.second + ".");

    if (uniform() < 0.5) {
      std::int64_t hi = table_.at({me, them}).first, lo = worst(me);
      if (hi < lo) std::swap(hi, lo);
      if (hi != lo) {
        if (wrong()) std::swap(hi, lo);
        lines.push_back(amount(hi) + " is more than " + amount(lo) + ".");
      }
    }

    std::string choice = cooperative_ ? joint.first : safe;
    std::string out = "Let me think about what the other player is likely to do.\n";
    for (const auto& l : lines) out += l + "\n";
    out += cooperative_ ? "I would rather we both do well.\n" : "I want to be safe whatever they do.\n";
    return out + "CHOICE: " + choice;
  }

  std::mutex mu_;
  std::mt19937_64 rng_;
  MockSettings settings_;
  bool cooperative_ = false;
  int calls_ = 0;
  std::vector<std::string> labels_;
  std::map<std::pair<std::string, std::string>, Cell> table_;
};

// Offline stand-in for the translating model: turns the reasoner's fixed
// phrasings into queries, one per line.
inline std::string simulated_translation(const std::vector<llm::ChatMessage>& messages) {
  const std::string& prompt = messages.back().content;
  const auto open = prompt.find("<reasoning>");
  const auto close = prompt.rfind("</reasoning>");
  if (open == std::string::npos || close == std::string::npos || close < open) return "NONE";
  const std::string text = prompt.substr(open + 11, close - open - 11);

  static const std::string money = R"((-?)\$(\d+))";
  static const std::regex outcome("If I pick (\\w+) and they pick (\\w+), I get " + money + "\\.");
  static const std::regex guaranteed(R"(Picking (\w+) guarantees me the most\.)");
  static const std::regex most_for("The most I can get by picking (\\w+) is " + money + "\\.");
  static const std::regex mutual(R"(Together we earn the most if I pick (\w+) and they pick (\w+)\.)");
  static const std::regex more(money + " is more than " + money + "\\.");

  auto num = [](const std::smatch& m, int sign, int digits) { return m[sign].str() + m[digits].str(); };
  std::string out;
  std::smatch m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (std::regex_search(line, m, outcome))
      out += "finally(outcome(you," + m[1].str() + "," + num(m, 3, 4) + ",them," + m[2].str() + ",_),S)\n";
    else if (std::regex_search(line, m, guaranteed))
      out += "highest_guaranteed_payoff_choice(" + m[1].str() + ")\n";
    else if (std::regex_search(line, m, most_for))
      out += "highest_individual_payoff_for_choice(" + num(m, 2, 3) + "," + m[1].str() + ")\n";
    else if (std::regex_search(line, m, mutual))
      out += "highest_mutual_payoff(" + m[1].str() + "," + m[2].str() + ")\n";
    else if (std::regex_search(line, m, more))
      out += "higher(" + num(m, 1, 2) + "," + num(m, 3, 4) + ")\n";
  }
  return out.empty() ? "NONE" : out;
}

struct SimulatedPair {
  std::shared_ptr<llm::ChatProvider> reasoner;
  std::shared_ptr<llm::ChatProvider> translator;
};

inline std::uint64_t session_seed(std::uint64_t seed, const std::string& game, int repetition) {
  return llm::fnv1a64(std::to_string(seed) + "/" + game + "/" + std::to_string(repetition));
}

inline SimulatedPair make_simulated_pair(std::uint64_t seed, const MockSettings& settings) {
  auto agent = std::make_shared<SimulatedReasoner>(seed, settings);
  return {std::make_shared<llm::MockProvider>(
              [agent](const llm::ModelConfig&, const std::vector<llm::ChatMessage>& m) { return agent->respond(m); }),
          std::make_shared<llm::MockProvider>(
              [](const llm::ModelConfig&, const std::vector<llm::ChatMessage>& m) { return simulated_translation(m); })};
}

}  // namespace lelma::experiments
