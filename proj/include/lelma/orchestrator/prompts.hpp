#pragma once

#include <cctype>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "lelma/game/game_spec.hpp"
#include "lelma/verify/evaluate.hpp"

namespace lelma::orchestrator {

using verify::MoveLabel;

namespace detail {

inline std::string dollars(std::int64_t v) { return v < 0 ? "-$" + std::to_string(-v) : "$" + std::to_string(v); }

// Standard order: first-row label first, the matrix is never inverted.
inline std::vector<MoveLabel> label_order(const game::GameSpec& g) {
  std::vector<MoveLabel> out;
  for (const auto& row : g.payoffs().moves_row)
    if (auto l = g.label_for(row)) out.push_back(*l);
  return out;
}

inline std::string options_text(const std::vector<MoveLabel>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += i + 1 == labels.size() ? " or " : ", ";
    out += labels[i].value;
  }
  return out;
}

}  // namespace detail

/// One sentence per move pair, e.g. "If you both pick R, you each get $1."
inline std::vector<std::string> payoff_sentences(const game::GameSpec& g) {
  std::vector<std::string> out;
  const auto labels = detail::label_order(g);
  for (const auto& me : labels)
    for (const auto& them : labels) {
      const auto& p = g.payoff(me, them);
      std::string s = me == them ? "If you both pick " + me.value : "If you pick " + me.value + " and they pick " + them.value;
      if (me == them && p.row == p.col)
        s += ", you each get " + detail::dollars(p.row) + ".";
      else
        s += ", you get " + detail::dollars(p.row) + " and they get " + detail::dollars(p.col) + ".";
      out.push_back(std::move(s));
    }
  return out;
}

inline std::string rules_text(const game::GameSpec& g) {
  const auto labels = detail::label_order(g);
  std::string out = "You are playing a game against one other player. Each of you picks one option, " +
                    detail::options_text(labels) + ", without knowing what the other picks.\n";
  for (const auto& s : payoff_sentences(g)) out += s + "\n";
  return out;
}

inline std::string choice_instruction(const game::GameSpec& g) {
  const auto labels = detail::label_order(g);
  std::string out = "Finish with a last line of exactly the form ";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += " or ";
    out += "\"CHOICE: " + labels[i].value + "\"";
  }
  return out + ".";
}

inline std::string build_instruction_prompt(const game::GameSpec& g) {
  return rules_text(g) +
         "Decide what you pick, explaining your thinking step by step. Please perform reasoning as a human player "
         "would.\n" +
         choice_instruction(g) + "\n";
}

inline std::string build_feedback_prompt(const std::string& previous_reasoning, const verify::VerificationReport& report,
                                         const game::GameSpec& g,
                                         const verify::FeedbackTemplates& templates = verify::FeedbackTemplates::defaults()) {
  const std::string feedback = verify::render_feedback(report, templates);
  std::string bullets;
  std::size_t start = 0;
  while (start <= feedback.size()) {
    auto end = feedback.find('\n', start);
    if (end == std::string::npos) end = feedback.size();
    bullets += "- " + feedback.substr(start, end - start) + "\n";
    start = end + 1;
  }
  return rules_text(g) + "\nThis was your previous answer:\n<previous_answer>\n" + previous_reasoning +
         "\n</previous_answer>\n\nSome statements in it are not correct:\n" + bullets +
         "\nReassess your reasoning with these corrections in mind and decide again. Please perform reasoning as a "
         "human player would.\n" +
         choice_instruction(g) + "\n";
}

/// The last "CHOICE: X" line wins; failing that, the last standalone B or R.
inline std::optional<MoveLabel> extract_choice(const std::string& reasoning) {
  static const std::regex structured(R"((^|[^A-Za-z0-9_])choice[\s*_`]*:[\s*_`'"]*([BR])(?![A-Za-z0-9_]))",
                                     std::regex::icase);
  static const std::regex standalone(R"((^|[^A-Za-z0-9_])([BR])(?![A-Za-z0-9_]))");
  std::optional<MoveLabel> found;
  for (auto it = std::sregex_iterator(reasoning.begin(), reasoning.end(), structured); it != std::sregex_iterator(); ++it) {
    std::string v = (*it)[2].str();
    v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
    found = MoveLabel{v};
  }
  if (found) return found;
  for (auto it = std::sregex_iterator(reasoning.begin(), reasoning.end(), standalone); it != std::sregex_iterator(); ++it)
    found = MoveLabel{(*it)[2].str()};
  return found;
}

}  // namespace lelma::orchestrator
