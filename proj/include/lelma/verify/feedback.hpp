#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lelma/game/game_spec.hpp"

namespace lelma::verify {

// Same text as resources/feedback_templates.txt; a test keeps the two in sync.
inline constexpr const char* kDefaultFeedbackTemplates = R"(
# Feedback sentences for failed verification queries.
# Each line is `key = template`; {name} is replaced with a value from the failed query.
outcome = If you pick {choice} and they pick {opponent_choice}, your payoff is {actual}, not {payoff}.
higher = {a} is not higher than {b}: {b} is higher than {a}.
higher.equal = {a} is not higher than {b}: the two amounts are equal.
lower = {a} is not lower than {b}: {b} is lower than {a}.
lower.equal = {a} is not lower than {b}: the two amounts are equal.
highest_possible_individual_payoff = {payoff} is not the highest payoff you can get: the highest payoff possible for you is {correct}.
lowest_possible_individual_payoff = {payoff} is not the lowest payoff you can get: the lowest payoff possible for you is {correct}.
highest_individual_payoff_for_choice = {payoff} is not the highest payoff you can get by picking {choice}: the most you can get with {choice} is {correct}.
lowest_individual_payoff_for_choice = {payoff} is not the lowest payoff you can get by picking {choice}: the least you can get with {choice} is {correct}.
highest_guaranteed_payoff_choice = {choice} is not the choice with the highest guaranteed payoff: {correct} guarantees you at least {correct_value}, while {choice} only guarantees {value}.
higher_guaranteed_payoff = {first} does not guarantee a higher payoff than {second}: {first} guarantees you {first_value} and {second} guarantees you {second_value}.
lower_guaranteed_payoff = {first} does not guarantee a lower payoff than {second}: {first} guarantees you {first_value} and {second} guarantees you {second_value}.
highest_mutual_payoff = You picking {choice} and them picking {opponent_choice} does not give the highest total payoff: it gives {value} in total, while the highest total is {correct_value}, reached by {correct}.
lowest_mutual_payoff = You picking {choice} and them picking {opponent_choice} does not give the lowest total payoff: it gives {value} in total, while the lowest total is {correct_value}, reached by {correct}.
)";

class TemplateError : public std::runtime_error {
 public:
  TemplateError(std::size_t line, const std::string& msg)
      : std::runtime_error("feedback templates line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Placeholders each sentence may use.
inline const std::map<std::string, std::set<std::string>>& template_fields() {
  static const std::map<std::string, std::set<std::string>> fields{
      {"outcome", {"query", "choice", "opponent_choice", "payoff", "actual"}},
      {"higher", {"query", "a", "b"}},
      {"higher.equal", {"query", "a", "b"}},
      {"lower", {"query", "a", "b"}},
      {"lower.equal", {"query", "a", "b"}},
      {"highest_possible_individual_payoff", {"query", "payoff", "correct"}},
      {"lowest_possible_individual_payoff", {"query", "payoff", "correct"}},
      {"highest_individual_payoff_for_choice", {"query", "payoff", "choice", "correct"}},
      {"lowest_individual_payoff_for_choice", {"query", "payoff", "choice", "correct"}},
      {"highest_guaranteed_payoff_choice", {"query", "choice", "value", "correct", "correct_value"}},
      {"higher_guaranteed_payoff", {"query", "first", "second", "first_value", "second_value"}},
      {"lower_guaranteed_payoff", {"query", "first", "second", "first_value", "second_value"}},
      {"highest_mutual_payoff", {"query", "choice", "opponent_choice", "value", "correct", "correct_value"}},
      {"lowest_mutual_payoff", {"query", "choice", "opponent_choice", "value", "correct", "correct_value"}},
  };
  return fields;
}

using Fields = std::map<std::string, std::string>;

class FeedbackTemplates {
 public:
  static FeedbackTemplates parse(std::string_view text) {
    FeedbackTemplates t;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
      };
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw TemplateError(no, "expected `key = template`");
      std::string key = trim(line.substr(0, eq));
      std::string body = trim(line.substr(eq + 1));
      auto allowed = template_fields().find(key);
      if (allowed == template_fields().end()) throw TemplateError(no, "unknown template '" + key + "'");
      if (t.text_.count(key)) throw TemplateError(no, "template '" + key + "' defined twice");
      for (const auto& name : placeholders(body, no))
        if (!allowed->second.count(name)) throw TemplateError(no, "placeholder {" + name + "} not available for " + key);
      t.text_[key] = body;
    }
    for (const auto& [key, _] : template_fields())
      if (!t.text_.count(key)) throw TemplateError(no, "missing template '" + key + "'");
    return t;
  }

  static FeedbackTemplates load(const std::filesystem::path& path) { return parse(game::read_text_file(path)); }

  static const FeedbackTemplates& defaults() {
    static const FeedbackTemplates t = parse(kDefaultFeedbackTemplates);
    return t;
  }

  const std::string& text(const std::string& key) const { return text_.at(key); }

  std::string render(const std::string& key, const Fields& fields) const {
    const std::string& body = text(key);
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '{') {
        auto close = body.find('}', i);
        out += fields.at(body.substr(i + 1, close - i - 1));
        i = close;
      } else {
        out += body[i];
      }
    }
    return out;
  }

 private:
  static std::vector<std::string> placeholders(const std::string& body, std::size_t line) {
    std::vector<std::string> out;
    for (std::size_t i = body.find('{'); i != std::string::npos; i = body.find('{', i + 1)) {
      auto close = body.find('}', i);
      if (close == std::string::npos) throw TemplateError(line, "unclosed '{'");
      out.push_back(body.substr(i + 1, close - i - 1));
    }
    return out;
  }

  std::map<std::string, std::string> text_;
};

}  // namespace lelma::verify
