#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lelma/game/game_spec.hpp"
#include "lelma/llm/gateway.hpp"
#include "lelma/logic/parser.hpp"
#include "lelma/verify/query.hpp"

namespace lelma::translator {

using verify::Query;
using verify::QueryKind;

// Same text as resources/translation_prompt.txt. The `---` line splits the
// system message from the user message.
inline constexpr const char* kDefaultTranslationPrompt = R"(
You turn statements about a two-player game into logic queries.
"you" is the player who wrote the text and "them" is the other player.
The only choices in the game are {labels}.
Every statement in the text that matches one of the templates below becomes one query.

Templates:
{catalogue}

Output rules:
- One query per line, written exactly in the template syntax.
- Arguments are the choice labels {labels} or plain integers.
- No prose, numbering, explanations or code fences.
- If nothing in the text matches a template, answer with the single line NONE.
---
Translate the statements in the following text:
<reasoning>
{reasoning}
</reasoning>
)";

inline std::string default_prompt_template() { return std::string(kDefaultTranslationPrompt).substr(1); }

struct TranslationPrompt {
  std::vector<llm::ChatMessage> messages;
};

struct SkippedLine {
  std::size_t line = 0;
  std::string text;
  std::string reason;
};

struct ParseDiagnostics {
  std::vector<SkippedLine> skipped_lines;
  std::size_t parsed_count = 0;
};

struct ParsedQueries {
  std::vector<Query> queries;
  ParseDiagnostics diagnostics;
};

namespace detail {

inline std::string fill(std::string text, const std::string& key, const std::string& value) {
  const std::string token = "{" + key + "}";
  for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size()))
    text.replace(pos, token.size(), value);
  return text;
}

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline std::string labels_text(const game::GameSpec& g) {
  auto labels = g.labels();
  std::sort(labels.begin(), labels.end());
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += i + 1 == labels.size() ? " and " : ", ";
    out += labels[i].value;
  }
  return out;
}

inline std::string catalogue_text() {
  std::string out;
  for (const auto& s : verify::catalogue()) {
    if (!out.empty()) out += '\n';
    out += std::string(s.example) + "\n    " + std::string(s.meaning);
  }
  return out;
}

// Bullets, numbering, backticks and a closing period or semicolon.
inline std::string strip_decoration(std::string line) {
  line = trim(line);
  if (line.size() >= 2 && (line[0] == '-' || line[0] == '*' || line[0] == '+') && line[1] == ' ') line = trim(line.substr(2));
  std::size_t digits = 0;
  while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
  if (digits > 0 && digits + 1 < line.size() && (line[digits] == '.' || line[digits] == ')') && line[digits + 1] == ' ')
    line = trim(line.substr(digits + 2));
  while (!line.empty() && line.front() == '`') line.erase(line.begin());
  while (!line.empty() && line.back() == '`') line.pop_back();
  line = trim(line);
  while (!line.empty() && (line.back() == '.' || line.back() == ';')) line.pop_back();
  return trim(line);
}

// A label written as B, 'B' or "B"; the parser reads bare B as a variable.
inline std::optional<verify::MoveLabel> label_arg(const logic::Term& t) {
  if (t.is_atom()) return verify::MoveLabel{t.name()};
  if (t.is_var() && t.variable().ordinal == 0 && t.variable().name.rfind("_@", 0) != 0)
    return verify::MoveLabel{t.variable().name};
  return std::nullopt;
}

// Error text, or empty when every argument fits the signature.
inline std::string read_args(Query& q, std::span<const logic::Term> args, const game::GameSpec& g) {
  const auto& params = verify::signature(q.kind).params;
  if (args.size() != params.size())
    return "wrong number of arguments for " + std::string(verify::kind_name(q.kind)) + ": expected " +
           std::to_string(params.size()) + ", got " + std::to_string(args.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].type == verify::ParamType::payoff) {
      if (!args[i].is_integer()) return std::string(params[i].role) + " must be an integer, got " + args[i].to_string();
      q.args.emplace_back(args[i].value());
    } else {
      auto m = label_arg(args[i]);
      if (!m) return std::string(params[i].role) + " must be a choice label, got " + args[i].to_string();
      if (!g.has_label(*m)) return "unknown choice label '" + m->value + "'";
      q.args.emplace_back(*m);
    }
  }
  return {};
}

inline bool is_player(const logic::Term& t, const std::string& word, const std::string& role) {
  return t.is_atom() && (t.name() == word || t.name() == role);
}

inline std::string read_query(const logic::Term& t, const game::GameSpec& g, Query& q) {
  if (!t.is_compound()) return "not a query: " + t.to_string();
  if (t.name() == "finally") {
    if (t.arity() != 2 || !t.arg(0).is_compound() || t.arg(0).name() != "outcome" || t.arg(0).arity() != 6)
      return "finally/2 must wrap outcome/6";
    if (!t.arg(1).is_var()) return "the situation argument of finally/2 must be a variable";
    const auto& o = t.arg(0);
    if (!is_player(o.arg(0), "you", g.roles().reasoner)) return "first player in outcome must be you";
    if (!is_player(o.arg(3), "them", g.roles().opponent)) return "second player in outcome must be them";
    if (!o.arg(5).is_var()) return "the opponent payoff in outcome must be left open";
    q.kind = QueryKind::outcome;
    const std::vector<logic::Term> moved{o.arg(1), o.arg(2), o.arg(4)};
    return read_args(q, moved, g);
  }
  auto kind = verify::kind_from_name(t.name());
  if (!kind || *kind == QueryKind::outcome) return "unknown predicate " + t.name() + "/" + std::to_string(t.arity());
  q.kind = *kind;
  return read_args(q, t.args(), g);
}

}  // namespace detail

/// System message: instructions and the template catalogue; user message: the reasoning.
inline TranslationPrompt build_translation_prompt(const std::string& reasoning, const game::GameSpec& g,
                                                  const std::string& prompt_template = default_prompt_template()) {
  std::string text = detail::fill(prompt_template, "labels", detail::labels_text(g));
  text = detail::fill(text, "catalogue", detail::catalogue_text());
  std::string system = text, user = "{reasoning}";
  auto sep = text.find("\n---\n");
  if (sep != std::string::npos) {
    system = text.substr(0, sep + 1);
    user = text.substr(sep + 5);
  }
  // Filled last so that braces inside the reasoning are left alone.
  user = detail::fill(user, "reasoning", reasoning);
  TranslationPrompt p;
  p.messages.push_back({llm::Role::system, detail::trim(system)});
  p.messages.push_back({llm::Role::user, detail::trim(user)});
  return p;
}

/// One query per line; anything else is recorded in the diagnostics.
inline ParsedQueries parse_queries(const std::string& llm_output, const game::GameSpec& g) {
  ParsedQueries out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= llm_output.size()) {
    auto end = llm_output.find('\n', start);
    if (end == std::string::npos) end = llm_output.size();
    const std::string raw = llm_output.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const std::string line = detail::strip_decoration(raw);
    if (line.empty() || line == "NONE" || line.rfind("```", 0) == 0) continue;
    auto skip = [&](std::string reason) {
      out.diagnostics.skipped_lines.push_back({line_no, detail::trim(raw), std::move(reason)});
    };
    std::optional<logic::Term> term;
    try {
      term = logic::parse_term(line, logic::ParseOptions{true});
    } catch (const logic::ParseError& e) {
      skip(std::string("not in query syntax: ") + e.what());
      continue;
    }
    Query q;
    if (auto err = detail::read_query(*term, g, q); !err.empty()) {
      skip(err);
      continue;
    }
    q.source_text = detail::trim(raw);
    out.queries.push_back(std::move(q));
    ++out.diagnostics.parsed_count;
  }
  return out;
}

struct Translation {
  TranslationPrompt prompt;
  llm::CompletionResult completion;
  ParsedQueries parsed;
};

inline Translation translate(const std::string& reasoning, const game::GameSpec& g, llm::Gateway& gateway,
                             const llm::ModelConfig& cfg, const std::string& prompt_template = default_prompt_template()) {
  Translation t;
  t.prompt = build_translation_prompt(reasoning, g, prompt_template);
  t.completion = gateway.complete(cfg, t.prompt.messages);
  t.parsed = parse_queries(t.completion.text, g);
  return t;
}

}  // namespace lelma::translator
