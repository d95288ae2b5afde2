#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "lelma/game/game_spec.hpp"
#include "lelma/llm/gateway.hpp"
#include "lelma/orchestrator/prompts.hpp"
#include "lelma/translator/translator.hpp"
#include "lelma/verify/evaluate.hpp"

namespace lelma::orchestrator {

enum class ExitReason { none, no_queries, all_true, max_attempts };

inline std::string_view exit_name(ExitReason e) {
  switch (e) {
    case ExitReason::none: return "none";
    case ExitReason::no_queries: return "no_queries";
    case ExitReason::all_true: return "all_true";
    case ExitReason::max_attempts: return "max_attempts";
  }
  return "none";
}

inline ExitReason exit_from_name(std::string_view s) {
  if (s == "no_queries") return ExitReason::no_queries;
  if (s == "all_true") return ExitReason::all_true;
  if (s == "max_attempts") return ExitReason::max_attempts;
  return ExitReason::none;
}

struct LoopConfig {
  int max_attempts = 5;
  llm::ModelConfig reasoner;
  llm::ModelConfig translator;

  void validate() const {
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
    reasoner.validate();
    translator.validate();
  }
};

struct AttemptRecord {
  int index = 1;
  std::string instruction;
  std::string reasoning;
  std::string translation;
  std::vector<verify::Query> queries;
  translator::ParseDiagnostics diagnostics;
  verify::VerificationReport report;
  std::optional<MoveLabel> extracted_choice;
  llm::Usage usage;
  std::chrono::milliseconds latency{0};
  ExitReason exit = ExitReason::none;
};

struct SessionTranscript {
  std::string session_id;
  std::string game;
  std::string reasoner_model;
  std::string translator_model;
  std::vector<AttemptRecord> attempts;
  std::optional<MoveLabel> initial_choice;
  std::optional<MoveLabel> final_choice;
  std::string final_reasoning;
  llm::Usage usage;
  // Sum of model-call latencies, so replayed sessions stay byte-identical.
  std::chrono::milliseconds wall_time{0};
  bool aborted = false;
  std::string abort_reason;

  ExitReason exit() const { return attempts.empty() ? ExitReason::none : attempts.back().exit; }
};

struct SessionOptions {
  std::string session_id;
  std::string translation_template = translator::default_prompt_template();
  const verify::FeedbackTemplates* feedback = nullptr;
};

/// The reasoning loop: reason, translate, verify, feed back the failures,
/// until nothing is left to correct or the attempts run out.
inline SessionTranscript run_session(const game::GameSpec& g, const LoopConfig& cfg, llm::Gateway& reasoner,
                                     llm::Gateway& translator_gw, const SessionOptions& opts = {}) {
  cfg.validate();
  const auto& templates = opts.feedback ? *opts.feedback : verify::FeedbackTemplates::defaults();
  SessionTranscript t;
  t.session_id = opts.session_id;
  t.game = g.name();
  t.reasoner_model = cfg.reasoner.model_id;
  t.translator_model = cfg.translator.model_id;

  auto finish = [&] {
    for (const auto& a : t.attempts) {
      t.usage += a.usage;
      t.wall_time += a.latency;
    }
    if (!t.attempts.empty()) {
      t.initial_choice = t.attempts.front().extracted_choice;
      t.final_choice = t.attempts.back().extracted_choice;
      t.final_reasoning = t.attempts.back().reasoning;
    }
    return t;
  };

  std::string instruction = build_instruction_prompt(g);
  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    AttemptRecord& rec = t.attempts.emplace_back();
    rec.index = attempt;
    rec.instruction = instruction;
    try {
      auto reply = reasoner.complete(cfg.reasoner, {{llm::Role::user, instruction}});
      rec.reasoning = reply.text;
      rec.usage += reply.usage;
      rec.latency += reply.latency;
      rec.extracted_choice = extract_choice(rec.reasoning);

      auto tr = translator::translate(rec.reasoning, g, translator_gw, cfg.translator, opts.translation_template);
      rec.translation = tr.completion.text;
      rec.usage += tr.completion.usage;
      rec.latency += tr.completion.latency;
      rec.queries = tr.parsed.queries;
      rec.diagnostics = tr.parsed.diagnostics;
    } catch (const llm::GatewayError& e) {
      t.aborted = true;
      t.abort_reason = e.what();
      return finish();
    }

    if (rec.queries.empty()) {
      rec.exit = ExitReason::no_queries;
      return finish();
    }
    rec.report = verify::evaluate_all(rec.queries, g, templates);
    if (rec.report.failed.empty()) {
      rec.exit = ExitReason::all_true;
      return finish();
    }
    if (attempt == cfg.max_attempts) {
      rec.exit = ExitReason::max_attempts;
      return finish();
    }
    instruction = build_feedback_prompt(rec.reasoning, rec.report, g, templates);
  }
  return finish();
}

}  // namespace lelma::orchestrator
