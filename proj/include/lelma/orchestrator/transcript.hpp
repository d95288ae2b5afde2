#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "lelma/orchestrator/session.hpp"

namespace lelma::orchestrator {

inline constexpr int kTranscriptSchemaVersion = 1;

class TranscriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using nlohmann::json;

inline json value_json(const verify::QueryValue& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<MoveLabel>(v).value;
}

inline verify::QueryValue value_from(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  return MoveLabel{j.get<std::string>()};
}

inline json correction_json(const verify::CorrectionValue& v) {
  if (std::holds_alternative<verify::Relation>(v)) return json{{"relation", "equal"}};
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<MoveLabel>(v).value;
}

inline verify::CorrectionValue correction_from(const json& j) {
  if (j.is_object()) return verify::Relation::equal;
  if (j.is_number_integer()) return j.get<std::int64_t>();
  return MoveLabel{j.get<std::string>()};
}

inline json query_json(const verify::Query& q) {
  json args = json::array();
  for (const auto& a : q.args) args.push_back(value_json(a));
  return {{"kind", verify::kind_name(q.kind)}, {"args", args}, {"text", verify::format_query(q)}, {"source", q.source_text}};
}

inline verify::Query query_from(const json& j) {
  verify::Query q;
  auto kind = verify::kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw TranscriptError("unknown query kind " + j.at("kind").get<std::string>());
  q.kind = *kind;
  for (const auto& a : j.at("args")) q.args.push_back(value_from(a));
  q.source_text = j.value("source", "");
  return q;
}

inline std::string status_name(verify::Status s) {
  return s == verify::Status::holds ? "holds" : s == verify::Status::fails ? "fails" : "error";
}

inline verify::Status status_from(const std::string& s) {
  return s == "holds" ? verify::Status::holds : s == "fails" ? verify::Status::fails : verify::Status::error;
}

inline json result_json(const verify::QueryResult& r) {
  json corrections = json::array();
  for (const auto& c : r.corrections) {
    json alt = json::array();
    for (const auto& b : c) alt.push_back({{"role", b.role}, {"value", correction_json(b.value)}});
    corrections.push_back(alt);
  }
  return {{"query", query_json(r.query)}, {"status", status_name(r.status)}, {"corrections", corrections},
          {"template", r.template_key}, {"fields", r.fields},     {"explanation", r.explanation},
          {"error", r.error}};
}

inline verify::QueryResult result_from(const json& j) {
  verify::QueryResult r;
  r.query = query_from(j.at("query"));
  r.status = status_from(j.at("status").get<std::string>());
  for (const auto& alt : j.at("corrections")) {
    verify::Correction c;
    for (const auto& b : alt) c.push_back({b.at("role").get<std::string>(), correction_from(b.at("value"))});
    r.corrections.push_back(std::move(c));
  }
  r.template_key = j.value("template", "");
  r.fields = j.value("fields", verify::Fields{});
  r.explanation = j.value("explanation", "");
  r.error = j.value("error", "");
  return r;
}

inline json choice_json(const std::optional<MoveLabel>& c) { return c ? json(c->value) : json(nullptr); }

inline std::optional<MoveLabel> choice_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return MoveLabel{j.get<std::string>()};
}

}  // namespace detail

inline nlohmann::json attempt_json(const SessionTranscript& t, const AttemptRecord& a) {
  using nlohmann::json;
  json queries = json::array(), skipped = json::array(), results = json::array();
  for (const auto& q : a.queries) queries.push_back(detail::query_json(q));
  for (const auto& s : a.diagnostics.skipped_lines) skipped.push_back({{"line", s.line}, {"text", s.text}, {"reason", s.reason}});
  for (const auto& r : a.report.results) results.push_back(detail::result_json(r));
  return {{"type", "attempt"},
          {"schema_version", kTranscriptSchemaVersion},
          {"session", t.session_id},
          {"game", t.game},
          {"index", a.index},
          {"instruction", a.instruction},
          {"reasoning", a.reasoning},
          {"translation", a.translation},
          {"queries", queries},
          {"skipped", skipped},
          {"parsed_count", a.diagnostics.parsed_count},
          {"results", results},
          {"failed", a.report.failed.size()},
          {"choice", detail::choice_json(a.extracted_choice)},
          {"usage", llm::to_json(a.usage)},
          {"latency_ms", a.latency.count()},
          {"exit", exit_name(a.exit)}};
}

inline nlohmann::json session_json(const SessionTranscript& t) {
  return {{"type", "session"},
          {"schema_version", kTranscriptSchemaVersion},
          {"session", t.session_id},
          {"game", t.game},
          {"reasoner_model", t.reasoner_model},
          {"translator_model", t.translator_model},
          {"attempts", t.attempts.size()},
          {"exit", exit_name(t.exit())},
          {"initial_choice", detail::choice_json(t.initial_choice)},
          {"final_choice", detail::choice_json(t.final_choice)},
          {"final_reasoning", t.final_reasoning},
          {"usage", llm::to_json(t.usage)},
          {"wall_time_ms", t.wall_time.count()},
          {"aborted", t.aborted},
          {"abort_reason", t.abort_reason}};
}

/// One line per attempt, then one session summary line.
inline std::string to_jsonl(const SessionTranscript& t) {
  std::string out;
  for (const auto& a : t.attempts) out += attempt_json(t, a).dump() + "\n";
  return out + session_json(t).dump() + "\n";
}

inline SessionTranscript from_jsonl(const std::string& text) {
  SessionTranscript t;
  bool have_session = false;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw TranscriptError("transcript line " + std::to_string(no) + ": " + e.what());
    }
    if (j.value("schema_version", 0) != kTranscriptSchemaVersion)
      throw TranscriptError("transcript line " + std::to_string(no) + ": unsupported schema version");
    const auto type = j.value("type", "");
    try {
      if (type == "attempt") {
        AttemptRecord a;
        a.index = j.at("index").get<int>();
        a.instruction = j.at("instruction").get<std::string>();
        a.reasoning = j.at("reasoning").get<std::string>();
        a.translation = j.at("translation").get<std::string>();
        for (const auto& q : j.at("queries")) a.queries.push_back(detail::query_from(q));
        for (const auto& s : j.at("skipped"))
          a.diagnostics.skipped_lines.push_back(
              {s.at("line").get<std::size_t>(), s.at("text").get<std::string>(), s.at("reason").get<std::string>()});
        a.diagnostics.parsed_count = j.at("parsed_count").get<std::size_t>();
        for (const auto& r : j.at("results")) {
          auto res = detail::result_from(r);
          if (res.failed()) a.report.failed.push_back(res);
          if (res.status == verify::Status::error) ++a.report.errors;
          a.report.results.push_back(std::move(res));
        }
        a.extracted_choice = detail::choice_from(j.at("choice"));
        a.usage = llm::usage_from_json(j.at("usage"));
        a.latency = std::chrono::milliseconds(j.at("latency_ms").get<std::int64_t>());
        a.exit = exit_from_name(j.at("exit").get<std::string>());
        t.attempts.push_back(std::move(a));
      } else if (type == "session") {
        have_session = true;
        t.session_id = j.at("session").get<std::string>();
        t.game = j.at("game").get<std::string>();
        t.reasoner_model = j.value("reasoner_model", "");
        t.translator_model = j.value("translator_model", "");
        t.initial_choice = detail::choice_from(j.at("initial_choice"));
        t.final_choice = detail::choice_from(j.at("final_choice"));
        t.final_reasoning = j.at("final_reasoning").get<std::string>();
        t.usage = llm::usage_from_json(j.at("usage"));
        t.wall_time = std::chrono::milliseconds(j.at("wall_time_ms").get<std::int64_t>());
        t.aborted = j.at("aborted").get<bool>();
        t.abort_reason = j.at("abort_reason").get<std::string>();
        if (j.at("attempts").get<std::size_t>() != t.attempts.size())
          throw TranscriptError("session record attempt count does not match the attempt records");
      } else {
        throw TranscriptError("unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw TranscriptError("transcript line " + std::to_string(no) + ": " + e.what());
    }
  }
  if (!have_session) throw TranscriptError("transcript has no session record");
  return t;
}

inline void write_transcript(const std::filesystem::path& path, const SessionTranscript& t) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TranscriptError("cannot write " + path.string());
  out << to_jsonl(t);
}

inline SessionTranscript read_transcript(const std::filesystem::path& path) {
  return from_jsonl(game::read_text_file(path));
}

}  // namespace lelma::orchestrator
