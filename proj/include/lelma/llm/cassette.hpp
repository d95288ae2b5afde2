#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lelma/llm/types.hpp"

namespace lelma::llm {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of (model id, messages) in canonical JSON form.
inline std::string request_key(const std::string& model_id, const std::vector<ChatMessage>& messages) {
  nlohmann::json canon{{"model", model_id}, {"messages", to_json(messages)}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canon.dump())));
  return buf;
}

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CassetteRecord {
  std::string key;
  // How many earlier requests in the cassette share this key.
  std::size_t occurrence = 0;
  ModelConfig config;
  std::vector<ChatMessage> messages;
  CompletionResult response;
  std::string recorded_at;

  nlohmann::json to_json() const {
    return {{"key", key},
            {"occurrence", occurrence},
            {"request",
             {{"model", config.model_id},
              {"provider", provider_name(config.provider)},
              {"temperature", config.temperature},
              {"max_output_tokens", config.max_output_tokens},
              {"messages", llm::to_json(messages)}}},
            {"response",
             {{"text", response.text}, {"usage", llm::to_json(response.usage)}, {"latency_ms", response.latency.count()}}},
            {"recorded_at", recorded_at}};
  }

  static CassetteRecord from_json(const nlohmann::json& j) {
    CassetteRecord r;
    r.key = j.at("key").get<std::string>();
    r.occurrence = j.value("occurrence", std::size_t{0});
    const auto& req = j.at("request");
    r.config.model_id = req.at("model").get<std::string>();
    r.config.temperature = req.value("temperature", 1.0);
    r.config.max_output_tokens = req.value("max_output_tokens", std::int64_t{1024});
    r.messages = messages_from_json(req.at("messages"));
    const auto& res = j.at("response");
    r.response.text = res.at("text").get<std::string>();
    r.response.usage = usage_from_json(res.value("usage", nlohmann::json::object()));
    r.response.latency = std::chrono::milliseconds(res.value("latency_ms", std::int64_t{0}));
    r.recorded_at = j.value("recorded_at", "");
    return r;
  }
};

/// Append-only JSONL writer; one line per exchange, flushed immediately.
class CassetteWriter {
 public:
  explicit CassetteWriter(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::trunc);
    if (!out_) throw GatewayError(GatewayError::Kind::configuration, "cannot open cassette " + path.string());
  }

  void append(const ModelConfig& cfg, const std::vector<ChatMessage>& messages, const CompletionResult& res) {
    std::lock_guard lock(mu_);
    CassetteRecord r{request_key(cfg.model_id, messages), 0, cfg, messages, res, utc_timestamp()};
    r.occurrence = seen_[r.key]++;
    out_ << r.to_json().dump() << '\n';
    out_.flush();
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mu_;
  std::map<std::string, std::size_t> seen_;
};

/// Wraps another provider and records every successful exchange.
class RecordingProvider : public ChatProvider {
 public:
  RecordingProvider(std::shared_ptr<ChatProvider> inner, std::shared_ptr<CassetteWriter> writer)
      : inner_(std::move(inner)), writer_(std::move(writer)) {}

  CompletionResult complete(const ModelConfig& cfg, const std::vector<ChatMessage>& messages) override {
    auto res = inner_->complete(cfg, messages);
    writer_->append(cfg, messages, res);
    return res;
  }

 private:
  std::shared_ptr<ChatProvider> inner_;
  std::shared_ptr<CassetteWriter> writer_;
};

/// Answers requests from a cassette by exact (key, occurrence) match.
class ReplayProvider : public ChatProvider {
 public:
  explicit ReplayProvider(std::vector<CassetteRecord> records) {
    for (auto& r : records) {
      auto id = std::make_pair(r.key, r.occurrence);
      if (!records_.emplace(id, std::move(r)).second)
        throw GatewayError(GatewayError::Kind::duplicate_request_key,
                           "duplicate cassette entry " + id.first + "#" + std::to_string(id.second));
    }
  }

  CompletionResult complete(const ModelConfig& cfg, const std::vector<ChatMessage>& messages) override {
    validate_messages(messages);
    auto key = request_key(cfg.model_id, messages);
    std::lock_guard lock(mu_);
    auto n = calls_[key]++;
    auto it = records_.find({key, n});
    if (it == records_.end())
      throw GatewayError(GatewayError::Kind::provider, "request " + key + " not in cassette", 404, "cassette-miss");
    return it->second.response;
  }

  std::size_t size() const { return records_.size(); }

 private:
  std::map<std::pair<std::string, std::size_t>, CassetteRecord> records_;
  std::map<std::string, std::size_t> calls_;
  std::mutex mu_;
};

inline std::vector<CassetteRecord> read_cassette(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GatewayError(GatewayError::Kind::configuration, "cannot open cassette " + path.string());
  std::vector<CassetteRecord> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(CassetteRecord::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw GatewayError(GatewayError::Kind::parse, path.string() + ":" + std::to_string(no) + ": " + e.what());
    }
  }
  return out;
}

inline std::shared_ptr<ReplayProvider> load_cassette(const std::filesystem::path& path) {
  return std::make_shared<ReplayProvider>(read_cassette(path));
}

}  // namespace lelma::llm
