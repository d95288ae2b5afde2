#pragma once

#include <chrono>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lelma/llm/types.hpp"

namespace lelma::llm {

// Whitespace-separated words; the mock's stand-in for a tokenizer.
inline std::int64_t count_words(std::string_view s) {
  std::int64_t n = 0;
  bool in_word = false;
  for (char c : s) {
    bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

/// Scripted completions, or a responder callback. Never touches the network.
class MockProvider : public ChatProvider {
 public:
  using Responder = std::function<std::string(const ModelConfig&, const std::vector<ChatMessage>&)>;

  explicit MockProvider(std::vector<std::string> script) : script_(std::move(script)) {}
  explicit MockProvider(Responder responder) : responder_(std::move(responder)) {}

  CompletionResult complete(const ModelConfig& cfg, const std::vector<ChatMessage>& messages) override {
    validate_messages(messages);
    std::string text;
    if (responder_) {
      text = responder_(cfg, messages);
    } else {
      std::lock_guard lock(mu_);
      if (next_ >= script_.size())
        throw GatewayError(GatewayError::Kind::provider, "mock script exhausted", 0, "script-exhausted");
      text = script_[next_++];
    }
    Usage u;
    for (const auto& m : messages) u.prompt_tokens += count_words(m.content);
    u.completion_tokens = count_words(text);
    return {std::move(text), u, std::chrono::milliseconds(0)};
  }

  std::size_t consumed() const {
    std::lock_guard lock(mu_);
    return next_;
  }

 private:
  std::vector<std::string> script_;
  Responder responder_;
  mutable std::mutex mu_;
  std::size_t next_ = 0;
};

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds timeout{60'000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Connection-level failure (DNS, refused, timeout) raised by a Transport.
class TransportFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& req) = 0;
};

namespace detail {

inline std::string default_key_env(ProviderKind k) { return k == ProviderKind::gemini ? "GEMINI_API_KEY" : "OPENAI_API_KEY"; }

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) s.replace(pos, from.size(), to);
  return s;
}

inline HttpRequest openai_request(const ModelConfig& cfg, const std::vector<ChatMessage>& messages, const std::string& key) {
  nlohmann::json body{{"model", cfg.model_id},
                      {"messages", to_json(messages)},
                      {"temperature", cfg.temperature},
                      {"max_tokens", cfg.max_output_tokens}};
  std::string url = cfg.endpoint.empty() ? "https://api.openai.com/v1/chat/completions" : cfg.endpoint;
  return {url, {{"Authorization", "Bearer " + key}, {"Content-Type", "application/json"}}, body.dump(), cfg.timeout};
}

inline HttpRequest gemini_request(const ModelConfig& cfg, const std::vector<ChatMessage>& messages, const std::string& key) {
  nlohmann::json body;
  auto contents = nlohmann::json::array();
  std::string system;
  for (const auto& m : messages) {
    if (m.role == Role::system) {
      system += (system.empty() ? "" : "\n") + m.content;
      continue;
    }
    contents.push_back({{"role", m.role == Role::assistant ? "model" : "user"}, {"parts", {{{"text", m.content}}}}});
  }
  if (!system.empty()) body["systemInstruction"] = {{"parts", {{{"text", system}}}}};
  body["contents"] = contents;
  body["generationConfig"] = {{"temperature", cfg.temperature}, {"maxOutputTokens", cfg.max_output_tokens}};
  std::string url = cfg.endpoint.empty()
                        ? "https://generativelanguage.googleapis.com/v1beta/models/{model}:generateContent"
                        : cfg.endpoint;
  url = replace_all(url, "{model}", cfg.model_id);
  return {url, {{"x-goog-api-key", key}, {"Content-Type", "application/json"}}, body.dump(), cfg.timeout};
}

inline CompletionResult parse_openai(const std::string& raw) {
  try {
    auto j = nlohmann::json::parse(raw);
    CompletionResult r;
    r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage")) r.usage = usage_from_json(j["usage"]);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw GatewayError(GatewayError::Kind::parse, std::string("unexpected response shape: ") + e.what(), 200, raw);
  }
}

inline CompletionResult parse_gemini(const std::string& raw) {
  try {
    auto j = nlohmann::json::parse(raw);
    CompletionResult r;
    for (const auto& part : j.at("candidates").at(0).at("content").at("parts")) r.text += part.value("text", "");
    if (j.contains("usageMetadata")) {
      const auto& u = j["usageMetadata"];
      r.usage = {u.value("promptTokenCount", std::int64_t{0}), u.value("candidatesTokenCount", std::int64_t{0})};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw GatewayError(GatewayError::Kind::parse, std::string("unexpected response shape: ") + e.what(), 200, raw);
  }
}

inline bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace detail

/// OpenAI-style or Gemini-style chat completion over a Transport, with
/// exponential backoff on transient failures.
class HttpProvider : public ChatProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;
  using KeyLookup = std::function<std::optional<std::string>(const std::string&)>;

  explicit HttpProvider(std::shared_ptr<Transport> transport, Sleeper sleep = {}, KeyLookup keys = {},
                        std::chrono::milliseconds backoff = std::chrono::milliseconds(500))
      : transport_(std::move(transport)), sleep_(std::move(sleep)), keys_(std::move(keys)), backoff_(backoff) {
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (!keys_)
      keys_ = [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (!v || !*v) return std::nullopt;
        return std::string(v);
      };
  }

  CompletionResult complete(const ModelConfig& cfg, const std::vector<ChatMessage>& messages) override {
    cfg.validate();
    validate_messages(messages);
    if (cfg.provider != ProviderKind::openai && cfg.provider != ProviderKind::gemini)
      throw GatewayError(GatewayError::Kind::configuration, "HttpProvider needs an openai or gemini config");
    const std::string env = cfg.api_key_env.empty() ? detail::default_key_env(cfg.provider) : cfg.api_key_env;
    auto key = keys_(env);
    if (!key) throw GatewayError(GatewayError::Kind::configuration, "environment variable " + env + " is not set");
    const auto req = cfg.provider == ProviderKind::openai ? detail::openai_request(cfg, messages, *key)
                                                          : detail::gemini_request(cfg, messages, *key);

    const auto start = std::chrono::steady_clock::now();
    std::string last_error;
    for (int attempt = 0;; ++attempt) {
      HttpResponse res;
      bool transport_failed = false;
      try {
        res = transport_->post(req);
      } catch (const TransportFailure& e) {
        transport_failed = true;
        last_error = e.what();
      }
      if (!transport_failed && res.status >= 200 && res.status < 300) {
        auto out = cfg.provider == ProviderKind::openai ? detail::parse_openai(res.body) : detail::parse_gemini(res.body);
        out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        return out;
      }
      const bool again = transport_failed || detail::retryable(res.status);
      if (!again || attempt >= cfg.retries) {
        if (transport_failed)
          throw GatewayError(GatewayError::Kind::transport,
                             "transport failed after " + std::to_string(attempt + 1) + " attempts: " + last_error);
        throw GatewayError(GatewayError::Kind::provider, "provider returned status " + std::to_string(res.status),
                           res.status, res.body);
      }
      sleep_(backoff_ * (1 << attempt));
    }
  }

 private:
  std::shared_ptr<Transport> transport_;
  Sleeper sleep_;
  KeyLookup keys_;
  std::chrono::milliseconds backoff_;
};

}  // namespace lelma::llm
