#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lelma::llm {

enum class Role { system, user, assistant };

inline std::string_view role_name(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

struct ChatMessage {
  Role role = Role::user;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

enum class ProviderKind { openai, gemini, mock, replay };

inline std::string_view provider_name(ProviderKind k) {
  switch (k) {
    case ProviderKind::openai: return "openai";
    case ProviderKind::gemini: return "gemini";
    case ProviderKind::mock: return "mock";
    case ProviderKind::replay: return "replay";
  }
  return "mock";
}

class GatewayError : public std::runtime_error {
 public:
  enum class Kind { transport, provider, budget_exceeded, parse, duplicate_request_key, invalid_request, configuration };

  GatewayError(Kind kind, const std::string& msg, int status = 0, std::string body = {})
      : std::runtime_error(msg), kind_(kind), status_(status), body_(std::move(body)) {}

  Kind kind() const { return kind_; }
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  Kind kind_;
  int status_;
  std::string body_;
};

inline ProviderKind parse_provider_kind(std::string_view s) {
  if (s == "openai" || s == "http-openai-style") return ProviderKind::openai;
  if (s == "gemini" || s == "http-gemini-style") return ProviderKind::gemini;
  if (s == "mock") return ProviderKind::mock;
  if (s == "replay") return ProviderKind::replay;
  throw GatewayError(GatewayError::Kind::configuration, "unknown provider '" + std::string(s) + "'");
}

struct ModelConfig {
  ProviderKind provider = ProviderKind::mock;
  std::string endpoint;
  std::string model_id = "mock";
  double temperature = 1.0;
  std::int64_t max_output_tokens = 1024;
  std::chrono::milliseconds timeout{60'000};
  int retries = 3;
  // Name of the environment variable holding the API key; empty picks the provider default.
  std::string api_key_env;

  void validate() const {
    if (!(temperature >= 0.0)) throw GatewayError(GatewayError::Kind::configuration, "temperature must be >= 0");
    if (max_output_tokens <= 0) throw GatewayError(GatewayError::Kind::configuration, "max_output_tokens must be > 0");
    if (retries < 0) throw GatewayError(GatewayError::Kind::configuration, "retries must be >= 0");
    if (model_id.empty()) throw GatewayError(GatewayError::Kind::configuration, "model_id is empty");
  }
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  std::int64_t total() const { return prompt_tokens + completion_tokens; }
  Usage& operator+=(const Usage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    return *this;
  }
  friend Usage operator+(Usage a, const Usage& b) { return a += b; }
  bool operator==(const Usage&) const = default;
};

struct CompletionResult {
  std::string text;
  Usage usage;
  std::chrono::milliseconds latency{0};
  bool operator==(const CompletionResult&) const = default;
};

inline void validate_messages(const std::vector<ChatMessage>& messages) {
  if (messages.empty()) throw GatewayError(GatewayError::Kind::invalid_request, "no messages");
  if (messages.front().role == Role::assistant)
    throw GatewayError(GatewayError::Kind::invalid_request, "conversation must start with a system or user message");
  for (const auto& m : messages)
    if (m.content.empty()) throw GatewayError(GatewayError::Kind::invalid_request, "empty message content");
}

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual CompletionResult complete(const ModelConfig& cfg, const std::vector<ChatMessage>& messages) = 0;
};

inline nlohmann::json to_json(const std::vector<ChatMessage>& messages) {
  auto arr = nlohmann::json::array();
  for (const auto& m : messages) arr.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  return arr;
}

inline std::vector<ChatMessage> messages_from_json(const nlohmann::json& arr) {
  std::vector<ChatMessage> out;
  for (const auto& m : arr) {
    auto r = m.at("role").get<std::string>();
    Role role = r == "system" ? Role::system : r == "assistant" ? Role::assistant : Role::user;
    out.push_back({role, m.at("content").get<std::string>()});
  }
  return out;
}

inline nlohmann::json to_json(const Usage& u) {
  return {{"prompt_tokens", u.prompt_tokens}, {"completion_tokens", u.completion_tokens}};
}

inline Usage usage_from_json(const nlohmann::json& j) {
  return {j.value("prompt_tokens", std::int64_t{0}), j.value("completion_tokens", std::int64_t{0})};
}

}  // namespace lelma::llm
