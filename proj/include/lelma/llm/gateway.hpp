#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "lelma/llm/cassette.hpp"
#include "lelma/llm/providers.hpp"
#include "lelma/llm/types.hpp"

namespace lelma::llm {

struct Budget {
  std::optional<std::int64_t> max_calls;
  std::optional<std::int64_t> max_tokens;
};

/// Front door for every model call: budget caps and usage accounting on top
/// of a provider.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<ChatProvider> provider, Budget budget = {})
      : provider_(std::move(provider)), budget_(budget) {}

  CompletionResult complete(const ModelConfig& cfg, const std::vector<ChatMessage>& messages) {
    {
      std::lock_guard lock(mu_);
      if (budget_.max_calls && static_cast<std::int64_t>(log_.size()) >= *budget_.max_calls)
        throw GatewayError(GatewayError::Kind::budget_exceeded, "call budget of " + std::to_string(*budget_.max_calls) + " used up");
      if (budget_.max_tokens && total_.total() >= *budget_.max_tokens)
        throw GatewayError(GatewayError::Kind::budget_exceeded,
                           "token budget of " + std::to_string(*budget_.max_tokens) + " used up");
    }
    cfg.validate();
    auto res = provider_->complete(cfg, messages);
    std::lock_guard lock(mu_);
    log_.push_back(res.usage);
    total_ += res.usage;
    return res;
  }

  Usage usage() const {
    std::lock_guard lock(mu_);
    return total_;
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return log_.size();
  }

  std::vector<Usage> call_log() const {
    std::lock_guard lock(mu_);
    return log_;
  }

 private:
  std::shared_ptr<ChatProvider> provider_;
  Budget budget_;
  mutable std::mutex mu_;
  std::vector<Usage> log_;
  Usage total_;
};

}  // namespace lelma::llm
