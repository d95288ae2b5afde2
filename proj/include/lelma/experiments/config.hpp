#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lelma/llm/gateway.hpp"
#include "lelma/orchestrator/session.hpp"

namespace lelma::experiments {

enum class ProviderMode { mock, replay, live };

inline ProviderMode parse_mode(const std::string& s) {
  if (s == "mock") return ProviderMode::mock;
  if (s == "replay") return ProviderMode::replay;
  if (s == "live") return ProviderMode::live;
  throw std::invalid_argument("provider mode must be mock, replay or live, got '" + s + "'");
}

inline std::string mode_name(ProviderMode m) {
  return m == ProviderMode::mock ? "mock" : m == ProviderMode::replay ? "replay" : "live";
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Knobs of the simulated reasoner used in mock mode.
struct MockSettings {
  double error_rate = 0.5;
  // Error rate multiplier applied per attempt after the first.
  double decay = 0.4;
  // Chance of an answer with no checkable statements.
  double vague_rate = 0.05;
};

struct ExperimentConfig {
  std::vector<std::string> games{"prisoners_dilemma", "stag_hunt", "hawk_dove"};
  orchestrator::LoopConfig loop;
  int repetitions = 30;
  // 0 means one worker per game.
  int parallelism = 0;
  std::filesystem::path output_dir = "runs";
  ProviderMode mode = ProviderMode::mock;
  std::filesystem::path cassette_dir;
  bool record = false;
  std::uint64_t seed = 1;
  llm::Budget budget;
  MockSettings mock;

  int workers() const { return parallelism > 0 ? parallelism : static_cast<int>(std::max<std::size_t>(1, games.size())); }

  void validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (games.empty()) throw ConfigError("no games configured");
    if (parallelism < 0) throw ConfigError("parallelism must be >= 0");
    loop.validate();
  }
};

namespace detail {

using boost::property_tree::ptree;

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

inline void reject_secrets(const ptree& section, const std::string& name) {
  for (const auto& [key, _] : section) {
    if (key == "api_key" || key == "key" || key == "token" || key == "secret")
      throw ConfigError("[" + name + "] " + key + ": API keys belong in environment variables (set api_key_env instead)");
  }
}

inline void check_keys(const ptree& section, const std::string& name, std::initializer_list<const char*> allowed) {
  reject_secrets(section, name);
  for (const auto& [key, _] : section) {
    bool ok = false;
    for (const char* a : allowed) ok |= key == a;
    if (!ok) throw ConfigError("unknown key [" + name + "] " + key);
  }
}

inline llm::ModelConfig model_section(const ptree& root, const std::string& name, llm::ModelConfig m) {
  auto sec = root.get_child_optional(name);
  if (!sec) return m;
  check_keys(*sec, name,
             {"provider", "model", "endpoint", "temperature", "max_output_tokens", "timeout_s", "retries", "api_key_env"});
  if (auto v = sec->get_optional<std::string>("provider")) m.provider = llm::parse_provider_kind(*v);
  m.model_id = sec->get("model", m.model_id);
  m.endpoint = sec->get("endpoint", m.endpoint);
  m.temperature = sec->get("temperature", m.temperature);
  m.max_output_tokens = sec->get("max_output_tokens", m.max_output_tokens);
  m.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(sec->get("timeout_s", m.timeout.count() / 1000.0) * 1000));
  m.retries = sec->get("retries", m.retries);
  m.api_key_env = sec->get("api_key_env", m.api_key_env);
  return m;
}

template <typename T>
std::optional<T> optional_number(const ptree& sec, const std::string& key) {
  auto s = sec.get_optional<std::string>(key);
  if (!s || s->empty()) return std::nullopt;
  return sec.get<T>(key);
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in, const std::string& origin = "config") {
  detail::ptree root;
  try {
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig cfg;
  cfg.loop.reasoner.model_id = "mock-reasoner";
  cfg.loop.translator.model_id = "mock-translator";
  try {
    for (const auto& [name, sec] : root) {
      if (name != "experiment" && name != "reasoner" && name != "translator" && name != "mock" && name != "budget")
        throw ConfigError("unknown section [" + name + "]");
    }
    if (auto e = root.get_child_optional("experiment")) {
      detail::check_keys(*e, "experiment",
                         {"games", "repetitions", "parallelism", "output_dir", "provider", "cassette_dir", "record", "seed",
                          "max_attempts"});
      if (auto g = e->get_optional<std::string>("games")) cfg.games = detail::split_list(*g);
      cfg.repetitions = e->get("repetitions", cfg.repetitions);
      cfg.parallelism = e->get("parallelism", cfg.parallelism);
      cfg.output_dir = e->get("output_dir", cfg.output_dir.string());
      if (auto p = e->get_optional<std::string>("provider")) cfg.mode = parse_mode(*p);
      cfg.cassette_dir = e->get("cassette_dir", cfg.cassette_dir.string());
      cfg.record = e->get("record", cfg.record);
      cfg.seed = e->get("seed", cfg.seed);
      cfg.loop.max_attempts = e->get("max_attempts", cfg.loop.max_attempts);
    }
    cfg.loop.reasoner = detail::model_section(root, "reasoner", cfg.loop.reasoner);
    cfg.loop.translator = detail::model_section(root, "translator", cfg.loop.translator);
    if (auto m = root.get_child_optional("mock")) {
      detail::check_keys(*m, "mock", {"error_rate", "decay", "vague_rate"});
      cfg.mock.error_rate = m->get("error_rate", cfg.mock.error_rate);
      cfg.mock.decay = m->get("decay", cfg.mock.decay);
      cfg.mock.vague_rate = m->get("vague_rate", cfg.mock.vague_rate);
    }
    if (auto b = root.get_child_optional("budget")) {
      detail::check_keys(*b, "budget", {"max_calls", "max_tokens"});
      cfg.budget.max_calls = detail::optional_number<std::int64_t>(*b, "max_calls");
      cfg.budget.max_tokens = detail::optional_number<std::int64_t>(*b, "max_tokens");
    }
  } catch (const boost::property_tree::ptree_error& e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const llm::GatewayError& e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (cfg.cassette_dir.empty()) cfg.cassette_dir = cfg.output_dir / "cassettes";
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  auto cfg = parse_config(in, path.string());
  return cfg;
}

}  // namespace lelma::experiments
