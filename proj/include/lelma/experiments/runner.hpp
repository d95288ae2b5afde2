#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "lelma/experiments/config.hpp"
#include "lelma/experiments/simulated_agent.hpp"
#include "lelma/llm/cassette.hpp"
#include "lelma/llm/gateway.hpp"
#include "lelma/llm/providers.hpp"
#include "lelma/orchestrator/session.hpp"
#include "lelma/orchestrator/transcript.hpp"

namespace lelma::experiments {

struct SessionOutcome {
  std::string game;
  int repetition = 0;
  std::filesystem::path transcript_path;
  orchestrator::SessionTranscript transcript;
  // Set when the session could not run at all (bad game file, unwritable output).
  std::string error;

  bool aborted() const { return !error.empty() || transcript.aborted; }
};

struct ExperimentResult {
  std::vector<SessionOutcome> sessions;

  std::size_t aborted() const {
    std::size_t n = 0;
    for (const auto& s : sessions) n += s.aborted();
    return n;
  }
  bool ok() const { return aborted() == 0; }
};

using TransportFactory = std::function<std::shared_ptr<llm::Transport>()>;

struct RunOptions {
  // Needed only in live mode.
  TransportFactory transport;
  std::filesystem::path games_dir = game::games_directory();
  const verify::FeedbackTemplates* feedback = nullptr;
  std::string translation_template = translator::default_prompt_template();
  // Called after every session, from the worker thread that ran it.
  std::function<void(const SessionOutcome&)> on_session;
};

inline std::string session_name(const std::string& game, int repetition) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", repetition);
  return game + "_" + buf;
}

namespace detail {

struct Providers {
  std::shared_ptr<llm::ChatProvider> reasoner, translator;
};

inline Providers session_providers(const ExperimentConfig& cfg, const RunOptions& opts, const std::string& game,
                                   int rep) {
  const auto cassette = cfg.cassette_dir / (session_name(game, rep) + ".jsonl");
  Providers p;
  switch (cfg.mode) {
    case ProviderMode::replay: {
      std::shared_ptr<llm::ChatProvider> replay =
          std::filesystem::exists(cassette) ? std::shared_ptr<llm::ChatProvider>(llm::load_cassette(cassette))
                                            : std::make_shared<llm::ReplayProvider>(std::vector<llm::CassetteRecord>{});
      return {replay, replay};
    }
    case ProviderMode::mock: {
      auto pair = make_simulated_pair(session_seed(cfg.seed, game, rep), cfg.mock);
      p = {pair.reasoner, pair.translator};
      break;
    }
    case ProviderMode::live: {
      if (!opts.transport)
        throw llm::GatewayError(llm::GatewayError::Kind::configuration, "live mode needs an HTTP transport");
      auto http = std::make_shared<llm::HttpProvider>(opts.transport());
      p = {http, http};
      break;
    }
  }
  if (cfg.record) {
    auto writer = std::make_shared<llm::CassetteWriter>(cassette);
    p.reasoner = std::make_shared<llm::RecordingProvider>(p.reasoner, writer);
    p.translator = std::make_shared<llm::RecordingProvider>(p.translator, writer);
  }
  return p;
}

inline SessionOutcome run_one(const ExperimentConfig& cfg, const RunOptions& opts, const std::string& game_name, int rep) {
  SessionOutcome out;
  out.game = game_name;
  out.repetition = rep;
  out.transcript_path = cfg.output_dir / (session_name(game_name, rep) + ".jsonl");
  try {
    const auto g = game::load_game(game_name, opts.games_dir);
    out.game = g.name();
    orchestrator::SessionOptions so;
    so.session_id = session_name(out.game, rep);
    so.translation_template = opts.translation_template;
    so.feedback = opts.feedback;
    try {
      auto p = session_providers(cfg, opts, game_name, rep);
      llm::Gateway reasoner(p.reasoner, cfg.budget), translator(p.translator, cfg.budget);
      out.transcript = orchestrator::run_session(g, cfg.loop, reasoner, translator, so);
    } catch (const llm::GatewayError& e) {
      out.transcript.session_id = so.session_id;
      out.transcript.game = out.game;
      out.transcript.reasoner_model = cfg.loop.reasoner.model_id;
      out.transcript.translator_model = cfg.loop.translator.model_id;
      out.transcript.aborted = true;
      out.transcript.abort_reason = e.what();
    }
    orchestrator::write_transcript(out.transcript_path, out.transcript);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace detail

/// Runs every game `repetitions` times on a pool of worker threads and
/// writes one transcript per session. A failing session is recorded and the
/// batch carries on.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  if (cfg.record) std::filesystem::create_directories(cfg.cassette_dir);

  struct Job {
    std::string game;
    int rep;
  };
  std::vector<Job> jobs;
  for (int rep = 1; rep <= cfg.repetitions; ++rep)
    for (const auto& g : cfg.games) jobs.push_back({g, rep});

  ExperimentResult result;
  result.sessions.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      result.sessions[i] = detail::run_one(cfg, opts, jobs[i].game, jobs[i].rep);
      if (opts.on_session) {
        std::lock_guard lock(report_mu);
        opts.on_session(result.sessions[i]);
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers()), jobs.size());
  std::vector<std::jthread> pool;
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  pool.clear();
  return result;
}

/// Every transcript under `dir`, in file-name order.
inline std::vector<orchestrator::SessionTranscript> load_transcripts(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<orchestrator::SessionTranscript> out;
  for (const auto& f : files) {
    try {
      out.push_back(orchestrator::read_transcript(f));
    } catch (const orchestrator::TranscriptError& e) {
      throw orchestrator::TranscriptError(f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lelma::experiments
