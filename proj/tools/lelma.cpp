#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "lelma/experiments/evaluation_sheet.hpp"
#include "lelma/experiments/runner.hpp"
#include "lelma/experiments/stats.hpp"
#include "lelma/game/game_spec.hpp"
#include "lelma/llm/httplib_transport.hpp"
#include "lelma/logic/parser.hpp"
#include "lelma/logic/solver.hpp"
#include "lelma/translator/translator.hpp"
#include "lelma/verify/evaluate.hpp"

using namespace lelma;
namespace fs = std::filesystem;

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  return game::read_text_file(path);
}

std::vector<std::string> variables_of(const logic::Term& t, std::vector<std::string>& seen) {
  if (t.is_var()) {
    const auto& n = t.name();
    if (n != "_" && n[0] != '_' && std::find(seen.begin(), seen.end(), n) == seen.end()) seen.push_back(n);
  } else {
    for (const auto& a : t.args()) variables_of(a, seen);
  }
  return seen;
}

int cmd_solve(const std::string& game_name, const std::string& goal_text, std::size_t max) {
  const auto g = game::load_game(game_name);
  const auto goal = logic::parse_goal(goal_text);
  std::vector<std::string> vars;
  for (const auto& lit : goal) variables_of(lit.term, vars);
  logic::Solver solver(g.rulebase(), goal);
  std::size_t n = 0;
  while (n < max) {
    auto s = solver.next();
    if (!s) break;
    ++n;
    if (vars.empty()) {
      std::cout << "true\n";
      continue;
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto* v = s->lookup(vars[i]);
      std::cout << (i ? ", " : "") << vars[i] << " = " << (v ? s->apply(*v).to_string() : vars[i]);
    }
    std::cout << "\n";
  }
  if (n == 0) std::cout << "false\n";
  std::cerr << n << " answer(s), " << solver.steps() << " step(s)\n";
  return 0;
}

int cmd_outcomes(const std::string& game_name) {
  const auto g = game::load_game(game_name);
  for (const auto& o : game::solve_final_outcomes(g))
    std::cout << g.roles().reasoner << " " << o.p1_move << " " << o.u1 << "  " << g.roles().opponent << " " << o.p2_move
              << " " << o.u2 << "  " << o.situation.to_string() << "\n";
  return 0;
}

int cmd_verify(const std::string& game_name, const std::string& input) {
  const auto g = game::load_game(game_name);
  const auto parsed = translator::parse_queries(read_input(input), g);
  for (const auto& s : parsed.diagnostics.skipped_lines)
    std::cerr << "skipped line " << s.line << ": " << s.reason << ": " << s.text << "\n";
  const auto report = verify::evaluate_all(parsed.queries, g);
  for (const auto& r : report.results) {
    std::cout << (r.holds() ? "holds  " : r.failed() ? "FAILS  " : "ERROR  ") << verify::format_query(r.query);
    if (r.failed()) std::cout << "\n       " << r.explanation;
    if (!r.error.empty()) std::cout << "\n       " << r.error;
    std::cout << "\n";
  }
  std::cout << report.results.size() << " query(ies), " << report.failed.size() << " failed, " << report.errors
            << " error(s)\n";
  return report.failed.empty() && report.errors == 0 ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& mode, const std::optional<int>& reps,
            const std::optional<std::string>& out, bool record, bool quiet) {
  auto cfg = experiments::load_config(config_path);
  if (mode) cfg.mode = experiments::parse_mode(*mode);
  if (reps) cfg.repetitions = *reps;
  if (out) {
    const bool default_cassettes = cfg.cassette_dir == cfg.output_dir / "cassettes";
    cfg.output_dir = *out;
    if (default_cassettes) cfg.cassette_dir = cfg.output_dir / "cassettes";
  }
  if (record) cfg.record = true;
  if (cfg.mode == experiments::ProviderMode::live && !cfg.record)
    std::cerr << "note: live run without record = true; the session cannot be replayed later\n";
  cfg.validate();

  experiments::RunOptions opts;
  opts.transport = [] { return std::make_shared<llm::HttplibTransport>(); };
  opts.on_session = [&](const experiments::SessionOutcome& s) {
    if (quiet) return;
    std::cerr << s.transcript_path.filename().string() << ": ";
    if (!s.error.empty())
      std::cerr << "error: " << s.error;
    else if (s.transcript.aborted)
      std::cerr << "aborted: " << s.transcript.abort_reason;
    else
      std::cerr << s.transcript.attempts.size() << " attempt(s), " << orchestrator::exit_name(s.transcript.exit())
                << ", choice " << (s.transcript.final_choice ? s.transcript.final_choice->value : "-");
    std::cerr << "\n";
  };
  const auto res = experiments::run_experiment(cfg, opts);
  std::cout << res.sessions.size() << " session(s) in " << cfg.output_dir.string() << ", " << res.aborted()
            << " aborted\n";
  return res.ok() ? 0 : 1;
}

int cmd_stats(const std::string& dir, int max_attempts) {
  const auto ts = experiments::load_transcripts(dir);
  const auto h = experiments::attempts_distribution(ts, max_attempts);
  std::cout << "attempts  sessions\n";
  for (const auto& [n, c] : h.counts) std::cout << "  " << n << "       " << c << "\n";
  std::cout << "  total   " << h.total() << "\n";
  if (h.excluded) std::cout << "  (" << h.excluded << " aborted session(s) left out)\n";

  std::cout << "\ngame                initial B   final B   sessions\n";
  for (const auto& [game, r] : experiments::choice_distribution(ts)) {
    std::printf("%-18s  %9s  %8s  %9zu", game.c_str(), experiments::format_percent(r.initial_percent(), 2).c_str(),
                experiments::format_percent(r.final_percent(), 2).c_str(), r.sessions);
    if (r.excluded) std::printf("  (%zu without a choice)", r.excluded);
    std::printf("\n");
  }
  return 0;
}

std::vector<experiments::EvaluationLabel> read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return experiments::import_labels(in);
  } catch (const experiments::CsvError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

int cmd_export(const std::string& dir, const std::string& out_path, const std::vector<std::string>& evaluators) {
  const auto ts = experiments::load_transcripts(dir);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  experiments::export_evaluation_sheet(ts, out, evaluators);
  std::size_t rows = 0;
  for (const auto& t : ts) rows += t.attempts.size();
  std::cout << rows << " sample(s) written to " << out_path << "\n";
  return 0;
}

int cmd_compare(const std::string& sheet, const std::string& dir) {
  const auto actual = experiments::aggregate_labels(read_labels(sheet));
  const auto m = experiments::confusion_matrix(actual, experiments::predicted_labels(experiments::load_transcripts(dir)));
  std::cout << "                 predicted true  predicted false\n";
  std::printf("actual true      %14zu  %15zu\n", m.tt, m.tf);
  std::printf("actual false     %14zu  %15zu\n", m.ft, m.ff);
  std::printf("accuracy         %ld%% (%zu of %zu)\n", m.accuracy_percent(), m.tt + m.ff, m.total());
  return 0;
}

int cmd_kappa(const std::string& sheet) {
  std::printf("%.4f\n", experiments::fleiss_kappa(experiments::label_counts(read_labels(sheet))));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check model reasoning about 2x2 games against a logic program."};
  app.require_subcommand(1);

  std::string game_name = "prisoners_dilemma", goal, input = "-", config, dir, out_path, sheet;
  std::size_t max_answers = 100;
  std::optional<std::string> mode, out_dir;
  std::optional<int> reps;
  bool record = false, quiet = false;
  int max_attempts = 5;
  std::vector<std::string> evaluators{"eval_1", "eval_2", "eval_3"};

  auto* solve = app.add_subcommand("solve", "Run a goal against a game's rules");
  solve->add_option("-g,--game", game_name, "Bundled game name or .gdl path");
  solve->add_option("goal", goal, "Goal, e.g. \"game(s0,F), finally(goal(p1,5),F)\"")->required();
  solve->add_option("-n,--max", max_answers, "Stop after this many answers");

  auto* outcomes = app.add_subcommand("outcomes", "List every final outcome of a game");
  outcomes->add_option("-g,--game", game_name, "Bundled game name or .gdl path");

  auto* verify_cmd = app.add_subcommand("verify", "Check queries, one per line, against a game");
  verify_cmd->add_option("-g,--game", game_name, "Bundled game name or .gdl path");
  verify_cmd->add_option("file", input, "Query file, - for stdin");

  auto* run = app.add_subcommand("run", "Run a batch of sessions from an INI config");
  run->add_option("config", config, "Experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--mode", mode, "Override provider mode")->check(CLI::IsMember({"mock", "replay", "live"}));
  run->add_option("-r,--repetitions", reps, "Override repetitions per game");
  run->add_option("-o,--out", out_dir, "Override output directory");
  run->add_flag("--record", record, "Record every call to a per-session cassette");
  run->add_flag("-q,--quiet", quiet, "No per-session lines");

  auto* stats = app.add_subcommand("stats", "Attempt and choice distributions of a transcript directory");
  stats->add_option("dir", dir, "Transcript directory")->required()->check(CLI::ExistingDirectory);
  stats->add_option("--max-attempts", max_attempts, "Attempt cap used for the run");

  auto* eval = app.add_subcommand("eval", "Human evaluation sheets");
  eval->require_subcommand(1);
  auto* exp = eval->add_subcommand("export", "Write a blank evaluation sheet");
  exp->add_option("dir", dir, "Transcript directory")->required()->check(CLI::ExistingDirectory);
  exp->add_option("-o,--out", out_path, "CSV file")->required();
  exp->add_option("-e,--evaluators", evaluators, "Evaluator column names")->delimiter(',');
  auto* cmp = eval->add_subcommand("compare", "Confusion matrix of human labels against the verifier");
  cmp->add_option("sheet", sheet, "Filled-in CSV")->required()->check(CLI::ExistingFile);
  cmp->add_option("dir", dir, "Transcript directory")->required()->check(CLI::ExistingDirectory);

  auto* kappa = app.add_subcommand("kappa", "Fleiss' kappa of a filled-in sheet");
  kappa->add_option("sheet", sheet, "Filled-in CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(game_name, goal, max_answers);
    if (*outcomes) return cmd_outcomes(game_name);
    if (*verify_cmd) return cmd_verify(game_name, input);
    if (*run) return cmd_run(config, mode, reps, out_dir, record, quiet);
    if (*stats) return cmd_stats(dir, max_attempts);
    if (*exp) return cmd_export(dir, out_path, evaluators);
    if (*cmp) return cmd_compare(sheet, dir);
    if (*kappa) return cmd_kappa(sheet);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
