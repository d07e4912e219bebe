#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "threadreach/bench.hpp"
#include "threadreach/run.hpp"

using namespace threadreach;

namespace {

struct CliOptions {
  std::string task;
  std::string domain = "value";
  bool por = true;
  bool partitioning = true;
  std::string waitlist = "threads-dfs";
  int max_clones = 5;
  std::string property = "error";
  double timeout_seconds = 0.0;
  std::string dot_path;
  std::string cfa_dot_path;
  std::string stats_path;
  bool json = false;
};

Domain parse_domain(const std::string& s) {
  if (s == "none") return Domain::None;
  if (s == "value") return Domain::Value;
  if (s == "interval") return Domain::Interval;
  throw CLI::ValidationError("--domain", "expected none|value|interval");
}

WaitlistPolicy parse_policy(const std::string& s) {
  if (s == "dfs") return WaitlistPolicy::DFS;
  if (s == "bfs") return WaitlistPolicy::BFS;
  if (s == "threads-dfs") return WaitlistPolicy::ThreadsFirstThenDFS;
  if (s == "threads-bfs") return WaitlistPolicy::ThreadsFirstThenBFS;
  throw CLI::ValidationError("--waitlist", "expected dfs|bfs|threads-dfs|threads-bfs");
}

PropertySpec parse_property(const std::string& s) {
  if (s == "error") return PropertySpec::ErrorReachability;
  if (s == "deadlock") return PropertySpec::DeadlockFreedom;
  if (s == "both") return PropertySpec::Both;
  throw CLI::ValidationError("--property", "expected error|deadlock|both");
}

ExplorationConfig to_config(const CliOptions& o) {
  ExplorationConfig c;
  c.domain = parse_domain(o.domain);
  c.por = o.por;
  c.partitioning = o.partitioning;
  c.waitlist = parse_policy(o.waitlist);
  c.max_clones = o.max_clones;
  c.property = parse_property(o.property);
  c.timeout_ms = static_cast<std::int64_t>(o.timeout_seconds * 1000.0);
  return c;
}

int run_mode(const CliOptions& opts) {
  ExplorationConfig config = to_config(opts);
  RunOutcome outcome = run_task(opts.task, config);
  if (!opts.dot_path.empty())
    export_arg_dot(outcome.reach_result.reached, outcome.task.cfa, opts.dot_path);
  if (!opts.cfa_dot_path.empty()) export_cfa_dot(outcome.task.cfa, opts.cfa_dot_path);
  if (!opts.stats_path.empty()) {
    std::ofstream out(opts.stats_path);
    if (!out) throw std::runtime_error("cannot write '" + opts.stats_path + "'");
    out << stats_csv_header() << "\n"
        << stats_csv_row(outcome.report, read_expected_verdict(opts.task)) << "\n";
  }
  if (opts.json)
    std::cout << report_json(outcome);
  else
    std::cout << report_text(outcome);
  return verdict_exit_code(outcome.report.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threadreach: reachability and deadlock checking for multi-threaded .mtc programs"};
  app.require_subcommand(0, 1);

  CliOptions opts;
  app.add_option("task", opts.task, "task file (.mtc)");
  app.add_option("--domain", opts.domain, "data domain: none|value|interval (default value)");
  app.add_flag("--por,!--no-por", opts.por, "partial-order reduction (default on)");
  app.add_flag("--partitioning,!--no-partitioning", opts.partitioning,
               "reached-set partitioning (default on)");
  app.add_option("--waitlist", opts.waitlist, "dfs|bfs|threads-dfs|threads-bfs (default threads-dfs)");
  app.add_option("--max-clones", opts.max_clones, "CFA clones per start routine (default 5)");
  app.add_option("--property", opts.property, "error|deadlock|both (default error)");
  app.add_option("--timeout", opts.timeout_seconds, "per-run timeout in seconds (0 = none)");
  app.add_option("--dot", opts.dot_path, "export the ARG as DOT");
  app.add_option("--cfa-dot", opts.cfa_dot_path, "export the CFAs as DOT");
  app.add_option("--stats", opts.stats_path, "write the stats CSV row to this file");
  app.add_flag("--json", opts.json, "print the report as a JSON document");

  auto* bench_cmd = app.add_subcommand("bench", "run a corpus against a configuration matrix");
  BenchOptions bopts;
  std::string matrix = "waitlist";
  std::string bench_domain = "value";
  std::string bench_property = "both";
  double bench_timeout = 10.0;
  bench_cmd->add_option("corpus", bopts.corpus_dir, "directory with .mtc tasks and .expect sidecars")
      ->required();
  bench_cmd->add_option("--matrix", matrix, "waitlist|por|partitioning|full (default waitlist)");
  bench_cmd->add_option("--domain", bench_domain, "data domain for every cell (default value)");
  bench_cmd->add_option("--property", bench_property, "property for every cell (default both)");
  bench_cmd->add_option("--timeout", bench_timeout, "per-task timeout in seconds (default 10)");
  bench_cmd->add_option("--out", bopts.out_csv, "CSV output path (default stdout)");
  bench_cmd->add_flag("--quantiles", bopts.quantiles, "also write <out>.quantile.csv");

  auto* oracle_cmd =
      app.add_subcommand("oracle", "bounded brute-force interpretation of all interleavings");
  std::string oracle_task;
  OracleOptions oopts;
  int oracle_clones = 5;
  oracle_cmd->add_option("task", oracle_task, "task file (.mtc)")->required();
  oracle_cmd->add_option("--step-bound", oopts.step_bound, "max steps per interleaving");
  oracle_cmd->add_option("--state-budget", oopts.state_budget, "max expansions before giving up");
  oracle_cmd->add_option("--nondet-values", oopts.nondet_values,
                         "values nondet() ranges over (default 0 1)");
  oracle_cmd->add_option("--max-clones", oracle_clones, "CFA clones per start routine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << std::endl;
    return 64;
  }

  try {
    if (bench_cmd->parsed()) {
      bopts.base.domain = parse_domain(bench_domain);
      bopts.base.property = parse_property(bench_property);
      bopts.base.timeout_ms = static_cast<std::int64_t>(bench_timeout * 1000.0);
      if (matrix == "waitlist") bopts.matrix = BenchMatrix::Waitlist;
      else if (matrix == "por") bopts.matrix = BenchMatrix::Por;
      else if (matrix == "partitioning") bopts.matrix = BenchMatrix::Partitioning;
      else if (matrix == "full") bopts.matrix = BenchMatrix::Full;
      else throw std::runtime_error("unknown --matrix '" + matrix + "'");
      std::vector<BenchRow> rows = bench(bopts);
      std::string csv = bench_csv(rows);
      if (bopts.out_csv.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(bopts.out_csv);
        if (!out) throw std::runtime_error("cannot write '" + bopts.out_csv + "'");
        out << csv;
        if (bopts.quantiles) {
          std::ofstream q(bopts.out_csv + ".quantile.csv");
          q << bench_quantile_csv(rows);
        }
      }
      size_t correct = 0;
      for (const auto& r : rows) correct += r.correct ? 1 : 0;
      std::cerr << "bench: " << rows.size() << " rows, " << correct << " correct" << std::endl;
      return 0;
    }
    if (oracle_cmd->parsed()) {
      PreparedTask task = prepare_task_file(oracle_task, oracle_clones);
      OracleResult res = run_oracle(task.cfa, oopts);
      const char* verdict = res.verdict == OracleVerdict::Safe        ? "Safe"
                            : res.verdict == OracleVerdict::Violation ? "Violation"
                            : res.verdict == OracleVerdict::Deadlock  ? "Deadlock"
                                                                      : "Unknown";
      std::cout << "verdict: " << verdict << "\n";
      std::cout << "states:  " << res.state_count << "\n";
      if (res.bound_exceeded) std::cout << "bound exceeded\n";
      if (!res.diagnostic.empty()) std::cout << "reason:  " << res.diagnostic << "\n";
      for (const auto& [var, v] : res.max_observed)
        std::cout << "max " << var << " = " << v << "\n";
      return res.verdict == OracleVerdict::Safe        ? 0
             : res.verdict == OracleVerdict::Violation ? 1
             : res.verdict == OracleVerdict::Deadlock  ? 2
                                                       : 3;
    }
    if (opts.task.empty()) {
      std::cerr << "no task file given (see --help)" << std::endl;
      return 64;
    }
    return run_mode(opts);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << std::endl;
    return 64;
  } catch (const LowerError& e) {
    std::cerr << "frontend error: " << e.what() << std::endl;
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 64;
  }
}
