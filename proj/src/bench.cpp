#include "threadreach/bench.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace threadreach {

namespace fs = std::filesystem;

std::string read_expected_verdict(const std::string& task_path) {
  std::ifstream in(task_path + ".expect");
  if (!in) return "?";
  std::string word;
  in >> word;
  return word.empty() ? "?" : word;
}

namespace {

std::string verdict_to_expected(Verdict v) {
  switch (v) {
    case Verdict::Safe: return "SAFE";
    case Verdict::Violation: return "VIOLATION";
    case Verdict::Deadlock: return "DEADLOCK";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::vector<ExplorationConfig> matrix_configs(const BenchOptions& opts) {
  std::vector<ExplorationConfig> configs;
  const ExplorationConfig& base = opts.base;
  auto policies = {WaitlistPolicy::DFS, WaitlistPolicy::BFS, WaitlistPolicy::ThreadsFirstThenDFS,
                   WaitlistPolicy::ThreadsFirstThenBFS};
  switch (opts.matrix) {
    case BenchMatrix::Waitlist:
      for (auto p : policies) {
        ExplorationConfig c = base;
        c.waitlist = p;
        configs.push_back(c);
      }
      break;
    case BenchMatrix::Por:
      for (bool por : {true, false}) {
        ExplorationConfig c = base;
        c.por = por;
        configs.push_back(c);
      }
      break;
    case BenchMatrix::Partitioning:
      for (bool part : {true, false}) {
        ExplorationConfig c = base;
        c.partitioning = part;
        configs.push_back(c);
      }
      break;
    case BenchMatrix::Full:
      for (bool por : {true, false})
        for (bool part : {true, false})
          for (auto p : policies) {
            ExplorationConfig c = base;
            c.por = por;
            c.partitioning = part;
            c.waitlist = p;
            configs.push_back(c);
          }
      break;
  }
  return configs;
}

}  // namespace

std::vector<BenchRow> bench(const BenchOptions& opts) {
  std::vector<std::string> tasks;
  for (const auto& entry : fs::directory_iterator(opts.corpus_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".mtc")
      tasks.push_back(entry.path().string());
  }
  std::sort(tasks.begin(), tasks.end());

  std::vector<ExplorationConfig> configs = matrix_configs(opts);
  std::vector<BenchRow> rows;
  for (const auto& task : tasks) {
    std::string expected = read_expected_verdict(task);
    for (const auto& config : configs) {
      BenchRow row;
      row.expected = expected;
      try {
        RunOutcome outcome = run_task(task, config);
        row.report = outcome.report;
      } catch (const std::exception& e) {
        row.report.task = task;
        row.report.config = config;
        row.report.verdict = Verdict::Unknown;
        row.report.diagnostic = e.what();
      }
      row.correct = verdict_to_expected(row.report.verdict) == expected;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << stats_csv_header() << "\n";
  for (const auto& row : rows) out << stats_csv_row(row.report, row.expected) << "\n";
  return out.str();
}

std::string bench_quantile_csv(const std::vector<BenchRow>& rows) {
  std::map<std::string, std::vector<std::int64_t>> per_config;
  for (const auto& row : rows)
    if (row.correct) per_config[row.report.config.summary()].push_back(row.report.stats.wall_ms);
  std::ostringstream out;
  out << "config,nth_fastest,wall_ms\n";
  for (auto& [config, times] : per_config) {
    std::sort(times.begin(), times.end());
    for (size_t i = 0; i < times.size(); ++i)
      out << config << "," << (i + 1) << "," << times[i] << "\n";
  }
  return out.str();
}

}  // namespace threadreach
