#pragma once

#include <optional>
#include <string>

#include "threadreach/dot.hpp"
#include "threadreach/lower.hpp"
#include "threadreach/oracle.hpp"
#include "threadreach/parser.hpp"
#include "threadreach/reach.hpp"

namespace threadreach {

// Frontend pipeline output: parse -> lower -> clone -> classify.
struct PreparedTask {
  Ast ast;
  CfaSet cfa;
};

PreparedTask prepare_task_text(const std::string& source, int max_clones);
PreparedTask prepare_task_file(const std::string& path, int max_clones);

struct RunReport {
  std::string task;
  ExplorationConfig config;
  Verdict verdict = Verdict::Unknown;
  StatsRecord stats;
  std::string diagnostic;
  std::vector<std::string> warnings;
  std::vector<CexStep> counterexample;
};

struct RunOutcome {
  RunReport report;
  ReachResult reach_result;
  PreparedTask task;
};

// Full analysis of one task file.
RunOutcome run_task(const std::string& path, const ExplorationConfig& config);

// Re-executes a counterexample through the composite transfer relation;
// true iff every step matches an enabled move and the final state violates
// the property (error state) or is deadlocked.
bool replay_counterexample(const PreparedTask& task, const ExplorationConfig& config,
                           const std::vector<CexStep>& steps);

int verdict_exit_code(Verdict v);

std::string report_text(const RunOutcome& outcome);
std::string report_json(const RunOutcome& outcome);
// Single CSV row: task,config,verdict,expected,popped,reached,comparisons,wall_ms
std::string stats_csv_header();
std::string stats_csv_row(const RunReport& report, const std::string& expected);

}  // namespace threadreach
