#include "threadreach/run.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace threadreach {

PreparedTask prepare_task_text(const std::string& source, int max_clones) {
  PreparedTask t;
  t.ast = parse(source);
  t.cfa = lower_to_cfa(t.ast);
  t.cfa = clone_functions(std::move(t.cfa), max_clones);
  classify_edges(t.cfa);
  return t;
}

PreparedTask prepare_task_file(const std::string& path, int max_clones) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read task file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return prepare_task_text(buf.str(), max_clones);
}

RunOutcome run_task(const std::string& path, const ExplorationConfig& config) {
  RunOutcome outcome;
  outcome.task = prepare_task_file(path, config.max_clones);
  CompositeCpa cpa(outcome.task.cfa, config.domain, config.por);
  outcome.reach_result = reach(cpa, config);

  outcome.report.task = path;
  outcome.report.config = config;
  outcome.report.verdict = outcome.reach_result.verdict;
  outcome.report.stats = outcome.reach_result.stats;
  outcome.report.diagnostic = outcome.reach_result.diagnostic;
  outcome.report.warnings = outcome.reach_result.warnings;
  outcome.report.counterexample = outcome.reach_result.counterexample;
  return outcome;
}

bool replay_counterexample(const PreparedTask& task, const ExplorationConfig& config,
                           const std::vector<CexStep>& steps) {
  CompositeCpa cpa(task.cfa, config.domain, config.por);
  CompositeState state = cpa.initial();
  for (const CexStep& step : steps) {
    bool advanced = false;
    for (CompositeMove& m : cpa.transfer(state)) {
      if (m.thread == step.thread && m.edge == step.edge) {
        state = std::move(m.state);
        advanced = true;
        break;
      }
    }
    if (!advanced) return false;
  }
  if (check_error(state, task.cfa)) return true;
  std::vector<EnabledMove> moves = threading_moves(state.threading, task.cfa);
  return check_deadlock(state.threading, moves, task.cfa);
}

int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::Safe: return 0;
    case Verdict::Violation: return 1;
    case Verdict::Deadlock: return 2;
    case Verdict::Unknown: return 3;
  }
  return 3;
}

namespace {

std::string cex_step_text(const PreparedTask& task, const CexStep& step) {
  const CfaEdge& e = task.cfa.edge(step.edge);
  return step.thread.display() + ": " + task.cfa.loc_name(e.from) + " -> " +
         task.cfa.loc_name(e.to) + "  " + op_text(e.op);
}

}  // namespace

std::string report_text(const RunOutcome& outcome) {
  const RunReport& r = outcome.report;
  std::ostringstream out;
  out << "task:     " << r.task << "\n";
  out << "config:   " << r.config.summary() << "\n";
  out << "verdict:  " << verdict_name(r.verdict) << "\n";
  if (!r.diagnostic.empty()) out << "reason:   " << r.diagnostic << "\n";
  out << "stats:    popped=" << r.stats.popped << " reached=" << r.stats.reached
      << " comparisons=" << r.stats.comparisons << " peak=" << r.stats.peak
      << " wall_ms=" << r.stats.wall_ms << "\n";
  for (const auto& w : r.warnings) out << "warning:  " << w << "\n";
  if (!r.counterexample.empty()) {
    out << "counterexample (" << r.counterexample.size() << " steps):\n";
    for (const CexStep& s : r.counterexample) out << "  " << cex_step_text(outcome.task, s) << "\n";
  }
  return out.str();
}

std::string report_json(const RunOutcome& outcome) {
  const RunReport& r = outcome.report;
  nlohmann::json j;
  j["task"] = r.task;
  j["config"] = {
      {"domain", r.config.domain == Domain::None      ? "none"
                 : r.config.domain == Domain::Value   ? "value"
                                                      : "interval"},
      {"por", r.config.por},
      {"partitioning", r.config.partitioning},
      {"waitlist", waitlist_policy_name(r.config.waitlist)},
      {"maxClones", r.config.max_clones},
      {"property", r.config.property == PropertySpec::ErrorReachability ? "error"
                   : r.config.property == PropertySpec::DeadlockFreedom ? "deadlock"
                                                                        : "both"},
      {"timeoutMs", r.config.timeout_ms},
  };
  j["verdict"] = verdict_name(r.verdict);
  j["exitCode"] = verdict_exit_code(r.verdict);
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  j["stats"] = {{"popped", r.stats.popped},
                {"reached", r.stats.reached},
                {"comparisons", r.stats.comparisons},
                {"peakReached", r.stats.peak},
                {"wallMillis", r.stats.wall_ms}};
  j["warnings"] = r.warnings;
  nlohmann::json cex = nlohmann::json::array();
  for (const CexStep& s : r.counterexample) {
    const CfaEdge& e = outcome.task.cfa.edge(s.edge);
    cex.push_back({{"thread", s.thread.display()},
                   {"from", outcome.task.cfa.loc_name(e.from)},
                   {"to", outcome.task.cfa.loc_name(e.to)},
                   {"op", op_text(e.op)}});
  }
  j["counterexample"] = cex;
  return j.dump(2) + "\n";
}

std::string stats_csv_header() {
  return "task,config,verdict,expected,popped,reached,comparisons,wall_ms";
}

std::string stats_csv_row(const RunReport& report, const std::string& expected) {
  std::ostringstream out;
  out << report.task << "," << report.config.summary() << "," << verdict_name(report.verdict)
      << "," << expected << "," << report.stats.popped << "," << report.stats.reached << ","
      << report.stats.comparisons << "," << report.stats.wall_ms;
  return out.str();
}

}  // namespace threadreach
