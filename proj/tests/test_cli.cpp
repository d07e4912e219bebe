#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "threadreach/bench.hpp"
#include "threadreach/dot.hpp"
#include "threadreach/oracle.hpp"
#include "threadreach/run.hpp"

using namespace threadreach;

namespace {

std::string corpus(const std::string& name) {
  return std::string(THREADREACH_CORPUS_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("dot: byte-identical across repeated runs") {
  ExplorationConfig c;
  c.domain = Domain::None;
  c.por = false;
  c.waitlist = WaitlistPolicy::BFS;
  RunOutcome a = run_task(corpus("fib_safe.mtc"), c);
  RunOutcome b = run_task(corpus("fib_safe.mtc"), c);
  CHECK(arg_to_dot(a.reach_result.reached, a.task.cfa) ==
        arg_to_dot(b.reach_result.reached, b.task.cfa));
}

TEST_CASE("dot: threading-only fib exports 20 nodes") {
  ExplorationConfig c;
  c.domain = Domain::None;
  c.por = false;
  c.waitlist = WaitlistPolicy::BFS;
  RunOutcome out = run_task(corpus("fib_safe.mtc"), c);
  std::string dot = arg_to_dot(out.reach_result.reached, out.task.cfa);
  // count node definition lines: "nK [label="
  size_t nodes = 0;
  for (size_t pos = 0; (pos = dot.find("[label=", pos)) != std::string::npos; pos += 7) ++nodes;
  size_t edges = 0;
  for (size_t pos = 0; (pos = dot.find(" -> ", pos)) != std::string::npos; pos += 4) ++edges;
  CHECK(nodes - edges == 20);  // every line carries a label; edge lines also match " -> "
  CHECK(edges == 27);
}

TEST_CASE("dot: empty main gives a two-node graph") {
  std::string tmp = (std::filesystem::temp_directory_path() / "tr_empty_main.mtc").string();
  std::ofstream(tmp) << "void main(){}\n";
  ExplorationConfig c;
  c.domain = Domain::None;
  RunOutcome out = run_task(tmp, c);
  CHECK(out.report.verdict == Verdict::Safe);
  std::string dot = arg_to_dot(out.reach_result.reached, out.task.cfa);
  size_t nodes = 0;
  for (size_t pos = 0; (pos = dot.find("[label=", pos)) != std::string::npos; pos += 7) ++nodes;
  size_t edges = 0;
  for (size_t pos = 0; (pos = dot.find(" -> ", pos)) != std::string::npos; pos += 4) ++edges;
  CHECK(nodes - edges == 2);
  CHECK(edges == 1);
}

TEST_CASE("cfa dot renders every function cluster") {
  PreparedTask t = prepare_task_file(corpus("fib_safe.mtc"), 2);
  std::string dot = cfa_to_dot(t.cfa);
  CHECK(dot.find("label=\"main\"") != std::string::npos);
  CHECK(dot.find("label=\"t1__1\"") != std::string::npos);
  CHECK(dot.find("label=\"t2__2\"") != std::string::npos);
}

TEST_CASE("json report is well-formed and carries the counterexample") {
  ExplorationConfig c;
  c.property = PropertySpec::Both;
  RunOutcome out = run_task(corpus("fib_assert7.mtc"), c);
  nlohmann::json j = nlohmann::json::parse(report_json(out));
  CHECK(j["verdict"] == "Violation");
  CHECK(j["exitCode"] == 1);
  CHECK(j["stats"]["reached"].get<std::int64_t>() > 0);
  CHECK(!j["counterexample"].empty());
  CHECK(j["config"]["waitlist"] == "threads-dfs");
}

TEST_CASE("exit codes map verdicts") {
  CHECK(verdict_exit_code(Verdict::Safe) == 0);
  CHECK(verdict_exit_code(Verdict::Violation) == 1);
  CHECK(verdict_exit_code(Verdict::Deadlock) == 2);
  CHECK(verdict_exit_code(Verdict::Unknown) == 3);
}

TEST_CASE("counterexample replay reproduces violations and deadlocks") {
  for (const char* task : {"fib_assert7.mtc", "early_bug.mtc", "nondet_bug_unsafe.mtc",
                           "crosslock_deadlock.mtc", "self_join_deadlock.mtc"}) {
    ExplorationConfig c;
    c.property = PropertySpec::Both;
    RunOutcome out = run_task(corpus(task), c);
    REQUIRE_MESSAGE(
        (out.report.verdict == Verdict::Violation || out.report.verdict == Verdict::Deadlock),
        task);
    CHECK_MESSAGE(replay_counterexample(out.task, c, out.report.counterexample), task);
  }
}

TEST_CASE("counterexample is absent for safe and unknown runs") {
  ExplorationConfig c;
  c.property = PropertySpec::Both;
  CHECK(run_task(corpus("fib_safe.mtc"), c).report.counterexample.empty());
  c.max_clones = 2;
  CHECK(run_task(corpus("clone_exhaust.mtc"), c).report.counterexample.empty());
}

TEST_CASE("stats csv row matches the pinned header") {
  CHECK(stats_csv_header() == "task,config,verdict,expected,popped,reached,comparisons,wall_ms");
  ExplorationConfig c;
  RunOutcome out = run_task(corpus("single_chain_safe.mtc"), c);
  std::string row = stats_csv_row(out.report, "SAFE");
  CHECK(row.find("single_chain_safe.mtc") != std::string::npos);
  CHECK(std::count(row.begin(), row.end(), ',') == 7);
}

TEST_CASE("bench: matrix size, correctness column, timeout rows") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "tr_bench_corpus";
  fs::create_directories(dir);
  for (const char* task : {"fib_safe.mtc", "fib_assert7.mtc", "crosslock_deadlock.mtc"}) {
    fs::copy_file(corpus(task), dir / task, fs::copy_options::overwrite_existing);
    fs::copy_file(corpus(std::string(task) + ".expect"), dir / (std::string(task) + ".expect"),
                  fs::copy_options::overwrite_existing);
  }
  // one task without a sidecar and one that times out under the value domain
  fs::copy_file(corpus("interval_loop_safe.mtc"), dir / "interval_loop_safe.mtc",
                fs::copy_options::overwrite_existing);

  BenchOptions opts;
  opts.corpus_dir = dir.string();
  opts.base.property = PropertySpec::Both;
  opts.base.timeout_ms = 1000;
  std::vector<BenchRow> rows = bench(opts);
  CHECK(rows.size() == 16);  // 4 tasks x 4 waitlist policies
  int correct = 0, unknown = 0, missing = 0;
  for (const auto& row : rows) {
    if (row.correct) ++correct;
    if (row.report.verdict == Verdict::Unknown) ++unknown;
    if (row.expected == "?") ++missing;
  }
  CHECK(correct == 12);
  CHECK(unknown == 4);  // the value domain times out on the unbounded counter
  CHECK(missing == 4);  // no sidecar for the copied loop task

  std::string csv = bench_csv(rows);
  CHECK(csv.rfind("task,config,verdict,expected,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);  // header + 16 rows

  std::string quant = bench_quantile_csv(rows);
  CHECK(quant.rfind("config,nth_fastest,wall_ms", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("full differential: analysis agrees with the oracle on every config") {
  // 2 por x 2 partitioning x 4 policies on a representative in-bounds subset.
  const std::vector<std::pair<std::string, OracleVerdict>> tasks = {
      {"fib_safe.mtc", OracleVerdict::Safe},
      {"fib_assert7.mtc", OracleVerdict::Violation},
      {"fib_locals_safe.mtc", OracleVerdict::Safe},
      {"atomic_safe.mtc", OracleVerdict::Safe},
      {"atomic_missing_unsafe.mtc", OracleVerdict::Violation},
      {"crosslock_deadlock.mtc", OracleVerdict::Deadlock},
      {"reuse_var_safe.mtc", OracleVerdict::Safe},
  };
  for (const auto& [task, expected] : tasks) {
    PreparedTask prepared = prepare_task_file(corpus(task), 5);
    OracleResult oracle = run_oracle(prepared.cfa, {});
    REQUIRE_MESSAGE(oracle.verdict == expected, task);
    for (bool por : {true, false}) {
      for (bool part : {true, false}) {
        for (auto policy :
             {WaitlistPolicy::DFS, WaitlistPolicy::BFS, WaitlistPolicy::ThreadsFirstThenDFS,
              WaitlistPolicy::ThreadsFirstThenBFS}) {
          ExplorationConfig c;
          c.por = por;
          c.partitioning = part;
          c.waitlist = policy;
          c.property = PropertySpec::Both;
          RunOutcome out = run_task(corpus(task), c);
          const char* got = verdict_name(out.report.verdict);
          const char* want = expected == OracleVerdict::Safe        ? "Safe"
                             : expected == OracleVerdict::Violation ? "Violation"
                                                                    : "Deadlock";
          CHECK_MESSAGE(std::string(got) == want, task, " ", c.summary());
        }
      }
    }
  }
}
