#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "threadreach/reach.hpp"
#include "threadreach/run.hpp"

using namespace threadreach;

namespace {

std::string corpus(const std::string& name) {
  return std::string(THREADREACH_CORPUS_DIR) + "/" + name;
}

ExplorationConfig config_for(const std::string& task, Domain domain = Domain::Value) {
  ExplorationConfig c;
  c.domain = task.find("interval_loop") != std::string::npos ? Domain::Interval : domain;
  c.property = PropertySpec::Both;
  c.timeout_ms = 60000;
  return c;
}

std::string state_fingerprint(const CompositeState& s) {
  return threading_partition_key(s.threading) + "#" + data_state_label(s.data);
}

std::multiset<std::string> reached_fingerprints(const ReachResult& r) {
  std::multiset<std::string> out;
  for (const auto& n : r.reached.nodes) out.insert(state_fingerprint(n.state));
  return out;
}

}  // namespace

TEST_CASE("merge_sep returns the existing state") {
  PreparedTask t = prepare_task_file(corpus("fib_safe.mtc"), 5);
  CompositeCpa cpa(t.cfa, Domain::Value, false);
  CompositeState a = cpa.initial();
  CompositeState b = a;
  std::get<ValueEnv>(b.data)["i"] = 9;
  CHECK(merge_sep(a, b) == b);
  CHECK(merge_sep(b, a) == a);
  CHECK(merge_sep(a, a) == a);
}

TEST_CASE("stop_sep: equality, vacuous, and unknown-covers-value") {
  PreparedTask t = prepare_task_file(corpus("fib_safe.mtc"), 5);
  CompositeCpa cpa(t.cfa, Domain::Value, false);
  CompositeState s = cpa.initial();
  CHECK(stop_sep(cpa, s, {&s}));
  CHECK(!stop_sep(cpa, s, {}));
  CompositeState unknown = s;
  std::get<ValueEnv>(unknown.data).erase("i");
  CHECK(stop_sep(cpa, s, {&unknown}));   // {i unknown} covers {i=1}
  CHECK(!stop_sep(cpa, unknown, {&s}));
}

TEST_CASE("partition key ignores data, includes locks") {
  PreparedTask t = prepare_task_file(corpus("fib_safe.mtc"), 5);
  CompositeCpa cpa(t.cfa, Domain::Value, false);
  CompositeState a = cpa.initial();
  CompositeState b = a;
  std::get<ValueEnv>(b.data)["i"] = 1234;
  CHECK(cpa.partition_key(a) == cpa.partition_key(b));
  CompositeState locked = a;
  locked.threading.locks["m"] = ThreadId{"main", 1};
  CHECK(cpa.partition_key(locked) != cpa.partition_key(a));
}

TEST_CASE("waitlist_pop policies") {
  PreparedTask t = prepare_task_file(corpus("fib_safe.mtc"), 5);
  CompositeCpa cpa(t.cfa, Domain::None, false);

  auto mk_reached = [&] {
    ReachedSet reached;
    // three states with 2, 1 and 3 live threads, inserted in that order
    auto add = [&](int threads) {
      ArgNode n;
      n.state = cpa.initial();
      ThreadingState& ts = n.state.threading;
      for (int k = 1; k < threads; ++k)
        ts.threads[ThreadId{"id" + std::to_string(k), 1}] =
            ThreadEntry{t.cfa.functions.at("t1__1").entry, {}};
      n.in_waitlist = true;
      NodeId id = static_cast<NodeId>(reached.nodes.size());
      reached.nodes.push_back(std::move(n));
      reached.waitlist.push_back(id);
    };
    add(2);  // a
    add(1);  // b
    add(3);  // c
    return reached;
  };

  ReachedSet r1 = mk_reached();
  CHECK(waitlist_pop(r1, WaitlistPolicy::ThreadsFirstThenBFS) == 1);  // b
  ReachedSet r2 = mk_reached();
  CHECK(waitlist_pop(r2, WaitlistPolicy::DFS) == 2);  // c (most recent)
  ReachedSet r3 = mk_reached();
  CHECK(waitlist_pop(r3, WaitlistPolicy::BFS) == 0);  // a (oldest)
  // threads-first tie break: two states with one thread each
  ReachedSet r4 = mk_reached();
  {
    ArgNode n;
    n.state = cpa.initial();
    n.in_waitlist = true;
    r4.nodes.push_back(std::move(n));
    r4.waitlist.push_back(3);
  }
  CHECK(waitlist_pop(r4, WaitlistPolicy::ThreadsFirstThenDFS) == 3);  // newest 1-thread state
  ReachedSet r5 = mk_reached();
  {
    ArgNode n;
    n.state = cpa.initial();
    n.in_waitlist = true;
    r5.nodes.push_back(std::move(n));
    r5.waitlist.push_back(3);
  }
  CHECK(waitlist_pop(r5, WaitlistPolicy::ThreadsFirstThenBFS) == 1);  // oldest 1-thread state
}

TEST_CASE("reach: fib with value domain is safe under any config") {
  ExplorationConfig c = config_for("fib_safe");
  c.property = PropertySpec::ErrorReachability;
  RunOutcome out = run_task(corpus("fib_safe.mtc"), c);
  CHECK(out.report.verdict == Verdict::Safe);
}

TEST_CASE("reach: threading-only fib reproduces the 20-state reached set") {
  ExplorationConfig c;
  c.domain = Domain::None;
  c.por = false;
  c.partitioning = true;
  c.waitlist = WaitlistPolicy::BFS;
  RunOutcome out = run_task(corpus("fib_safe.mtc"), c);
  CHECK(out.reach_result.reached.size() == 20);
  CHECK(out.reach_result.reached.arg_edges.size() == 27);
}

TEST_CASE("reach: assert mutant is violated with a replayable counterexample") {
  ExplorationConfig c = config_for("fib_assert7");
  RunOutcome out = run_task(corpus("fib_assert7.mtc"), c);
  CHECK(out.report.verdict == Verdict::Violation);
  REQUIRE(!out.report.counterexample.empty());
  CHECK(replay_counterexample(out.task, c, out.report.counterexample));
}

TEST_CASE("reach: unsupported feature aborts with Unknown") {
  ExplorationConfig c = config_for("clone_exhaust");
  c.max_clones = 2;
  RunOutcome out = run_task(corpus("clone_exhaust.mtc"), c);
  CHECK(out.report.verdict == Verdict::Unknown);
  CHECK(out.report.diagnostic.find("insufficient number of threads") != std::string::npos);
}

TEST_CASE("partitioning transparency: same reached sets, fewer comparisons") {
  for (const char* task : {"fib_safe.mtc", "fib_locals_safe.mtc", "atomic_safe.mtc",
                           "crosslock_deadlock.mtc", "interval_loop_safe.mtc"}) {
    ExplorationConfig on = config_for(task);
    ExplorationConfig off = on;
    off.partitioning = false;
    RunOutcome a = run_task(corpus(task), on);
    RunOutcome b = run_task(corpus(task), off);
    CHECK_MESSAGE(a.report.verdict == b.report.verdict, task);
    CHECK_MESSAGE(reached_fingerprints(a.reach_result) == reached_fingerprints(b.reach_result),
                  task);
    CHECK_MESSAGE(a.report.stats.comparisons <= b.report.stats.comparisons, task);
  }
}

TEST_CASE("verdicts agree across waitlist policies") {
  for (const char* task : {"fib_safe.mtc", "fib_assert7.mtc", "crosslock_deadlock.mtc",
                           "self_join_deadlock.mtc", "nondet_bug_unsafe.mtc"}) {
    std::set<Verdict> verdicts;
    for (auto policy : {WaitlistPolicy::DFS, WaitlistPolicy::BFS,
                        WaitlistPolicy::ThreadsFirstThenDFS, WaitlistPolicy::ThreadsFirstThenBFS}) {
      ExplorationConfig c = config_for(task);
      c.waitlist = policy;
      verdicts.insert(run_task(corpus(task), c).report.verdict);
    }
    CHECK_MESSAGE(verdicts.size() == 1, task);
  }
}

TEST_CASE("arg is acyclic and edges respect discovery order") {
  for (const char* task : {"fib_safe.mtc", "fib_locals_safe.mtc", "stress_partition.mtc"}) {
    ExplorationConfig c = config_for(task);
    RunOutcome out = run_task(corpus(task), c);
    for (const ArgEdge& e : out.reach_result.reached.arg_edges) CHECK(e.parent < e.child);
  }
}

TEST_CASE("safe fixpoint: every successor of a reached state is covered") {
  for (const char* task : {"fib_safe.mtc", "atomic_safe.mtc", "reuse_var_safe.mtc"}) {
    ExplorationConfig c = config_for(task);
    RunOutcome out = run_task(corpus(task), c);
    REQUIRE(out.report.verdict == Verdict::Safe);
    CompositeCpa cpa(out.task.cfa, c.domain, c.por);
    const auto& nodes = out.reach_result.reached.nodes;
    for (const auto& node : nodes) {
      for (const auto& move : cpa.transfer(node.state)) {
        bool covered = false;
        for (const auto& other : nodes) {
          if (cpa.covers(other.state, move.state)) {
            covered = true;
            break;
          }
        }
        CHECK_MESSAGE(covered, task, " uncovered successor of a reached state");
      }
    }
  }
}

TEST_CASE("timeout yields Unknown") {
  ExplorationConfig c;
  c.domain = Domain::Value;  // diverges on the unbounded counter
  c.property = PropertySpec::Both;
  c.timeout_ms = 200;
  RunOutcome out = run_task(corpus("interval_loop_safe.mtc"), c);
  CHECK(out.report.verdict == Verdict::Unknown);
  CHECK(out.report.diagnostic == "timeout");
}

TEST_CASE("stats record counts pops and comparisons") {
  ExplorationConfig c = config_for("fib_safe");
  RunOutcome out = run_task(corpus("fib_safe.mtc"), c);
  CHECK(out.report.stats.popped == 47);
  CHECK(out.report.stats.reached == 47);
  CHECK(out.report.stats.peak == 47);
  CHECK(out.report.stats.comparisons > 0);
}
