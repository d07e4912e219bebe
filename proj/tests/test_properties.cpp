#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "threadreach/properties.hpp"
#include "threadreach/run.hpp"

using namespace threadreach;

namespace {

std::string corpus(const std::string& name) {
  return std::string(THREADREACH_CORPUS_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("check_error: true iff a live thread sits on an error location") {
  PreparedTask t = prepare_task_file(corpus("fib_safe.mtc"), 5);
  CompositeCpa cpa(t.cfa, Domain::None, false);
  CompositeState s = cpa.initial();
  CHECK(!check_error(s, t.cfa));  // entry is never an error location
  LocId err = kNoLocation;
  for (const auto& l : t.cfa.locations)
    if (l.is_error) err = l.id;
  REQUIRE(err != kNoLocation);
  s.threading.threads.at(ThreadId{"main", 1}).location = err;
  CHECK(check_error(s, t.cfa));
}

TEST_CASE("check_error: false on every reached state of the safe task") {
  ExplorationConfig c;
  c.property = PropertySpec::Both;
  RunOutcome out = run_task(corpus("fib_safe.mtc"), c);
  REQUIRE(out.report.verdict == Verdict::Safe);
  for (const auto& n : out.reach_result.reached.nodes) CHECK(!check_error(n.state, out.task.cfa));
}

TEST_CASE("check_deadlock: crossed locks block, finished threads do not") {
  PreparedTask t = prepare_task_file(corpus("crosslock_deadlock.mtc"), 5);
  // t1 holds m1 and waits for m2; t2 holds m2 and waits for m1; main waits to join.
  ThreadingState s;
  LocId main2 = kNoLocation;
  for (const auto& l : t.cfa.locations)
    if (l.function == "main" && l.index == 2) main2 = l.id;
  REQUIRE(main2 != kNoLocation);
  auto loc_idx = [&](const std::string& fn, int idx) {
    for (const auto& l : t.cfa.locations)
      if (l.function == fn && l.index == idx && !l.is_error) return l.id;
    return kNoLocation;
  };
  s.threads[ThreadId{"main", 1}] = ThreadEntry{main2, {}};
  s.threads[ThreadId{"a", 1}] = ThreadEntry{loc_idx("t1__1", 1), {}};
  s.threads[ThreadId{"b", 1}] = ThreadEntry{loc_idx("t2__1", 1), {}};
  s.spawn_counts["a"] = 1;
  s.spawn_counts["b"] = 1;
  s.locks["m1"] = ThreadId{"a", 1};
  s.locks["m2"] = ThreadId{"b", 1};
  auto moves = threading_moves(s, t.cfa);
  CHECK(moves.empty());
  CHECK(check_deadlock(s, moves, t.cfa));

  // non-empty moves: never a deadlock
  ThreadingState live = s;
  live.locks.erase("m2");
  auto live_moves = threading_moves(live, t.cfa);
  CHECK(!live_moves.empty());
  CHECK(!check_deadlock(live, live_moves, t.cfa));
}

TEST_CASE("check_deadlock: normal termination is not a deadlock") {
  PreparedTask t = prepare_task_file(corpus("single_chain_safe.mtc"), 5);
  ThreadingState s;
  s.threads[ThreadId{"main", 1}] = ThreadEntry{t.cfa.functions.at("main").exit, {}};
  auto moves = threading_moves(s, t.cfa);
  CHECK(moves.empty());
  CHECK(!check_deadlock(s, moves, t.cfa));
}

TEST_CASE("check_deadlock: join on a never-created identifier counts") {
  PreparedTask t = prepare_task_file(corpus("join_never_deadlock.mtc"), 5);
  ThreadingState s = threading_initial(t.cfa);
  auto moves = threading_moves(s, t.cfa);
  CHECK(moves.empty());
  CHECK(check_deadlock(s, moves, t.cfa));
}

TEST_CASE("deadlock monotonicity: releasing the lock flips the verdict") {
  ExplorationConfig c;
  c.property = PropertySpec::Both;
  CHECK(run_task(corpus("crosslock_deadlock.mtc"), c).report.verdict == Verdict::Deadlock);
  CHECK(run_task(corpus("crosslock_release_safe.mtc"), c).report.verdict == Verdict::Safe);
  CHECK(run_task(corpus("crosslock_ordered_safe.mtc"), c).report.verdict == Verdict::Safe);
}

TEST_CASE("error-only property: deadlocked branches end silently as Safe") {
  ExplorationConfig c;
  c.property = PropertySpec::ErrorReachability;
  RunOutcome out = run_task(corpus("crosslock_deadlock.mtc"), c);
  CHECK(out.report.verdict == Verdict::Safe);
}

TEST_CASE("deadlock-only property ignores error locations") {
  ExplorationConfig c;
  c.property = PropertySpec::DeadlockFreedom;
  RunOutcome out = run_task(corpus("fib_assert7.mtc"), c);
  CHECK(out.report.verdict == Verdict::Safe);
}

TEST_CASE("main exiting does not kill live threads") {
  namespace fs = std::filesystem;
  std::string tmp = (fs::temp_directory_path() / "tr_main_exits.mtc").string();
  std::ofstream(tmp) << "int x;\nthread a;\nvoid w() { x = 1; x = 2; }\nvoid main() { create(a, w); }\n";
  ExplorationConfig c;
  c.property = PropertySpec::Both;
  RunOutcome out = run_task(tmp, c);
  CHECK(out.report.verdict == Verdict::Safe);
  // the spawned thread keeps running after main reaches its exit: some
  // reached state has main at exit while a still moves
  bool seen_tail_progress = false;
  for (const auto& n : out.reach_result.reached.nodes) {
    const auto& threads = n.state.threading.threads;
    auto main_it = threads.find(ThreadId{"main", 1});
    auto a_it = threads.find(ThreadId{"a", 1});
    if (main_it == threads.end() || a_it == threads.end()) continue;
    if (out.task.cfa.loc(main_it->second.location).is_function_exit &&
        !out.task.cfa.loc(a_it->second.location).is_function_exit)
      seen_tail_progress = true;
  }
  CHECK(seen_tail_progress);
}

TEST_CASE("unlock by a non-owner surfaces as a warning, not a verdict") {
  namespace fs = std::filesystem;
  std::string tmp = (fs::temp_directory_path() / "tr_bad_unlock.mtc").string();
  std::ofstream(tmp) << "mutex m;\nvoid main() { unlock(m); }\n";
  ExplorationConfig c;
  c.property = PropertySpec::Both;
  RunOutcome out = run_task(tmp, c);
  CHECK(out.report.verdict == Verdict::Safe);  // the path just stops
  REQUIRE(!out.report.warnings.empty());
  CHECK(out.report.warnings[0].find("does not own") != std::string::npos);
}
