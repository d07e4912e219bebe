#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "threadreach/composite.hpp"
#include "threadreach/properties.hpp"

namespace threadreach {

enum class WaitlistPolicy { DFS, BFS, ThreadsFirstThenDFS, ThreadsFirstThenBFS };
enum class Verdict { Safe, Violation, Deadlock, Unknown };

const char* verdict_name(Verdict v);
const char* waitlist_policy_name(WaitlistPolicy p);

struct ExplorationConfig {
  Domain domain = Domain::Value;
  WaitlistPolicy waitlist = WaitlistPolicy::ThreadsFirstThenDFS;
  bool partitioning = true;
  bool por = true;
  int max_clones = 5;
  PropertySpec property = PropertySpec::ErrorReachability;
  bool stats_enabled = true;
  std::int64_t timeout_ms = 0;  // 0 = unlimited

  std::string summary() const;
};

using NodeId = std::int32_t;

// One reached abstract state. Node ids are discovery order, which reach()
// maintains as a topological order of the ARG.
struct ArgNode {
  CompositeState state;
  std::string key;  // cached partition key
  size_t key_hash = 0;
  NodeId parent = -1;
  EdgeId via_edge = -1;
  ThreadId via_thread;
  bool in_waitlist = false;
};

struct ArgEdge {
  NodeId parent = -1;
  ThreadId thread;
  EdgeId edge = -1;
  NodeId child = -1;
};

struct ReachedSet {
  std::vector<ArgNode> nodes;
  std::unordered_map<std::string, std::vector<NodeId>> partitions;
  std::vector<ArgEdge> arg_edges;
  std::deque<NodeId> waitlist;

  size_t size() const { return nodes.size(); }
};

struct StatsRecord {
  std::int64_t popped = 0;
  std::int64_t reached = 0;
  std::int64_t comparisons = 0;  // merge + stop operator applications
  std::int64_t peak = 0;
  std::int64_t wall_ms = 0;
};

struct CexStep {
  ThreadId thread;
  EdgeId edge = -1;
};

struct ReachResult {
  Verdict verdict = Verdict::Unknown;
  ReachedSet reached;
  StatsRecord stats;
  std::string diagnostic;                 // reason for Unknown
  std::vector<std::string> warnings;      // e.g. unlock by non-owner
  std::vector<CexStep> counterexample;    // present iff Violation or Deadlock
  std::optional<CompositeState> final_state;
};

// Pops the next state to expand. DFS: most recently added; BFS: least
// recently added; threads-first policies prefer the minimum number of
// live threads and break ties with the secondary order.
NodeId waitlist_pop(ReachedSet& reached, WaitlistPolicy policy);

// The CPA reachability algorithm with partitioned reached set, waitlist
// ordering and early property termination. Violating successors are
// reported without being added to the reached set, so the ARG of a
// violating run contains only non-error states.
ReachResult reach(const CompositeCpa& cpa, const ExplorationConfig& config);

}  // namespace threadreach
