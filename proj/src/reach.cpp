#include "threadreach/reach.hpp"

#include <algorithm>
#include <chrono>

namespace threadreach {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Safe: return "Safe";
    case Verdict::Violation: return "Violation";
    case Verdict::Deadlock: return "Deadlock";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

const char* waitlist_policy_name(WaitlistPolicy p) {
  switch (p) {
    case WaitlistPolicy::DFS: return "dfs";
    case WaitlistPolicy::BFS: return "bfs";
    case WaitlistPolicy::ThreadsFirstThenDFS: return "threads-dfs";
    case WaitlistPolicy::ThreadsFirstThenBFS: return "threads-bfs";
  }
  return "?";
}

std::string ExplorationConfig::summary() const {
  std::string d = domain == Domain::None ? "none" : domain == Domain::Value ? "value" : "interval";
  std::string prop = property == PropertySpec::ErrorReachability ? "error"
                     : property == PropertySpec::DeadlockFreedom ? "deadlock"
                                                                 : "both";
  return d + "+" + (por ? "por" : "nopor") + "+" + (partitioning ? "part" : "nopart") + "+" +
         waitlist_policy_name(waitlist) + "+clones" + std::to_string(max_clones) + "+" + prop;
}

NodeId waitlist_pop(ReachedSet& reached, WaitlistPolicy policy) {
  auto& wl = reached.waitlist;
  auto take = [&](std::deque<NodeId>::iterator it) {
    NodeId id = *it;
    wl.erase(it);
    reached.nodes[static_cast<size_t>(id)].in_waitlist = false;
    return id;
  };
  switch (policy) {
    case WaitlistPolicy::DFS: return take(std::prev(wl.end()));
    case WaitlistPolicy::BFS: return take(wl.begin());
    case WaitlistPolicy::ThreadsFirstThenDFS:
    case WaitlistPolicy::ThreadsFirstThenBFS: {
      auto count = [&](NodeId id) {
        return reached.nodes[static_cast<size_t>(id)].state.threading.live_count();
      };
      auto best = wl.begin();
      size_t best_count = count(*best);
      for (auto it = std::next(wl.begin()); it != wl.end(); ++it) {
        size_t c = count(*it);
        bool better = policy == WaitlistPolicy::ThreadsFirstThenBFS ? c < best_count : c <= best_count;
        if (better) {
          best = it;
          best_count = c;
        }
      }
      return take(best);
    }
  }
  return take(wl.begin());
}

namespace {

std::vector<CexStep> discovery_chain(const ReachedSet& reached, NodeId node) {
  std::vector<CexStep> steps;
  for (NodeId cur = node; cur >= 0;) {
    const ArgNode& n = reached.nodes[static_cast<size_t>(cur)];
    if (n.parent < 0) break;
    steps.push_back(CexStep{n.via_thread, n.via_edge});
    cur = n.parent;
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

}  // namespace

ReachResult reach(const CompositeCpa& cpa, const ExplorationConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  ReachResult result;
  ReachedSet& reached = result.reached;
  StatsRecord& stats = result.stats;
  std::unordered_map<std::string, int> join_counts;

  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  };
  auto finish = [&](Verdict v) {
    result.verdict = v;
    stats.reached = static_cast<std::int64_t>(reached.size());
    stats.peak = std::max(stats.peak, stats.reached);
    stats.wall_ms = elapsed_ms();
    std::sort(result.warnings.begin(), result.warnings.end());
    result.warnings.erase(std::unique(result.warnings.begin(), result.warnings.end()),
                          result.warnings.end());
    return result;
  };

  auto add_node = [&](CompositeState state, NodeId parent, const ThreadId& thread, EdgeId edge) {
    ArgNode node;
    node.state = std::move(state);
    node.key = cpa.partition_key(node.state);
    node.key_hash = std::hash<std::string>{}(node.key);
    node.parent = parent;
    node.via_thread = thread;
    node.via_edge = edge;
    node.in_waitlist = true;
    NodeId id = static_cast<NodeId>(reached.nodes.size());
    reached.partitions[node.key].push_back(id);
    reached.nodes.push_back(std::move(node));
    reached.waitlist.push_back(id);
    return id;
  };

  add_node(cpa.initial(), -1, ThreadId{}, -1);

  // Candidate node ids consulted by merge and stop for a given key.
  std::vector<NodeId> all_order;  // insertion order of every node (unpartitioned mode)
  all_order.push_back(0);
  auto candidates_for = [&](const std::string& key) -> const std::vector<NodeId>& {
    if (config.partitioning) {
      static const std::vector<NodeId> empty;
      auto it = reached.partitions.find(key);
      return it == reached.partitions.end() ? empty : it->second;
    }
    return all_order;
  };

  try {
    while (!reached.waitlist.empty()) {
      if (config.timeout_ms > 0 && elapsed_ms() > config.timeout_ms) {
        result.diagnostic = "timeout";
        return finish(Verdict::Unknown);
      }
      NodeId cur = waitlist_pop(reached, config.waitlist);
      ++stats.popped;
      // Copy: merges may reallocate the node vector while we expand.
      const CompositeState state = reached.nodes[static_cast<size_t>(cur)].state;

      Diagnostics diags;
      // Deadlock detection looks at the moves without the POR filter:
      // "__local__" suppression is an analysis artifact, not semantics.
      std::vector<EnabledMove> plain_moves = threading_moves(state.threading, cpa.cfa(), &diags);
      if (watches_deadlock(config.property) &&
          check_deadlock(state.threading, plain_moves, cpa.cfa())) {
        result.counterexample = discovery_chain(reached, cur);
        result.final_state = state;
        for (auto& d : diags) result.warnings.push_back(std::move(d));
        return finish(Verdict::Deadlock);
      }

      std::vector<EnabledMove> moves = cpa.por_enabled()
                                           ? por_filter(state.threading, std::move(plain_moves),
                                                        cpa.cfa())
                                           : std::move(plain_moves);
      for (auto& d : diags) result.warnings.push_back(std::move(d));

      for (EnabledMove& m : moves) {
        const Operation& op = cpa.cfa().edge(m.edge).op;
        std::vector<CompositeState> successors;
        if (const auto* unit = std::get_if<UnitEnv>(&state.data)) {
          successors.push_back(CompositeState{std::move(m.successor), *unit});
        } else if (const auto* value = std::get_if<ValueEnv>(&state.data)) {
          for (ValueEnv& d : value_transfer(*value, op))
            successors.push_back(CompositeState{m.successor, std::move(d)});
        } else {
          const auto& iv = std::get<IntervalEnv>(state.data);
          for (IntervalEnv& d : interval_transfer(iv, op))
            successors.push_back(CompositeState{m.successor, std::move(d)});
        }

        for (CompositeState& succ : successors) {
          if (watches_error(config.property) && check_error(succ, cpa.cfa())) {
            // Reported at generation time; the violating state never joins
            // the reached set or the ARG.
            result.counterexample = discovery_chain(reached, cur);
            result.counterexample.push_back(CexStep{m.thread, m.edge});
            result.final_state = std::move(succ);
            return finish(Verdict::Violation);
          }

          const std::string key = cpa.partition_key(succ);
          const size_t key_hash = std::hash<std::string>{}(key);

          // Merge phase (a no-op for merge-sep domains).
          if (cpa.domain() == Domain::Interval) {
            const auto& cand = candidates_for(key);
            for (NodeId cid : cand) {
              ++stats.comparisons;
              ArgNode& cnode = reached.nodes[static_cast<size_t>(cid)];
              if (cnode.key_hash != key_hash || cnode.key != key) continue;
              CompositeState merged = cpa.merge(succ, cnode.state, join_counts[key]);
              if (!(merged == cnode.state)) {
                ++join_counts[key];
                cnode.state = std::move(merged);
                if (!cnode.in_waitlist) {
                  cnode.in_waitlist = true;
                  reached.waitlist.push_back(cid);
                }
              }
            }
          }

          // Stop phase: drop covered successors, record the ARG edge when
          // the coverer is an equal, younger-discovered state.
          const auto& cand = candidates_for(key);
          bool covered = false;
          NodeId equal_node = -1;
          for (NodeId cid : cand) {
            ++stats.comparisons;
            const ArgNode& cnode = reached.nodes[static_cast<size_t>(cid)];
            // Coverage implies an equal threading part, so a key mismatch
            // rejects the candidate outright.
            if (cnode.key_hash != key_hash || cnode.key != key) continue;
            if (cpa.covers(cnode.state, succ)) {
              covered = true;
              if (cnode.state == succ) equal_node = cid;
              break;
            }
          }
          if (covered) {
            if (equal_node >= 0 && equal_node > cur)
              reached.arg_edges.push_back(ArgEdge{cur, m.thread, m.edge, equal_node});
            continue;
          }
          NodeId id = add_node(std::move(succ), cur, m.thread, m.edge);
          if (!config.partitioning) all_order.push_back(id);
          reached.arg_edges.push_back(ArgEdge{cur, m.thread, m.edge, id});
          stats.peak = std::max(stats.peak, static_cast<std::int64_t>(reached.size()));
        }
      }
    }
  } catch (const UnsupportedFeatureError& e) {
    result.diagnostic = e.what();
    return finish(Verdict::Unknown);
  }

  return finish(Verdict::Safe);
}

}  // namespace threadreach
