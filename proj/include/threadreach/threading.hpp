#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "threadreach/cfa.hpp"

namespace threadreach {

// Aborts the whole analysis; reach() maps it to the Unknown verdict.
struct UnsupportedFeatureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A thread instance: the variable it was assigned to plus an ordinal that
// keeps identifiers unique across sequential create/join/create reuse of
// the same variable.
struct ThreadId {
  std::string name;
  int ordinal = 1;

  auto operator<=>(const ThreadId&) const = default;
  std::string display() const {
    return ordinal == 1 ? name : name + "#" + std::to_string(ordinal);
  }
};

struct ThreadEntry {
  LocId location = kNoLocation;
  std::vector<LocId> callstack;  // continuation locations, innermost last

  auto operator<=>(const ThreadEntry&) const = default;
};

// Abstract state of the threading analysis: a partial map from thread
// identifiers to (location, callstack) plus mutex ownership. The reserved
// locks "__atomic__" and "__local__" live in the same map. The flat
// semi-lattice's top element is represented by the is_top flag; transfer
// never produces it.
struct ThreadingState {
  std::map<ThreadId, ThreadEntry> threads;
  std::map<std::string, ThreadId> locks;
  std::map<std::string, int> spawn_counts;  // thread variable -> instances created so far
  bool is_top = false;

  auto operator<=>(const ThreadingState&) const = default;

  size_t live_count() const { return threads.size(); }
  const ThreadId* live_thread_named(const std::string& name) const;
  static ThreadingState top();
};

struct EnabledMove {
  ThreadId thread;
  EdgeId edge = -1;
  ThreadingState successor;
};

// Non-fatal observations made while enumerating moves (e.g. unlock by a
// thread that does not own the mutex).
using Diagnostics = std::vector<std::string>;

// Initial state: main at its entry location, empty callstack, no locks.
ThreadingState threading_initial(const CfaSet& cfa);

// Enumerates all enabled moves of all live threads in sorted ThreadId
// order (deterministic). Honors lock availability, join readiness and
// atomic-section suppression; does not apply the POR "__local__" logic.
// Throws UnsupportedFeatureError on create of a live thread variable,
// clone exhaustion, or a call into an occupied clone.
std::vector<EnabledMove> threading_moves(const ThreadingState& s, const CfaSet& cfa,
                                         Diagnostics* diags = nullptr);

// Partial-order reduction via the reserved "__local__" lock: a thread
// acquires it by taking a thread-local edge and other threads' moves are
// filtered while it is held; a global edge (or running out of
// thread-local successor edges) releases it.
std::vector<EnabledMove> por_filter(const ThreadingState& s, std::vector<EnabledMove> moves,
                                    const CfaSet& cfa);

// The full transfer relation; with por enabled this is
// por_filter(threading_moves(s)) plus the lock bookkeeping on successors.
std::vector<EnabledMove> threading_transfer(const ThreadingState& s, const CfaSet& cfa,
                                            bool por_enabled, Diagnostics* diags = nullptr);

// The individual transfer cases, exposed for tests and composition.
ThreadingState apply_create(const ThreadingState& s, const ThreadId& mover, const CfaEdge& g,
                            const CfaSet& cfa);
std::optional<ThreadingState> apply_join(const ThreadingState& s, const ThreadId& mover,
                                         const CfaEdge& g, const CfaSet& cfa);
ThreadingState apply_plain(const ThreadingState& s, const ThreadId& mover, const CfaEdge& g,
                           const CfaSet& cfa);
std::optional<ThreadingState> apply_lock_ops(const ThreadingState& s, const ThreadId& mover,
                                             const CfaEdge& g, Diagnostics* diags = nullptr);

// True iff some live thread sits in front of a Lock (or atomic_begin) or
// Join edge; used to tell deadlocks apart from normal termination.
bool blocked_at_lock_or_join(const ThreadingState& s, const CfaSet& cfa);

// Flat semi-lattice surface. Exercised by tests only: with merge-sep and
// stop-sep the reachability algorithm never calls the join at runtime.
ThreadingState threading_join(const ThreadingState& a, const ThreadingState& b);
bool threading_leq(const ThreadingState& a, const ThreadingState& b);

// Canonical (threadId, location) tuple plus lock fingerprint, the
// reached-set partition key.
std::string threading_partition_key(const ThreadingState& s);

std::string threading_state_label(const ThreadingState& s, const CfaSet& cfa);

}  // namespace threadreach
