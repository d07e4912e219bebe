#include "threadreach/threading.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace threadreach {

const ThreadId* ThreadingState::live_thread_named(const std::string& name) const {
  for (const auto& [tid, entry] : threads)
    if (tid.name == name) return &tid;
  return nullptr;
}

ThreadingState ThreadingState::top() {
  ThreadingState s;
  s.is_top = true;
  return s;
}

ThreadingState threading_initial(const CfaSet& cfa) {
  ThreadingState s;
  s.threads[ThreadId{"main", 1}] = ThreadEntry{cfa.main_entry, {}};
  return s;
}

namespace {

// The clone a live thread occupies, for every frame of its callstack.
// Callstack entries are continuation locations in the caller's function.
void occupied_functions(const ThreadingState& s, std::set<std::string>& out,
                        const CfaSet& cfa) {
  for (const auto& [tid, entry] : s.threads) {
    out.insert(cfa.loc(entry.location).function);
    for (LocId ret : entry.callstack) out.insert(cfa.loc(ret).function);
  }
}

ThreadingState move_thread(const ThreadingState& s, const ThreadId& mover, LocId to) {
  ThreadingState r = s;
  r.threads.at(mover).location = to;
  return r;
}

}  // namespace

ThreadingState apply_create(const ThreadingState& s, const ThreadId& mover, const CfaEdge& g,
                            const CfaSet& cfa) {
  const auto& op = std::get<CreateOp>(g.op);
  if (s.live_thread_named(op.thread_var))
    throw UnsupportedFeatureError("thread variable '" + op.thread_var +
                                  "' is already assigned to a live thread");
  auto clones = cfa.clone_index.find(op.function);
  if (clones == cfa.clone_index.end() || clones->second.empty())
    throw UnsupportedFeatureError("no clones available for start routine '" + op.function + "'");

  std::set<std::string> in_use;
  occupied_functions(s, in_use, cfa);
  const std::string* chosen = nullptr;
  for (const auto& clone : clones->second) {
    if (!in_use.count(clone)) {
      chosen = &clone;
      break;
    }
  }
  if (!chosen)
    throw UnsupportedFeatureError("insufficient number of threads: all " +
                                  std::to_string(clones->second.size()) + " clones of '" +
                                  op.function + "' are in use");

  ThreadingState r = move_thread(s, mover, g.to);
  int ordinal = r.spawn_counts[op.thread_var] + 1;
  r.spawn_counts[op.thread_var] = ordinal;
  r.threads[ThreadId{op.thread_var, ordinal}] =
      ThreadEntry{cfa.functions.at(*chosen).entry, {}};
  return r;
}

std::optional<ThreadingState> apply_join(const ThreadingState& s, const ThreadId& mover,
                                         const CfaEdge& g, const CfaSet& cfa) {
  const auto& op = std::get<JoinOp>(g.op);
  const ThreadId* target = s.live_thread_named(op.thread_var);
  if (!target || *target == mover) return std::nullopt;
  const ThreadEntry& te = s.threads.at(*target);
  if (!cfa.loc(te.location).is_function_exit || !te.callstack.empty()) return std::nullopt;
  ThreadingState r = move_thread(s, mover, g.to);
  r.threads.erase(*target);
  return r;
}

ThreadingState apply_plain(const ThreadingState& s, const ThreadId& mover, const CfaEdge& g,
                           const CfaSet& cfa) {
  if (const auto* call = std::get_if<CallPushOp>(&g.op)) {
    ThreadingState r = s;
    ThreadEntry& entry = r.threads.at(mover);
    entry.callstack.push_back(g.to);  // continuation
    entry.location = cfa.functions.at(call->callee).entry;
    return r;
  }
  if (std::holds_alternative<ReturnPopOp>(g.op)) {
    ThreadingState r = s;
    ThreadEntry& entry = r.threads.at(mover);
    assert(!entry.callstack.empty() && "return with empty callstack is a frontend defect");
    entry.location = entry.callstack.back();
    entry.callstack.pop_back();
    return r;
  }
  return move_thread(s, mover, g.to);
}

std::optional<ThreadingState> apply_lock_ops(const ThreadingState& s, const ThreadId& mover,
                                             const CfaEdge& g, Diagnostics* diags) {
  std::string mutex;
  bool is_lock = false;
  if (const auto* l = std::get_if<LockOp>(&g.op)) {
    mutex = l->mutex;
    is_lock = true;
  } else if (const auto* u = std::get_if<UnlockOp>(&g.op)) {
    mutex = u->mutex;
  } else if (std::holds_alternative<AtomicBeginOp>(g.op)) {
    mutex = kAtomicLock;
    is_lock = true;
  } else {
    mutex = kAtomicLock;
  }

  if (is_lock) {
    if (s.locks.count(mutex)) return std::nullopt;  // held: no successor
    ThreadingState r = move_thread(s, mover, g.to);
    r.locks[mutex] = mover;
    return r;
  }
  auto it = s.locks.find(mutex);
  if (it == s.locks.end() || it->second != mover) {
    if (diags)
      diags->push_back("unlock of '" + mutex + "' by " + mover.display() +
                       " which does not own it");
    return std::nullopt;
  }
  ThreadingState r = move_thread(s, mover, g.to);
  r.locks.erase(mutex);
  return r;
}

std::vector<EnabledMove> threading_moves(const ThreadingState& s, const CfaSet& cfa,
                                         Diagnostics* diags) {
  std::vector<EnabledMove> moves;
  if (s.is_top) return moves;

  // Inside an atomic section only the holder may move. This is program
  // semantics, unlike the POR "__local__" suppression.
  const ThreadId* only = nullptr;
  auto atomic_it = s.locks.find(kAtomicLock);
  if (atomic_it != s.locks.end()) only = &atomic_it->second;

  for (const auto& [tid, entry] : s.threads) {
    if (only && tid != *only) continue;
    for (EdgeId eid : cfa.outgoing(entry.location)) {
      const CfaEdge& g = cfa.edge(eid);
      std::optional<ThreadingState> succ;
      if (std::holds_alternative<CreateOp>(g.op)) {
        succ = apply_create(s, tid, g, cfa);
      } else if (std::holds_alternative<JoinOp>(g.op)) {
        succ = apply_join(s, tid, g, cfa);
      } else if (std::holds_alternative<LockOp>(g.op) || std::holds_alternative<UnlockOp>(g.op) ||
                 std::holds_alternative<AtomicBeginOp>(g.op) ||
                 std::holds_alternative<AtomicEndOp>(g.op)) {
        succ = apply_lock_ops(s, tid, g, diags);
      } else if (std::holds_alternative<ReturnPopOp>(g.op)) {
        if (!entry.callstack.empty()) succ = apply_plain(s, tid, g, cfa);
      } else if (const auto* call = std::get_if<CallPushOp>(&g.op)) {
        std::set<std::string> in_use;
        ThreadingState others = s;
        others.threads.erase(tid);
        occupied_functions(others, in_use, cfa);
        if (in_use.count(call->callee))
          throw UnsupportedFeatureError("call into clone '" + call->callee +
                                        "' occupied by another live thread");
        succ = apply_plain(s, tid, g, cfa);
      } else {
        succ = apply_plain(s, tid, g, cfa);
      }
      if (succ) moves.push_back(EnabledMove{tid, eid, std::move(*succ)});
    }
  }
  return moves;
}

namespace {

// Drops a stale "__local__" entry: the lock only means something while its
// holder still has a thread-local edge to run.
void normalize_local_lock(ThreadingState& s, const CfaSet& cfa) {
  auto it = s.locks.find(kLocalLock);
  if (it == s.locks.end()) return;
  auto holder = s.threads.find(it->second);
  if (holder == s.threads.end() || !cfa.has_thread_local_outgoing(holder->second.location))
    s.locks.erase(it);
}

}  // namespace

std::vector<EnabledMove> por_filter(const ThreadingState& s, std::vector<EnabledMove> moves,
                                    const CfaSet& cfa) {
  auto it = s.locks.find(kLocalLock);
  if (it != s.locks.end() && s.threads.count(it->second)) {
    const ThreadId holder = it->second;
    moves.erase(std::remove_if(moves.begin(), moves.end(),
                               [&](const EnabledMove& m) { return m.thread != holder; }),
                moves.end());
  }
  for (EnabledMove& m : moves) {
    const CfaEdge& g = cfa.edge(m.edge);
    if (g.scope == EdgeScope::ThreadLocal)
      m.successor.locks[kLocalLock] = m.thread;
    else
      m.successor.locks.erase(kLocalLock);
    normalize_local_lock(m.successor, cfa);
  }
  return moves;
}

std::vector<EnabledMove> threading_transfer(const ThreadingState& s, const CfaSet& cfa,
                                            bool por_enabled, Diagnostics* diags) {
  std::vector<EnabledMove> moves = threading_moves(s, cfa, diags);
  if (por_enabled) moves = por_filter(s, std::move(moves), cfa);
  return moves;
}

bool blocked_at_lock_or_join(const ThreadingState& s, const CfaSet& cfa) {
  for (const auto& [tid, entry] : s.threads) {
    for (EdgeId eid : cfa.outgoing(entry.location)) {
      const Operation& op = cfa.edge(eid).op;
      if (std::holds_alternative<LockOp>(op) || std::holds_alternative<JoinOp>(op) ||
          std::holds_alternative<AtomicBeginOp>(op))
        return true;
    }
  }
  return false;
}

ThreadingState threading_join(const ThreadingState& a, const ThreadingState& b) {
  if (a == b) return a;
  return ThreadingState::top();
}

bool threading_leq(const ThreadingState& a, const ThreadingState& b) {
  return a == b || b.is_top;
}

std::string threading_partition_key(const ThreadingState& s) {
  std::ostringstream out;
  if (s.is_top) return "T";
  for (const auto& [tid, entry] : s.threads)
    out << tid.name << '#' << tid.ordinal << '@' << entry.location << ';';
  out << '|';
  for (const auto& [mutex, owner] : s.locks)
    out << mutex << '=' << owner.name << '#' << owner.ordinal << ';';
  return out.str();
}

std::string threading_state_label(const ThreadingState& s, const CfaSet& cfa) {
  if (s.is_top) return "T";
  std::ostringstream out;
  bool first = true;
  for (const auto& [tid, entry] : s.threads) {
    if (!first) out << ", ";
    first = false;
    out << tid.display() << "\xE2\x86\xA6" << cfa.loc_name(entry.location);
    for (auto it = entry.callstack.rbegin(); it != entry.callstack.rend(); ++it)
      out << "/" << cfa.loc_name(*it);
  }
  if (!s.locks.empty()) {
    out << " {";
    bool f2 = true;
    for (const auto& [mutex, owner] : s.locks) {
      if (!f2) out << ", ";
      f2 = false;
      out << mutex << ":" << owner.display();
    }
    out << "}";
  }
  return out.str();
}

}  // namespace threadreach
