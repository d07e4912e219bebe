#include "threadreach/oracle.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace threadreach {

namespace {

// Concrete interpreter state, deliberately separate from ThreadingState.
struct OTid {
  std::string name;
  int ordinal = 1;
  auto operator<=>(const OTid&) const = default;
};

struct OThread {
  LocId loc = kNoLocation;
  std::vector<LocId> stack;
  auto operator<=>(const OThread&) const = default;
};

struct OState {
  std::map<OTid, OThread> threads;
  std::map<std::string, OTid> locks;
  std::map<std::string, int> spawned;
  std::map<std::string, std::int64_t> env;

  std::string serialize() const {
    std::ostringstream out;
    for (const auto& [tid, th] : threads) {
      out << tid.name << '#' << tid.ordinal << '@' << th.loc;
      for (LocId l : th.stack) out << '/' << l;
      out << ';';
    }
    out << '|';
    for (const auto& [m, o] : locks) out << m << '=' << o.name << '#' << o.ordinal << ';';
    out << '|';
    for (const auto& [k, v] : spawned) out << k << ':' << v << ';';
    out << '|';
    for (const auto& [k, v] : env) out << k << '=' << v << ';';
    return out.str();
  }

  // Matches the format of threading_partition_key so observed tuples can
  // be compared against the analysis' reached set.
  std::string tuple_key() const {
    std::ostringstream out;
    for (const auto& [tid, th] : threads)
      out << tid.name << '#' << tid.ordinal << '@' << th.loc << ';';
    out << '|';
    for (const auto& [m, o] : locks) out << m << '=' << o.name << '#' << o.ordinal << ';';
    return out.str();
  }
};

struct Interpreter {
  const CfaSet& cfa;
  const OracleOptions& opts;
  OracleResult result = {};
  // state -> shallowest depth at which it was expanded
  std::unordered_map<std::string, std::int64_t> seen = {};
  std::int64_t expansions = 0;
  bool aborted = false;

  // All possible concrete values of e (nondet leaves enumerate the option
  // set). Overflow aborts the oracle.
  void eval(const Expr& e, const OState& s, std::vector<std::int64_t>& out) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        out.push_back(e.value);
        return;
      case Expr::Kind::Nondet:
        out.insert(out.end(), opts.nondet_values.begin(), opts.nondet_values.end());
        return;
      case Expr::Kind::Var: {
        auto it = s.env.find(e.name);
        out.push_back(it == s.env.end() ? 0 : it->second);
        return;
      }
      case Expr::Kind::Unary: {
        std::vector<std::int64_t> inner;
        eval(*e.lhs, s, inner);
        for (std::int64_t v : inner) {
          if (e.un_op == UnOp::Not) {
            out.push_back(v == 0 ? 1 : 0);
          } else {
            std::int64_t r = 0;
            if (__builtin_sub_overflow(static_cast<std::int64_t>(0), v, &r)) {
              abort_with("arithmetic overflow");
              return;
            }
            out.push_back(r);
          }
        }
        return;
      }
      case Expr::Kind::Binary: {
        std::vector<std::int64_t> ls, rs;
        eval(*e.lhs, s, ls);
        eval(*e.rhs, s, rs);
        for (std::int64_t l : ls) {
          for (std::int64_t r : rs) {
            std::int64_t v = 0;
            bool ovf = false;
            switch (e.bin_op) {
              case BinOp::Add: ovf = __builtin_add_overflow(l, r, &v); break;
              case BinOp::Sub: ovf = __builtin_sub_overflow(l, r, &v); break;
              case BinOp::Mul: ovf = __builtin_mul_overflow(l, r, &v); break;
              case BinOp::Eq: v = l == r; break;
              case BinOp::Ne: v = l != r; break;
              case BinOp::Lt: v = l < r; break;
              case BinOp::Le: v = l <= r; break;
              case BinOp::Gt: v = l > r; break;
              case BinOp::Ge: v = l >= r; break;
              case BinOp::And: v = (l != 0 && r != 0) ? 1 : 0; break;
              case BinOp::Or: v = (l != 0 || r != 0) ? 1 : 0; break;
            }
            if (ovf) {
              abort_with("arithmetic overflow");
              return;
            }
            out.push_back(v);
          }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return;
      }
    }
  }

  void abort_with(const std::string& message) {
    if (!aborted) result.diagnostic = message;
    aborted = true;
  }

  void clones_in_use(const OState& s, std::set<std::string>& out) const {
    for (const auto& [tid, th] : s.threads) {
      out.insert(cfa.loc(th.loc).function);
      for (LocId l : th.stack) out.insert(cfa.loc(l).function);
    }
  }

  bool thread_done(const OThread& th) const {
    return cfa.loc(th.loc).is_function_exit && th.stack.empty();
  }

  void successors(const OState& s, std::vector<OState>& out) {
    const OTid* only = nullptr;
    auto at = s.locks.find(kAtomicLock);
    if (at != s.locks.end()) only = &at->second;

    for (const auto& [tid, th] : s.threads) {
      if (only && tid != *only) continue;
      for (EdgeId eid : cfa.outgoing(th.loc)) {
        const CfaEdge& g = cfa.edge(eid);
        step_edge(s, tid, g, out);
        if (aborted) return;
      }
    }
  }

  void step_edge(const OState& s, const OTid& tid, const CfaEdge& g, std::vector<OState>& out) {
    if (const auto* a = std::get_if<AssignOp>(&g.op)) {
      std::vector<std::int64_t> vals;
      eval(*a->value, s, vals);
      if (aborted) return;
      for (std::int64_t v : vals) {
        OState n = s;
        n.threads.at(tid).loc = g.to;
        n.env[a->var] = v;
        out.push_back(std::move(n));
      }
      return;
    }
    if (const auto* as = std::get_if<AssumeOp>(&g.op)) {
      std::vector<std::int64_t> vals;
      eval(*as->cond, s, vals);
      if (aborted) return;
      bool feasible = false;
      for (std::int64_t v : vals)
        if ((v != 0) == as->polarity) feasible = true;
      if (!feasible) return;
      OState n = s;
      n.threads.at(tid).loc = g.to;
      out.push_back(std::move(n));
      return;
    }
    if (const auto* c = std::get_if<CreateOp>(&g.op)) {
      for (const auto& [other, th] : s.threads) {
        if (other.name == c->thread_var) {
          abort_with("thread variable '" + c->thread_var + "' reused while live");
          return;
        }
      }
      auto clones = cfa.clone_index.find(c->function);
      if (clones == cfa.clone_index.end()) {
        abort_with("no clones for '" + c->function + "'");
        return;
      }
      std::set<std::string> used;
      clones_in_use(s, used);
      const std::string* pick = nullptr;
      for (const auto& name : clones->second)
        if (!used.count(name)) {
          pick = &name;
          break;
        }
      if (!pick) {
        abort_with("insufficient number of threads for '" + c->function + "'");
        return;
      }
      OState n = s;
      n.threads.at(tid).loc = g.to;
      int ord = ++n.spawned[c->thread_var];
      n.threads[OTid{c->thread_var, ord}] = OThread{cfa.functions.at(*pick).entry, {}};
      out.push_back(std::move(n));
      return;
    }
    if (const auto* j = std::get_if<JoinOp>(&g.op)) {
      for (const auto& [other, th] : s.threads) {
        if (other.name == j->thread_var && !(other == tid) && thread_done(th)) {
          OState n = s;
          n.threads.at(tid).loc = g.to;
          n.threads.erase(other);
          out.push_back(std::move(n));
          return;
        }
      }
      return;  // join not ready: blocked
    }
    if (const auto* l = std::get_if<LockOp>(&g.op)) {
      if (s.locks.count(l->mutex)) return;
      OState n = s;
      n.threads.at(tid).loc = g.to;
      n.locks[l->mutex] = tid;
      out.push_back(std::move(n));
      return;
    }
    if (const auto* u = std::get_if<UnlockOp>(&g.op)) {
      auto it = s.locks.find(u->mutex);
      if (it == s.locks.end() || !(it->second == tid)) return;
      OState n = s;
      n.threads.at(tid).loc = g.to;
      n.locks.erase(u->mutex);
      out.push_back(std::move(n));
      return;
    }
    if (std::holds_alternative<AtomicBeginOp>(g.op)) {
      if (s.locks.count(kAtomicLock)) return;
      OState n = s;
      n.threads.at(tid).loc = g.to;
      n.locks[kAtomicLock] = tid;
      out.push_back(std::move(n));
      return;
    }
    if (std::holds_alternative<AtomicEndOp>(g.op)) {
      auto it = s.locks.find(kAtomicLock);
      if (it == s.locks.end() || !(it->second == tid)) return;
      OState n = s;
      n.threads.at(tid).loc = g.to;
      n.locks.erase(kAtomicLock);
      out.push_back(std::move(n));
      return;
    }
    if (const auto* call = std::get_if<CallPushOp>(&g.op)) {
      std::set<std::string> used;
      OState others = s;
      others.threads.erase(tid);
      clones_in_use(others, used);
      if (used.count(call->callee)) {
        abort_with("call into occupied clone '" + call->callee + "'");
        return;
      }
      OState n = s;
      OThread& th = n.threads.at(tid);
      th.stack.push_back(g.to);
      th.loc = cfa.functions.at(call->callee).entry;
      out.push_back(std::move(n));
      return;
    }
    if (std::holds_alternative<ReturnPopOp>(g.op)) {
      if (s.threads.at(tid).stack.empty()) return;
      OState n = s;
      OThread& th = n.threads.at(tid);
      th.loc = th.stack.back();
      th.stack.pop_back();
      out.push_back(std::move(n));
      return;
    }
    // skip
    OState n = s;
    n.threads.at(tid).loc = g.to;
    out.push_back(std::move(n));
  }

  void observe(const OState& s) {
    for (const auto& [var, val] : s.env) {
      if (var.find("::") != std::string::npos) continue;
      auto it = result.max_observed.find(var);
      if (it == result.max_observed.end())
        result.max_observed[var] = val;
      else
        it->second = std::max(it->second, val);
    }
    if (opts.track_tuples) {
      auto& per_tuple = result.tuple_bounds[s.tuple_key()];
      for (const auto& [var, val] : s.env) {
        auto it = per_tuple.find(var);
        if (it == per_tuple.end())
          per_tuple[var] = {val, val};
        else {
          it->second.first = std::min(it->second.first, val);
          it->second.second = std::max(it->second.second, val);
        }
      }
    }
  }

  bool blocked_at_sync(const OState& s) const {
    for (const auto& [tid, th] : s.threads) {
      for (EdgeId eid : cfa.outgoing(th.loc)) {
        const Operation& op = cfa.edge(eid).op;
        if (std::holds_alternative<LockOp>(op) || std::holds_alternative<JoinOp>(op) ||
            std::holds_alternative<AtomicBeginOp>(op))
          return true;
      }
    }
    return false;
  }

  void run() {
    OState init;
    init.threads[OTid{"main", 1}] = OThread{cfa.main_entry, {}};
    for (const auto& g : cfa.globals) init.env[g.name] = g.init.value_or(0);

    std::vector<std::pair<OState, std::int64_t>> stack;
    stack.emplace_back(std::move(init), 0);
    while (!stack.empty() && !aborted) {
      auto [s, depth] = std::move(stack.back());
      stack.pop_back();

      std::string key = s.serialize();
      auto it = seen.find(key);
      if (it != seen.end() && it->second <= depth) continue;
      bool first_visit = it == seen.end();
      seen[key] = depth;
      if (first_visit) {
        ++result.state_count;
        observe(s);
        for (const auto& [tid, th] : s.threads) {
          if (cfa.loc(th.loc).is_error) result.violation_found = true;
        }
      }

      if (++expansions > opts.state_budget) {
        result.bound_exceeded = true;
        break;
      }
      if (depth >= opts.step_bound) {
        result.bound_exceeded = true;
        continue;
      }

      std::vector<OState> succ;
      successors(s, succ);
      if (aborted) break;
      if (succ.empty()) {
        if (!s.threads.empty() && blocked_at_sync(s)) result.deadlock_found = true;
        continue;
      }
      for (auto& n : succ) stack.emplace_back(std::move(n), depth + 1);
    }

    if (aborted) {
      result.verdict = OracleVerdict::Unknown;
    } else if (result.violation_found) {
      result.verdict = OracleVerdict::Violation;
    } else if (result.deadlock_found) {
      result.verdict = OracleVerdict::Deadlock;
    } else if (result.bound_exceeded) {
      result.verdict = OracleVerdict::Unknown;
      result.diagnostic = "oracle bound exceeded";
    } else {
      result.verdict = OracleVerdict::Safe;
    }
  }
};

}  // namespace

OracleResult run_oracle(const CfaSet& cfa, const OracleOptions& opts) {
  Interpreter interp{.cfa = cfa, .opts = opts};
  interp.run();
  return std::move(interp.result);
}

}  // namespace threadreach
