#include "threadreach/domains.hpp"

#include <algorithm>
#include <set>

#include "threadreach/threading.hpp"

namespace threadreach {

std::string Interval::text() const {
  std::string l = lo == INT64_MIN ? "-inf" : std::to_string(lo);
  std::string h = hi == INT64_MAX ? "+inf" : std::to_string(hi);
  return "[" + l + "," + h + "]";
}

namespace {

std::int64_t sat(__int128 v) {
  if (v < INT64_MIN) return INT64_MIN;
  if (v > INT64_MAX) return INT64_MAX;
  return static_cast<std::int64_t>(v);
}

// Saturating bound arithmetic where INT64_MIN/MAX are infinities.
std::int64_t bound_add(std::int64_t a, std::int64_t b) {
  if (a == INT64_MIN || b == INT64_MIN) return INT64_MIN;
  if (a == INT64_MAX || b == INT64_MAX) return INT64_MAX;
  return sat(static_cast<__int128>(a) + b);
}

std::int64_t bound_mul(std::int64_t a, std::int64_t k) {
  if (k == 0) return 0;
  if (a == INT64_MIN) return k > 0 ? INT64_MIN : INT64_MAX;
  if (a == INT64_MAX) return k > 0 ? INT64_MAX : INT64_MIN;
  return sat(static_cast<__int128>(a) * k);
}

std::int64_t bound_neg(std::int64_t a) {
  if (a == INT64_MIN) return INT64_MAX;
  if (a == INT64_MAX) return INT64_MIN;
  return sat(-static_cast<__int128>(a));
}

}  // namespace

Interval interval_add(const Interval& a, const Interval& b) {
  return Interval{bound_add(a.lo, b.lo), bound_add(a.hi, b.hi)};
}

Interval interval_neg(const Interval& a) { return Interval{bound_neg(a.hi), bound_neg(a.lo)}; }

Interval interval_sub(const Interval& a, const Interval& b) {
  return interval_add(a, interval_neg(b));
}

Interval interval_mul_const(const Interval& a, std::int64_t k) {
  std::int64_t x = bound_mul(a.lo, k);
  std::int64_t y = bound_mul(a.hi, k);
  return Interval{std::min(x, y), std::max(x, y)};
}

Interval interval_join(const Interval& a, const Interval& b) {
  return Interval{std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

std::optional<Interval> interval_intersect(const Interval& a, const Interval& b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (r.lo > r.hi) return std::nullopt;
  return r;
}

std::optional<std::int64_t> value_eval(const Expr& e, const ValueEnv& env) {
  switch (e.kind) {
    case Expr::Kind::IntLit: return e.value;
    case Expr::Kind::Nondet: return std::nullopt;
    case Expr::Kind::Var: {
      auto it = env.find(e.name);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case Expr::Kind::Unary: {
      if (e.un_op == UnOp::Not) {
        Tri t = value_eval_bool(*e.lhs, env);
        if (t == Tri::Unknown) return std::nullopt;
        return t == Tri::True ? 0 : 1;
      }
      auto v = value_eval(*e.lhs, env);
      if (!v) return std::nullopt;
      std::int64_t r = 0;
      if (__builtin_sub_overflow(static_cast<std::int64_t>(0), *v, &r))
        throw UnsupportedFeatureError("arithmetic overflow in negation");
      return r;
    }
    case Expr::Kind::Binary: {
      switch (e.bin_op) {
        case BinOp::And:
        case BinOp::Or: {
          Tri t = value_eval_bool(e, env);
          if (t == Tri::Unknown) return std::nullopt;
          return t == Tri::True ? 1 : 0;
        }
        default: break;
      }
      auto l = value_eval(*e.lhs, env);
      auto r = value_eval(*e.rhs, env);
      // Multiplication by a constant zero is zero even if the other side
      // is unknown.
      if (e.bin_op == BinOp::Mul) {
        if ((l && *l == 0) || (r && *r == 0)) return 0;
      }
      if (!l || !r) return std::nullopt;
      std::int64_t res = 0;
      switch (e.bin_op) {
        case BinOp::Add:
          if (__builtin_add_overflow(*l, *r, &res))
            throw UnsupportedFeatureError("arithmetic overflow in addition");
          return res;
        case BinOp::Sub:
          if (__builtin_sub_overflow(*l, *r, &res))
            throw UnsupportedFeatureError("arithmetic overflow in subtraction");
          return res;
        case BinOp::Mul:
          if (__builtin_mul_overflow(*l, *r, &res))
            throw UnsupportedFeatureError("arithmetic overflow in multiplication");
          return res;
        case BinOp::Eq: return *l == *r ? 1 : 0;
        case BinOp::Ne: return *l != *r ? 1 : 0;
        case BinOp::Lt: return *l < *r ? 1 : 0;
        case BinOp::Le: return *l <= *r ? 1 : 0;
        case BinOp::Gt: return *l > *r ? 1 : 0;
        case BinOp::Ge: return *l >= *r ? 1 : 0;
        default: return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

Tri value_eval_bool(const Expr& e, const ValueEnv& env) {
  if (e.kind == Expr::Kind::Unary && e.un_op == UnOp::Not) {
    Tri t = value_eval_bool(*e.lhs, env);
    if (t == Tri::Unknown) return t;
    return t == Tri::True ? Tri::False : Tri::True;
  }
  if (e.kind == Expr::Kind::Binary && e.bin_op == BinOp::And) {
    Tri l = value_eval_bool(*e.lhs, env);
    Tri r = value_eval_bool(*e.rhs, env);
    if (l == Tri::False || r == Tri::False) return Tri::False;
    if (l == Tri::True && r == Tri::True) return Tri::True;
    return Tri::Unknown;
  }
  if (e.kind == Expr::Kind::Binary && e.bin_op == BinOp::Or) {
    Tri l = value_eval_bool(*e.lhs, env);
    Tri r = value_eval_bool(*e.rhs, env);
    if (l == Tri::True || r == Tri::True) return Tri::True;
    if (l == Tri::False && r == Tri::False) return Tri::False;
    return Tri::Unknown;
  }
  auto v = value_eval(e, env);
  if (!v) return Tri::Unknown;
  return *v != 0 ? Tri::True : Tri::False;
}

namespace {

// Recognizes `x == c` (either side) under the given polarity; used to
// strengthen a value environment on assume edges.
std::optional<std::pair<std::string, std::int64_t>> equality_binding(const Expr& cond,
                                                                     bool polarity,
                                                                     const ValueEnv& env) {
  const Expr* e = &cond;
  bool pol = polarity;
  while (e->kind == Expr::Kind::Unary && e->un_op == UnOp::Not) {
    pol = !pol;
    e = e->lhs.get();
  }
  if (e->kind != Expr::Kind::Binary) return std::nullopt;
  bool want_eq = (e->bin_op == BinOp::Eq && pol) || (e->bin_op == BinOp::Ne && !pol);
  if (!want_eq) return std::nullopt;
  const Expr* var = nullptr;
  const Expr* other = nullptr;
  if (e->lhs->kind == Expr::Kind::Var) {
    var = e->lhs.get();
    other = e->rhs.get();
  } else if (e->rhs->kind == Expr::Kind::Var) {
    var = e->rhs.get();
    other = e->lhs.get();
  } else {
    return std::nullopt;
  }
  auto v = value_eval(*other, env);
  if (!v) return std::nullopt;
  return std::make_pair(var->name, *v);
}

}  // namespace

std::vector<ValueEnv> value_transfer(const ValueEnv& d, const Operation& op) {
  if (const auto* a = std::get_if<AssignOp>(&op)) {
    ValueEnv r = d;
    auto v = value_eval(*a->value, d);
    if (v)
      r[a->var] = *v;
    else
      r.erase(a->var);
    return {std::move(r)};
  }
  if (const auto* as = std::get_if<AssumeOp>(&op)) {
    Tri t = value_eval_bool(*as->cond, d);
    bool want = as->polarity;
    if (t != Tri::Unknown) {
      bool holds = (t == Tri::True);
      if (holds != want) return {};
      return {d};
    }
    ValueEnv r = d;
    if (auto bind = equality_binding(*as->cond, want, d)) {
      auto it = r.find(bind->first);
      if (it != r.end() && it->second != bind->second) return {};
      r[bind->first] = bind->second;
    }
    return {std::move(r)};
  }
  return {d};
}

Interval interval_of(const IntervalEnv& env, const std::string& var) {
  auto it = env.find(var);
  return it == env.end() ? Interval::full() : it->second;
}

Interval interval_eval(const Expr& e, const IntervalEnv& env) {
  switch (e.kind) {
    case Expr::Kind::IntLit: return Interval::point(e.value);
    case Expr::Kind::Nondet: return Interval::full();
    case Expr::Kind::Var: return interval_of(env, e.name);
    case Expr::Kind::Unary: {
      if (e.un_op == UnOp::Neg) return interval_neg(interval_eval(*e.lhs, env));
      Tri t = interval_eval_bool(*e.lhs, env);
      if (t == Tri::True) return Interval::point(0);
      if (t == Tri::False) return Interval::point(1);
      return Interval{0, 1};
    }
    case Expr::Kind::Binary: {
      switch (e.bin_op) {
        case BinOp::Add: return interval_add(interval_eval(*e.lhs, env), interval_eval(*e.rhs, env));
        case BinOp::Sub: return interval_sub(interval_eval(*e.lhs, env), interval_eval(*e.rhs, env));
        case BinOp::Mul: {
          // The parser guarantees one constant factor.
          Interval l = interval_eval(*e.lhs, env);
          Interval r = interval_eval(*e.rhs, env);
          if (l.lo == l.hi) return interval_mul_const(r, l.lo);
          if (r.lo == r.hi) return interval_mul_const(l, r.lo);
          return Interval::full();
        }
        default: {
          Tri t = interval_eval_bool(e, env);
          if (t == Tri::True) return Interval::point(1);
          if (t == Tri::False) return Interval::point(0);
          return Interval{0, 1};
        }
      }
    }
  }
  return Interval::full();
}

Tri interval_eval_bool(const Expr& e, const IntervalEnv& env) {
  if (e.kind == Expr::Kind::Unary && e.un_op == UnOp::Not) {
    Tri t = interval_eval_bool(*e.lhs, env);
    if (t == Tri::Unknown) return t;
    return t == Tri::True ? Tri::False : Tri::True;
  }
  if (e.kind == Expr::Kind::Binary &&
      (e.bin_op == BinOp::And || e.bin_op == BinOp::Or)) {
    Tri l = interval_eval_bool(*e.lhs, env);
    Tri r = interval_eval_bool(*e.rhs, env);
    if (e.bin_op == BinOp::And) {
      if (l == Tri::False || r == Tri::False) return Tri::False;
      if (l == Tri::True && r == Tri::True) return Tri::True;
      return Tri::Unknown;
    }
    if (l == Tri::True || r == Tri::True) return Tri::True;
    if (l == Tri::False && r == Tri::False) return Tri::False;
    return Tri::Unknown;
  }
  if (e.kind == Expr::Kind::Binary) {
    Interval l = interval_eval(*e.lhs, env);
    Interval r = interval_eval(*e.rhs, env);
    switch (e.bin_op) {
      case BinOp::Eq:
        if (l.lo == l.hi && r.lo == r.hi && l.lo == r.lo) return Tri::True;
        if (!interval_intersect(l, r)) return Tri::False;
        return Tri::Unknown;
      case BinOp::Ne:
        if (l.lo == l.hi && r.lo == r.hi && l.lo == r.lo) return Tri::False;
        if (!interval_intersect(l, r)) return Tri::True;
        return Tri::Unknown;
      case BinOp::Lt:
        if (l.hi < r.lo) return Tri::True;
        if (l.lo >= r.hi) return Tri::False;
        return Tri::Unknown;
      case BinOp::Le:
        if (l.hi <= r.lo) return Tri::True;
        if (l.lo > r.hi) return Tri::False;
        return Tri::Unknown;
      case BinOp::Gt:
        if (l.lo > r.hi) return Tri::True;
        if (l.hi <= r.lo) return Tri::False;
        return Tri::Unknown;
      case BinOp::Ge:
        if (l.lo >= r.hi) return Tri::True;
        if (l.hi < r.lo) return Tri::False;
        return Tri::Unknown;
      default: break;
    }
  }
  Interval v = interval_eval(e, env);
  if (v.lo == 0 && v.hi == 0) return Tri::False;
  if (!v.contains(0)) return Tri::True;
  return Tri::Unknown;
}

namespace {

// Refines `var cmp const` under the given polarity; anything else is left
// to the feasibility check alone.
std::optional<IntervalEnv> refine_interval(const IntervalEnv& d, const Expr& cond, bool polarity) {
  const Expr* e = &cond;
  bool pol = polarity;
  while (e->kind == Expr::Kind::Unary && e->un_op == UnOp::Not) {
    pol = !pol;
    e = e->lhs.get();
  }
  if (e->kind != Expr::Kind::Binary) return d;
  const Expr* var = nullptr;
  const Expr* other = nullptr;
  bool var_on_left = true;
  if (e->lhs->kind == Expr::Kind::Var) {
    var = e->lhs.get();
    other = e->rhs.get();
  } else if (e->rhs->kind == Expr::Kind::Var) {
    var = e->rhs.get();
    other = e->lhs.get();
    var_on_left = false;
  } else {
    return d;
  }
  Interval c = interval_eval(*other, d);
  if (c.lo != c.hi) return d;
  std::int64_t k = c.lo;

  BinOp op = e->bin_op;
  // Normalize to var-on-left.
  if (!var_on_left) {
    switch (op) {
      case BinOp::Lt: op = BinOp::Gt; break;
      case BinOp::Le: op = BinOp::Ge; break;
      case BinOp::Gt: op = BinOp::Lt; break;
      case BinOp::Ge: op = BinOp::Le; break;
      default: break;
    }
  }
  // Negative polarity flips the comparison.
  if (!pol) {
    switch (op) {
      case BinOp::Eq: op = BinOp::Ne; break;
      case BinOp::Ne: op = BinOp::Eq; break;
      case BinOp::Lt: op = BinOp::Ge; break;
      case BinOp::Le: op = BinOp::Gt; break;
      case BinOp::Gt: op = BinOp::Le; break;
      case BinOp::Ge: op = BinOp::Lt; break;
      default: return d;
    }
  }

  Interval cur = interval_of(d, var->name);
  std::optional<Interval> refined;
  switch (op) {
    case BinOp::Eq: refined = interval_intersect(cur, Interval::point(k)); break;
    case BinOp::Ne:
      if (cur.lo == k && cur.hi == k) return std::nullopt;
      refined = cur;
      if (cur.lo == k) refined->lo = k + 1;  // k < cur.hi here
      if (cur.hi == k) refined->hi = k - 1;  // k > cur.lo here
      break;
    case BinOp::Lt:
      refined = interval_intersect(cur, Interval{INT64_MIN, k == INT64_MIN ? INT64_MIN : k - 1});
      break;
    case BinOp::Le: refined = interval_intersect(cur, Interval{INT64_MIN, k}); break;
    case BinOp::Gt:
      refined = interval_intersect(cur, Interval{k == INT64_MAX ? INT64_MAX : k + 1, INT64_MAX});
      break;
    case BinOp::Ge: refined = interval_intersect(cur, Interval{k, INT64_MAX}); break;
    default: return d;
  }
  if (!refined) return std::nullopt;
  IntervalEnv r = d;
  if (refined->is_full())
    r.erase(var->name);
  else
    r[var->name] = *refined;
  return r;
}

}  // namespace

std::vector<IntervalEnv> interval_transfer(const IntervalEnv& d, const Operation& op) {
  if (const auto* a = std::get_if<AssignOp>(&op)) {
    IntervalEnv r = d;
    Interval v = interval_eval(*a->value, d);
    if (v.is_full())
      r.erase(a->var);
    else
      r[a->var] = v;
    return {std::move(r)};
  }
  if (const auto* as = std::get_if<AssumeOp>(&op)) {
    Tri t = interval_eval_bool(*as->cond, d);
    bool want = as->polarity;
    if (t != Tri::Unknown && (t == Tri::True) != want) return {};
    auto refined = refine_interval(d, *as->cond, want);
    if (!refined) return {};
    return {std::move(*refined)};
  }
  return {d};
}

IntervalEnv interval_widen(const IntervalEnv& old_env, const IntervalEnv& new_env,
                           int visit_count, int threshold) {
  IntervalEnv joined;
  std::set<std::string> vars;
  for (const auto& [k, v] : old_env) vars.insert(k);
  for (const auto& [k, v] : new_env) vars.insert(k);
  for (const auto& var : vars) {
    Interval o = interval_of(old_env, var);
    Interval n = interval_of(new_env, var);
    Interval j = interval_join(o, n);
    if (visit_count >= threshold) {
      // Unstable bounds escape to infinity.
      if (j.lo < o.lo) j.lo = INT64_MIN;
      if (j.hi > o.hi) j.hi = INT64_MAX;
    }
    if (!j.is_full()) joined[var] = j;
  }
  return joined;
}

bool value_covers(const ValueEnv& candidate, const ValueEnv& s) {
  // Candidate constraints must be a subset of s's: fewer bindings with
  // equal values cover more concrete states.
  for (const auto& [var, val] : candidate) {
    auto it = s.find(var);
    if (it == s.end() || it->second != val) return false;
  }
  return true;
}

bool interval_covers(const IntervalEnv& candidate, const IntervalEnv& s) {
  for (const auto& [var, iv] : candidate) {
    if (!iv.contains(interval_of(s, var))) return false;
  }
  return true;
}

}  // namespace threadreach
