#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "threadreach/cfa.hpp"

namespace threadreach {

// Explicit-value environment over qualified variable names; absence of a
// binding means "unknown".
using ValueEnv = std::map<std::string, std::int64_t>;

// Closed interval with saturation: INT64_MIN/MAX bounds act as -inf/+inf.
struct Interval {
  std::int64_t lo = INT64_MIN;
  std::int64_t hi = INT64_MAX;

  auto operator<=>(const Interval&) const = default;
  bool is_full() const { return lo == INT64_MIN && hi == INT64_MAX; }
  bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  static Interval point(std::int64_t v) { return Interval{v, v}; }
  static Interval full() { return Interval{}; }
  std::string text() const;
};

using IntervalEnv = std::map<std::string, Interval>;

Interval interval_add(const Interval& a, const Interval& b);
Interval interval_sub(const Interval& a, const Interval& b);
Interval interval_mul_const(const Interval& a, std::int64_t k);
Interval interval_join(const Interval& a, const Interval& b);
std::optional<Interval> interval_intersect(const Interval& a, const Interval& b);
Interval interval_neg(const Interval& a);

// Concrete 64-bit evaluation over a value environment; nullopt = unknown.
// Throws UnsupportedFeatureError on signed overflow.
std::optional<std::int64_t> value_eval(const Expr& e, const ValueEnv& env);

enum class Tri { False, True, Unknown };

// Three-valued truth of a condition under a value environment.
Tri value_eval_bool(const Expr& e, const ValueEnv& env);

// Interval evaluation; comparisons and connectives yield {0,1} intervals.
Interval interval_eval(const Expr& e, const IntervalEnv& env);
Tri interval_eval_bool(const Expr& e, const IntervalEnv& env);

// Transfer of one operation. Returns zero states when an assumption is
// definitely false (the path is infeasible), otherwise one state.
// Threading-management operations leave the data untouched.
std::vector<ValueEnv> value_transfer(const ValueEnv& d, const Operation& op);
std::vector<IntervalEnv> interval_transfer(const IntervalEnv& d, const Operation& op);

// Pointwise join below the widening threshold; once visit_count reaches
// the threshold, bounds that are still moving jump to +-infinity.
inline constexpr int kWideningThreshold = 10;
IntervalEnv interval_widen(const IntervalEnv& old_env, const IntervalEnv& new_env,
                           int visit_count, int threshold = kWideningThreshold);

// Coverage orders: candidate covers s.
bool value_covers(const ValueEnv& candidate, const ValueEnv& s);
bool interval_covers(const IntervalEnv& candidate, const IntervalEnv& s);

// The interval of a variable, full when unbound.
Interval interval_of(const IntervalEnv& env, const std::string& var);

}  // namespace threadreach
