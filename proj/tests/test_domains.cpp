#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "threadreach/composite.hpp"
#include "threadreach/domains.hpp"
#include "threadreach/lower.hpp"
#include "threadreach/parser.hpp"
#include "threadreach/threading.hpp"

using namespace threadreach;

namespace {

Operation assign(const std::string& var, ExprPtr e) { return AssignOp{var, std::move(e), false}; }

Operation assume(ExprPtr e, bool pol) { return AssumeOp{std::move(e), pol}; }

ExprPtr v(const std::string& name) { return Expr::var(name); }
ExprPtr c(std::int64_t k) { return Expr::int_lit(k); }
ExprPtr bin(BinOp op, ExprPtr l, ExprPtr r) { return Expr::binary(op, std::move(l), std::move(r)); }

}  // namespace

TEST_CASE("value: concrete assignment arithmetic") {
  ValueEnv d{{"i", 1}, {"j", 1}};
  auto out = value_transfer(d, assign("i", bin(BinOp::Add, v("i"), v("j"))));
  REQUIRE(out.size() == 1);
  CHECK(out[0].at("i") == 2);
  CHECK(out[0].at("j") == 1);
}

TEST_CASE("value: definitely false assumption prunes") {
  ValueEnv d{{"i", 2}};
  CHECK(value_transfer(d, assume(bin(BinOp::Gt, v("i"), c(5)), true)).empty());
  CHECK(value_transfer(d, assume(bin(BinOp::Gt, v("i"), c(5)), false)).size() == 1);
}

TEST_CASE("value: nondet makes the target unknown") {
  ValueEnv d;
  auto out = value_transfer(d, assign("x", Expr::nondet()));
  REQUIRE(out.size() == 1);
  CHECK(out[0].count("x") == 0);
}

TEST_CASE("value: equality assumption binds an unknown variable") {
  ValueEnv d;
  auto out = value_transfer(d, assume(bin(BinOp::Eq, v("x"), c(7)), true));
  REQUIRE(out.size() == 1);
  CHECK(out[0].at("x") == 7);
  // negative polarity over != binds as well
  auto out2 = value_transfer(d, assume(bin(BinOp::Ne, v("x"), c(3)), false));
  REQUIRE(out2.size() == 1);
  CHECK(out2[0].at("x") == 3);
  // unknown non-equality keeps the state unchanged
  auto out3 = value_transfer(d, assume(bin(BinOp::Lt, v("x"), c(3)), true));
  REQUIRE(out3.size() == 1);
  CHECK(out3[0].count("x") == 0);
}

TEST_CASE("value: overflow reports unsupported") {
  ValueEnv d{{"x", INT64_MAX}};
  CHECK_THROWS_AS(value_transfer(d, assign("x", bin(BinOp::Add, v("x"), c(1)))),
                  UnsupportedFeatureError);
}

TEST_CASE("value: multiplication by constant zero is zero even when unknown") {
  ValueEnv d;
  auto out = value_transfer(d, assign("y", bin(BinOp::Mul, c(0), v("x"))));
  REQUIRE(out.size() == 1);
  CHECK(out[0].at("y") == 0);
}

TEST_CASE("interval: addition") {
  IntervalEnv d{{"i", {1, 5}}, {"j", {1, 3}}};
  auto out = interval_transfer(d, assign("j", bin(BinOp::Add, v("j"), v("i"))));
  REQUIRE(out.size() == 1);
  CHECK(out[0].at("j") == Interval{2, 8});
}

TEST_CASE("interval: assume refinement and empty intersection") {
  IntervalEnv d{{"x", {0, 10}}};
  auto out = interval_transfer(d, assume(bin(BinOp::Le, v("x"), c(3)), true));
  REQUIRE(out.size() == 1);
  CHECK(out[0].at("x") == Interval{0, 3});

  IntervalEnv e{{"x", {4, 10}}};
  CHECK(interval_transfer(e, assume(bin(BinOp::Le, v("x"), c(3)), true)).empty());

  // negative polarity flips the comparison
  auto out2 = interval_transfer(d, assume(bin(BinOp::Le, v("x"), c(3)), false));
  REQUIRE(out2.size() == 1);
  CHECK(out2[0].at("x") == Interval{4, 10});
}

TEST_CASE("interval: saturation instead of overflow") {
  IntervalEnv d{{"x", {1, INT64_MAX}}};
  auto out = interval_transfer(d, assign("x", bin(BinOp::Add, v("x"), c(1))));
  REQUIRE(out.size() == 1);
  CHECK(out[0].at("x").hi == INT64_MAX);
  CHECK(out[0].at("x").lo == 2);
}

TEST_CASE("widen: unstable bounds escape to infinity at the threshold") {
  IntervalEnv old_env{{"x", {0, 3}}};
  IntervalEnv new_env{{"x", {0, 4}}};
  IntervalEnv w = interval_widen(old_env, new_env, 12);
  CHECK(w.at("x").lo == 0);
  CHECK(w.at("x").hi == INT64_MAX);

  // identical states stay unchanged at any count
  CHECK(interval_widen(old_env, old_env, 99) == old_env);

  // below the threshold: pointwise join
  IntervalEnv j = interval_widen(old_env, new_env, 2);
  CHECK(j.at("x") == Interval{0, 4});
}

TEST_CASE("widen: ascending chains stabilize within 10 + 2*vars joins") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int vars = 3;
    IntervalEnv cur{{"v0", {0, 0}}, {"v1", {0, 0}}, {"v2", {0, 0}}};
    int joins = 0;
    bool stable = false;
    while (!stable) {
      // adversarial next state: always widen at least one finite bound
      IntervalEnv next = cur;
      bool changed = false;
      for (int k = 0; k < vars; ++k) {
        std::string name = "v" + std::to_string(k);
        Interval iv = interval_of(next, name);
        if (rng() % 2 && iv.lo != INT64_MIN) {
          iv.lo -= static_cast<std::int64_t>(rng() % 5) + 1;
          changed = true;
        }
        if (rng() % 2 && iv.hi != INT64_MAX) {
          iv.hi += static_cast<std::int64_t>(rng() % 5) + 1;
          changed = true;
        }
        if (iv.is_full())
          next.erase(name);
        else
          next[name] = iv;
      }
      if (!changed) {
        Interval iv = interval_of(next, "v0");
        stable = iv.lo == INT64_MIN && iv.hi == INT64_MAX;  // nothing left to widen
        if (stable) break;
        if (iv.hi != INT64_MAX) iv.hi += 1;
        else iv.lo -= 1;
        if (iv.is_full()) next.erase("v0");
        else next["v0"] = iv;
      }
      IntervalEnv widened = interval_widen(cur, next, joins);
      if (widened == cur) break;  // chain became stable under widening
      ++joins;
      cur = widened;
      REQUIRE(joins <= 10 + 2 * vars);
    }
  }
}

TEST_CASE("interval transfer is monotone") {
  std::mt19937 rng(11);
  auto rand_interval = [&](bool wide) {
    std::int64_t a = static_cast<std::int64_t>(rng() % 21) - 10;
    std::int64_t b = a + static_cast<std::int64_t>(rng() % (wide ? 15 : 5));
    return Interval{a, b};
  };
  std::vector<Operation> ops = {
      assign("x", bin(BinOp::Add, v("x"), v("y"))),
      assign("x", bin(BinOp::Sub, v("y"), c(2))),
      assign("x", bin(BinOp::Mul, c(-3), v("x"))),
      assume(bin(BinOp::Le, v("x"), c(4)), true),
      assume(bin(BinOp::Gt, v("x"), c(-2)), true),
  };
  for (int trial = 0; trial < 300; ++trial) {
    Interval nx = rand_interval(false), ny = rand_interval(false);
    // wider input: containing intervals
    Interval wx{nx.lo - static_cast<std::int64_t>(rng() % 4),
                nx.hi + static_cast<std::int64_t>(rng() % 4)};
    Interval wy{ny.lo - static_cast<std::int64_t>(rng() % 4),
                ny.hi + static_cast<std::int64_t>(rng() % 4)};
    IntervalEnv narrow{{"x", nx}, {"y", ny}};
    IntervalEnv wide{{"x", wx}, {"y", wy}};
    const Operation& op = ops[rng() % ops.size()];
    auto rn = interval_transfer(narrow, op);
    auto rw = interval_transfer(wide, op);
    if (rn.empty()) continue;  // pruned narrow path: nothing to compare
    REQUIRE(!rw.empty());      // wider input cannot be pruned if narrow passed
    for (const auto& var : {"x", "y"}) {
      Interval a = interval_of(rn[0], var);
      Interval b = interval_of(rw[0], var);
      CHECK_MESSAGE(b.contains(a), "var ", var, " narrow ", a.text(), " wide ", b.text());
    }
  }
}

TEST_CASE("coverage: value constraint subsets and interval containment") {
  ValueEnv known{{"i", 1}};
  ValueEnv unknown;
  CHECK(value_covers(unknown, known));   // {i unknown} covers {i=1}
  CHECK(!value_covers(known, unknown));
  CHECK(value_covers(known, known));

  IntervalEnv big{{"x", {0, 10}}};
  IntervalEnv small{{"x", {2, 3}}};
  CHECK(interval_covers(big, small));
  CHECK(!interval_covers(small, big));
}

namespace {

struct FibFixture {
  CfaSet cfa;
  FibFixture() {
    cfa = clone_functions(lower_to_cfa(parse(R"(
int i = 1;
int j = 1;
thread id1;
thread id2;
void t1() { i = i + j; i = i + j; }
void t2() { j = j + i; j = j + i; }
void main() {
  local int d1;
  local int d2;
  create(id1, t1);
  create(id2, t2);
  join(id1);
  join(id2);
  assert(j <= 8);
}
)")),
                          5);
    classify_edges(cfa);
  }
};

}  // namespace

TEST_CASE("composite: infeasible error branch is pruned under the value domain") {
  FibFixture f;
  CompositeCpa cpa(f.cfa, Domain::Value, false);
  // Drive main to location 6 with j = 8 (the maximum), i = 5.
  CompositeState s = cpa.initial();
  LocId l6 = kNoLocation;
  for (const auto& l : f.cfa.locations)
    if (l.function == "main" && l.index == 6) l6 = l.id;
  REQUIRE(l6 != kNoLocation);
  s.threading.threads.at(ThreadId{"main", 1}).location = l6;
  auto& env = std::get<ValueEnv>(s.data);
  env["i"] = 5;
  env["j"] = 8;
  env["main::d1"] = 0;
  env["main::d2"] = 0;
  auto moves = cpa.transfer(s);
  REQUIRE(moves.size() == 1);  // only the assume(j <= 8) branch survives
  const auto& op = std::get<AssumeOp>(f.cfa.edge(moves[0].edge).op);
  CHECK(op.polarity == true);
}

TEST_CASE("composite: contended lock is pruned by threading regardless of data") {
  const char* src = R"(
mutex m;
thread a;
void w() { lock(m); unlock(m); }
void main() { create(a, w); lock(m); unlock(m); join(a); }
)";
  CfaSet cfa = clone_functions(lower_to_cfa(parse(src)), 1);
  classify_edges(cfa);
  CompositeCpa cpa(cfa, Domain::Value, false);
  CompositeState s = cpa.initial();
  // main past create, a at w entry, m held by a
  for (const auto& l : cfa.locations)
    if (l.function == "main" && l.index == 1) s.threading.threads.at(ThreadId{"main", 1}).location = l.id;
  s.threading.threads[ThreadId{"a", 1}] = ThreadEntry{cfa.functions.at("w__1").entry, {}};
  s.threading.spawn_counts["a"] = 1;
  s.threading.locks["m"] = ThreadId{"a", 1};
  for (const auto& m : cpa.transfer(s)) CHECK(m.thread.name == "a");
}

TEST_CASE("composite: unit data successors equal the threading transfer") {
  FibFixture f;
  CompositeCpa cpa(f.cfa, Domain::None, false);
  CompositeState s = cpa.initial();
  auto composite = cpa.transfer(s);
  auto threading = threading_transfer(s.threading, f.cfa, false);
  REQUIRE(composite.size() == threading.size());
  for (size_t k = 0; k < composite.size(); ++k) {
    CHECK(composite[k].edge == threading[k].edge);
    CHECK(composite[k].state.threading == threading[k].successor);
  }
}

TEST_CASE("composite stop: reflexive, interval containment, lock sensitivity") {
  FibFixture f;
  CompositeCpa value_cpa(f.cfa, Domain::Value, false);
  CompositeState s = value_cpa.initial();
  CHECK(stop_sep(value_cpa, s, {&s}));
  CHECK(!stop_sep(value_cpa, s, {}));

  CompositeCpa iv_cpa(f.cfa, Domain::Interval, false);
  CompositeState a = iv_cpa.initial();
  CompositeState b = a;
  std::get<IntervalEnv>(a.data)["x"] = Interval{2, 3};
  std::get<IntervalEnv>(b.data)["x"] = Interval{0, 10};
  CHECK(iv_cpa.covers(b, a));
  CHECK(!iv_cpa.covers(a, b));

  CompositeState locked = a;
  locked.threading.locks["m"] = ThreadId{"main", 1};
  CHECK(!iv_cpa.covers(locked, a));
  CHECK(!iv_cpa.covers(a, locked));
}

TEST_CASE("merge: value domain keeps states separate, intervals join") {
  FibFixture f;
  CompositeCpa value_cpa(f.cfa, Domain::Value, false);
  CompositeState s1 = value_cpa.initial();
  CompositeState s2 = s1;
  std::get<ValueEnv>(s1.data)["i"] = 42;
  CHECK(value_cpa.merge(s1, s2, 0) == s2);
  CHECK(merge_sep(s1, s2) == s2);
  CHECK(merge_sep(s2, s1) == s1);

  CompositeCpa iv_cpa(f.cfa, Domain::Interval, false);
  CompositeState a = iv_cpa.initial();
  CompositeState b = a;
  std::get<IntervalEnv>(a.data)["i"] = Interval{0, 1};
  std::get<IntervalEnv>(b.data)["i"] = Interval{3, 4};
  CompositeState m = iv_cpa.merge(a, b, 0);
  CHECK(std::get<IntervalEnv>(m.data).at("i") == Interval{0, 4});
  CHECK(m.threading == b.threading);
  // different threading parts do not merge
  CompositeState moved = a;
  moved.threading.threads.at(ThreadId{"main", 1}).location = f.cfa.functions.at("t1__1").entry;
  CHECK(iv_cpa.merge(moved, b, 0) == b);
}
