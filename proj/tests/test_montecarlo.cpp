#include <doctest.h>

#include <cmath>

#include "uihp/errors.hpp"
#include "uihp/montecarlo.hpp"

using namespace uihp;

TEST_CASE("trivial target, one replicate") {
  EstimationPlan p;
  p.target = Target::trivial;
  p.replicates = 1;
  const auto r = run_plan(p);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].se == 0);
  CHECK(r.records[0].estimate == 1);
  CHECK(r.truncation_fraction == 0);
  CHECK(to_json(r).contains("truncation_fraction"));
  CHECK(r.pass);
}

TEST_CASE("plan validation and target names") {
  EstimationPlan p;
  p.replicates = 0;
  CHECK_THROWS_AS(run_plan(p), std::invalid_argument);
  p.replicates = 1;
  p.step_budget = 0;
  CHECK_THROWS_AS(run_plan(p), std::invalid_argument);
  for (const auto& n : target_names()) CHECK(target_name(target_from_name(n)) == n);
  CHECK_THROWS_AS(target_from_name("nope"), std::invalid_argument);
}

TEST_CASE("membership from deltas") {
  // delta_0 = 2 covers 1, 2; delta_2 = 0; delta_3 = 1 covers 4
  const auto m = membership({2, 0, 0, 1, 0}, 5, 5);
  CHECK(m == std::vector<int8_t>{1, 0, 0, 1, 0, 1});
  // partial entries only cover; indices past them stay open
  const auto q = membership({0, 3}, 1, 5);
  CHECK(q == std::vector<int8_t>{1, 1, 0, 0, 0, -1});
}

TEST_CASE("same seed, 1 vs 8 workers") {
  for (Target t : {Target::delta_tail, Target::r_membership, Target::face_census}) {
    EstimationPlan p;
    p.target = t;
    p.replicates = t == Target::face_census ? 16 : 3000;
    p.window = 10;
    p.workers = 1;
    const auto a = to_json(run_plan_unchecked(p)).dump();
    p.workers = 8;
    CHECK(to_json(run_plan_unchecked(p)).dump() == a);
  }
}

TEST_CASE("standard errors shrink like 1/sqrt(N)") {
  EstimationPlan p;
  p.target = Target::delta_tail;
  p.grid = 5;
  p.replicates = 2000;
  const auto a = run_plan(p);
  p.replicates = 8000;
  const auto b = run_plan(p);
  for (std::size_t k = 0; k < a.records.size(); ++k)
    CHECK(a.records[k].se / b.records[k].se == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("truncation scales like 1/sqrt(budget)") {
  EstimationPlan p;
  p.target = Target::delta_tail;
  p.grid = 1;
  p.replicates = 20000;
  p.step_budget = 10000;
  const auto a = run_plan_unchecked(p);
  p.step_budget = 40000;
  const auto b = run_plan_unchecked(p);
  REQUIRE(b.truncated > 0);
  const double ratio = a.truncation_fraction / b.truncation_fraction;
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.7);
}

TEST_CASE("ceiling breach raises BudgetExceeded") {
  EstimationPlan p;
  p.target = Target::r_membership;
  p.grid = 10;
  p.replicates = 500;
  p.step_budget = 20;
  CHECK_THROWS_AS(run_plan(p), BudgetExceeded);
  CHECK(run_plan_unchecked(p).truncation_fraction > p.truncation_ceiling);
}

TEST_CASE("determined-count runs stop at fixed batch boundaries") {
  EstimationPlan p;
  p.target = Target::face_census;
  p.window = 10;
  p.min_determined = 10;
  p.replicates = 1000;
  const auto r = run_plan_unchecked(p);
  CHECK(r.determined >= 10);
  CHECK(r.replicates == 64);
  CHECK(r.pass);
}

TEST_CASE("band multiplier") {
  CHECK(band_sigmas(1) == 3.0);
  CHECK(band_sigmas(20) > band_sigmas(2));
  CHECK(band_sigmas(20) == doctest::Approx(3.817).epsilon(1e-3));
}

TEST_CASE("explicit and law-level samplers, small runs") {
  for (Target t : {Target::min_label, Target::mobile_min_label, Target::explicit_delta,
                   Target::harmonic_count, Target::tri_delta_tail}) {
    EstimationPlan p;
    p.target = t;
    p.grid = 8;
    p.replicates = 3000;
    p.node_cap = 100000;
    const auto r = run_plan_unchecked(p);
    INFO(target_name(t));
    CHECK(r.pass);
  }
}

TEST_CASE("a wrong triangular constant flips the triangular criterion only") {
  auto w = TriangularWeights::critical();
  w.S *= 1.2;
  const auto b = test_battery(Scale::quick, 42, 1, w, {2, 10});
  REQUIRE(b.size() == 2);
  CHECK(b[0].index == 2);
  CHECK(b[0].pass);
  CHECK(b[1].index == 10);
  CHECK_FALSE(b[1].pass);
}
