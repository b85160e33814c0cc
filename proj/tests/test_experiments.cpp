#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rydopt/experiments.hpp"

using namespace rydopt;
using doctest::Approx;

namespace {

const GateSpec kPab2 = GateSpec::cz(2, {1, 2});

RestartPlan small_plan(double sigma, int n_restarts, std::uint64_t seed) {
  RestartPlan plan;
  plan.gate = kPab2;
  plan.n_pulses = 3;
  plan.constraints = ConstraintSet::symmetric(sigma);
  plan.n_restarts = n_restarts;
  plan.master_seed = seed;
  return plan;
}

OptimizationResult fake_result(Protocol p, double infidelity) {
  OptimizationResult r;
  r.protocol = std::move(p);
  r.infidelity = infidelity;
  r.feasible = true;
  r.converged = true;
  return r;
}

Protocol jaksch_protocol() {
  Protocol p;
  p.n_qubits = 2;
  p.areas = {kPi, 2.0 * kPi, kPi};
  p.vectors = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}};
  return p;
}

}  // namespace

TEST_CASE("success curves") {
  std::vector<OptimizationResult> results;
  const SuccessCurve curve =
      success_rate_sweep(small_plan(0.1, 400, 7), default_epsilon_grid(), &results);
  REQUIRE(curve.rate.size() == curve.epsilon_grid.size());
  REQUIRE(results.size() == 400);

  SUBCASE("every optimum counts below epsilon = 1") {
    CHECK(curve.rate.front() > 0.9);
  }
  SUBCASE("rates are monotone in epsilon") {
    for (size_t i = 1; i < curve.rate.size(); ++i) {
      CHECK(curve.epsilon_grid[i] < curve.epsilon_grid[i - 1]);
      CHECK(curve.rate[i] <= curve.rate[i - 1]);
    }
    for (double r : curve.rate) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
  }
  SUBCASE("the same master seed reproduces the curve exactly") {
    const SuccessCurve again = success_rate_sweep(small_plan(0.1, 400, 7), default_epsilon_grid());
    CHECK(again.rate == curve.rate);
  }
  SUBCASE("tightening the constraint never helps much") {
    const SuccessCurve tight = success_rate_sweep(small_plan(0.4, 400, 7), default_epsilon_grid());
    int violations = 0;
    for (size_t i = 0; i < curve.rate.size(); ++i)
      if (tight.rate[i] > curve.rate[i] + 0.02) ++violations;
    CHECK(violations == 0);
  }
}

TEST_CASE("early-stopped batches report the lowest-index success") {
  RestartPlan plan = small_plan(0.1, 2000, 21);
  plan.stop_when = [](const OptimizationResult& r) {
    return r.feasible && r.infidelity < 1e-6;
  };
  const BatchOutcome a = run_restarts(plan);
  REQUIRE(a.first_success >= 0);
  plan.workers = 1;
  const BatchOutcome b = run_restarts(plan);
  CHECK(a.first_success == b.first_success);
  CHECK(a.results[static_cast<size_t>(a.first_success)].infidelity ==
        b.results[static_cast<size_t>(b.first_success)].infidelity);
}

TEST_CASE("minimal area search on the independent baseline") {
  ConstraintSet cs;
  cs.independent = true;
  MinAreaOptions opt;
  opt.probe_budget = 200;
  opt.cap_hi = 6.0 * kPi;
  const auto frontier = minimal_area_search(kPab2, 3, cs, {0.9}, 11, opt);
  REQUIRE(frontier.size() == 1);
  const MinAreaResult& res = frontier.front();
  REQUIRE(res.found);
  // The witness re-verifies independently.
  CHECK(gate_fidelity(res.witness, kPab2) >= 0.9);
  CHECK(res.witness.total_area() <= res.min_area + 1e-9);
  ConstraintSet witness_cs = cs;
  witness_cs.area_cap = res.min_area + 1e-9;
  CHECK(witness_cs.check(res.witness, 1e-9));
  // Perfect-fidelity budget is 4 pi, so a 0.9 target needs less.
  CHECK(res.min_area < 4.0 * kPi);
}

TEST_CASE("minimal area search reports unreachable targets") {
  ConstraintSet cs;
  cs.independent = true;
  MinAreaOptions opt;
  opt.probe_budget = 30;
  opt.cap_hi = 0.2 * kPi;  // far below any CZ budget
  const auto frontier = minimal_area_search(kPab2, 3, cs, {0.999}, 3, opt);
  REQUIRE(frontier.size() == 1);
  CHECK_FALSE(frontier.front().found);
  CHECK(std::isinf(frontier.front().min_area));
}

TEST_CASE("usage statistics") {
  SUBCASE("uniform components have zero relative use") {
    Protocol p;
    p.n_qubits = 2;
    p.areas = {kPi, kPi};
    const double u = 1.0 / std::sqrt(2.0);
    p.vectors = {{u, u}, {u, -u}};
    const UsageStats stats = qubit_usage_stats({fake_result(p, 1e-4)}, kPab2, 0.99);
    CHECK(stats.sample_count == 1);
    CHECK(stats.mean_d[0] == Approx(0.0).epsilon(1e-12));
    CHECK(stats.mean_d[1] == Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("an untouched qubit scores -1") {
    Protocol p;
    p.n_qubits = 3;
    p.areas = {kPi, kPi};
    const double u = 1.0 / std::sqrt(2.0);
    p.vectors = {{u, u, 0.0}, {u, -u, 0.0}};
    const UsageStats stats =
        qubit_usage_stats({fake_result(p, 1e-4)}, GateSpec::cz(3, {1, 2}), 0.99);
    CHECK(stats.mean_d[2] == Approx(-1.0));
    CHECK(stats.mean_d[0] + stats.mean_d[1] + stats.mean_d[2] == Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("d stays within its bounds for optimizer output") {
    RestartPlan plan = small_plan(0.1, 60, 5);
    const BatchOutcome out = run_restarts(plan);
    const UsageStats stats = qubit_usage_stats(out.results, kPab2, 0.0);
    for (double d : stats.mean_d) {
      CHECK(d >= -1.0 - 1e-12);
      CHECK(d <= 1.0 + 1e-12);  // N - 1 for N = 2
    }
  }
  SUBCASE("empty filtered sets are an error") {
    CHECK_THROWS_AS(qubit_usage_stats({fake_result(jaksch_protocol(), 0.5)}, kPab2, 0.99),
                    EmptySample);
    CHECK_THROWS_AS(qubit_usage_stats({}, kPab2, 0.99), EmptySample);
  }
}

TEST_CASE("mechanism census") {
  SUBCASE("a pile of identical protocols is one tuple") {
    std::vector<OptimizationResult> results(5, fake_result(jaksch_protocol(), 1e-13));
    const MechanismCensus census = mechanism_census(results, kPab2, 0.99);
    REQUIRE(census.entries.size() == 1);
    CHECK(census.entries.front().count == 5);
    CHECK(census.entries.front().omega_tuple == std::vector<int>{7, 7, 1});
    REQUIRE(census.dominant.size() == 1);
  }
  SUBCASE("dominant set keeps entries above the mode fraction") {
    std::vector<OptimizationResult> results(10, fake_result(jaksch_protocol(), 1e-13));
    Protocol other;  // a 0-loop-everywhere protocol: 2 pi rotations on both qubits
    other.n_qubits = 2;
    other.areas = {2.0 * kPi, 2.0 * kPi};
    other.vectors = {{1.0, 0.0}, {0.0, 1.0}};
    results.push_back(fake_result(other, 2e-3));
    const MechanismCensus census = mechanism_census(results, kPab2, 0.99, 0.3);
    REQUIRE(census.entries.size() == 2);
    CHECK(census.entries[0].count == 10);
    CHECK(census.entries[1].count == 1);
    CHECK(census.dominant.size() == 1);  // 1 < 0.3 * 10
    const MechanismCensus laxer = mechanism_census(results, kPab2, 0.99, 0.05);
    CHECK(laxer.dominant.size() == 2);
  }
  SUBCASE("low-fidelity samples filter out") {
    CHECK_THROWS_AS(mechanism_census({fake_result(jaksch_protocol(), 0.3)}, kPab2, 0.99),
                    EmptySample);
  }
}
