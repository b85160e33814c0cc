#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rydopt/constraints.hpp"
#include "rydopt/rng.hpp"

using namespace rydopt;
using doctest::Approx;

namespace {

std::vector<double> random_unit(Rng& rng, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  double norm2 = 0.0;
  while (norm2 < 1e-12) {
    norm2 = 0.0;
    for (double& c : v) {
      c = rng.normal();
      norm2 += c * c;
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& c : v) c *= inv;
  return v;
}

// Re-derived constraint check, kept independent of ConstraintSet::violation.
bool satisfies(const ConstraintSet& cs, const std::vector<double>& v, double tol = 1e-12) {
  double norm2 = 0.0;
  for (double c : v) norm2 += c * c;
  if (std::abs(std::sqrt(norm2) - 1.0) > tol) return false;
  if (cs.independent) {
    double largest = 0.0;
    for (double c : v) largest = std::max(largest, std::abs(c));
    return largest >= 1.0 - tol;
  }
  if (cs.positivity)
    for (double c : v)
      if (c < -tol) return false;
  for (const auto& [q, bound] : cs.targeted)
    if (std::abs(v[static_cast<size_t>(q - 1)]) < bound - tol) return false;
  std::vector<double> mags;
  for (double c : v) mags.push_back(std::abs(c));
  std::sort(mags.begin(), mags.end());
  for (size_t j = 0; j < cs.sigma_order.size(); ++j)
    if (mags[j] < cs.sigma_order[j] - tol) return false;
  return true;
}

}  // namespace

TEST_CASE("feasibility") {
  CHECK(ConstraintSet::symmetric(0.1).is_feasible(3, 3));
  CHECK(ConstraintSet::symmetric(0.57).is_feasible(3, 3));
  CHECK_FALSE(ConstraintSet::symmetric(0.9).is_feasible(3, 3));  // 0.9 > 1/sqrt(3)
  CHECK_FALSE(ConstraintSet::symmetric(0.6).is_feasible(3, 3));

  ConstraintSet asym;
  asym.sigma_order = {0.0, 0.3, 0.3};
  CHECK(asym.is_feasible(3, 6));

  ConstraintSet targeted;
  targeted.targeted = {{1, 0.8}, {2, 0.7}};
  CHECK_FALSE(targeted.is_feasible(3, 3));  // 0.64 + 0.49 > 1
  targeted.targeted = {{1, 0.6}, {2, 0.6}};
  CHECK(targeted.is_feasible(3, 3));

  ConstraintSet capped;
  capped.area_range = {kPi, 4.0 * kPi};
  capped.area_cap = 2.0 * kPi;
  CHECK_FALSE(capped.is_feasible(2, 3));  // three pulses of at least pi
  CHECK(capped.is_feasible(2, 2));

  CHECK_THROWS_AS(ConstraintSet::symmetric(0.9).assert_feasible(3, 3),
                  InfeasibleConstraints);
}

TEST_CASE("validation rejects malformed sets") {
  ConstraintSet cs;
  cs.sigma_order = {0.3, 0.1};
  CHECK_THROWS_AS(cs.validate(3, 3), std::invalid_argument);
  cs = ConstraintSet{};
  cs.targeted = {{5, 0.1}};
  CHECK_THROWS_AS(cs.validate(3, 3), std::invalid_argument);
  cs = ConstraintSet{};
  cs.independent = true;
  cs.sigma_order = {0.1};
  CHECK_THROWS_AS(cs.validate(3, 3), std::invalid_argument);
  cs = ConstraintSet{};
  cs.area_range = {2.0, 1.0};
  CHECK_THROWS_AS(cs.validate(3, 3), std::invalid_argument);
}

TEST_CASE("violation arithmetic") {
  Protocol p;
  p.n_qubits = 2;
  p.areas = {kPi};
  const double small = 0.05;
  p.vectors = {{std::sqrt(1.0 - small * small), small}};

  ConstraintSet cs = ConstraintSet::symmetric(0.1);
  const auto v = cs.violation(p);
  CHECK(v.max == Approx(0.05));
  CHECK(v.sum_sq == Approx(0.0025));

  ConstraintSet capped;
  capped.area_cap = 0.5 * kPi;
  const auto vc = capped.violation(p);
  CHECK(vc.max == Approx(0.5 * kPi));
  CHECK(vc.sum_sq == Approx(0.25 * kPi * kPi));
}

TEST_CASE("projection repairs random vectors") {
  Rng rng(42);
  std::vector<ConstraintSet> sets;
  sets.push_back(ConstraintSet::symmetric(0.1));
  sets.push_back(ConstraintSet::symmetric(0.3));
  {
    ConstraintSet cs = ConstraintSet::symmetric(0.1);
    cs.positivity = true;
    sets.push_back(cs);
  }
  {
    ConstraintSet cs;
    cs.sigma_order = {0.0, 0.3, 0.3};
    sets.push_back(cs);
  }
  {
    ConstraintSet cs;
    cs.targeted = {{1, 0.3}, {2, 0.3}};
    sets.push_back(cs);
  }
  {
    ConstraintSet cs;
    cs.independent = true;
    sets.push_back(cs);
  }
  for (const auto& cs : sets) {
    for (int n : {2, 3, 4}) {
      try {
        cs.assert_feasible(n, 1);
      } catch (const std::exception&) {
        continue;  // set does not apply at this system size
      }
      for (int trial = 0; trial < 200; ++trial) {
        const auto projected = cs.project_vector(random_unit(rng, n));
        CHECK(satisfies(cs, projected));
      }
    }
  }
}

TEST_CASE("projection keeps already-feasible vectors") {
  ConstraintSet cs = ConstraintSet::symmetric(0.1);
  const std::vector<double> v = {0.6, -0.8};
  const auto projected = cs.project_vector(v);
  CHECK(projected[0] == Approx(0.6));
  CHECK(projected[1] == Approx(-0.8));
}

TEST_CASE("independent projection snaps to the dominant axis") {
  ConstraintSet cs;
  cs.independent = true;
  const auto projected = cs.project_vector({0.3, -0.9, 0.2});
  CHECK(projected == std::vector<double>{0.0, -1.0, 0.0});
}

TEST_CASE("area projection") {
  ConstraintSet cs;
  cs.area_cap = 4.0 * kPi;
  Protocol p;
  p.n_qubits = 2;
  p.areas = {3.0 * kPi, 2.0 * kPi, 5.0 * kPi};  // 5 pi also beyond the per-pulse range
  p.vectors = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}};
  const Protocol projected = cs.project(p);
  CHECK(projected.total_area() <= 4.0 * kPi + 1e-12);
  for (double a : projected.areas) {
    CHECK(a >= 0.0);
    CHECK(a <= cs.area_range[1] + 1e-12);
  }
  CHECK(cs.check(projected));
}

TEST_CASE("full protocol check after projection") {
  Rng rng(7);
  ConstraintSet cs = ConstraintSet::symmetric(0.2);
  cs.area_cap = 6.0 * kPi;
  for (int trial = 0; trial < 100; ++trial) {
    Protocol p;
    p.n_qubits = 3;
    for (int k = 0; k < 4; ++k) {
      p.areas.push_back(rng.uniform(-1.0, 20.0));
      p.vectors.push_back(random_unit(rng, 3));
      for (double& c : p.vectors.back()) c *= rng.uniform(0.2, 3.0);  // break the norm
    }
    const Protocol projected = cs.project(p);
    CHECK(cs.check(projected, 1e-12));
    CHECK_NOTHROW(projected.validate(1e-9));
  }
}
