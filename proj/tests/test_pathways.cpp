#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "rydopt/pathways.hpp"

using namespace rydopt;
using doctest::Approx;

namespace {

Protocol jaksch_protocol() {
  Protocol p;
  p.n_qubits = 2;
  p.areas = {kPi, 2.0 * kPi, kPi};
  p.vectors = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}};
  return p;
}

Protocol pulses_on_first_qubit(int n_pulses, double area, std::vector<double> signs = {}) {
  Protocol p;
  p.n_qubits = 2;
  for (int k = 0; k < n_pulses; ++k) {
    p.areas.push_back(area);
    const double s = k < static_cast<int>(signs.size()) ? signs[static_cast<size_t>(k)] : 1.0;
    p.vectors.push_back({s, 0.0});
  }
  return p;
}

}  // namespace

TEST_CASE("single 2pi pulse is a pure 0-loop") {
  const Protocol p = pulses_on_first_qubit(1, 2.0 * kPi);
  const auto dec = loop_decomposition(p, subsystem_of("01"));
  CHECK(dec.u0 == Approx(-1.0));
  CHECK(dec.u1 == 0.0);
  CHECK(dec.ud == 0.0);
  CHECK(dec.u2 == 0.0);
  CHECK(dec.u_extra == 0.0);
}

TEST_CASE("Jaksch decompositions") {
  const Protocol p = jaksch_protocol();
  SUBCASE("|00>: one excursion dwelling through the middle pulse") {
    const auto dec = loop_decomposition(p, subsystem_of("00"));
    CHECK(dec.u0 == Approx(0.0));
    CHECK(dec.u1 == Approx(0.0));
    CHECK(dec.ud == Approx(-1.0));
    CHECK(dec.u2 == Approx(0.0));
    CHECK(dec.total() == Approx(-1.0));
  }
  SUBCASE("|01>: the dwell spans a pulse that acts as the identity") {
    const auto dec = loop_decomposition(p, subsystem_of("01"));
    CHECK(dec.ud == Approx(-1.0));
    CHECK(dec.u0 == Approx(0.0));
    CHECK(dec.u1 == Approx(0.0));
  }
  SUBCASE("|10>: a full Rabi cycle inside one pulse is a 0-loop") {
    const auto dec = loop_decomposition(p, subsystem_of("10"));
    CHECK(dec.u0 == Approx(-1.0));
    CHECK(dec.ud == Approx(0.0));
  }
}

TEST_CASE("decomposition sums to the survival amplitude") {
  Rng rng(404);
  for (int trial = 0; trial < 80; ++trial) {
    const int n_qubits = 2 + static_cast<int>(rng.uniform() * 3);
    const int n_pulses = 1 + static_cast<int>(rng.uniform() * 6);
    const Protocol p = oracle::random_protocol(n_qubits, n_pulses, rng);
    for (const Subsystem& sub : enumerate_subsystems(n_qubits)) {
      if (sub.n == 0) continue;
      const auto dec = loop_decomposition(p, sub);
      const double amp = sequence_propagator(p, sub).at(0, 0).real();
      CHECK(dec.total() == Approx(amp).epsilon(1e-10));
      if (n_pulses <= 5) CHECK(dec.u_extra == 0.0);
    }
  }
}

TEST_CASE("six aligned half-cycle pulses are a pure triple excursion") {
  // With every cos S = 0 the only returning configuration uses three
  // disjoint excursions, so the whole amplitude sits in u_extra.
  const Protocol p = pulses_on_first_qubit(6, kPi);
  const auto dec = loop_decomposition(p, subsystem_of("01"));
  CHECK(dec.u0 == Approx(0.0));
  CHECK(dec.u1 == Approx(0.0));
  CHECK(dec.ud == Approx(0.0));
  CHECK(dec.u2 == Approx(0.0));
  CHECK(dec.u_extra == Approx(-1.0));
  CHECK(sequence_propagator(p, subsystem_of("01")).at(0, 0).real() == Approx(-1.0));
}

TEST_CASE("mechanism coordinates") {
  LoopDecomposition dec;
  SUBCASE("pure 0-loop on a -1 target") {
    dec.u0 = -1.0;
    const auto [x, y] = mechanism_coords(dec, -1);
    CHECK(x == Approx(-1.0));
    CHECK(y == Approx(-1.0));
  }
  SUBCASE("pure d-loop on a -1 target") {
    dec.ud = -1.0;
    const auto [x, y] = mechanism_coords(dec, -1);
    CHECK(x == Approx(1.0));
    CHECK(y == Approx(-1.0));
  }
  SUBCASE("all-zero decomposition sits at the center") {
    const auto [x, y] = mechanism_coords(dec, 1);
    CHECK(x == 0.0);
    CHECK(y == 0.0);
  }
}

TEST_CASE("mechanism rank boxes") {
  CHECK(mechanism_rank(-1.0, -1.0) == 1);
  CHECK(mechanism_rank(-1.0, 1.0) == 3);
  CHECK(mechanism_rank(1.0, -1.0) == 7);
  CHECK(mechanism_rank(1.0, 1.0) == 9);
  CHECK(mechanism_rank(0.0, 0.0) == 5);
  // Outside the square clamps to the boundary boxes.
  CHECK(mechanism_rank(1.4, -1.2) == 7);
  CHECK(mechanism_rank(-2.0, 0.0) == 2);
}

TEST_CASE("pure mechanisms land on the stated corners") {
  const GateSpec gate = GateSpec::cz(2, {1, 2});
  SUBCASE("0-loop -> omega 1") {
    const auto rec = mechanism_signature(pulses_on_first_qubit(1, 2.0 * kPi), gate);
    for (const auto& e : rec.entries)
      if (e.subsystem.ground_string() == "01") CHECK(e.omega == 1);
  }
  SUBCASE("1-loop -> omega 3") {
    const Protocol p = pulses_on_first_qubit(2, kPi);
    const auto dec = loop_decomposition(p, subsystem_of("01"));
    CHECK(dec.u1 == Approx(-1.0));
    const auto [x, y] = mechanism_coords(dec, -1);
    CHECK(mechanism_rank(x, y) == 3);
  }
  SUBCASE("d-loop -> omega 7") {
    const auto dec = loop_decomposition(jaksch_protocol(), subsystem_of("00"));
    const auto [x, y] = mechanism_coords(dec, -1);
    CHECK(mechanism_rank(x, y) == 7);
  }
  SUBCASE("2-loop -> omega 9") {
    const Protocol p = pulses_on_first_qubit(4, kPi, {1.0, -1.0, 1.0, 1.0});
    const auto dec = loop_decomposition(p, subsystem_of("01"));
    CHECK(dec.u2 == Approx(-1.0));
    CHECK(dec.u0 == Approx(0.0));
    CHECK(dec.u1 == Approx(0.0));
    CHECK(dec.ud == Approx(0.0));
    const auto [x, y] = mechanism_coords(dec, -1);
    CHECK(mechanism_rank(x, y) == 9);
  }
}

TEST_CASE("Jaksch mechanism signature") {
  const auto rec = mechanism_signature(jaksch_protocol(), GateSpec::cz(2, {1, 2}));
  REQUIRE(rec.entries.size() == 3);
  std::map<std::string, int> omega;
  for (const auto& e : rec.entries) omega[e.subsystem.ground_string()] = e.omega;
  CHECK(omega["00"] == 7);
  CHECK(omega["01"] == 7);
  CHECK(omega["10"] == 1);
}

TEST_CASE("zero-area mechanism signature follows the target signs") {
  Protocol p;
  p.n_qubits = 3;
  p.areas = {0.0, 0.0};
  p.vectors = {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  const GateSpec gate = GateSpec::cz(3, {1, 2});
  const auto rec = mechanism_signature(p, gate);
  REQUIRE(rec.entries.size() == 7);
  for (const auto& e : rec.entries) {
    // u0 = +1 everywhere; -1 targets normalize it to +1 -> box 9, +1 targets
    // to -1 -> box 1.
    CHECK(e.omega == (e.target_sign < 0 ? 9 : 1));
  }
}

TEST_CASE("omega groups order by the m label") {
  Rng rng(11);
  const Protocol p = oracle::random_protocol(3, 3, rng);
  const auto rec = mechanism_signature(p, GateSpec::cz(3, {1, 2}));
  REQUIRE(rec.omega_groups.size() == 3);
  CHECK(rec.omega_groups[0].size() == 3);  // V^(1,m)
  CHECK(rec.omega_groups[1].size() == 3);  // V^(2,m)
  CHECK(rec.omega_groups[2].size() == 1);  // V^(3,1)
  for (size_t n = 0; n < 3; ++n) {
    int expected = 0;
    for (int o : rec.omega_groups[n]) expected += o;
    CHECK(rec.omega_group_sums[n] == expected);
  }
}

TEST_CASE("relabeling qubits permutes the mechanism") {
  // Swap qubits 1 and 2: the gate pab is invariant, subsystems map to their
  // bit-swapped partners.
  Rng rng(808);
  const GateSpec gate = GateSpec::cz(3, {1, 2});
  for (int trial = 0; trial < 20; ++trial) {
    const Protocol p = oracle::random_protocol(3, 4, rng);
    Protocol swapped = p;
    for (auto& vec : swapped.vectors) std::swap(vec[0], vec[1]);
    const auto rec = mechanism_signature(p, gate);
    const auto rec_swapped = mechanism_signature(swapped, gate);
    std::map<std::string, int> omega, omega_swapped;
    for (const auto& e : rec.entries) omega[e.subsystem.ground_string()] = e.omega;
    for (const auto& e : rec_swapped.entries)
      omega_swapped[e.subsystem.ground_string()] = e.omega;
    for (const auto& [state, o] : omega) {
      std::string permuted = state;
      std::swap(permuted[0], permuted[1]);
      CHECK(omega_swapped[permuted] == o);
    }
  }
}

TEST_CASE("inert block has no decomposition") {
  CHECK_THROWS_AS(loop_decomposition(jaksch_protocol(), subsystem_of("11")),
                  std::domain_error);
}
