#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rydopt/propagator.hpp"

namespace rydopt {

// Well-formed constraints that no protocol can satisfy (e.g. sigma > 1/sqrt(N)).
struct InfeasibleConstraints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Geometrical-factor and area constraints on a protocol. All vector bounds
// act on the globally normalized components c_jk (the optimization
// variables), not on the per-subsystem renormalized factors.
//
//   sigma_order  ascending lower bounds on the sorted magnitudes of each
//                pulse vector: the j-th smallest |c| must be >= sigma_order[j-1].
//                A single entry [s] is the symmetric constraint |c_jk| >= s
//                on every component; [0, s, s] leaves the smallest component
//                free, and so on.
//   positivity   additionally requires every component >= 0 (the "sigma+"
//                p-restricted mode).
//   targeted     per-qubit lower bounds |c_qk| >= t_q on named qubits only,
//                leaving the rest unconstrained (the "sigma_ab" mode).
//   area_cap     upper bound on the total area A_T (radians).
//   area_range   per-pulse area bounds (radians).
//   independent  restricts every structural vector to a one-hot basis
//                vector: the independent-qubit baseline. Incompatible with
//                the vector bounds above.
struct ConstraintSet {
  std::vector<double> sigma_order;
  bool positivity = false;
  std::map<int, double> targeted;
  std::optional<double> area_cap;
  std::array<double, 2> area_range{0.0, 4.0 * kPi};
  bool independent = false;

  static ConstraintSet symmetric(double sigma) {
    ConstraintSet cs;
    if (sigma > 0.0) cs.sigma_order = {sigma};
    return cs;
  }

  // Structural validity (sorted, nonnegative, known qubits, sane ranges);
  // throws std::invalid_argument.
  void validate(int n_qubits, int n_pulses) const;

  // Whether any protocol can satisfy every bound.
  bool is_feasible(int n_qubits, int n_pulses) const;
  void assert_feasible(int n_qubits, int n_pulses) const;  // InfeasibleConstraints

  struct Violation {
    double max = 0.0;     // largest single bound violation
    double sum_sq = 0.0;  // sum of squared violations (penalty kernel)
  };

  // Violations of the protocol as stored (unit-norm drift counts too).
  Violation violation(const Protocol& protocol) const;
  bool check(const Protocol& protocol, double tol = 1e-12) const;

  // Vector-bound violations of one already-normalized component vector.
  void accumulate_vector_violation(const double* components, int n_qubits,
                                   Violation& v) const;
  void accumulate_area_violation(const double* areas, int n_pulses, Violation& v) const;

  // Deterministic repair onto the feasible set: areas clamped into range and
  // scaled under the cap, vectors renormalized and lifted onto their bounds.
  // The result passes check() whenever the set is feasible.
  Protocol project(const Protocol& protocol) const;
  std::vector<double> project_vector(std::vector<double> v) const;
};

}  // namespace rydopt
