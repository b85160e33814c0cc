#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "rydopt/qubit_system.hpp"

namespace rydopt {

constexpr double kPi = 3.14159265358979323846;

// A pulse sequence: N_p areas (radians; reported in units of pi at the I/O
// boundary) and N_p unit-norm structural vectors over the N qubits. Signs of
// the components carry the 0/pi relative phases between pulses.
struct Protocol {
  int n_qubits = 0;
  std::vector<double> areas;                 // radians, each >= 0
  std::vector<std::vector<double>> vectors;  // [pulse][qubit]

  int n_pulses() const { return static_cast<int>(areas.size()); }
  double total_area() const;
  double total_area_pi() const { return total_area() / kPi; }
  void validate(double tol = 1e-12) const;  // throws std::invalid_argument
};

// f = sqrt(sum of squared components on the coupled qubits); the fraction of
// a pulse's weight that addresses this subsystem. Throws std::domain_error
// for n = 0 blocks, which have no coupled channel at all.
double subsystem_norm(const std::vector<double>& vec, const Subsystem& sub);

// S = f A / 2
double mixing_angle(double area, double f);

struct SubsystemPropagator {
  Subsystem subsystem;
  int dim = 0;  // n + 1; row/column 0 is the ground component
  std::vector<std::complex<double>> m;

  std::complex<double>& at(int r, int c) { return m[static_cast<size_t>(r) * dim + c]; }
  const std::complex<double>& at(int r, int c) const {
    return m[static_cast<size_t>(r) * dim + c];
  }
  double max_unitarity_defect() const;  // max |(U^dag U - I)_rc|
};

// Single-pulse propagator on one block:
//
//   [ cos S          i e_j sin S ... ]
//   [ i e_j sin S    delta_jl + e_j e_l (cos S - 1) ]
//
// with e_j the structural-vector components renormalized inside the block.
// A pulse with f = 0 does not address the block and acts as the identity.
SubsystemPropagator pulse_propagator(const std::vector<double>& vec, double area,
                                     const Subsystem& sub);

// Time-ordered product over the sequence, last pulse leftmost.
SubsystemPropagator sequence_propagator(const Protocol& protocol, const Subsystem& sub);

// Ground-to-ground element U_T,11 of each basis state's block, in basis
// order. Real up to roundoff for every protocol (returning paths pick up an
// even number of factors i); kept complex for the record. n = 0 states give
// exactly 1.
std::vector<std::pair<BitId, std::complex<double>>> survival_amplitudes(
    const Protocol& protocol, const GateSpec& gate);

// Phase-sensitive averaged overlap with the gate's diagonal:
//   F = | (1/2^N) sum_b P_bb U_T,11(b) |^2
// Maximal exactly when every survival amplitude equals its target sign; both
// leakage and wrong signs are penalized.
double gate_fidelity(const Protocol& protocol, const GateSpec& gate);

// Precomputed context for the optimizer hot loop. Survival amplitudes are
// propagated in a real representation (ground component real, Rydberg
// components purely imaginary), with no allocation per evaluation.
class FidelityEvaluator {
 public:
  explicit FidelityEvaluator(GateSpec gate);

  double fidelity(const Protocol& protocol) const;

  // Low-level entry point: vectors[k*N + j] must already be unit-norm per
  // pulse. Used by the optimizer on its own normalized scratch buffer.
  double fidelity_flat(const double* areas, const double* vectors, int n_pulses) const;

  const GateSpec& gate() const { return gate_; }

 private:
  struct Block {
    std::array<int, kMaxQubits> coupled{};  // 0-based component indices
    int n = 0;
    double sign = 0.0;
  };

  GateSpec gate_;
  std::vector<Block> blocks_;
  double inv_dim_ = 0.0;
};

}  // namespace rydopt
