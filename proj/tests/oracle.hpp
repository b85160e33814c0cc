#pragma once

// Brute-force reference dynamics for the tests: build the Hamiltonian on the
// full reachable space (all computational states plus every single-Rydberg
// state), exponentiate each square pulse spectrally, and multiply in time
// order. Shares no code path with the analytic block propagators it checks.

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "rydopt/propagator.hpp"
#include "rydopt/rng.hpp"

namespace oracle {

struct FullSpaceOracle {
  int n_qubits;
  // State indexing: computational state b -> idx[b]; Rydberg state (b with
  // bit q promoted) -> ryd[{b, q}].
  std::vector<rydopt::BitId> comp_states;
  std::map<rydopt::BitId, int> comp_index;
  std::map<std::pair<rydopt::BitId, int>, int> ryd_index;
  int dim = 0;

  explicit FullSpaceOracle(int n) : n_qubits(n) {
    for (rydopt::BitId b : rydopt::basis_order(n)) {
      comp_index[b] = dim++;
      comp_states.push_back(b);
    }
    for (rydopt::BitId b : comp_states)
      for (int q = 1; q <= n; ++q)
        if (!rydopt::qubit_bit(b, n, q)) ryd_index[{b, q}] = dim++;
  }

  // Square pulse of unit duration: the integrated Hamiltonian has elements
  // -c_{q,k} A_k / 2 between each computational state and its reachable
  // Rydberg states.
  Eigen::MatrixXcd pulse_unitary(const std::vector<double>& vec, double area) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (rydopt::BitId b : comp_states) {
      const int row = comp_index.at(b);
      for (int q = 1; q <= n_qubits; ++q) {
        if (rydopt::qubit_bit(b, n_qubits, q)) continue;
        const int col = ryd_index.at({b, q});
        const double elem = -vec[static_cast<size_t>(q - 1)] * area / 2.0;
        h(row, col) = elem;
        h(col, row) = elem;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const Eigen::MatrixXd& v = solver.eigenvectors();
    Eigen::VectorXcd phases(dim);
    for (int i = 0; i < dim; ++i)
      phases(i) = std::exp(std::complex<double>(0.0, -solver.eigenvalues()(i)));
    return v * phases.asDiagonal() * v.transpose();
  }

  Eigen::MatrixXcd sequence_unitary(const rydopt::Protocol& protocol) const {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (int k = 0; k < protocol.n_pulses(); ++k)
      u = pulse_unitary(protocol.vectors[static_cast<size_t>(k)],
                        protocol.areas[static_cast<size_t>(k)]) *
          u;
    return u;
  }

  std::complex<double> survival(const Eigen::MatrixXcd& u, rydopt::BitId b) const {
    const int i = comp_index.at(b);
    return u(i, i);
  }
};

// Spectral exponential of one block Hamiltonian, for checking the analytic
// single-pulse matrix.
inline Eigen::MatrixXcd block_pulse_unitary(const std::vector<double>& vec, double area,
                                            const rydopt::Subsystem& sub) {
  const int dim = sub.n + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < sub.n; ++i) {
    const double elem =
        -vec[static_cast<size_t>(sub.coupled_qubits[static_cast<size_t>(i)] - 1)] * area / 2.0;
    h(0, i + 1) = elem;
    h(i + 1, 0) = elem;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::VectorXcd phases(dim);
  for (int i = 0; i < dim; ++i)
    phases(i) = std::exp(std::complex<double>(0.0, -solver.eigenvalues()(i)));
  return v * phases.asDiagonal() * v.transpose();
}

inline rydopt::Protocol random_protocol(int n_qubits, int n_pulses, rydopt::Rng& rng,
                                        double max_area = 4.0 * rydopt::kPi) {
  rydopt::Protocol p;
  p.n_qubits = n_qubits;
  p.areas.resize(static_cast<size_t>(n_pulses));
  for (double& a : p.areas) a = rng.uniform(0.0, max_area);
  p.vectors.resize(static_cast<size_t>(n_pulses));
  for (auto& vec : p.vectors) {
    vec.resize(static_cast<size_t>(n_qubits));
    double norm2 = 0.0;
    while (norm2 < 1e-12) {
      norm2 = 0.0;
      for (double& c : vec) {
        c = rng.normal();
        norm2 += c * c;
      }
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& c : vec) c *= inv;
  }
  return p;
}

}  // namespace oracle
