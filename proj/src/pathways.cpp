#include "rydopt/pathways.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rydopt {

namespace {

constexpr double kNormFloor = 1e-24;

// Per-pulse data for one block: cos/sin of the mixing angle and the
// block-renormalized vector e (zero, with C=1, when the pulse does not
// address the block; its excursion terms then vanish through s=0 and its
// Rydberg-block matrix M = I + (C-1)|e><e| is the identity).
struct PulseTerms {
  double c = 1.0;
  double s = 0.0;
  std::vector<double> e;
};

}  // namespace

LoopDecomposition loop_decomposition(const Protocol& protocol, const Subsystem& sub) {
  if (sub.n < 1)
    throw std::domain_error("subsystem " + sub.ground_string() +
                            " has no Rydberg pathway to decompose");
  const int np = protocol.n_pulses();
  const int n = sub.n;

  std::vector<PulseTerms> pulses(static_cast<size_t>(np));
  for (int k = 0; k < np; ++k) {
    PulseTerms& pt = pulses[static_cast<size_t>(k)];
    pt.e.assign(static_cast<size_t>(n), 0.0);
    double f2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ci =
          protocol.vectors[static_cast<size_t>(k)][static_cast<size_t>(sub.coupled_qubits[static_cast<size_t>(i)] - 1)];
      pt.e[static_cast<size_t>(i)] = ci;
      f2 += ci * ci;
    }
    if (f2 < kNormFloor) {
      std::fill(pt.e.begin(), pt.e.end(), 0.0);
      pt.c = 1.0;
      pt.s = 0.0;
      continue;
    }
    const double f = std::sqrt(f2);
    for (double& ei : pt.e) ei /= f;
    const double s_angle = mixing_angle(protocol.areas[static_cast<size_t>(k)], f);
    pt.c = std::cos(s_angle);
    pt.s = std::sin(s_angle);
  }

  // Ground-dwell products P(l, r) = prod_{k=l..r} C_k (1-based, empty = 1).
  std::vector<std::vector<double>> prod(static_cast<size_t>(np) + 2,
                                        std::vector<double>(static_cast<size_t>(np) + 2, 1.0));
  for (int l = 1; l <= np; ++l) {
    double p = 1.0;
    for (int r = l; r <= np; ++r) {
      p *= pulses[static_cast<size_t>(r - 1)].c;
      prod[static_cast<size_t>(l)][static_cast<size_t>(r)] = p;
    }
  }

  // Single-excursion amplitudes T(i, j) = -s_i s_j <e_j| M_{j-1}...M_{i+1} |e_i>,
  // the two factors of i from raising and lowering already folded in.
  std::vector<std::vector<double>> exc(static_cast<size_t>(np) + 1,
                                       std::vector<double>(static_cast<size_t>(np) + 2, 0.0));
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 1; i < np; ++i) {
    w = pulses[static_cast<size_t>(i - 1)].e;
    for (int j = i + 1; j <= np; ++j) {
      const PulseTerms& pj = pulses[static_cast<size_t>(j - 1)];
      double dot = 0.0;
      for (int q = 0; q < n; ++q) dot += pj.e[static_cast<size_t>(q)] * w[static_cast<size_t>(q)];
      exc[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          -pulses[static_cast<size_t>(i - 1)].s * pj.s * dot;
      // Dwell through pulse j for the next endpoint: w <- M_j w.
      for (int q = 0; q < n; ++q)
        w[static_cast<size_t>(q)] += (pj.c - 1.0) * dot * pj.e[static_cast<size_t>(q)];
    }
  }

  // Sum over configurations of disjoint excursions, grouped by excursion
  // count: G[m][s] covers pulses s..N_p with exactly m excursions.
  const int max_loops = np / 2;
  std::vector<std::vector<double>> cfg(static_cast<size_t>(max_loops) + 1,
                                       std::vector<double>(static_cast<size_t>(np) + 2, 0.0));
  for (int s = 1; s <= np + 1; ++s)
    cfg[0][static_cast<size_t>(s)] = prod[static_cast<size_t>(s)][static_cast<size_t>(np)];
  for (int m = 1; m <= max_loops; ++m) {
    for (int s = np + 1; s >= 1; --s) {
      double acc = 0.0;
      for (int i = s; i < np; ++i)
        for (int j = i + 1; j <= np; ++j)
          acc += prod[static_cast<size_t>(s)][static_cast<size_t>(i - 1)] *
                 exc[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                 cfg[static_cast<size_t>(m - 1)][static_cast<size_t>(j + 1)];
      cfg[static_cast<size_t>(m)][static_cast<size_t>(s)] = acc;
    }
  }

  LoopDecomposition dec;
  dec.u0 = cfg[0][1];
  for (int i = 1; i < np; ++i) {
    for (int j = i + 1; j <= np; ++j) {
      const double term = prod[1][static_cast<size_t>(i - 1)] *
                          exc[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                          prod[static_cast<size_t>(j + 1)][static_cast<size_t>(np)];
      if (j == i + 1)
        dec.u1 += term;
      else
        dec.ud += term;
    }
  }
  if (max_loops >= 2) dec.u2 = cfg[2][1];
  for (int m = 3; m <= max_loops; ++m) dec.u_extra += cfg[static_cast<size_t>(m)][1];
  return dec;
}

std::pair<double, double> mechanism_coords(const LoopDecomposition& dec, int target_sign) {
  const double flip = -static_cast<double>(target_sign);
  const double t0 = flip * dec.u0;
  const double t1 = flip * dec.u1;
  const double td = flip * dec.ud;
  const double t2 = flip * dec.u2;
  const double tx = flip * dec.u_extra;
  return {t0 + t1 - td - t2 - tx, t0 + td - t1 - t2 - tx};
}

namespace {

int box_index(double v) {
  const int idx = static_cast<int>(std::floor(3.0 * (v + 1.0) / 2.0)) + 1;
  return std::clamp(idx, 1, 3);
}

}  // namespace

int mechanism_rank(double x, double y) { return box_index(y) + 3 * (box_index(x) - 1); }

std::vector<int> MechanismRecord::omega_tuple() const {
  std::vector<int> t;
  t.reserve(entries.size());
  for (const auto& e : entries) t.push_back(e.omega);
  return t;
}

MechanismRecord mechanism_signature(const Protocol& protocol, const GateSpec& gate) {
  if (protocol.n_qubits != gate.n_qubits)
    throw std::invalid_argument("protocol and gate act on different system sizes");
  MechanismRecord rec;
  for (const Subsystem& sub : enumerate_subsystems(gate.n_qubits)) {
    if (sub.n == 0) continue;
    SubsystemMechanism sm;
    sm.subsystem = sub;
    sm.target_sign = gate.sign_of(sub.ground);
    sm.loops = loop_decomposition(protocol, sub);
    std::tie(sm.x, sm.y) = mechanism_coords(sm.loops, sm.target_sign);
    sm.omega = mechanism_rank(sm.x, sm.y);
    rec.entries.push_back(std::move(sm));
  }

  rec.omega_groups.assign(static_cast<size_t>(gate.n_qubits), {});
  for (int n = 1; n <= gate.n_qubits; ++n) {
    std::vector<std::pair<int, int>> by_m;  // (m, omega)
    for (const auto& e : rec.entries)
      if (e.subsystem.n == n) by_m.emplace_back(e.subsystem.m, e.omega);
    std::sort(by_m.begin(), by_m.end());
    for (const auto& [m, omega] : by_m)
      rec.omega_groups[static_cast<size_t>(n - 1)].push_back(omega);
  }
  for (const auto& group : rec.omega_groups) {
    int sum = 0;
    for (int o : group) sum += o;
    rec.omega_group_sums.push_back(sum);
  }
  return rec;
}

}  // namespace rydopt
