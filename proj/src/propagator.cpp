#include "rydopt/propagator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rydopt {

namespace {

// Below this, a pulse is treated as not addressing the block (identity);
// the e_j renormalization is undefined at f = 0 and the S -> 0 limit of the
// propagator is the identity.
constexpr double kNormFloor = 1e-24;  // on f^2

}  // namespace

double Protocol::total_area() const {
  return std::accumulate(areas.begin(), areas.end(), 0.0);
}

void Protocol::validate(double tol) const {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument("protocol n_qubits out of range");
  if (vectors.size() != areas.size())
    throw std::invalid_argument("protocol must have one structural vector per pulse");
  for (double a : areas)
    if (!(a >= -tol) || !std::isfinite(a))
      throw std::invalid_argument("pulse areas must be nonnegative");
  for (const auto& v : vectors) {
    if (static_cast<int>(v.size()) != n_qubits)
      throw std::invalid_argument("structural vector length must equal n_qubits");
    double norm2 = 0.0;
    for (double c : v) norm2 += c * c;
    if (std::abs(norm2 - 1.0) > 2.0 * tol)
      throw std::invalid_argument("structural vectors must have unit norm");
  }
}

double subsystem_norm(const std::vector<double>& vec, const Subsystem& sub) {
  if (sub.n == 0)
    throw std::domain_error("subsystem " + sub.ground_string() +
                            " has no coupled qubits");
  if (static_cast<int>(vec.size()) != sub.n_qubits)
    throw std::invalid_argument("structural vector length must equal n_qubits");
  double f2 = 0.0;
  for (int q : sub.coupled_qubits) {
    const double c = vec[static_cast<size_t>(q - 1)];
    f2 += c * c;
  }
  return std::sqrt(f2);
}

double mixing_angle(double area, double f) { return 0.5 * f * area; }

double SubsystemPropagator::max_unitarity_defect() const {
  double worst = 0.0;
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      std::complex<double> acc = 0.0;
      for (int k = 0; k < dim; ++k) acc += std::conj(at(k, r)) * at(k, c);
      if (r == c) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

SubsystemPropagator pulse_propagator(const std::vector<double>& vec, double area,
                                     const Subsystem& sub) {
  SubsystemPropagator out;
  out.subsystem = sub;
  out.dim = sub.n + 1;
  out.m.assign(static_cast<size_t>(out.dim) * out.dim, 0.0);
  for (int r = 0; r < out.dim; ++r) out.at(r, r) = 1.0;
  if (sub.n == 0) return out;

  double f2 = 0.0;
  for (int q : sub.coupled_qubits) {
    const double c = vec[static_cast<size_t>(q - 1)];
    f2 += c * c;
  }
  if (f2 < kNormFloor) return out;

  const double f = std::sqrt(f2);
  const double s_angle = mixing_angle(area, f);
  const double cs = std::cos(s_angle);
  const double sn = std::sin(s_angle);

  std::vector<double> e(static_cast<size_t>(sub.n));
  for (int i = 0; i < sub.n; ++i)
    e[static_cast<size_t>(i)] = vec[static_cast<size_t>(sub.coupled_qubits[i] - 1)] / f;

  out.at(0, 0) = cs;
  for (int i = 0; i < sub.n; ++i) {
    const std::complex<double> off(0.0, e[static_cast<size_t>(i)] * sn);
    out.at(0, i + 1) = off;
    out.at(i + 1, 0) = off;
    for (int j = 0; j < sub.n; ++j) {
      const double block =
          (i == j ? 1.0 : 0.0) + e[static_cast<size_t>(i)] * e[static_cast<size_t>(j)] * (cs - 1.0);
      out.at(i + 1, j + 1) = block;
    }
  }
  return out;
}

SubsystemPropagator sequence_propagator(const Protocol& protocol, const Subsystem& sub) {
  SubsystemPropagator total;
  total.subsystem = sub;
  total.dim = sub.n + 1;
  total.m.assign(static_cast<size_t>(total.dim) * total.dim, 0.0);
  for (int r = 0; r < total.dim; ++r) total.at(r, r) = 1.0;

  std::vector<std::complex<double>> scratch(total.m.size());
  for (int k = 0; k < protocol.n_pulses(); ++k) {
    const SubsystemPropagator step = pulse_propagator(
        protocol.vectors[static_cast<size_t>(k)], protocol.areas[static_cast<size_t>(k)], sub);
    // total <- step * total (later pulses act on the left)
    for (int r = 0; r < total.dim; ++r) {
      for (int c = 0; c < total.dim; ++c) {
        std::complex<double> acc = 0.0;
        for (int l = 0; l < total.dim; ++l) acc += step.at(r, l) * total.at(l, c);
        scratch[static_cast<size_t>(r) * total.dim + c] = acc;
      }
    }
    total.m.swap(scratch);
  }
  return total;
}

std::vector<std::pair<BitId, std::complex<double>>> survival_amplitudes(
    const Protocol& protocol, const GateSpec& gate) {
  if (protocol.n_qubits != gate.n_qubits)
    throw std::invalid_argument("protocol and gate act on different system sizes");
  std::vector<std::pair<BitId, std::complex<double>>> out;
  for (const Subsystem& sub : enumerate_subsystems(gate.n_qubits)) {
    if (sub.n == 0) {
      out.emplace_back(sub.ground, std::complex<double>(1.0, 0.0));
      continue;
    }
    out.emplace_back(sub.ground, sequence_propagator(protocol, sub).at(0, 0));
  }
  return out;
}

double gate_fidelity(const Protocol& protocol, const GateSpec& gate) {
  return FidelityEvaluator(gate).fidelity(protocol);
}

FidelityEvaluator::FidelityEvaluator(GateSpec gate) : gate_(std::move(gate)) {
  for (const Subsystem& sub : enumerate_subsystems(gate_.n_qubits)) {
    Block b;
    b.n = sub.n;
    b.sign = static_cast<double>(gate_.sign_of(sub.ground));
    for (int i = 0; i < sub.n; ++i)
      b.coupled[static_cast<size_t>(i)] = sub.coupled_qubits[static_cast<size_t>(i)] - 1;
    blocks_.push_back(b);
  }
  inv_dim_ = 1.0 / static_cast<double>(1u << gate_.n_qubits);
}

double FidelityEvaluator::fidelity(const Protocol& protocol) const {
  const int np = protocol.n_pulses();
  const int nq = gate_.n_qubits;
  std::vector<double> flat(static_cast<size_t>(np) * nq);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < nq; ++j)
      flat[static_cast<size_t>(k) * nq + j] = protocol.vectors[static_cast<size_t>(k)][static_cast<size_t>(j)];
  return fidelity_flat(protocol.areas.data(), flat.data(), np);
}

double FidelityEvaluator::fidelity_flat(const double* areas, const double* vectors,
                                        int n_pulses) const {
  const int nq = gate_.n_qubits;
  double acc = 0.0;
  for (const Block& blk : blocks_) {
    if (blk.n == 0) {
      acc += blk.sign;
      continue;
    }
    // State of this block as (a, i*w): the ground component stays real and
    // the Rydberg components stay purely imaginary under every pulse.
    double a = 1.0;
    std::array<double, kMaxQubits> w{};
    for (int k = 0; k < n_pulses; ++k) {
      const double* c = vectors + static_cast<size_t>(k) * nq;
      double f2 = 0.0;
      double g = 0.0;  // f * <e|w>
      for (int i = 0; i < blk.n; ++i) {
        const double ci = c[blk.coupled[static_cast<size_t>(i)]];
        f2 += ci * ci;
        g += ci * w[static_cast<size_t>(i)];
      }
      if (f2 < kNormFloor) continue;
      const double f = std::sqrt(f2);
      const double s_angle = 0.5 * f * areas[k];
      const double cs = std::cos(s_angle);
      const double sn = std::sin(s_angle);
      const double coef = (cs - 1.0) * g / f2 + sn * a / f;
      a = cs * a - sn * g / f;
      for (int i = 0; i < blk.n; ++i)
        w[static_cast<size_t>(i)] += coef * c[blk.coupled[static_cast<size_t>(i)]];
    }
    acc += blk.sign * a;
  }
  const double overlap = acc * inv_dim_;
  return overlap * overlap;
}

}  // namespace rydopt
