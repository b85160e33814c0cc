#include "rydopt/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rydopt {

namespace {

constexpr double kTinyNorm = 1e-150;

void add_violation(ConstraintSet::Violation& v, double amount) {
  if (amount <= 0.0) return;
  v.max = std::max(v.max, amount);
  v.sum_sq += amount * amount;
}

// Minimal-norm magnitude profile satisfying the targeted bounds plus the
// order-statistic chain; feasibility is norm^2 <= 1.
double minimal_profile_norm_sq(const ConstraintSet& cs, int n_qubits) {
  std::vector<double> mags(static_cast<size_t>(n_qubits), 0.0);
  for (const auto& [q, bound] : cs.targeted) mags[static_cast<size_t>(q - 1)] = bound;
  std::sort(mags.begin(), mags.end());
  double prev = 0.0;
  for (int j = 0; j < n_qubits; ++j) {
    double req = prev;
    if (j < static_cast<int>(cs.sigma_order.size()))
      req = std::max(req, cs.sigma_order[static_cast<size_t>(j)]);
    else if (!cs.sigma_order.empty())
      req = std::max(req, cs.sigma_order.back());
    mags[static_cast<size_t>(j)] = std::max(mags[static_cast<size_t>(j)], req);
    prev = mags[static_cast<size_t>(j)];
  }
  double norm2 = 0.0;
  for (double m : mags) norm2 += m * m;
  return norm2;
}

}  // namespace

void ConstraintSet::validate(int n_qubits, int n_pulses) const {
  if (n_pulses < 1) throw std::invalid_argument("need at least one pulse");
  if (static_cast<int>(sigma_order.size()) > n_qubits)
    throw std::invalid_argument("more sigma bounds than qubits");
  double prev = 0.0;
  for (double s : sigma_order) {
    if (!(s >= 0.0) || s > 1.0)
      throw std::invalid_argument("sigma bounds must lie in [0, 1]");
    if (s < prev) throw std::invalid_argument("sigma bounds must be ascending");
    prev = s;
  }
  for (const auto& [q, bound] : targeted) {
    if (q < 1 || q > n_qubits) throw std::invalid_argument("targeted qubit out of range");
    if (!(bound >= 0.0) || bound > 1.0)
      throw std::invalid_argument("targeted bounds must lie in [0, 1]");
  }
  if (!(area_range[0] >= 0.0) || !(area_range[1] >= area_range[0]))
    throw std::invalid_argument("invalid per-pulse area range");
  if (area_cap && !(*area_cap >= 0.0))
    throw std::invalid_argument("area cap must be nonnegative");
  if (independent) {
    const bool any_sigma =
        std::any_of(sigma_order.begin(), sigma_order.end(), [](double s) { return s > 0.0; });
    if (any_sigma || !targeted.empty() || positivity)
      throw std::invalid_argument(
          "independent (one-hot) mode cannot be combined with geometrical-factor bounds");
  }
}

bool ConstraintSet::is_feasible(int n_qubits, int n_pulses) const {
  if (minimal_profile_norm_sq(*this, n_qubits) > 1.0 + 1e-12) return false;
  if (area_cap && *area_cap < static_cast<double>(n_pulses) * area_range[0] - 1e-12)
    return false;
  return true;
}

void ConstraintSet::assert_feasible(int n_qubits, int n_pulses) const {
  validate(n_qubits, n_pulses);
  if (!is_feasible(n_qubits, n_pulses))
    throw InfeasibleConstraints("no unit-norm protocol can satisfy the constraint set");
}

void ConstraintSet::accumulate_vector_violation(const double* components, int n_qubits,
                                                Violation& v) const {
  if (independent) {
    double largest = 0.0;
    for (int j = 0; j < n_qubits; ++j) largest = std::max(largest, std::abs(components[j]));
    add_violation(v, 1.0 - largest);
    return;
  }
  if (positivity)
    for (int j = 0; j < n_qubits; ++j) add_violation(v, -components[j]);
  for (const auto& [q, bound] : targeted)
    add_violation(v, bound - std::abs(components[q - 1]));
  if (!sigma_order.empty()) {
    std::array<double, kMaxQubits> mags;
    for (int j = 0; j < n_qubits; ++j) mags[static_cast<size_t>(j)] = std::abs(components[j]);
    std::sort(mags.begin(), mags.begin() + n_qubits);
    const size_t n_bounds = std::min(sigma_order.size(), static_cast<size_t>(n_qubits));
    for (size_t j = 0; j < n_bounds; ++j) add_violation(v, sigma_order[j] - mags[j]);
  }
}

void ConstraintSet::accumulate_area_violation(const double* areas, int n_pulses,
                                              Violation& v) const {
  double total = 0.0;
  for (int k = 0; k < n_pulses; ++k) {
    add_violation(v, area_range[0] - areas[k]);
    add_violation(v, areas[k] - area_range[1]);
    total += areas[k];
  }
  if (area_cap) add_violation(v, total - *area_cap);
}

ConstraintSet::Violation ConstraintSet::violation(const Protocol& protocol) const {
  Violation v;
  accumulate_area_violation(protocol.areas.data(), protocol.n_pulses(), v);
  std::array<double, kMaxQubits> normed;
  for (const auto& vec : protocol.vectors) {
    double norm2 = 0.0;
    for (double c : vec) norm2 += c * c;
    const double norm = std::sqrt(norm2);
    add_violation(v, std::abs(norm - 1.0));
    if (norm < kTinyNorm) {
      add_violation(v, 1.0);
      continue;
    }
    for (size_t j = 0; j < vec.size(); ++j) normed[j] = vec[j] / norm;
    accumulate_vector_violation(normed.data(), protocol.n_qubits, v);
  }
  return v;
}

bool ConstraintSet::check(const Protocol& protocol, double tol) const {
  return violation(protocol).max <= tol;
}

std::vector<double> ConstraintSet::project_vector(std::vector<double> v) const {
  const int nq = static_cast<int>(v.size());
  double norm2 = 0.0;
  for (double c : v) norm2 += c * c;
  if (norm2 < kTinyNorm) {
    // Degenerate input: fall back to the uniform direction.
    std::fill(v.begin(), v.end(), 1.0 / std::sqrt(static_cast<double>(nq)));
    norm2 = 1.0;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& c : v) c *= inv;

  if (independent) {
    int best = 0;
    for (int j = 1; j < nq; ++j)
      if (std::abs(v[static_cast<size_t>(j)]) > std::abs(v[static_cast<size_t>(best)])) best = j;
    const double sign = v[static_cast<size_t>(best)] < 0.0 ? -1.0 : 1.0;
    std::fill(v.begin(), v.end(), 0.0);
    v[static_cast<size_t>(best)] = sign;
    return v;
  }

  if (positivity)
    for (double& c : v) c = std::abs(c);

  if (sigma_order.empty() && targeted.empty()) return v;

  // Lift magnitudes onto their bounds, then renormalize; the lifted set
  // stabilizes after a few rounds. If the lift leaves spare norm, the
  // remainder goes into the largest component, which cannot break any
  // lower bound.
  std::vector<int> idx(static_cast<size_t>(nq));
  for (int round = 0; round < 500; ++round) {
    for (const auto& [q, bound] : targeted) {
      double& c = v[static_cast<size_t>(q - 1)];
      if (std::abs(c) < bound) c = c < 0.0 ? -bound : bound;
    }
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::abs(v[static_cast<size_t>(a)]) < std::abs(v[static_cast<size_t>(b)]);
    });
    double prev = 0.0;
    for (int j = 0; j < nq; ++j) {
      double req = prev;
      if (j < static_cast<int>(sigma_order.size()))
        req = std::max(req, sigma_order[static_cast<size_t>(j)]);
      double& c = v[static_cast<size_t>(idx[static_cast<size_t>(j)])];
      if (std::abs(c) < req) c = c < 0.0 ? -req : req;
      prev = std::max(prev, std::abs(c));
    }
    norm2 = 0.0;
    for (double c : v) norm2 += c * c;
    if (norm2 <= 1.0 + 1e-15) {
      // Spare mass onto the largest component.
      const int top = idx.back();
      double& c = v[static_cast<size_t>(top)];
      const double lifted2 = std::max(0.0, 1.0 - (norm2 - c * c));
      c = (c < 0.0 ? -1.0 : 1.0) * std::sqrt(lifted2);
      break;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& c : v) c *= scale;
    Violation check_v;
    accumulate_vector_violation(v.data(), nq, check_v);
    if (check_v.max <= 1e-14) break;
  }

  Violation final_v;
  accumulate_vector_violation(v.data(), nq, final_v);
  if (final_v.max > 1e-13) {
    // The lift-and-renormalize loop stalled (essentially all mass pinned):
    // assemble the minimal bound profile directly, spare mass on top.
    std::vector<double> mags(static_cast<size_t>(nq), 0.0);
    for (const auto& [q, bound] : targeted) mags[static_cast<size_t>(q - 1)] = bound;
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return mags[static_cast<size_t>(a)] < mags[static_cast<size_t>(b)];
    });
    double prev = 0.0;
    for (int j = 0; j < nq; ++j) {
      double req = prev;
      if (j < static_cast<int>(sigma_order.size()))
        req = std::max(req, sigma_order[static_cast<size_t>(j)]);
      double& m = mags[static_cast<size_t>(idx[static_cast<size_t>(j)])];
      m = std::max(m, req);
      prev = m;
    }
    double norm_sq = 0.0;
    for (double m : mags) norm_sq += m * m;
    double& top = mags[static_cast<size_t>(idx.back())];
    top = std::sqrt(std::max(0.0, top * top + 1.0 - norm_sq));
    for (int j = 0; j < nq; ++j) {
      const double sign = (!positivity && v[static_cast<size_t>(j)] < 0.0) ? -1.0 : 1.0;
      v[static_cast<size_t>(j)] = sign * mags[static_cast<size_t>(j)];
    }
  }
  return v;
}

Protocol ConstraintSet::project(const Protocol& protocol) const {
  Protocol out = protocol;
  const int np = out.n_pulses();
  for (double& a : out.areas) a = std::clamp(a, area_range[0], area_range[1]);
  if (area_cap) {
    double total = std::accumulate(out.areas.begin(), out.areas.end(), 0.0);
    if (total > *area_cap) {
      // Remove the excess proportionally to each pulse's slack above the
      // per-pulse floor, so the floor stays intact.
      double slack = 0.0;
      for (double a : out.areas) slack += a - area_range[0];
      const double excess = total - *area_cap;
      if (slack > 0.0) {
        const double ratio = std::min(1.0, excess / slack);
        for (double& a : out.areas) a -= ratio * (a - area_range[0]);
      }
      // Guard against roundoff leaving the sum a hair above the cap.
      total = std::accumulate(out.areas.begin(), out.areas.end(), 0.0);
      if (total > *area_cap && total > 0.0) {
        const double scale = *area_cap / total;
        for (double& a : out.areas)
          a = std::max(area_range[0], a * scale);
      }
    }
  }
  for (int k = 0; k < np; ++k)
    out.vectors[static_cast<size_t>(k)] = project_vector(out.vectors[static_cast<size_t>(k)]);
  return out;
}

}  // namespace rydopt
