#include "rydopt/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "rydopt/rng.hpp"

namespace rydopt {

namespace {

constexpr double kTinyNorm = 1e-150;

// Parameter layout: [A_1..A_Np | c_11..c_1N | ... | c_Np,1..c_Np,N].
// Independent mode keeps the vectors fixed and searches areas only.
struct ParamSpace {
  int n_qubits;
  int n_pulses;
  bool independent;
  std::vector<std::vector<double>> fixed_vectors;  // independent mode only

  size_t dim() const {
    return independent ? static_cast<size_t>(n_pulses)
                       : static_cast<size_t>(n_pulses) * (n_qubits + 1);
  }

  std::vector<double> pack(const Protocol& p) const {
    std::vector<double> x(p.areas);
    if (!independent)
      for (const auto& vec : p.vectors) x.insert(x.end(), vec.begin(), vec.end());
    return x;
  }

  Protocol unpack(const std::vector<double>& x) const {
    Protocol p;
    p.n_qubits = n_qubits;
    p.areas.assign(x.begin(), x.begin() + n_pulses);
    if (independent) {
      p.vectors = fixed_vectors;
      return p;
    }
    p.vectors.resize(static_cast<size_t>(n_pulses));
    for (int k = 0; k < n_pulses; ++k) {
      const auto first = x.begin() + n_pulses + static_cast<long>(k) * n_qubits;
      auto& vec = p.vectors[static_cast<size_t>(k)];
      vec.assign(first, first + n_qubits);
      double norm2 = 0.0;
      for (double c : vec) norm2 += c * c;
      if (norm2 > kTinyNorm) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& c : vec) c *= inv;
      } else {
        std::fill(vec.begin(), vec.end(), 0.0);
        vec[0] = 1.0;
      }
    }
    return p;
  }
};

// Objective over raw parameters. Vector components are renormalized into a
// scratch buffer before both the fidelity and the constraint terms, so the
// search space has no norm gauge direction.
class PenalizedObjective {
 public:
  PenalizedObjective(const FidelityEvaluator& evaluator, const ConstraintSet& constraints,
                     const ParamSpace& space, double weight)
      : evaluator_(evaluator),
        constraints_(constraints),
        space_(space),
        weight_(weight),
        normed_(static_cast<size_t>(space.n_pulses) * space.n_qubits) {
    if (space_.independent)
      for (int k = 0; k < space_.n_pulses; ++k)
        for (int j = 0; j < space_.n_qubits; ++j)
          normed_[static_cast<size_t>(k) * space_.n_qubits + j] =
              space_.fixed_vectors[static_cast<size_t>(k)][static_cast<size_t>(j)];
  }

  double operator()(const std::vector<double>& x) {
    const int nq = space_.n_qubits;
    const int np = space_.n_pulses;
    ConstraintSet::Violation v;
    if (!space_.independent) {
      for (int k = 0; k < np; ++k) {
        const double* raw = x.data() + np + static_cast<size_t>(k) * nq;
        double* out = normed_.data() + static_cast<size_t>(k) * nq;
        double norm2 = 0.0;
        for (int j = 0; j < nq; ++j) norm2 += raw[j] * raw[j];
        if (norm2 < kTinyNorm) {
          // Collapsed direction: a large finite value steers the simplex away.
          return 1e6;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (int j = 0; j < nq; ++j) out[j] = raw[j] * inv;
        constraints_.accumulate_vector_violation(out, nq, v);
      }
    }
    constraints_.accumulate_area_violation(x.data(), np, v);
    const double eps = 1.0 - evaluator_.fidelity_flat(x.data(), normed_.data(), np);
    return eps + weight_ * v.sum_sq;
  }

 private:
  const FidelityEvaluator& evaluator_;
  const ConstraintSet& constraints_;
  const ParamSpace& space_;
  double weight_;
  std::vector<double> normed_;
};

OptimizationResult run_search(const GateSpec& gate, const ConstraintSet& constraints,
                              const Protocol& initial, std::uint64_t seed,
                              const OptimizerOptions& options) {
  ParamSpace space{gate.n_qubits, initial.n_pulses(), constraints.independent, {}};
  if (constraints.independent) space.fixed_vectors = initial.vectors;

  const FidelityEvaluator evaluator(gate);
  std::vector<double> steps(space.dim(), options.component_step * options.step_scale);
  for (int k = 0; k < space.n_pulses; ++k)
    steps[static_cast<size_t>(k)] = options.area_step * options.step_scale;

  std::vector<double> x = space.pack(initial);
  double weight = options.penalty_weight;
  OptimizationResult result;
  result.restart_seed = seed;
  for (int round = 0; round <= options.max_penalty_rounds; ++round) {
    PenalizedObjective objective(evaluator, constraints, space, weight);
    NelderMeadResult nm = nelder_mead([&objective](const std::vector<double>& p) { return objective(p); },
                                      x, steps, options.simplex);
    result.iterations += nm.iterations;
    result.converged = nm.converged;
    x = std::move(nm.point);
    // Binding bounds settle at violations of order 1/weight under a
    // quadratic penalty; those are absorbed by the final projection. Only a
    // genuinely infeasible convergence warrants an escalated rerun.
    if (constraints.violation(space.unpack(x)).max <= 1e-5) break;
    weight *= 2.0;
  }

  result.protocol = constraints.project(space.unpack(x));
  result.feasible = constraints.check(result.protocol, 1e-12);
  result.infidelity = 1.0 - evaluator.fidelity(result.protocol);
  return result;
}

}  // namespace

Protocol sample_initial(const GateSpec& gate, int n_pulses, const ConstraintSet& constraints,
                        std::uint64_t seed) {
  constraints.assert_feasible(gate.n_qubits, n_pulses);
  Rng rng(seed);
  Protocol p;
  p.n_qubits = gate.n_qubits;
  p.areas.resize(static_cast<size_t>(n_pulses));
  for (double& a : p.areas) a = rng.uniform(constraints.area_range[0], constraints.area_range[1]);
  p.vectors.resize(static_cast<size_t>(n_pulses));
  for (auto& vec : p.vectors) {
    vec.resize(static_cast<size_t>(gate.n_qubits));
    if (constraints.independent) {
      const int q = std::min(gate.n_qubits - 1,
                             static_cast<int>(rng.uniform() * gate.n_qubits));
      std::fill(vec.begin(), vec.end(), 0.0);
      vec[static_cast<size_t>(q)] = 1.0;
    } else {
      for (double& c : vec) c = rng.normal();
    }
  }
  return constraints.project(p);
}

double evaluate_objective(const Protocol& protocol, const GateSpec& gate,
                          const ConstraintSet& constraints, double penalty_weight) {
  const double eps = 1.0 - gate_fidelity(protocol, gate);
  return eps + penalty_weight * constraints.violation(protocol).sum_sq;
}

OptimizationResult optimize_protocol(const GateSpec& gate, int n_pulses,
                                     const ConstraintSet& constraints, std::uint64_t seed,
                                     const OptimizerOptions& options) {
  const Protocol initial = sample_initial(gate, n_pulses, constraints, seed);
  return run_search(gate, constraints, initial, seed, options);
}

OptimizationResult optimize_from(const GateSpec& gate, const ConstraintSet& constraints,
                                 const Protocol& start, std::uint64_t seed_tag,
                                 const OptimizerOptions& options) {
  constraints.assert_feasible(gate.n_qubits, start.n_pulses());
  return run_search(gate, constraints, constraints.project(start), seed_tag, options);
}

}  // namespace rydopt
