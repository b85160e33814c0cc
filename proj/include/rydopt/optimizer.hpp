#pragma once

#include <cstdint>

#include "rydopt/constraints.hpp"
#include "rydopt/nelder_mead.hpp"

namespace rydopt {

struct OptimizerOptions {
  NelderMeadOptions simplex;
  double penalty_weight = 1e3;
  // When the simplex converges outside the feasible set the penalty weight
  // is doubled and the search resumes from the converged point.
  int max_penalty_rounds = 4;
  double area_step = 0.35;       // initial simplex offsets, radians
  double component_step = 0.2;   // ... and raw vector components
  double step_scale = 1.0;       // shrunk for warm-started polish runs
};

struct OptimizationResult {
  Protocol protocol;
  double infidelity = 1.0;
  bool feasible = false;
  int iterations = 0;
  std::uint64_t restart_seed = 0;
  bool converged = false;
};

// Uniform areas over the per-pulse range (rescaled under the cap) and
// structural vectors uniform on the unit sphere, repaired onto the feasible
// set. A pure function of the seed.
Protocol sample_initial(const GateSpec& gate, int n_pulses, const ConstraintSet& constraints,
                        std::uint64_t seed);

// epsilon + penalty_weight * sum of squared bound violations; exactly the
// infidelity on the feasible set.
double evaluate_objective(const Protocol& protocol, const GateSpec& gate,
                          const ConstraintSet& constraints, double penalty_weight = 1e3);

// One restart: sample, minimize epsilon + penalty over the N_p (N+1)
// parameters (areas plus raw vector components, renormalized inside the
// objective; areas only in independent mode), then repair hard onto the
// feasible set and re-evaluate, so every reported optimum is strictly
// feasible.
OptimizationResult optimize_protocol(const GateSpec& gate, int n_pulses,
                                     const ConstraintSet& constraints, std::uint64_t seed,
                                     const OptimizerOptions& options = {});

// Same search warm-started from a given protocol (repaired first). seed_tag
// is recorded on the result only; the search itself is deterministic.
OptimizationResult optimize_from(const GateSpec& gate, const ConstraintSet& constraints,
                                 const Protocol& start, std::uint64_t seed_tag,
                                 const OptimizerOptions& options = {});

}  // namespace rydopt
