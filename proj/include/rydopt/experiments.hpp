#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rydopt/optimizer.hpp"
#include "rydopt/pathways.hpp"

namespace rydopt {

// A filter left nobody to aggregate over.
struct EmptySample : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One batch of independent restarts fanned out over a worker pool. Restart i
// always runs with seed derive_seed(master_seed, i); aggregation is by index,
// so results are deterministic regardless of scheduling.
struct RestartPlan {
  GateSpec gate;
  int n_pulses = 3;
  ConstraintSet constraints;
  int n_restarts = 1;
  std::uint64_t master_seed = 1;
  int workers = 0;  // <= 0: hardware concurrency
  OptimizerOptions options;
  // Restart i < warm_starts.size() polishes warm_starts[i] instead of a
  // fresh sample (used by the decreasing-cap continuation).
  std::vector<Protocol> warm_starts;
  OptimizerOptions warm_options;  // applied to warm-started indices only
  // When set, indices above the lowest success stop being claimed; all
  // indices below it still complete, so the reported first success is the
  // lowest-index one and deterministic.
  std::function<bool(const OptimizationResult&)> stop_when;
};

struct BatchOutcome {
  std::vector<OptimizationResult> results;  // slot i <-> restart i
  std::vector<char> completed;
  long n_completed = 0;
  int first_success = -1;  // only with stop_when
};

BatchOutcome run_restarts(const RestartPlan& plan);

struct SuccessCurve {
  std::vector<double> epsilon_grid;
  std::vector<double> rate;  // N_eps / N_T per grid entry
  std::string gate_name;
  int n_qubits = 0;
  int n_pulses = 0;
  ConstraintSet constraints;
  int n_restarts = 0;
  std::uint64_t master_seed = 0;
};

std::vector<double> default_epsilon_grid();  // 1e0 .. 1e-7

// Fraction of restarts whose strictly feasible optimum lands below each
// epsilon threshold. Reuse one master seed across constraint variants to
// compare curves on a common footing.
SuccessCurve success_rate_sweep(const RestartPlan& plan, const std::vector<double>& epsilon_grid,
                                std::vector<OptimizationResult>* keep_results = nullptr);

struct MinAreaOptions {
  int probe_budget = 2000;          // restarts per cap probe
  double resolution = 0.02 * kPi;   // bisection stops at this cap gap
  double cap_hi = 8.0 * kPi;        // initial (loosest) cap
  int workers = 0;
  OptimizerOptions options;
  int max_pool = 16;                // distinct witnesses kept for continuation
  int max_warm_starts = 256;        // warm slots per probe (pool + jittered replicas)
  double warm_area_jitter = 0.25;   // radians, applied to replica areas
  double warm_component_jitter = 0.08;
  double warm_step_scale = 0.35;    // simplex steps for warm-started polish
};

struct MinAreaResult {
  double fidelity_target = 0.0;
  bool found = false;
  double min_area = 0.0;  // radians; +inf when no success at cap_hi
  Protocol witness;
  int probes = 0;
  long restarts_used = 0;
};

// Decreasing-cap scan per fidelity target: bisection on the total-area cap,
// warm-starting each probe from successes found at looser caps. Returns the
// smallest cap at which a feasible protocol meeting the target was found,
// plus that witness (re-verified under the returned cap).
std::vector<MinAreaResult> minimal_area_search(const GateSpec& gate, int n_pulses,
                                               const ConstraintSet& base_constraints,
                                               const std::vector<double>& fidelity_targets,
                                               std::uint64_t master_seed,
                                               const MinAreaOptions& options);

struct UsageStats {
  std::vector<double> mean_d;  // per qubit: <d_q> over the filtered set
  int sample_count = 0;
  double threshold = 0.0;
};

// Relative use d_q = N * (mean over pulses of c_qk^2) - 1, averaged over the
// feasible results with fidelity above the threshold. d = 0 is uniform use,
// d = -1 an untouched qubit.
UsageStats qubit_usage_stats(const std::vector<OptimizationResult>& results,
                             const GateSpec& gate, double threshold = 0.99);

struct CensusEntry {
  std::vector<int> omega_tuple;
  long count = 0;
};

struct MechanismCensus {
  std::vector<CensusEntry> entries;   // count descending, tuple ascending
  std::vector<CensusEntry> dominant;  // count >= dominant_fraction * mode
  int sample_count = 0;
  double threshold = 0.0;
  double dominant_fraction = 0.0;
};

MechanismCensus mechanism_census(const std::vector<OptimizationResult>& results,
                                 const GateSpec& gate, double threshold = 0.99,
                                 double dominant_fraction = 0.3);

}  // namespace rydopt
