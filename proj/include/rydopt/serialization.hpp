#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rydopt/experiments.hpp"

namespace rydopt {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// Input artifact absent or unreadable.
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Areas appear in every I/O surface in units of pi; stored radians are
// converted at this boundary.

Json protocol_to_json(const Protocol& protocol);
// Vectors are renormalized on load; a drift beyond 1e-9 produces a warning
// on stderr (or sets *warned when given). Unknown keys are rejected.
Protocol protocol_from_json(const Json& j, bool* warned = nullptr);

Json constraints_to_json(const ConstraintSet& cs);
ConstraintSet constraints_from_json(const Json& j);

Json result_to_json(const OptimizationResult& result);
OptimizationResult result_from_json(const Json& j);

Json mechanism_record_to_json(const MechanismRecord& record);

// Everything a command needs to rerun bit-identically; embedded in every
// output artifact. Unknown keys are rejected.
struct ExperimentConfig {
  std::string command;  // optimize | sweep | minarea | usage | census | mechanism
  int n_qubits = 3;
  std::vector<int> targets = {1, 2};
  int n_pulses = 3;
  ConstraintSet constraints;
  int restarts = 10000;  // desk-scale default batch
  std::uint64_t master_seed = 1;
  std::vector<double> epsilon_grid = default_epsilon_grid();
  std::vector<double> fidelity_targets = {0.999};
  int probe_budget = 2000;
  double resolution_pi = 0.02;
  double cap_hi_pi = 8.0;
  double threshold = 0.99;
  double dominant_fraction = 0.3;
  int workers = 0;
  int max_iter = 20000;
  double tol_f = 1e-12;
  double tol_x = 1e-10;
  double penalty_weight = 1e3;

  GateSpec gate() const;
  OptimizerOptions optimizer_options() const;
};

Json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& j);

// JSON-Lines results file: a header object {"schema_version", "config"}
// followed by one OptimizationResult per line.
void write_results_jsonl(const std::string& path, const ExperimentConfig& config,
                         const std::vector<OptimizationResult>& results);
struct ResultsFile {
  ExperimentConfig config;
  std::vector<OptimizationResult> results;
};
ResultsFile read_results_jsonl(const std::string& path);  // MissingInput on absent file

// CSV summaries, each prefixed with a "# {provenance json}" comment line.
void write_success_curve_csv(const std::string& path, const ExperimentConfig& config,
                             const SuccessCurve& curve);
void write_frontier_csv(const std::string& path, const ExperimentConfig& config,
                        const std::vector<MinAreaResult>& frontier);
void write_usage_csv(const std::string& path, const ExperimentConfig& config,
                     const UsageStats& stats);
void write_census_csv(const std::string& path, const ExperimentConfig& config,
                      const MechanismCensus& census);

std::string omega_tuple_key(const std::vector<int>& tuple);  // "1-7-7"

}  // namespace rydopt
