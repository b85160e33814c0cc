// Command-line front end for the pulse-sequence gate toolkit.
//
// Subcommands: optimize, sweep, minarea, usage, census, mechanism. Every run
// is reproducible from its seed; output artifacts embed the full config.
// Exit codes: 0 ok, 2 usage/config error, 3 infeasible constraints,
// 4 missing input file, 5 empty filtered sample, 1 other failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rydopt/serialization.hpp"

using namespace rydopt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitMissingInput = 4;
constexpr int kExitEmptySample = 5;

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open input file: " + path);
  Json j;
  in >> j;
  return j;
}

int resolve_workers(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("RYDOPT_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 0;  // hardware concurrency
}

// Constraint flags shared by the search commands.
struct ConstraintFlags {
  double sigma = -1.0;
  double sigma_plus = -1.0;
  double sigma_ab = -1.0;
  std::vector<double> sigma_list;
  std::vector<std::pair<int, double>> sigma_qubit;
  bool independent = false;
  double area_cap_pi = -1.0;
  std::vector<double> area_range_pi;

  void apply(ExperimentConfig& cfg) const {
    ConstraintSet& cs = cfg.constraints;
    int modes = 0;
    if (sigma >= 0.0) {
      cs.sigma_order = sigma > 0.0 ? std::vector<double>{sigma} : std::vector<double>{};
      ++modes;
    }
    if (sigma_plus >= 0.0) {
      cs.sigma_order = sigma_plus > 0.0 ? std::vector<double>{sigma_plus} : std::vector<double>{};
      cs.positivity = true;
      ++modes;
    }
    if (!sigma_list.empty()) {
      cs.sigma_order = sigma_list;
      ++modes;
    }
    if (sigma_ab >= 0.0) {
      for (int q : cfg.targets) cs.targeted[q] = sigma_ab;
      ++modes;
    }
    for (const auto& [q, bound] : sigma_qubit) {
      cs.targeted[q] = bound;
      ++modes;
    }
    if (independent) {
      cs.independent = true;
      ++modes;
    }
    if (modes > 1 && (independent || (sigma >= 0.0 && sigma_plus >= 0.0)))
      throw CLI::ValidationError("constraints", "conflicting constraint modes");
    if (area_cap_pi >= 0.0) cs.area_cap = area_cap_pi * kPi;
    if (!area_range_pi.empty()) {
      if (area_range_pi.size() != 2)
        throw CLI::ValidationError("--area-range-pi", "expects LO HI");
      cs.area_range = {area_range_pi[0] * kPi, area_range_pi[1] * kPi};
    }
  }
};

void add_gate_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& gate_name) {
  cmd->add_option("--qubits", cfg.n_qubits, "system size N")->check(CLI::Range(2, kMaxQubits));
  cmd->add_option("--gate", gate_name, "pab (2-qubit CZ on a,b) or pabc (3-qubit)")
      ->check(CLI::IsMember({"pab", "pabc"}));
  cmd->add_option("--target-qubits", cfg.targets, "explicit target qubit list")
      ->delimiter(',');
}

void add_constraint_options(CLI::App* cmd, ConstraintFlags& flags) {
  cmd->add_option("--sigma", flags.sigma, "symmetric bound: every |c_jk| >= sigma");
  cmd->add_option("--sigma-plus", flags.sigma_plus,
                  "p-restricted bound: every c_jk >= sigma (positive factors)");
  cmd->add_option("--sigma-list", flags.sigma_list,
                  "ascending order-statistic bounds on the sorted |c| per pulse")
      ->delimiter(',');
  cmd->add_option("--sigma-ab", flags.sigma_ab, "bound only the gate's target qubits");
  cmd->add_option("--sigma-qubit", flags.sigma_qubit,
                  "per-qubit bound QUBIT VALUE (repeatable)");
  cmd->add_flag("--independent", flags.independent,
                "restrict every pulse to a single qubit (one-hot baseline)");
  cmd->add_option("--area-cap-pi", flags.area_cap_pi, "total-area cap in units of pi");
  cmd->add_option("--area-range-pi", flags.area_range_pi,
                  "per-pulse area range LO HI in units of pi")
      ->expected(2);
}

void add_run_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--pulses", cfg.n_pulses, "pulses in the sequence")->check(CLI::Range(1, 16));
  cmd->add_option("--restarts", cfg.restarts, "independent restarts");
  cmd->add_option("--seed", cfg.master_seed, "master seed");
  cmd->add_option("--workers", cfg.workers, "worker threads (default: RYDOPT_WORKERS or all)");
  cmd->add_option("--max-iter", cfg.max_iter, "simplex iteration cap");
  cmd->add_option("--tol-f", cfg.tol_f, "simplex value-spread tolerance");
  cmd->add_option("--tol-x", cfg.tol_x, "simplex size tolerance");
  cmd->add_option("--penalty-weight", cfg.penalty_weight, "constraint penalty weight");
}

void finalize_gate(ExperimentConfig& cfg, const std::string& gate_name) {
  if (gate_name == "pab") cfg.targets = {1, 2};
  if (gate_name == "pabc") cfg.targets = {1, 2, 3};
}

RestartPlan make_plan(const ExperimentConfig& cfg) {
  RestartPlan plan;
  plan.gate = cfg.gate();
  plan.n_pulses = cfg.n_pulses;
  plan.constraints = cfg.constraints;
  plan.n_restarts = cfg.restarts;
  plan.master_seed = cfg.master_seed;
  plan.workers = resolve_workers(cfg.workers);
  plan.options = cfg.optimizer_options();
  return plan;
}

int run_optimize(ExperimentConfig cfg, const std::string& out_path) {
  cfg.command = "optimize";
  cfg.constraints.assert_feasible(cfg.n_qubits, cfg.n_pulses);
  const BatchOutcome outcome = run_restarts(make_plan(cfg));
  if (!out_path.empty()) write_results_jsonl(out_path, cfg, outcome.results);

  const OptimizationResult* best = nullptr;
  long feasible = 0;
  for (const auto& r : outcome.results) {
    if (!r.feasible) continue;
    ++feasible;
    if (!best || r.infidelity < best->infidelity) best = &r;
  }
  Json summary;
  summary["restarts"] = cfg.restarts;
  summary["feasible"] = feasible;
  if (best) {
    summary["best_epsilon"] = best->infidelity;
    summary["best_area_pi"] = best->protocol.total_area_pi();
    summary["best_protocol"] = protocol_to_json(best->protocol);
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int run_sweep(ExperimentConfig cfg, const std::string& out_path,
              const std::string& results_out) {
  cfg.command = "sweep";
  cfg.constraints.assert_feasible(cfg.n_qubits, cfg.n_pulses);
  std::vector<OptimizationResult> results;
  const SuccessCurve curve = success_rate_sweep(
      make_plan(cfg), cfg.epsilon_grid, results_out.empty() ? nullptr : &results);
  if (!out_path.empty()) write_success_curve_csv(out_path, cfg, curve);
  if (!results_out.empty()) write_results_jsonl(results_out, cfg, results);

  Json summary;
  summary["epsilon"] = curve.epsilon_grid;
  summary["rate"] = curve.rate;
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int run_minarea(ExperimentConfig cfg, const std::string& out_path) {
  cfg.command = "minarea";
  cfg.constraints.assert_feasible(cfg.n_qubits, cfg.n_pulses);
  MinAreaOptions options;
  options.probe_budget = cfg.probe_budget;
  options.resolution = cfg.resolution_pi * kPi;
  options.cap_hi = cfg.cap_hi_pi * kPi;
  options.workers = resolve_workers(cfg.workers);
  options.options = cfg.optimizer_options();
  const auto frontier = minimal_area_search(cfg.gate(), cfg.n_pulses, cfg.constraints,
                                            cfg.fidelity_targets, cfg.master_seed, options);
  if (!out_path.empty()) write_frontier_csv(out_path, cfg, frontier);

  Json summary = Json::array();
  for (const auto& r : frontier) {
    Json row;
    row["fidelity_target"] = r.fidelity_target;
    row["min_area_pi"] = r.found ? Json(r.min_area / kPi) : Json("inf");
    row["probes"] = r.probes;
    row["restarts_used"] = r.restarts_used;
    if (r.found) row["witness"] = protocol_to_json(r.witness);
    summary.push_back(std::move(row));
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int run_usage(const ExperimentConfig& flags, const std::string& in_path,
              const std::string& out_path) {
  const ResultsFile file = read_results_jsonl(in_path);
  ExperimentConfig cfg = file.config;
  cfg.command = "usage";
  cfg.threshold = flags.threshold;
  const UsageStats stats = qubit_usage_stats(file.results, cfg.gate(), cfg.threshold);
  if (!out_path.empty()) write_usage_csv(out_path, cfg, stats);

  Json summary;
  summary["samples"] = stats.sample_count;
  summary["threshold"] = stats.threshold;
  summary["mean_d"] = stats.mean_d;
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int run_census(const ExperimentConfig& flags, const std::string& in_path,
               const std::string& out_path) {
  const ResultsFile file = read_results_jsonl(in_path);
  ExperimentConfig cfg = file.config;
  cfg.command = "census";
  cfg.threshold = flags.threshold;
  cfg.dominant_fraction = flags.dominant_fraction;
  const MechanismCensus census =
      mechanism_census(file.results, cfg.gate(), cfg.threshold, cfg.dominant_fraction);
  if (!out_path.empty()) write_census_csv(out_path, cfg, census);

  Json summary;
  summary["samples"] = census.sample_count;
  summary["distinct_tuples"] = census.entries.size();
  Json dominant = Json::array();
  for (const auto& e : census.dominant) {
    Json row;
    row["omega_tuple"] = omega_tuple_key(e.omega_tuple);
    row["count"] = e.count;
    dominant.push_back(std::move(row));
  }
  summary["dominant"] = std::move(dominant);
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int run_mechanism(ExperimentConfig cfg, const std::string& protocol_path,
                  const std::string& out_path) {
  cfg.command = "mechanism";
  const Protocol protocol = protocol_from_json(load_json_file(protocol_path));
  cfg.n_qubits = protocol.n_qubits;
  const MechanismRecord record = mechanism_signature(protocol, cfg.gate());
  Json j = mechanism_record_to_json(record);
  j["fidelity"] = gate_fidelity(protocol, cfg.gate());
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << j.dump(2) << "\n";
  }
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-sequence simulator and constrained optimizer for "
               "blockade-based entangling gates"};
  app.require_subcommand(1);

  struct SubcommandState {
    ExperimentConfig cfg;
    ConstraintFlags constraints;
    std::string gate_name;
    std::string out, results_out, in, protocol_path, config_path;
  };
  std::map<std::string, SubcommandState> state;

  auto add_config_option = [&](CLI::App* cmd, SubcommandState& s) {
    cmd->add_option("--config", s.config_path,
                    "JSON config file (flags given on the command line win)");
  };

  auto* optimize = app.add_subcommand("optimize", "batch of seeded restarts");
  auto* sweep = app.add_subcommand("sweep", "success-rate curve over an epsilon grid");
  auto* minarea = app.add_subcommand("minarea", "minimal total area per fidelity target");
  auto* usage = app.add_subcommand("usage", "per-qubit relative-use averages from results");
  auto* census = app.add_subcommand("census", "mechanism tuple histogram from results");
  auto* mechanism = app.add_subcommand("mechanism", "pathway report for one protocol");

  for (auto* cmd : {optimize, sweep, minarea}) {
    SubcommandState& s = state[cmd->get_name()];
    add_gate_options(cmd, s.cfg, s.gate_name);
    add_constraint_options(cmd, s.constraints);
    add_run_options(cmd, s.cfg);
    add_config_option(cmd, s);
    cmd->add_option("--out", s.out, "output artifact path");
  }
  state["optimize"].out = "results.jsonl";
  optimize->get_option("--out")->default_str("results.jsonl");
  sweep->add_option("--epsilon-grid", state["sweep"].cfg.epsilon_grid,
                    "thresholds for the rate curve")
      ->delimiter(',');
  sweep->add_option("--results-out", state["sweep"].results_out,
                    "also persist every restart as JSONL");
  minarea->add_option("--fidelity-targets", state["minarea"].cfg.fidelity_targets,
                      "fidelity targets for the frontier")
      ->delimiter(',');
  minarea->add_option("--probe-budget", state["minarea"].cfg.probe_budget,
                      "restarts per cap probe");
  minarea->add_option("--resolution-pi", state["minarea"].cfg.resolution_pi,
                      "bisection resolution in units of pi");
  minarea->add_option("--cap-hi-pi", state["minarea"].cfg.cap_hi_pi,
                      "starting (loosest) cap in units of pi");

  for (auto* cmd : {usage, census}) {
    SubcommandState& s = state[cmd->get_name()];
    cmd->add_option("--in", s.in, "results JSONL from a previous run")->required();
    cmd->add_option("--threshold", s.cfg.threshold, "fidelity filter");
    cmd->add_option("--out", s.out, "output CSV path");
  }
  census->add_option("--dominant-fraction", state["census"].cfg.dominant_fraction,
                     "dominance cut as a fraction of the mode");

  {
    SubcommandState& s = state["mechanism"];
    add_gate_options(mechanism, s.cfg, s.gate_name);
    mechanism->add_option("--protocol", s.protocol_path, "protocol JSON file")->required();
    mechanism->add_option("--out", s.out, "also write the report here");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    SubcommandState& s = state[cmd->get_name()];
    if (!s.config_path.empty()) {
      // Config file first, explicit flags override.
      ExperimentConfig from_file = config_from_json(load_json_file(s.config_path));
      SubcommandState overrides = s;
      std::swap(s.cfg, from_file);
      auto keep_if_set = [&](const std::string& flag, auto member) {
        if (cmd->count(flag)) s.cfg.*member = overrides.cfg.*member;
      };
      keep_if_set("--qubits", &ExperimentConfig::n_qubits);
      keep_if_set("--target-qubits", &ExperimentConfig::targets);
      keep_if_set("--pulses", &ExperimentConfig::n_pulses);
      keep_if_set("--restarts", &ExperimentConfig::restarts);
      keep_if_set("--seed", &ExperimentConfig::master_seed);
      keep_if_set("--workers", &ExperimentConfig::workers);
      keep_if_set("--max-iter", &ExperimentConfig::max_iter);
      if (cmd->get_name() == "sweep" && cmd->count("--epsilon-grid"))
        s.cfg.epsilon_grid = overrides.cfg.epsilon_grid;
      if (cmd->get_name() == "minarea") {
        keep_if_set("--fidelity-targets", &ExperimentConfig::fidelity_targets);
        keep_if_set("--probe-budget", &ExperimentConfig::probe_budget);
        keep_if_set("--resolution-pi", &ExperimentConfig::resolution_pi);
        keep_if_set("--cap-hi-pi", &ExperimentConfig::cap_hi_pi);
      }
    }
    finalize_gate(s.cfg, s.gate_name);
    s.constraints.apply(s.cfg);
    if (cmd == optimize) return run_optimize(s.cfg, s.out);
    if (cmd == sweep) return run_sweep(s.cfg, s.out, s.results_out);
    if (cmd == minarea) return run_minarea(s.cfg, s.out);
    if (cmd == usage) return run_usage(s.cfg, s.in, s.out);
    if (cmd == census) return run_census(s.cfg, s.in, s.out);
    if (cmd == mechanism) return run_mechanism(s.cfg, s.protocol_path, s.out);
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleConstraints& e) {
    std::cerr << "infeasible constraints: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const MissingInput& e) {
    std::cerr << "missing input: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const EmptySample& e) {
    std::cerr << "empty sample: " << e.what() << "\n";
    return kExitEmptySample;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
