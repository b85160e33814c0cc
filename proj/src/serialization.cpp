#include "rydopt/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace rydopt {

namespace {

void reject_unknown_keys(const Json& j, const std::set<std::string>& known,
                         const std::string& what) {
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw std::invalid_argument(what + ": unknown key \"" + item.key() + "\"");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

Json protocol_to_json(const Protocol& protocol) {
  Json j;
  j["n_qubits"] = protocol.n_qubits;
  Json areas = Json::array();
  for (double a : protocol.areas) areas.push_back(a / kPi);
  j["areas_pi"] = std::move(areas);
  j["vectors"] = protocol.vectors;
  return j;
}

Protocol protocol_from_json(const Json& j, bool* warned) {
  reject_unknown_keys(j, {"n_qubits", "areas_pi", "vectors"}, "protocol");
  Protocol p;
  p.n_qubits = j.at("n_qubits").get<int>();
  for (const auto& a : j.at("areas_pi")) p.areas.push_back(a.get<double>() * kPi);
  p.vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
  if (p.vectors.size() != p.areas.size())
    throw std::invalid_argument("protocol: one vector per pulse required");
  bool drifted = false;
  for (auto& vec : p.vectors) {
    if (static_cast<int>(vec.size()) != p.n_qubits)
      throw std::invalid_argument("protocol: vector length must equal n_qubits");
    double norm2 = 0.0;
    for (double c : vec) norm2 += c * c;
    if (norm2 <= 0.0)
      throw std::invalid_argument("protocol: zero structural vector");
    const double norm = std::sqrt(norm2);
    if (std::abs(norm - 1.0) > 1e-9) drifted = true;
    for (double& c : vec) c /= norm;
  }
  if (drifted) {
    if (warned)
      *warned = true;
    else
      std::fprintf(stderr,
                   "warning: structural vectors renormalized on load (drift > 1e-9)\n");
  } else if (warned) {
    *warned = false;
  }
  return p;
}

Json constraints_to_json(const ConstraintSet& cs) {
  Json j;
  j["sigma_order"] = cs.sigma_order;
  j["positivity"] = cs.positivity;
  Json targeted = Json::object();
  for (const auto& [q, bound] : cs.targeted) targeted[std::to_string(q)] = bound;
  j["targeted"] = std::move(targeted);
  j["area_cap_pi"] = cs.area_cap ? Json(*cs.area_cap / kPi) : Json(nullptr);
  j["area_range_pi"] = {cs.area_range[0] / kPi, cs.area_range[1] / kPi};
  j["independent"] = cs.independent;
  return j;
}

ConstraintSet constraints_from_json(const Json& j) {
  reject_unknown_keys(
      j, {"sigma_order", "positivity", "targeted", "area_cap_pi", "area_range_pi", "independent"},
      "constraints");
  ConstraintSet cs;
  if (j.contains("sigma_order")) cs.sigma_order = j.at("sigma_order").get<std::vector<double>>();
  if (j.contains("positivity")) cs.positivity = j.at("positivity").get<bool>();
  if (j.contains("targeted"))
    for (const auto& item : j.at("targeted").items())
      cs.targeted[std::stoi(item.key())] = item.value().get<double>();
  if (j.contains("area_cap_pi") && !j.at("area_cap_pi").is_null())
    cs.area_cap = j.at("area_cap_pi").get<double>() * kPi;
  if (j.contains("area_range_pi")) {
    const auto range = j.at("area_range_pi").get<std::vector<double>>();
    if (range.size() != 2) throw std::invalid_argument("area_range_pi needs two entries");
    cs.area_range = {range[0] * kPi, range[1] * kPi};
  }
  if (j.contains("independent")) cs.independent = j.at("independent").get<bool>();
  return cs;
}

Json result_to_json(const OptimizationResult& result) {
  Json j;
  j["seed"] = result.restart_seed;
  j["infidelity"] = result.infidelity;
  j["fidelity"] = 1.0 - result.infidelity;
  j["feasible"] = result.feasible;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  j["area_total_pi"] = result.protocol.total_area_pi();
  j["protocol"] = protocol_to_json(result.protocol);
  return j;
}

OptimizationResult result_from_json(const Json& j) {
  reject_unknown_keys(j,
                      {"seed", "infidelity", "fidelity", "feasible", "converged", "iterations",
                       "area_total_pi", "protocol"},
                      "result");
  OptimizationResult r;
  r.restart_seed = j.at("seed").get<std::uint64_t>();
  r.infidelity = j.at("infidelity").get<double>();
  r.feasible = j.at("feasible").get<bool>();
  r.converged = j.at("converged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.protocol = protocol_from_json(j.at("protocol"));
  return r;
}

Json mechanism_record_to_json(const MechanismRecord& record) {
  Json u = Json::object();
  Json xy = Json::object();
  Json omega = Json::object();
  for (const auto& e : record.entries) {
    const std::string key = e.subsystem.ground_string();
    u[key] = {{"u0", e.loops.u0},
              {"u1", e.loops.u1},
              {"ud", e.loops.ud},
              {"u2", e.loops.u2},
              {"u_extra", e.loops.u_extra},
              {"target_sign", e.target_sign}};
    xy[key] = {e.x, e.y};
    omega[key] = e.omega;
  }
  Json groups = Json::object();
  for (size_t n = 0; n < record.omega_groups.size(); ++n)
    groups[std::to_string(n + 1)] = record.omega_groups[n];
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["u"] = std::move(u);
  j["xy"] = std::move(xy);
  j["omega"] = std::move(omega);
  j["omega_groups"] = std::move(groups);
  j["omega_group_sums"] = record.omega_group_sums;
  return j;
}

GateSpec ExperimentConfig::gate() const { return GateSpec::cz(n_qubits, targets); }

OptimizerOptions ExperimentConfig::optimizer_options() const {
  OptimizerOptions opt;
  opt.simplex.max_iter = max_iter;
  opt.simplex.tol_f = tol_f;
  opt.simplex.tol_x = tol_x;
  opt.penalty_weight = penalty_weight;
  return opt;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = c.command;
  j["n_qubits"] = c.n_qubits;
  j["targets"] = c.targets;
  j["n_pulses"] = c.n_pulses;
  j["constraints"] = constraints_to_json(c.constraints);
  j["restarts"] = c.restarts;
  j["master_seed"] = c.master_seed;
  j["epsilon_grid"] = c.epsilon_grid;
  j["fidelity_targets"] = c.fidelity_targets;
  j["probe_budget"] = c.probe_budget;
  j["resolution_pi"] = c.resolution_pi;
  j["cap_hi_pi"] = c.cap_hi_pi;
  j["threshold"] = c.threshold;
  j["dominant_fraction"] = c.dominant_fraction;
  j["workers"] = c.workers;
  j["max_iter"] = c.max_iter;
  j["tol_f"] = c.tol_f;
  j["tol_x"] = c.tol_x;
  j["penalty_weight"] = c.penalty_weight;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  reject_unknown_keys(j,
                      {"schema_version", "command", "n_qubits", "targets", "n_pulses",
                       "constraints", "restarts", "master_seed", "epsilon_grid",
                       "fidelity_targets", "probe_budget", "resolution_pi", "cap_hi_pi",
                       "threshold", "dominant_fraction", "workers", "max_iter", "tol_f",
                       "tol_x", "penalty_weight"},
                      "config");
  ExperimentConfig c;
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
    throw std::invalid_argument("config: unsupported schema_version");
  if (j.contains("command")) c.command = j.at("command").get<std::string>();
  if (j.contains("n_qubits")) c.n_qubits = j.at("n_qubits").get<int>();
  if (j.contains("targets")) c.targets = j.at("targets").get<std::vector<int>>();
  if (j.contains("n_pulses")) c.n_pulses = j.at("n_pulses").get<int>();
  if (j.contains("constraints")) c.constraints = constraints_from_json(j.at("constraints"));
  if (j.contains("restarts")) c.restarts = j.at("restarts").get<int>();
  if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("epsilon_grid")) c.epsilon_grid = j.at("epsilon_grid").get<std::vector<double>>();
  if (j.contains("fidelity_targets"))
    c.fidelity_targets = j.at("fidelity_targets").get<std::vector<double>>();
  if (j.contains("probe_budget")) c.probe_budget = j.at("probe_budget").get<int>();
  if (j.contains("resolution_pi")) c.resolution_pi = j.at("resolution_pi").get<double>();
  if (j.contains("cap_hi_pi")) c.cap_hi_pi = j.at("cap_hi_pi").get<double>();
  if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
  if (j.contains("dominant_fraction"))
    c.dominant_fraction = j.at("dominant_fraction").get<double>();
  if (j.contains("workers")) c.workers = j.at("workers").get<int>();
  if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
  if (j.contains("tol_f")) c.tol_f = j.at("tol_f").get<double>();
  if (j.contains("tol_x")) c.tol_x = j.at("tol_x").get<double>();
  if (j.contains("penalty_weight")) c.penalty_weight = j.at("penalty_weight").get<double>();
  return c;
}

void write_results_jsonl(const std::string& path, const ExperimentConfig& config,
                         const std::vector<OptimizationResult>& results) {
  std::ofstream out = open_out(path);
  Json header;
  header["schema_version"] = kSchemaVersion;
  header["config"] = config_to_json(config);
  out << header.dump() << '\n';
  for (const auto& r : results) out << result_to_json(r).dump() << '\n';
}

ResultsFile read_results_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open input file: " + path);
  ResultsFile file;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line);
    if (j.contains("config")) {
      file.config = config_from_json(j.at("config"));
      have_header = true;
      continue;
    }
    file.results.push_back(result_from_json(j));
  }
  if (!have_header && file.results.empty())
    throw std::runtime_error("results file is empty: " + path);
  return file;
}

namespace {

void write_provenance(std::ofstream& out, const ExperimentConfig& config) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_to_json(config);
  out << "# " << j.dump() << '\n';
}

}  // namespace

void write_success_curve_csv(const std::string& path, const ExperimentConfig& config,
                             const SuccessCurve& curve) {
  std::ofstream out = open_out(path);
  write_provenance(out, config);
  out << "epsilon,rate\n";
  for (size_t i = 0; i < curve.epsilon_grid.size(); ++i) {
    out << Json(curve.epsilon_grid[i]).dump() << ',' << Json(curve.rate[i]).dump() << '\n';
  }
}

void write_frontier_csv(const std::string& path, const ExperimentConfig& config,
                        const std::vector<MinAreaResult>& frontier) {
  std::ofstream out = open_out(path);
  write_provenance(out, config);
  out << "fidelity_target,min_area_pi\n";
  for (const auto& r : frontier) {
    out << Json(r.fidelity_target).dump() << ',';
    if (r.found)
      out << Json(r.min_area / kPi).dump() << '\n';
    else
      out << "inf\n";
  }
}

void write_usage_csv(const std::string& path, const ExperimentConfig& config,
                     const UsageStats& stats) {
  std::ofstream out = open_out(path);
  write_provenance(out, config);
  out << "qubit,mean_d\n";
  for (size_t q = 0; q < stats.mean_d.size(); ++q) {
    const char label = static_cast<char>('a' + q);
    out << label << ',' << Json(stats.mean_d[q]).dump() << '\n';
  }
}

std::string omega_tuple_key(const std::vector<int>& tuple) {
  std::string key;
  for (size_t i = 0; i < tuple.size(); ++i) {
    if (i) key += '-';
    key += std::to_string(tuple[i]);
  }
  return key;
}

void write_census_csv(const std::string& path, const ExperimentConfig& config,
                      const MechanismCensus& census) {
  std::ofstream out = open_out(path);
  write_provenance(out, config);
  out << "omega_tuple,count\n";
  for (const auto& e : census.entries)
    out << omega_tuple_key(e.omega_tuple) << ',' << e.count << '\n';
}

}  // namespace rydopt
