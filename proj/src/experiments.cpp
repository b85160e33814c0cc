#include "rydopt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "rydopt/rng.hpp"

namespace rydopt {

namespace {

int resolve_workers(int requested, long n_tasks) {
  int w = requested;
  if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  return static_cast<int>(std::min<long>(w, std::max<long>(1, n_tasks)));
}

void atomic_min(std::atomic<long>& target, long value) {
  long cur = target.load(std::memory_order_relaxed);
  while (value < cur &&
         !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
  }
}

}  // namespace

BatchOutcome run_restarts(const RestartPlan& plan) {
  plan.constraints.assert_feasible(plan.gate.n_qubits, plan.n_pulses);
  const long total = plan.n_restarts;
  BatchOutcome out;
  out.results.resize(static_cast<size_t>(total));
  out.completed.assign(static_cast<size_t>(total), 0);

  std::atomic<long> next{0};
  std::atomic<long> stop_bound{total};  // exclusive claim bound
  std::atomic<long> completed{0};

  auto worker = [&]() {
    while (true) {
      const long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= total || i >= stop_bound.load(std::memory_order_relaxed)) break;
      const std::uint64_t seed = derive_seed(plan.master_seed, static_cast<std::uint64_t>(i));
      OptimizationResult res;
      if (i < static_cast<long>(plan.warm_starts.size()))
        res = optimize_from(plan.gate, plan.constraints,
                            plan.warm_starts[static_cast<size_t>(i)], seed, plan.warm_options);
      else
        res = optimize_protocol(plan.gate, plan.n_pulses, plan.constraints, seed, plan.options);
      const bool hit = plan.stop_when && plan.stop_when(res);
      out.results[static_cast<size_t>(i)] = std::move(res);
      out.completed[static_cast<size_t>(i)] = 1;
      completed.fetch_add(1, std::memory_order_relaxed);
      if (hit) atomic_min(stop_bound, i + 1);
    }
  };

  const int n_workers = resolve_workers(plan.workers, total);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  out.n_completed = completed.load();
  if (plan.stop_when) {
    for (long i = 0; i < total; ++i) {
      if (out.completed[static_cast<size_t>(i)] &&
          plan.stop_when(out.results[static_cast<size_t>(i)])) {
        out.first_success = static_cast<int>(i);
        break;
      }
    }
  }
  return out;
}

std::vector<double> default_epsilon_grid() {
  std::vector<double> grid;
  for (int k = 0; k >= -7; --k) grid.push_back(std::pow(10.0, k));
  return grid;
}

SuccessCurve success_rate_sweep(const RestartPlan& plan, const std::vector<double>& epsilon_grid,
                                std::vector<OptimizationResult>* keep_results) {
  RestartPlan batch = plan;
  batch.stop_when = nullptr;  // rates need the full batch
  BatchOutcome outcome = run_restarts(batch);

  SuccessCurve curve;
  curve.epsilon_grid = epsilon_grid;
  curve.gate_name = plan.gate.name();
  curve.n_qubits = plan.gate.n_qubits;
  curve.n_pulses = plan.n_pulses;
  curve.constraints = plan.constraints;
  curve.n_restarts = plan.n_restarts;
  curve.master_seed = plan.master_seed;
  curve.rate.reserve(epsilon_grid.size());
  for (double eps : epsilon_grid) {
    long hits = 0;
    for (const auto& r : outcome.results)
      if (r.feasible && r.infidelity < eps) ++hits;
    curve.rate.push_back(static_cast<double>(hits) / static_cast<double>(plan.n_restarts));
  }
  if (keep_results) *keep_results = std::move(outcome.results);
  return curve;
}

namespace {

// Scale a witness's areas under a tighter cap so the polish run starts feasible.
Protocol rescale_into_cap(Protocol p, double cap) {
  const double total = p.total_area();
  if (total > cap && total > 0.0) {
    const double scale = (cap * (1.0 - 1e-12)) / total;
    for (double& a : p.areas) a *= scale;
  }
  return p;
}

// Deterministic perturbation of a pooled witness; the optimizer projects the
// result back onto the feasible set before polishing.
Protocol jittered(Protocol p, std::uint64_t seed, double area_jitter, double comp_jitter) {
  Rng rng(seed);
  for (double& a : p.areas) a = std::max(0.0, a + rng.uniform(-area_jitter, area_jitter));
  for (auto& vec : p.vectors)
    for (double& c : vec) c += rng.uniform(-comp_jitter, comp_jitter);
  return p;
}

}  // namespace

std::vector<MinAreaResult> minimal_area_search(const GateSpec& gate, int n_pulses,
                                               const ConstraintSet& base_constraints,
                                               const std::vector<double>& fidelity_targets,
                                               std::uint64_t master_seed,
                                               const MinAreaOptions& options) {
  base_constraints.assert_feasible(gate.n_qubits, n_pulses);
  std::vector<MinAreaResult> results;

  std::uint64_t probe_counter = 0;
  // Witnesses accumulate across targets: anything meeting a tighter target
  // is warm-start material for a looser one.
  std::vector<Protocol> pool;
  for (double target : fidelity_targets) {
    if (!(target > 0.0 && target < 1.0))
      throw std::invalid_argument("fidelity targets must lie in (0, 1)");
    const double eps_target = 1.0 - target;

    MinAreaResult res;
    res.fidelity_target = target;

    auto probe = [&](double cap) -> std::pair<bool, Protocol> {
      RestartPlan plan;
      plan.gate = gate;
      plan.n_pulses = n_pulses;
      plan.constraints = base_constraints;
      plan.constraints.area_cap = cap;
      plan.n_restarts = options.probe_budget;
      plan.master_seed = derive_seed(master_seed, ++probe_counter);
      plan.workers = options.workers;
      plan.options = options.options;
      plan.warm_options = options.options;
      plan.warm_options.step_scale = options.warm_step_scale;
      if (!pool.empty()) {
        // Continuation: every pooled witness plus jittered replicas, all
        // rescaled under the probe cap. Fresh samples fill the rest.
        const int n_warm = std::min({options.max_warm_starts, options.probe_budget / 4});
        for (int i = 0; i < n_warm; ++i) {
          Protocol base = pool[static_cast<size_t>(i) % pool.size()];
          if (i >= static_cast<int>(pool.size()))
            base = jittered(base, derive_seed(plan.master_seed, 1000003ull + i),
                            options.warm_area_jitter, options.warm_component_jitter);
          plan.warm_starts.push_back(rescale_into_cap(std::move(base), cap));
        }
      }
      plan.stop_when = [eps_target](const OptimizationResult& r) {
        return r.feasible && r.infidelity <= eps_target;
      };
      BatchOutcome outcome = run_restarts(plan);
      res.probes += 1;
      res.restarts_used += outcome.n_completed;
      if (outcome.first_success < 0) return {false, Protocol{}};
      return {true, outcome.results[static_cast<size_t>(outcome.first_success)].protocol};
    };

    auto remember = [&](const Protocol& w) {
      pool.insert(pool.begin(), w);
      std::stable_sort(pool.begin(), pool.end(), [](const Protocol& a, const Protocol& b) {
        return a.total_area() < b.total_area();
      });
      if (static_cast<int>(pool.size()) > options.max_pool)
        pool.resize(static_cast<size_t>(options.max_pool));
    };

    auto [ok, witness] = probe(options.cap_hi);
    if (!ok) {
      res.found = false;
      res.min_area = std::numeric_limits<double>::infinity();
      results.push_back(std::move(res));
      continue;
    }
    remember(witness);
    double hi = witness.total_area();  // the witness itself succeeds at this cap
    double lo = 0.0;
    Protocol best = witness;

    while (hi - lo > options.resolution) {
      const double mid = 0.5 * (lo + hi);
      auto [mid_ok, mid_witness] = probe(mid);
      if (mid_ok) {
        remember(mid_witness);
        hi = std::min(hi, mid_witness.total_area());
        best = mid_witness;
        if (hi <= lo) lo = std::max(0.0, hi - options.resolution);
      } else {
        lo = mid;
      }
    }

    // Re-verify the witness under the returned cap before reporting.
    ConstraintSet final_cs = base_constraints;
    final_cs.area_cap = hi * (1.0 + 1e-12);
    const double fid = gate_fidelity(best, gate);
    res.found = final_cs.check(best, 1e-9) && fid >= target - 1e-12;
    res.min_area = hi;
    res.witness = best;
    results.push_back(std::move(res));
  }
  return results;
}

namespace {

std::vector<const OptimizationResult*> filter_optimal(
    const std::vector<OptimizationResult>& results, double threshold) {
  std::vector<const OptimizationResult*> kept;
  for (const auto& r : results)
    if (r.feasible && 1.0 - r.infidelity > threshold) kept.push_back(&r);
  return kept;
}

}  // namespace

UsageStats qubit_usage_stats(const std::vector<OptimizationResult>& results,
                             const GateSpec& gate, double threshold) {
  const auto kept = filter_optimal(results, threshold);
  if (kept.empty())
    throw EmptySample("no feasible protocol above fidelity " + std::to_string(threshold));
  UsageStats stats;
  stats.threshold = threshold;
  stats.sample_count = static_cast<int>(kept.size());
  stats.mean_d.assign(static_cast<size_t>(gate.n_qubits), 0.0);
  for (const OptimizationResult* r : kept) {
    const Protocol& p = r->protocol;
    const double inv_np = 1.0 / static_cast<double>(p.n_pulses());
    for (int q = 0; q < gate.n_qubits; ++q) {
      double mean_sq = 0.0;
      for (const auto& vec : p.vectors) {
        const double c = vec[static_cast<size_t>(q)];
        mean_sq += c * c;
      }
      mean_sq *= inv_np;
      stats.mean_d[static_cast<size_t>(q)] += gate.n_qubits * mean_sq - 1.0;
    }
  }
  for (double& d : stats.mean_d) d /= static_cast<double>(kept.size());
  return stats;
}

MechanismCensus mechanism_census(const std::vector<OptimizationResult>& results,
                                 const GateSpec& gate, double threshold,
                                 double dominant_fraction) {
  const auto kept = filter_optimal(results, threshold);
  if (kept.empty())
    throw EmptySample("no feasible protocol above fidelity " + std::to_string(threshold));

  std::map<std::vector<int>, long> counts;
  for (const OptimizationResult* r : kept)
    ++counts[mechanism_signature(r->protocol, gate).omega_tuple()];

  MechanismCensus census;
  census.sample_count = static_cast<int>(kept.size());
  census.threshold = threshold;
  census.dominant_fraction = dominant_fraction;
  for (const auto& [tuple, count] : counts) census.entries.push_back({tuple, count});
  std::stable_sort(census.entries.begin(), census.entries.end(),
                   [](const CensusEntry& a, const CensusEntry& b) {
                     if (a.count != b.count) return a.count > b.count;
                     return a.omega_tuple < b.omega_tuple;
                   });
  const double mode = static_cast<double>(census.entries.front().count);
  for (const auto& e : census.entries)
    if (static_cast<double>(e.count) + 1e-9 >= dominant_fraction * mode)
      census.dominant.push_back(e);
  return census;
}

}  // namespace rydopt
