#include "rydopt/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rydopt {

namespace {

double checked_eval(const Objective& objective, const std::vector<double>& x) {
  const double v = objective(x);
  if (!std::isfinite(v))
    throw std::runtime_error("nelder_mead: objective returned a non-finite value (" +
                             std::to_string(v) + ")");
  return v;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start,
                             const std::vector<double>& step,
                             const NelderMeadOptions& options) {
  const size_t dim = start.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead: empty start point");
  if (step.size() != dim) throw std::invalid_argument("nelder_mead: step size mismatch");

  NelderMeadOptions opts = options;
  if (opts.adaptive && dim >= 2) {
    const double n = static_cast<double>(dim);
    opts.expand = 1.0 + 2.0 / n;
    opts.contract = 0.75 - 0.5 / n;
    opts.shrink = 1.0 - 1.0 / n;
  }

  std::vector<std::vector<double>> simplex;
  simplex.reserve(dim + 1);
  simplex.push_back(start);
  for (size_t i = 0; i < dim; ++i) {
    std::vector<double> v = start;
    v[i] += step[i] != 0.0 ? step[i] : 1e-4;
    simplex.push_back(std::move(v));
  }
  std::vector<double> values(dim + 1);
  for (size_t i = 0; i <= dim; ++i) values[i] = checked_eval(objective, simplex[i]);

  std::vector<size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);

  NelderMeadResult result;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });
    const size_t best = order.front();
    const size_t worst = order.back();
    const size_t second_worst = order[dim - 1];

    if (values[worst] - values[best] <= opts.tol_f) {
      result.converged = true;
      break;
    }
    double spread = 0.0;
    for (size_t i = 0; i <= dim; ++i) {
      double d = 0.0;
      for (size_t j = 0; j < dim; ++j)
        d = std::max(d, std::abs(simplex[i][j] - simplex[best][j]));
      spread = std::max(spread, d);
    }
    if (spread <= opts.tol_x) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    for (size_t j = 0; j < dim; ++j)
      trial[j] = centroid[j] + opts.reflect * (centroid[j] - simplex[worst][j]);
    const double f_reflect = checked_eval(objective, trial);

    if (f_reflect < values[best]) {
      for (size_t j = 0; j < dim; ++j)
        trial2[j] = centroid[j] + opts.expand * (trial[j] - centroid[j]);
      const double f_expand = checked_eval(objective, trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }

    if (f_reflect < values[worst]) {
      for (size_t j = 0; j < dim; ++j)
        trial2[j] = centroid[j] + opts.contract * (trial[j] - centroid[j]);
      const double f_contract = checked_eval(objective, trial2);
      if (f_contract <= f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_contract;
        continue;
      }
    } else {
      for (size_t j = 0; j < dim; ++j)
        trial2[j] = centroid[j] - opts.contract * (centroid[j] - simplex[worst][j]);
      const double f_contract = checked_eval(objective, trial2);
      if (f_contract < values[worst]) {
        simplex[worst] = trial2;
        values[worst] = f_contract;
        continue;
      }
    }

    for (size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (size_t j = 0; j < dim; ++j)
        simplex[i][j] = simplex[best][j] + opts.shrink * (simplex[i][j] - simplex[best][j]);
      values[i] = checked_eval(objective, simplex[i]);
    }
  }

  size_t best = 0;
  for (size_t i = 1; i <= dim; ++i)
    if (values[i] < values[best]) best = i;
  result.point = simplex[best];
  result.value = values[best];
  result.iterations = iter;
  return result;
}

}  // namespace rydopt
