#pragma once

#include <functional>
#include <vector>

namespace rydopt {

struct NelderMeadOptions {
  int max_iter = 20000;
  double tol_f = 1e-12;  // stop when the simplex value spread falls below
  double tol_x = 1e-10;  // ... or the largest vertex distance does
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;
  // Gao-Han dimension-adaptive expand/contract/shrink coefficients; the
  // classic values above apply when off.
  bool adaptive = true;
};

struct NelderMeadResult {
  std::vector<double> point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // false only when max_iter was exhausted
};

using Objective = std::function<double(const std::vector<double>&)>;

// Classic derivative-free simplex descent. The initial simplex is the start
// point plus one vertex per coordinate offset by step[i]. Deterministic for
// fixed inputs; throws std::runtime_error if the objective returns a
// non-finite value.
NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start,
                             const std::vector<double>& step,
                             const NelderMeadOptions& options = {});

}  // namespace rydopt
