#pragma once

#include <functional>
#include <vector>

namespace driftfit {

struct SimplexOptions {
  int max_evals = 2000;
  double ftol = 1e-9;   // spread of vertex values, relative to 1 + |f_best|
  double xtol = 1e-8;   // simplex extent in every coordinate
  std::vector<double> initial_step;  // per coordinate; default 0.1 everywhere
};

struct SimplexResult {
  std::vector<double> x;
  double fval = 0.0;
  int evals = 0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization of f, with the dimension-adaptive coefficients
/// of Gao and Han. Non-finite values are treated as +infinity.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexOptions& opts = {});

}  // namespace driftfit
