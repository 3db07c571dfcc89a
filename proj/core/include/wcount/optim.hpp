#pragma once

#include <functional>
#include <span>
#include <vector>

namespace wcount {

struct NelderMeadOptions {
  double f_tol = 1e-9;     // simplex function-value spread
  double x_tol = 1e-7;     // simplex edge length
  int max_iter = 4000;
  double init_step = 0.25; // initial simplex displacement per coordinate
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evals = 0;
  bool converged = false;
};

// Derivative-free simplex minimizer (reflection/expansion/contraction/shrink
// with standard coefficients). Deterministic: the result depends only on x0
// and the objective. The objective may return +inf to reject a point.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, const NelderMeadOptions& opts = {});

}  // namespace wcount
