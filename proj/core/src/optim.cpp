#include "wcount/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wcount {

namespace {
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
}  // namespace

NelderMeadResult nelder_mead_minimize(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x0, const NelderMeadOptions& opts) {
  const size_t n = x0.size();
  NelderMeadResult res;
  res.x.assign(x0.begin(), x0.end());

  auto eval = [&](const std::vector<double>& x) {
    ++res.evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  if (n == 0) {
    res.f = eval(res.x);
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> simplex(n + 1, res.x);
  std::vector<double> fv(n + 1);
  for (size_t k = 0; k < n; ++k) simplex[k + 1][k] += opts.init_step;
  for (size_t k = 0; k <= n; ++k) fv[k] = eval(simplex[k]);

  std::vector<size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return fv[a] < fv[b]; });
    const size_t best = order[0], worst = order[n], second = order[n - 1];

    // Convergence: value spread and simplex size both small.
    double edge = 0.0;
    for (size_t k = 0; k <= n; ++k)
      for (size_t d = 0; d < n; ++d)
        edge = std::max(edge, std::fabs(simplex[k][d] - simplex[best][d]));
    const double spread = fv[worst] - fv[best];
    if (std::isfinite(fv[best]) &&
        (spread <= opts.f_tol * (std::fabs(fv[best]) + opts.f_tol) ||
         edge <= opts.x_tol)) {
      res.converged = true;
      break;
    }

    for (size_t d = 0; d < n; ++d) {
      double s = 0.0;
      for (size_t k = 0; k <= n; ++k)
        if (k != worst) s += simplex[k][d];
      centroid[d] = s / static_cast<double>(n);
    }

    for (size_t d = 0; d < n; ++d)
      xr[d] = centroid[d] + kReflect * (centroid[d] - simplex[worst][d]);
    const double fr = eval(xr);

    if (fr < fv[best]) {
      for (size_t d = 0; d < n; ++d)
        xe[d] = centroid[d] + kExpand * (xr[d] - centroid[d]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      if (outside) {
        for (size_t d = 0; d < n; ++d)
          xc[d] = centroid[d] + kContract * (xr[d] - centroid[d]);
      } else {
        for (size_t d = 0; d < n; ++d)
          xc[d] = centroid[d] - kContract * (centroid[d] - simplex[worst][d]);
      }
      const double fc = eval(xc);
      if (fc < std::min(fr, fv[worst])) {
        simplex[worst] = xc;
        fv[worst] = fc;
      } else {
        for (size_t k = 0; k <= n; ++k) {
          if (k == best) continue;
          for (size_t d = 0; d < n; ++d)
            simplex[k][d] =
                simplex[best][d] + kShrink * (simplex[k][d] - simplex[best][d]);
          fv[k] = eval(simplex[k]);
        }
      }
    }
  }

  const size_t best = static_cast<size_t>(
      std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.f = fv[best];
  return res;
}

}  // namespace wcount
