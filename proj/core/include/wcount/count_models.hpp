#pragma once

#include <functional>

#include "wcount/series.hpp"

namespace wcount {

// Weibull interarrival count model: rate lambda (per unit time^c), shape c.
// The hazard lambda*c*t^(c-1) is increasing for c > 1, constant at c = 1
// (the Poisson case) and decreasing for c < 1.
struct WeibullCountParams {
  double lambda;
  double c;
};

// Gamma(r, alpha) mixing over the Weibull rate; c = 1 nests the NBD.
struct GammaMixParams {
  double r;
  double alpha;
  double c;
};

struct Moments {
  double mean;
  double variance;
};

// P(count = i in (0, t]) via the alternating series
//   C_i(t) = Σ_{j>=i} (-1)^{j+i} (λ t^c)^j α_j^i / Γ(cj+1).
// Truncation: stop after three consecutive terms with |T_j| <= tol·|partial|
// and strictly decreasing magnitude. converged is false when the j ceiling is
// reached or cancellation exceeds 1e12 (λ t^c too large for doubles); such
// values must not be trusted. Values within tol of [0,1] are clamped to the
// boundary; anything further out marks the evaluation non-converged.
SeriesEval weibull_count_pmf(const WeibullCountParams& params, double t, int i,
                             double tol = 1e-12);

// Mean and variance by accumulating pmf cells until the retained mass
// reaches 1 - tol. Throws ConvergenceError if any cell fails, ResourceError
// if the tail does not close within the cell ceiling.
Moments weibull_count_moments(const WeibullCountParams& params, double t,
                              double tol = 1e-12);

// Gamma-mixed model:
//   P(count = i) = Σ_{j>=i} (-1)^{j+i} (t^c)^j α_j^i / Γ(cj+1)
//                  · Γ(r+j) / (Γ(r) α^j).
// The series converges only for t^c < α; outside that region it is evaluated
// by adaptive quadrature of ∫ C_i(t; λ, c) Gamma(λ; r, α) dλ and the result
// is marked method = quadrature with its achieved error bound.
SeriesEval weibull_gamma_pmf(const GammaMixParams& params, double t, int i,
                             double tol = 1e-12);

Moments weibull_gamma_moments(const GammaMixParams& params, double t,
                              double tol = 1e-12);

// Closed forms for the nested exponential-interarrival models, log space.
double poisson_log_pmf(double lambda_t, int i);
double poisson_pmf(double lambda_t, int i);
double nbd_log_pmf(double r, double alpha, double t, int i);
double nbd_pmf(double r, double alpha, double t, int i);

namespace detail {

// Series/quadrature engine shared with the regression layer. log_rate_mult
// adds j·log_rate_mult to term j: the proportional-hazards multiplier
// (e^{x'β})^j enters the series termwise.
SeriesEval weibull_series_pmf(double lambda, double c, double t, int i,
                              double tol, double log_rate_mult);
SeriesEval weibull_gamma_series_pmf(double r, double alpha, double c, double t,
                                    int i, double tol, double log_rate_mult);

Moments moments_by_tail_closure(double tol, int cell_ceiling,
                                const std::function<SeriesEval(int)>& cell);

inline constexpr int kMomentCellCeiling = 1024;
inline constexpr double kMaxCancellation = 1e12;

}  // namespace detail

}  // namespace wcount
