#include "wcount/regression.hpp"

#include <stdexcept>

namespace wcount {

double linear_predictor(std::span<const double> x,
                        std::span<const double> beta) {
  if (x.size() != beta.size())
    throw std::invalid_argument(
        "linear_predictor: covariate/coefficient dimension mismatch");
  double s = 0.0;
  for (size_t k = 0; k < x.size(); ++k) s += x[k] * beta[k];
  return s;
}

double linear_predictor(const Observation& obs, std::span<const double> beta) {
  return linear_predictor(std::span<const double>(obs.covariates), beta);
}

double linear_predictor(const Observation& obs, std::span<const double> beta,
                        std::span<const double> center) {
  if (obs.covariates.size() != beta.size() || center.size() != beta.size())
    throw std::invalid_argument(
        "linear_predictor: covariate/coefficient dimension mismatch");
  double s = 0.0;
  for (size_t k = 0; k < beta.size(); ++k)
    s += (obs.covariates[k] - center[k]) * beta[k];
  return s;
}

SeriesEval weibull_regression_pmf(const WeibullCountParams& params,
                                  std::span<const double> beta,
                                  const Observation& obs, double tol) {
  const double eta = linear_predictor(obs, beta);
  return detail::weibull_series_pmf(params.lambda, params.c, obs.exposure_t,
                                    obs.count, tol, eta);
}

SeriesEval weibull_gamma_regression_pmf(const GammaMixParams& params,
                                        std::span<const double> beta,
                                        const Observation& obs, double tol) {
  const double eta = linear_predictor(obs, beta);
  return detail::weibull_gamma_series_pmf(params.r, params.alpha, params.c,
                                          obs.exposure_t, obs.count, tol, eta);
}

}  // namespace wcount
