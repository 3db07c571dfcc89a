#pragma once

#include <span>
#include <string>
#include <vector>

#include "wcount/count_models.hpp"

namespace wcount {

// Covariate layer configuration. Order is fixed and shared between fitting
// and reporting. No implicit intercept column: lambda plays that role, so a
// user-supplied constant column would be collinear with it.
struct RegressionSpec {
  std::vector<std::string> covariate_names;
  bool center_covariates = false;
};

struct Observation {
  int count = 0;
  std::vector<double> covariates;
  double exposure_t = 1.0;
  double weight = 1.0;  // resampling weight, used by the bootstrap
};

// x'β; throws std::invalid_argument on dimension mismatch.
double linear_predictor(std::span<const double> x, std::span<const double> beta);
double linear_predictor(const Observation& obs, std::span<const double> beta);
// Centered variant: (x - center)'β.
double linear_predictor(const Observation& obs, std::span<const double> beta,
                        std::span<const double> center);

// Proportional-hazards pmfs: term j of the count series picks up the factor
// (e^{x'β})^j, equivalent to scaling the rate λ by e^{x'β}.
SeriesEval weibull_regression_pmf(const WeibullCountParams& params,
                                  std::span<const double> beta,
                                  const Observation& obs, double tol = 1e-12);

SeriesEval weibull_gamma_regression_pmf(const GammaMixParams& params,
                                        std::span<const double> beta,
                                        const Observation& obs,
                                        double tol = 1e-12);

}  // namespace wcount
