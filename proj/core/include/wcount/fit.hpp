#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wcount/dataset.hpp"
#include "wcount/likelihood.hpp"
#include "wcount/model_spec.hpp"

namespace wcount {

struct FitOptions {
  double tol = 1e-8;        // optimizer convergence tolerance
  int max_iter = 4000;      // per Nelder-Mead run
  int starts = 3;           // multistart runs (first from canonical values)
  uint64_t seed = 1;        // drives start jitter and the bootstrap
  double series_tol = 1e-10;
  // Freeze parameters by reported name, e.g. {"c", 1.0}.
  std::map<std::string, double> fixed;
  // Additional warm-start points (e.g. nested parents' solutions).
  std::vector<ParamVector> extra_starts;
  bool center_covariates = false;
  int bootstrap = 0;        // replicate count; 0 disables
  int threads = 0;          // bootstrap parallelism; 0 = hardware default
};

struct FitResult {
  ModelSpec model;
  ParamVector params;
  std::map<std::string, double> params_natural;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  int evals = 0;
  // A transformed parameter finished at the ±ln(1e8) cap (heterogeneity
  // degeneracy on underdispersed data drives r, alpha jointly to +inf).
  bool boundary = false;
  std::optional<std::map<std::string, double>> bootstrap_se;
  int bootstrap_dropped = 0;
  std::vector<double> center_means;  // nonempty when centering was applied
  SeriesDiagnostics diagnostics;
};

FitResult fit_mle(const CountDataset& ds, const ModelSpec& spec,
                  const FitOptions& opts = {});

// Weighted-likelihood bootstrap: B multinomial resamples (N trials over the
// N observations, uniform), each refit warm-started from the base estimate;
// returns per-parameter standard deviations on the natural scale.
// Deterministic in (dataset order, seed, B). Replicates that fail to
// converge are dropped and counted; throws EvalError when more than B/2 drop.
std::map<std::string, double> bootstrap_se(const CountDataset& ds,
                                           const ModelSpec& spec, int B,
                                           uint64_t seed,
                                           const FitOptions& opts = {},
                                           int* dropped = nullptr);

struct ModelComparisonRow {
  std::string model;
  int index = 0;
  int n_params = 0;
  double log_likelihood = 0.0;
  bool converged = false;
  // (parent model index, LL - parent LL) for parents present in the input.
  std::vector<std::pair<int, double>> delta_vs_parents;
};

// Nested-model comparison for fits of the same dataset.
std::vector<ModelComparisonRow> likelihood_ratio_report(
    const std::vector<FitResult>& fits);

}  // namespace wcount
