#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "wcount/dataset.hpp"
#include "wcount/model_spec.hpp"

namespace wcount {

// Natural-scale parameter point for any model in the lattice. Only the
// fields the ModelSpec uses are read.
struct ParamVector {
  double lambda = std::nan("");
  double c = std::nan("");
  double r = std::nan("");
  double alpha = std::nan("");
  std::vector<double> beta;
};

struct SeriesDiagnostics {
  double max_cancellation_ratio = 1.0;
  int max_terms_used = 0;
  long pmf_floor_hits = 0;      // contributions clipped at ln(1e-300)
  long quadrature_fallbacks = 0;
  void merge(const SeriesDiagnostics& o) {
    max_cancellation_ratio = std::max(max_cancellation_ratio, o.max_cancellation_ratio);
    max_terms_used = std::max(max_terms_used, o.max_terms_used);
    pmf_floor_hits += o.pmf_floor_hits;
    quadrature_fallbacks += o.quadrature_fallbacks;
  }
};

struct LikelihoodOptions {
  double series_tol = 1e-12;
  // Centering offsets subtracted from covariates (empty: none).
  std::vector<double> center;
};

struct LogLikEval {
  double value = 0.0;
  SeriesDiagnostics diag;
};

// Σ_n w_n · ln pmf(count_n | params, x_n, t_n), dispatching on the model
// lattice. Zero-weight observations are skipped without evaluating their
// pmf. A pmf value <= 1e-300 contributes ln(1e-300) and is counted in
// diag.pmf_floor_hits. Throws EvalError when any required pmf evaluation
// fails to converge.
LogLikEval log_likelihood_eval(const CountDataset& ds, const ModelSpec& spec,
                               const ParamVector& params,
                               const LikelihoodOptions& opts = {});

double log_likelihood(const CountDataset& ds, const ModelSpec& spec,
                      const ParamVector& params, double tol = 1e-12);

}  // namespace wcount
