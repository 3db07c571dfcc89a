#pragma once

namespace wcount {

enum class EvalMethod { series, quadrature };

// Result of one pmf/moment evaluation, with enough diagnostics to tell a
// trustworthy value from one that exhausted double precision.
struct SeriesEval {
  double value = 0.0;
  int terms_used = 0;
  bool converged = false;
  // Σ|term| / |value|, >= 1; capped at +inf on total cancellation.
  double cancellation_ratio = 1.0;
  // Best-effort absolute error bound (truncation + rounding, or the
  // quadrature error estimate plus tail/noise budget).
  double error_bound = 0.0;
  EvalMethod method = EvalMethod::series;
};

}  // namespace wcount
