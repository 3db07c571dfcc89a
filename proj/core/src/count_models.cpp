#include "wcount/count_models.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wcount/alpha_table.hpp"
#include "wcount/errors.hpp"
#include "wcount/gamma_fn.hpp"
#include "wcount/signed_log.hpp"

namespace wcount {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Past this log magnitude individual terms overflow; no useful sum survives.
constexpr double kLogTermOverflow = 700.0;
// Honest absolute accuracy floor of the quadrature fallback when the series
// integrand must be evaluated in its cancellation-noise region (c != 1).
constexpr double kQuadAbsFloor = 3e-9;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::domain_error(std::string(name) + " must be positive and finite");
}

void require_count(int i) {
  if (i < 0) throw std::domain_error("count index i must be >= 0");
}

void require_tol(double tol) {
  if (!(tol > 0.0) || tol > 1e-4)
    throw std::domain_error("tol must lie in (0, 1e-4]");
}

struct RawSeries {
  SignedLogValue total;
  double log_abs_sum = -kInf;
  double cancellation = 1.0;
  int terms = 0;
  double last_term_log = -kInf;
  bool rule_satisfied = false;  // three-small-decreasing-terms stop reached
  bool overflowed = false;
};

// Runs the alternating series Σ_{j>=i} (-1)^{j+i} exp(term_log(tab, j)),
// growing the coefficient table geometrically until the truncation rule
// fires or the ceiling is hit. make_term returns a (possibly stateful)
// callable evaluated at strictly ascending j within one pass.
template <typename MakeTerm>
RawSeries run_alternating_series(double c, int i, double tol,
                                 MakeTerm&& make_term) {
  RawSeries out;
  const int first_size = i + 48;
  for (int size = first_size;;) {
    auto tab = alpha_table_for(c, std::min(size, kAlphaTableCeiling));
    if (tab->j_max() < i) break;  // i beyond ceiling: nothing summable

    auto term_log = make_term(*tab);
    SignedLogAccumulator acc;
    int streak = 0;
    double prev_log = kInf;
    out = RawSeries{};
    for (int j = i; j <= tab->j_max(); ++j) {
      const double lt = term_log(j);
      if (lt > kLogTermOverflow) {
        out.overflowed = true;
        break;
      }
      acc.add(SignedLogValue::from_log(((j - i) & 1) ? -1 : +1, lt));
      out.last_term_log = lt;
      const SignedLogValue partial = acc.total();
      const bool small =
          partial.sign != 0 && lt <= std::log(tol) + partial.log_mag;
      if (j > i && small && lt < prev_log) {
        if (++streak >= 3) {
          out.rule_satisfied = true;
          break;
        }
      } else {
        streak = 0;
      }
      // Terms legitimately grow before they decay, but once magnitudes pass
      // e^100 no double-precision cancellation can recover a pmf in [0,1].
      if (j - i >= 8 && lt > 100.0 && lt > prev_log) break;
      prev_log = lt;
    }
    out.total = acc.total();
    out.log_abs_sum = acc.log_abs_sum();
    out.cancellation = acc.cancellation_ratio();
    out.terms = acc.terms();
    if (out.rule_satisfied || out.overflowed) return out;
    if (tab->j_max() >= kAlphaTableCeiling) return out;  // ceiling reached
    size = tab->j_max() * 2;
  }
  return out;
}

SeriesEval finalize_pmf_series(const RawSeries& raw, double tol) {
  SeriesEval ev;
  ev.method = EvalMethod::series;
  ev.terms_used = raw.terms;
  ev.value = raw.total.value();
  ev.cancellation_ratio = raw.cancellation;
  if (raw.overflowed) {
    ev.error_bound = kInf;
    ev.converged = false;
    return ev;
  }
  const double sum_abs =
      std::isfinite(raw.log_abs_sum) ? std::exp(raw.log_abs_sum) : 0.0;
  ev.error_bound = std::exp(raw.last_term_log) + 32.0 * kEps * sum_abs;
  ev.converged = raw.rule_satisfied &&
                 raw.cancellation <= detail::kMaxCancellation;
  if (!ev.converged) {
    if (!raw.rule_satisfied) ev.error_bound = kInf;  // truncated blind
    return ev;
  }
  // Boundary clamp: only roundoff-scale excursions are forgiven.
  if (ev.value < 0.0) {
    if (ev.value >= -tol)
      ev.value = 0.0;
    else
      ev.converged = false;
  } else if (ev.value > 1.0) {
    if (ev.value <= 1.0 + tol)
      ev.value = 1.0;
    else
      ev.converged = false;
  }
  return ev;
}

// ---- Gamma-mixture quadrature fallback ------------------------------------
//
// ∫ C_i(t; λ, c) Gamma(λ; r, α) dλ over (0, U), with U chosen so the Chernoff
// tail bound 2^r e^{-αU/2} is ~1e-20 (C_i <= 1 makes that the tail error).
// For r < 1 the substitution λ = y^{1/r} removes the λ^{r-1} singularity.
// At c == 1 the integrand count pmf is exactly Poisson and is evaluated in
// closed form; otherwise the series is used and its rounding-noise estimate
// is integrated alongside to form an honest error budget.

struct QuadratureResult {
  double value = 0.0;
  double err = kInf;
  double l1 = 0.0;
  int evals = 0;
  bool inner_failed = false;
};

QuadratureResult mixture_quadrature_raw(double r, double alpha_eff, double c,
                                        double t, int i, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  QuadratureResult q;

  const double ln2 = std::log(2.0);
  const double upper = 2.0 * (r * ln2 + 46.0) / alpha_eff;
  const double tail_bound = std::exp(r * ln2 - 0.5 * alpha_eff * upper);
  const double log_gamma_r = log_gamma(r);

  const bool subst = r < 1.0;
  const double y_upper = subst ? std::pow(upper, r) : upper;

  auto lam_of = [&](double y) { return subst ? std::pow(y, 1.0 / r) : y; };
  auto weight = [&](double y, double lam) {
    if (subst)
      return std::exp(r * std::log(alpha_eff) - log_gamma_r - std::log(r) -
                      alpha_eff * lam);
    if (lam <= 0.0) return r == 1.0 ? alpha_eff : 0.0;
    return std::exp(r * std::log(alpha_eff) - log_gamma_r +
                    (r - 1.0) * std::log(lam) - alpha_eff * lam);
  };

  bool inner_failed = false;
  auto inner = [&](double lam) -> SeriesEval {
    SeriesEval e;
    if (c == 1.0) {
      e.value = lam > 0.0 ? std::exp(poisson_log_pmf(lam * t, i)) : (i == 0 ? 1.0 : 0.0);
      e.error_bound = 8.0 * kEps * e.value;
      e.converged = true;
      return e;
    }
    if (lam <= 0.0) {
      e.value = i == 0 ? 1.0 : 0.0;
      e.error_bound = 0.0;
      e.converged = true;
      return e;
    }
    e = detail::weibull_series_pmf(lam, c, t, i, 1e-12, 0.0);
    if (!std::isfinite(e.error_bound)) inner_failed = true;
    return e;
  };

  auto f_value = [&](double y) {
    ++q.evals;
    const double lam = lam_of(y);
    return weight(y, lam) * inner(lam).value;
  };

  double err = 0.0, l1 = 0.0;
  const double quad_tol = std::max(tol, 1e-13);
  double v = gauss_kronrod<double, 15>::integrate(f_value, 0.0, y_upper, 13,
                                                  quad_tol, &err, &l1);
  if (inner_failed) {
    q.inner_failed = true;
    return q;
  }

  double noise_integral = 0.0;
  if (c != 1.0) {
    auto f_noise = [&](double y) {
      const double lam = lam_of(y);
      const double nb = inner(lam).error_bound;
      return weight(y, lam) * (std::isfinite(nb) ? nb : 0.0);
    };
    double nerr = 0.0;
    noise_integral =
        gauss_kronrod<double, 15>::integrate(f_noise, 0.0, y_upper, 6, 0.05, &nerr);
    if (inner_failed) {
      q.inner_failed = true;
      return q;
    }
  }

  q.value = v;
  q.err = err + tail_bound + noise_integral;
  q.l1 = l1;
  return q;
}

SeriesEval mixture_quadrature(double r, double alpha_eff, double c, double t,
                              int i, double tol) {
  SeriesEval ev;
  ev.method = EvalMethod::quadrature;
  QuadratureResult q;
  try {
    q = mixture_quadrature_raw(r, alpha_eff, c, t, i, tol);
  } catch (const std::exception&) {
    q.inner_failed = true;
  }
  ev.terms_used = q.evals;
  if (q.inner_failed) {
    ev.converged = false;
    ev.error_bound = kInf;
    return ev;
  }
  ev.value = q.value;
  ev.error_bound = q.err;
  if (ev.value < 0.0 && ev.value >= -q.err) ev.value = 0.0;
  if (ev.value > 1.0 && ev.value <= 1.0 + q.err) ev.value = 1.0;
  ev.cancellation_ratio =
      ev.value > 0.0 ? std::max(1.0, q.l1 / ev.value) : 1.0;
  ev.converged = ev.value >= 0.0 && ev.value <= 1.0 &&
                 q.err <= std::max(tol * ev.value, kQuadAbsFloor);
  return ev;
}

}  // namespace

namespace detail {

SeriesEval weibull_series_pmf(double lambda, double c, double t, int i,
                              double tol, double log_rate_mult) {
  require_positive(lambda, "lambda");
  require_positive(c, "c");
  require_positive(t, "t");
  require_count(i);
  require_tol(tol);

  const double log_u = std::log(lambda) + c * std::log(t);
  auto make_term = [&](const AlphaTable& tab) {
    return [&tab, log_u, log_rate_mult, i](int j) {
      return j * log_u + j * log_rate_mult + tab.log_entry(i, j) -
             tab.log_gamma_cj1(j);
    };
  };
  return finalize_pmf_series(run_alternating_series(c, i, tol, make_term), tol);
}

SeriesEval weibull_gamma_series_pmf(double r, double alpha, double c, double t,
                                    int i, double tol, double log_rate_mult) {
  require_positive(r, "r");
  require_positive(alpha, "alpha");
  require_positive(c, "c");
  require_positive(t, "t");
  require_count(i);
  require_tol(tol);

  // Term ratio tends to t^c e^{x'β} / α; q >= 0 diverges, q near 0 converges
  // too slowly to beat the ceiling. Route those straight to quadrature.
  const double log_ratio = c * std::log(t) + log_rate_mult - std::log(alpha);
  bool try_series = log_ratio < 0.0;
  if (try_series) {
    const double needed = 1.3 * std::log(tol) / log_ratio + i + std::min(r, 64.0);
    if (needed > kAlphaTableCeiling) try_series = false;
  }

  if (try_series) {
    const double log_tc = c * std::log(t);
    const double log_alpha = std::log(alpha);
    auto make_term = [&](const AlphaTable& tab) {
      return [&tab, r, log_tc, log_alpha, log_rate_mult, i,
              rising = 0.0, next_j = -1](int j) mutable {
        if (next_j != j) {
          rising = log_rising_factorial(r, j);
        } else {
          rising += std::log(r + (j - 1));
        }
        next_j = j + 1;
        return j * log_tc + j * log_rate_mult + rising - j * log_alpha +
               tab.log_entry(i, j) - tab.log_gamma_cj1(j);
      };
    };
    SeriesEval ev =
        finalize_pmf_series(run_alternating_series(c, i, tol, make_term), tol);
    if (ev.converged) return ev;
  }
  // e^{x'β} scales the rate, so mixing λ e^{x'β} over Gamma(r, α) equals
  // mixing λ over Gamma(r, α e^{-x'β}).
  return mixture_quadrature(r, alpha * std::exp(-log_rate_mult), c, t, i, tol);
}

Moments moments_by_tail_closure(double tol, int cell_ceiling,
                                const std::function<SeriesEval(int)>& cell) {
  double mass = 0.0, mass_c = 0.0;
  double mean = 0.0, mean_c = 0.0;
  double m2 = 0.0, m2_c = 0.0;
  auto add = [](double& s, double& comp, double x) {
    const double t = s + x;
    comp += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  };
  for (int i = 0; i < cell_ceiling; ++i) {
    const SeriesEval e = cell(i);
    if (!e.converged)
      throw ConvergenceError("pmf cell " + std::to_string(i) +
                             " failed to converge during moment accumulation");
    add(mass, mass_c, e.value);
    add(mean, mean_c, i * e.value);
    add(m2, m2_c, static_cast<double>(i) * i * e.value);
    if (mass + mass_c >= 1.0 - tol) {
      const double mu = mean + mean_c;
      return {mu, std::max(0.0, (m2 + m2_c) - mu * mu)};
    }
  }
  throw ResourceError("tail mass failed to close within " +
                      std::to_string(cell_ceiling) + " cells");
}

}  // namespace detail

SeriesEval weibull_count_pmf(const WeibullCountParams& params, double t, int i,
                             double tol) {
  return detail::weibull_series_pmf(params.lambda, params.c, t, i, tol, 0.0);
}

Moments weibull_count_moments(const WeibullCountParams& params, double t,
                              double tol) {
  require_tol(tol);
  return detail::moments_by_tail_closure(
      tol, detail::kMomentCellCeiling,
      [&](int i) { return weibull_count_pmf(params, t, i, tol); });
}

SeriesEval weibull_gamma_pmf(const GammaMixParams& params, double t, int i,
                             double tol) {
  return detail::weibull_gamma_series_pmf(params.r, params.alpha, params.c, t,
                                          i, tol, 0.0);
}

Moments weibull_gamma_moments(const GammaMixParams& params, double t,
                              double tol) {
  require_tol(tol);
  return detail::moments_by_tail_closure(
      tol, detail::kMomentCellCeiling,
      [&](int i) { return weibull_gamma_pmf(params, t, i, tol); });
}

double poisson_log_pmf(double lambda_t, int i) {
  require_positive(lambda_t, "lambda_t");
  require_count(i);
  return i * std::log(lambda_t) - lambda_t - log_gamma(i + 1.0);
}

double poisson_pmf(double lambda_t, int i) {
  return std::exp(poisson_log_pmf(lambda_t, i));
}

double nbd_log_pmf(double r, double alpha, double t, int i) {
  require_positive(r, "r");
  require_positive(alpha, "alpha");
  require_positive(t, "t");
  require_count(i);
  return log_rising_factorial(r, i) - log_gamma(i + 1.0) +
         r * (std::log(alpha) - std::log(alpha + t)) +
         i * (std::log(t) - std::log(alpha + t));
}

double nbd_pmf(double r, double alpha, double t, int i) {
  return std::exp(nbd_log_pmf(r, alpha, t, i));
}

}  // namespace wcount
