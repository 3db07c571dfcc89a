#include "wcount/likelihood.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "wcount/count_models.hpp"
#include "wcount/errors.hpp"

namespace wcount {

namespace {

constexpr double kPmfFloor = 1e-300;
const double kLogPmfFloor = std::log(kPmfFloor);

struct CellKey {
  int count;
  uint64_t t_bits;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  size_t operator()(const CellKey& k) const {
    uint64_t h = k.t_bits ^ (static_cast<uint64_t>(k.count) * 0x9e3779b97f4a7c15ull);
    h ^= h >> 31;
    h *= 0xff51afd7ed558ccdull;
    return static_cast<size_t>(h ^ (h >> 33));
  }
};

void validate_params(const ModelSpec& spec, const ParamVector& p) {
  auto chk = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::domain_error(std::string("log_likelihood: ") + name +
                              " must be positive and finite");
  };
  if (spec.heterogeneity) {
    chk(p.r, "r");
    chk(p.alpha, "alpha");
  } else {
    chk(p.lambda, "lambda");
  }
  if (spec.family == Family::weibull) chk(p.c, "c");
  for (const double b : p.beta)
    if (!std::isfinite(b))
      throw std::domain_error("log_likelihood: beta must be finite");
}

// ln pmf for one observation; eta is the (possibly centered) x'β.
double cell_log_pmf(const ModelSpec& spec, const ParamVector& p, int count,
                    double t, double eta, double tol, SeriesDiagnostics& diag) {
  if (spec.family == Family::exponential) {
    const double lp =
        spec.heterogeneity
            // Rate scaling by e^{x'β} equals exposure scaling for the NBD.
            ? nbd_log_pmf(p.r, p.alpha, t * std::exp(eta), count)
            : poisson_log_pmf(p.lambda * std::exp(eta) * t, count);
    if (lp <= kLogPmfFloor) {
      ++diag.pmf_floor_hits;
      return kLogPmfFloor;
    }
    return lp;
  }
  SeriesEval ev = spec.heterogeneity
                      ? detail::weibull_gamma_series_pmf(p.r, p.alpha, p.c, t,
                                                         count, tol, eta)
                      : detail::weibull_series_pmf(p.lambda, p.c, t, count,
                                                   tol, eta);
  diag.max_cancellation_ratio =
      std::max(diag.max_cancellation_ratio, ev.cancellation_ratio);
  diag.max_terms_used = std::max(diag.max_terms_used, ev.terms_used);
  if (ev.method == EvalMethod::quadrature) ++diag.quadrature_fallbacks;
  if (!ev.converged)
    throw EvalError("pmf failed to converge at count " + std::to_string(count) +
                    " (cancellation ratio " +
                    std::to_string(ev.cancellation_ratio) + ")");
  if (ev.value <= kPmfFloor) {
    ++diag.pmf_floor_hits;
    return kLogPmfFloor;
  }
  return std::log(ev.value);
}

}  // namespace

LogLikEval log_likelihood_eval(const CountDataset& ds, const ModelSpec& spec,
                               const ParamVector& params,
                               const LikelihoodOptions& opts) {
  validate_params(spec, params);
  if (spec.covariates && params.beta.empty() && !ds.covariate_names.empty())
    throw std::invalid_argument("log_likelihood: model has covariates but beta is empty");

  LogLikEval out;
  double sum = 0.0, comp = 0.0;
  auto add = [&](double x) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };

  const bool use_covariates = spec.covariates;
  if (!use_covariates) {
    // Group identical (count, t) cells so homogeneous likelihoods cost one
    // pmf per distinct cell instead of one per row.
    std::unordered_map<CellKey, double, CellKeyHash> groups;
    std::vector<CellKey> order;
    for (const auto& r : ds.rows) {
      if (r.weight == 0.0) continue;
      if (!(r.weight >= 0.0) || !std::isfinite(r.weight))
        throw std::domain_error("log_likelihood: weights must be finite and >= 0");
      CellKey key{r.count, 0};
      std::memcpy(&key.t_bits, &r.exposure_t, sizeof(double));
      auto [it, inserted] = groups.try_emplace(key, 0.0);
      if (inserted) order.push_back(key);
      it->second += r.weight;
    }
    for (const auto& key : order) {
      double t = 0.0;
      std::memcpy(&t, &key.t_bits, sizeof(double));
      const double lp = cell_log_pmf(spec, params, key.count, t, 0.0,
                                     opts.series_tol, out.diag);
      add(groups[key] * lp);
    }
  } else {
    std::span<const double> beta(params.beta);
    std::span<const double> center(opts.center);
    for (const auto& r : ds.rows) {
      if (r.weight == 0.0) continue;
      if (!(r.weight >= 0.0) || !std::isfinite(r.weight))
        throw std::domain_error("log_likelihood: weights must be finite and >= 0");
      const double eta = center.empty() ? linear_predictor(r, beta)
                                        : linear_predictor(r, beta, center);
      const double lp = cell_log_pmf(spec, params, r.count, r.exposure_t, eta,
                                     opts.series_tol, out.diag);
      add(r.weight * lp);
    }
  }
  out.value = sum + comp;
  return out;
}

double log_likelihood(const CountDataset& ds, const ModelSpec& spec,
                      const ParamVector& params, double tol) {
  LikelihoodOptions opts;
  opts.series_tol = tol;
  return log_likelihood_eval(ds, spec, params, opts).value;
}

}  // namespace wcount
