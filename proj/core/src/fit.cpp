#include "wcount/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "wcount/errors.hpp"
#include "wcount/optim.hpp"
#include "wcount/simulate.hpp"

namespace wcount {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Cap on |ln param| for the positive parameters; hitting it flags a boundary
// solution instead of failing the fit.
const double kLogCap = std::log(1e8);
constexpr double kBoundaryMargin = 1e-6;

struct ParamEntry {
  std::string name;
  bool log_scale = false;
  bool fixed = false;
  double fixed_value = 0.0;
};

// Maps the model's named natural parameters onto an unconstrained
// optimization vector: ln for the positive parameters (clamped to ±kLogCap),
// identity for the betas. Fixed parameters are pinned and excluded.
class ParamLayout {
 public:
  ParamLayout(const ModelSpec& spec,
              const std::vector<std::string>& covariate_names,
              const std::map<std::string, double>& fixed)
      : spec_(spec) {
    const auto names = spec.param_names(covariate_names);
    size_t seen_fixed = 0;
    for (const auto& name : names) {
      ParamEntry e;
      e.name = name;
      e.log_scale = name.rfind("beta:", 0) != 0;
      if (const auto it = fixed.find(name); it != fixed.end()) {
        e.fixed = true;
        e.fixed_value = it->second;
        if (e.log_scale && !(e.fixed_value > 0.0))
          throw std::invalid_argument("fixed value for " + name +
                                      " must be positive");
        ++seen_fixed;
      }
      entries_.push_back(std::move(e));
    }
    if (seen_fixed != fixed.size())
      throw std::invalid_argument(
          "fixed parameter name not used by this model");
    for (const auto& e : entries_)
      if (!e.fixed) ++n_free_;
  }

  int n_free() const { return n_free_; }
  const std::vector<ParamEntry>& entries() const { return entries_; }

  ParamVector to_params(std::span<const double> theta) const {
    ParamVector p;
    size_t k = 0;
    for (const auto& e : entries_) {
      double v;
      if (e.fixed) {
        v = e.fixed_value;
      } else {
        double raw = theta[k++];
        if (e.log_scale) raw = std::clamp(raw, -kLogCap, kLogCap);
        v = e.log_scale ? std::exp(raw) : raw;
      }
      assign(p, e.name, v);
    }
    return p;
  }

  std::vector<double> to_theta(const ParamVector& p) const {
    std::vector<double> theta;
    theta.reserve(static_cast<size_t>(n_free_));
    size_t beta_idx = 0;
    for (const auto& e : entries_) {
      const double v = read(p, e.name, beta_idx);
      if (e.fixed) continue;
      theta.push_back(e.log_scale
                          ? std::clamp(std::log(v), -kLogCap, kLogCap)
                          : v);
    }
    return theta;
  }

  bool at_boundary(std::span<const double> theta) const {
    size_t k = 0;
    for (const auto& e : entries_) {
      if (e.fixed) continue;
      const double v = theta[k++];
      if (e.log_scale && std::fabs(v) >= kLogCap - kBoundaryMargin) return true;
    }
    return false;
  }

  std::map<std::string, double> named(const ParamVector& p) const {
    std::map<std::string, double> out;
    size_t beta_idx = 0;
    for (const auto& e : entries_) out[e.name] = read(p, e.name, beta_idx);
    return out;
  }

 private:
  static void assign(ParamVector& p, const std::string& name, double v) {
    if (name == "lambda") p.lambda = v;
    else if (name == "c") p.c = v;
    else if (name == "r") p.r = v;
    else if (name == "alpha") p.alpha = v;
    else p.beta.push_back(v);
  }

  static double read(const ParamVector& p, const std::string& name,
                     size_t& beta_idx) {
    if (name == "lambda") return p.lambda;
    if (name == "c") return p.c;
    if (name == "r") return p.r;
    if (name == "alpha") return p.alpha;
    return p.beta.at(beta_idx++);
  }

  ModelSpec spec_;
  std::vector<ParamEntry> entries_;
  int n_free_ = 0;
};

ParamVector canonical_start(const CountDataset& ds, const ModelSpec& spec,
                            int n_covariates) {
  double w = 0.0, wc = 0.0, wt = 0.0;
  for (const auto& r : ds.rows) {
    w += r.weight;
    wc += r.weight * r.count;
    wt += r.weight * r.exposure_t;
  }
  const double lambda0 = std::max(wc / std::max(wt, 1e-12), 0.05);
  ParamVector p;
  p.lambda = lambda0;
  p.c = 1.0;
  p.r = 1.0;
  p.alpha = 1.0 / lambda0;
  if (spec.covariates) p.beta.assign(static_cast<size_t>(n_covariates), 0.0);
  return p;
}

struct RunOutcome {
  NelderMeadResult nm;
  bool valid = false;
};

}  // namespace

FitResult fit_mle(const CountDataset& ds, const ModelSpec& spec,
                  const FitOptions& opts) {
  if (ds.rows.empty() || !(ds.total_weight() > 0.0))
    throw std::invalid_argument(
        "fit_mle: dataset must be nonempty with positive total weight");
  if (spec.covariates && ds.covariate_names.empty())
    throw std::invalid_argument(
        "fit_mle: model has covariates but the dataset binds none");
  if (!spec.covariates && opts.center_covariates)
    throw std::invalid_argument(
        "fit_mle: centering requires a covariate model");

  const int n_cov = static_cast<int>(ds.covariate_names.size());
  const ParamLayout layout(spec, ds.covariate_names, opts.fixed);

  LikelihoodOptions ll_opts;
  ll_opts.series_tol = opts.series_tol;
  if (opts.center_covariates) ll_opts.center = ds.weighted_covariate_means();

  auto neg_ll = [&](std::span<const double> theta) -> double {
    try {
      return -log_likelihood_eval(ds, spec, layout.to_params(theta), ll_opts)
                  .value;
    } catch (const std::exception&) {
      return kInf;  // evaluation failure rejects the candidate point
    }
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(layout.to_theta(canonical_start(ds, spec, n_cov)));
  for (int s = 1; s < std::max(opts.starts, 1); ++s) {
    RngStream rng = RngStream::for_draw(opts.seed, 0x5157ull + s);
    auto theta = starts.front();
    for (auto& v : theta) v += 1.5 * (rng.next_unit_open() - 0.5);
    starts.push_back(std::move(theta));
  }
  for (const auto& p : opts.extra_starts) starts.push_back(layout.to_theta(p));

  NelderMeadOptions nm_opts;
  nm_opts.f_tol = opts.tol;
  nm_opts.x_tol = std::sqrt(opts.tol);
  nm_opts.max_iter = opts.max_iter;

  RunOutcome best;
  int total_evals = 0, total_iters = 0;
  for (const auto& theta0 : starts) {
    const NelderMeadResult run = nelder_mead_minimize(neg_ll, theta0, nm_opts);
    total_evals += run.evals;
    total_iters += run.iterations;
    if (!best.valid || run.f < best.nm.f) {
      best.nm = run;
      best.valid = true;
    }
  }
  // Polish with a fresh small simplex; escapes degenerate simplex shapes.
  if (std::isfinite(best.nm.f)) {
    NelderMeadOptions polish = nm_opts;
    polish.init_step = 0.05;
    const NelderMeadResult run =
        nelder_mead_minimize(neg_ll, best.nm.x, polish);
    total_evals += run.evals;
    total_iters += run.iterations;
    if (run.f <= best.nm.f) {
      const bool was_converged = best.nm.converged;
      best.nm = run;
      best.nm.converged = run.converged || was_converged;
    }
  }

  FitResult out;
  out.model = spec;
  out.iterations = total_iters;
  out.evals = total_evals;
  if (!std::isfinite(best.nm.f)) {
    // Every start failed to produce a finite likelihood.
    out.converged = false;
    out.params = layout.to_params(starts.front());
    out.params_natural = layout.named(out.params);
    out.log_likelihood = -kInf;
    return out;
  }
  out.params = layout.to_params(best.nm.x);
  out.params_natural = layout.named(out.params);
  out.converged = best.nm.converged;
  out.boundary = layout.at_boundary(best.nm.x);
  out.center_means = ll_opts.center;

  const LogLikEval final_eval =
      log_likelihood_eval(ds, spec, out.params, ll_opts);
  out.log_likelihood = final_eval.value;
  out.diagnostics = final_eval.diag;

  if (opts.bootstrap > 0) {
    FitOptions base_opts = opts;
    base_opts.bootstrap = 0;
    int dropped = 0;
    out.bootstrap_se =
        bootstrap_se(ds, spec, opts.bootstrap, opts.seed, base_opts, &dropped);
    out.bootstrap_dropped = dropped;
  }
  return out;
}

std::map<std::string, double> bootstrap_se(const CountDataset& ds,
                                           const ModelSpec& spec, int B,
                                           uint64_t seed,
                                           const FitOptions& opts,
                                           int* dropped_out) {
  if (B < 2) throw std::invalid_argument("bootstrap_se: B must be >= 2");

  FitOptions base_opts = opts;
  base_opts.bootstrap = 0;
  const FitResult base = fit_mle(ds, spec, base_opts);
  if (!base.converged)
    throw EvalError("bootstrap_se: base fit did not converge");

  const size_t n = ds.rows.size();
  const ParamLayout layout(spec, ds.covariate_names, opts.fixed);
  const std::vector<double> theta_base = layout.to_theta(base.params);

  NelderMeadOptions nm_opts;
  nm_opts.f_tol = opts.tol;
  nm_opts.x_tol = std::sqrt(opts.tol);
  nm_opts.max_iter = opts.max_iter;
  nm_opts.init_step = 0.1;  // warm start: small simplex around the optimum

  LikelihoodOptions ll_opts;
  ll_opts.series_tol = opts.series_tol;
  if (opts.center_covariates) ll_opts.center = ds.weighted_covariate_means();

  struct Replicate {
    bool ok = false;
    std::map<std::string, double> estimate;
  };
  std::vector<Replicate> reps(static_cast<size_t>(B));

  auto run_replicate = [&](int b) {
    // Multinomial resample: N uniform row draws; weight = appearance count.
    RngStream rng = RngStream::for_draw(seed, 0xb00ull + static_cast<uint64_t>(b));
    std::vector<double> weights(n, 0.0);
    for (size_t k = 0; k < n; ++k) {
      const size_t idx = std::min(
          static_cast<size_t>(rng.next_unit_open() * static_cast<double>(n)),
          n - 1);
      weights[idx] += 1.0;
    }
    CountDataset replica = ds;
    for (size_t k = 0; k < n; ++k) replica.rows[k].weight = weights[k];

    auto neg_ll = [&](std::span<const double> theta) -> double {
      try {
        return -log_likelihood_eval(replica, spec, layout.to_params(theta),
                                    ll_opts)
                    .value;
      } catch (const std::exception&) {
        return kInf;
      }
    };
    const NelderMeadResult run =
        nelder_mead_minimize(neg_ll, theta_base, nm_opts);
    if (!run.converged || !std::isfinite(run.f)) return;
    reps[static_cast<size_t>(b)].ok = true;
    reps[static_cast<size_t>(b)].estimate =
        layout.named(layout.to_params(run.x));
  };

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 4;
  const int n_threads =
      std::max(1, std::min<int>(opts.threads > 0 ? opts.threads : static_cast<int>(hw), B));
  if (n_threads == 1) {
    for (int b = 0; b < B; ++b) run_replicate(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (int b = next.fetch_add(1); b < B; b = next.fetch_add(1))
          run_replicate(b);
      });
    for (auto& th : pool) th.join();
  }

  int dropped = 0;
  for (const auto& r : reps)
    if (!r.ok) ++dropped;
  if (dropped_out) *dropped_out = dropped;
  if (dropped > B / 2)
    throw EvalError("bootstrap_se: " + std::to_string(dropped) + " of " +
                    std::to_string(B) + " replicates failed to converge");

  // Sample standard deviation across surviving replicates, natural scale,
  // reduced in replicate-index order.
  std::map<std::string, double> se;
  const int kept = B - dropped;
  for (const auto& [name, unused] : base.params_natural) {
    double mean = 0.0;
    for (const auto& r : reps)
      if (r.ok) mean += r.estimate.at(name);
    mean /= kept;
    double ss = 0.0;
    for (const auto& r : reps)
      if (r.ok) {
        const double d = r.estimate.at(name) - mean;
        ss += d * d;
      }
    se[name] = kept > 1 ? std::sqrt(ss / (kept - 1)) : 0.0;
  }
  return se;
}

std::vector<ModelComparisonRow> likelihood_ratio_report(
    const std::vector<FitResult>& fits) {
  std::vector<ModelComparisonRow> rows;
  rows.reserve(fits.size());
  for (const auto& f : fits) {
    ModelComparisonRow row;
    row.model = f.model.name();
    row.index = f.model.index();
    row.n_params = f.model.n_params(static_cast<int>(f.params.beta.size()));
    row.log_likelihood = f.log_likelihood;
    row.converged = f.converged;
    for (const int parent : f.model.parent_indices())
      for (const auto& g : fits)
        if (g.model.index() == parent)
          row.delta_vs_parents.emplace_back(
              parent, f.log_likelihood - g.log_likelihood);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wcount
