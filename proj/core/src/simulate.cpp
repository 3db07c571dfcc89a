#include "wcount/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wcount/errors.hpp"

namespace wcount {

namespace {

uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::for_draw(uint64_t seed, uint64_t draw_index) {
  return RngStream(
      mix64(mix64(seed) ^ (draw_index * 0xd1b54a32d192ed03ull + 1)));
}

uint64_t RngStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ull;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double RngStream::next_unit_open() {
  // 53-bit mantissa, shifted half a step off both endpoints.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_unit_open() - 1.0;
    v = 2.0 * next_unit_open() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * m;
  has_spare_ = true;
  return u * m;
}

double RngStream::next_gamma(double shape) {
  if (!(shape > 0.0))
    throw std::domain_error("next_gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = next_unit_open();
    return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_unit_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double draw_interarrival(double lambda_eff, double c, double u) {
  if (!(lambda_eff > 0.0) || !(c > 0.0))
    throw std::domain_error("draw_interarrival: lambda and c must be positive");
  if (!(u > 0.0) || !(u < 1.0))
    throw std::domain_error("draw_interarrival: u must lie in (0, 1)");
  return std::pow(-std::log1p(-u) / lambda_eff, 1.0 / c);
}

int simulate_count(double lambda_eff, double c, double t, RngStream& rng) {
  if (!(t > 0.0)) throw std::domain_error("simulate_count: t must be positive");
  double clock = 0.0;
  int k = 0;
  while (true) {
    clock += draw_interarrival(lambda_eff, c, rng.next_unit_open());
    if (clock > t) return k;
    if (++k >= kMaxEventsPerDraw)
      throw ResourceError("simulate_count: exceeded " +
                          std::to_string(kMaxEventsPerDraw) +
                          " events in one draw");
  }
}

namespace {

Observation simulate_observation(const SimConfig& cfg, uint64_t index) {
  RngStream rng = RngStream::for_draw(cfg.seed, index);
  Observation obs;
  obs.exposure_t = cfg.t;

  double eta = 0.0;
  if (cfg.model.covariates) {
    obs.covariates.resize(static_cast<size_t>(cfg.n_covariates));
    for (auto& x : obs.covariates) x = cfg.covariate_sd * rng.next_normal();
    for (size_t k = 0; k < obs.covariates.size(); ++k)
      eta += obs.covariates[k] * cfg.params.beta.at(k);
  }

  const double lam = cfg.model.heterogeneity
                         ? rng.next_gamma(cfg.params.r) / cfg.params.alpha
                         : cfg.params.lambda;
  const double shape =
      cfg.model.family == Family::weibull ? cfg.params.c : 1.0;
  obs.count = simulate_count(lam * std::exp(eta), shape, cfg.t, rng);
  return obs;
}

void validate(const SimConfig& cfg) {
  if (cfg.n_draws < 1)
    throw std::domain_error("simulate: n_draws must be >= 1");
  if (!(cfg.t > 0.0)) throw std::domain_error("simulate: t must be positive");
  auto pos = [](double v, const char* n) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::domain_error(std::string("simulate: ") + n +
                              " must be positive and finite");
  };
  if (cfg.model.heterogeneity) {
    pos(cfg.params.r, "r");
    pos(cfg.params.alpha, "alpha");
  } else {
    pos(cfg.params.lambda, "lambda");
  }
  if (cfg.model.family == Family::weibull) pos(cfg.params.c, "c");
  if (cfg.model.covariates) {
    if (cfg.n_covariates < 1)
      throw std::domain_error("simulate: covariate model needs n_covariates >= 1");
    if (static_cast<int>(cfg.params.beta.size()) != cfg.n_covariates)
      throw std::domain_error("simulate: beta length must equal n_covariates");
  }
}

}  // namespace

CountDataset simulate_dataset(const SimConfig& cfg) {
  validate(cfg);
  CountDataset ds;
  ds.source_path = "<simulated>";
  if (cfg.model.covariates)
    for (int k = 0; k < cfg.n_covariates; ++k)
      ds.covariate_names.push_back("x" + std::to_string(k + 1));
  ds.rows.reserve(static_cast<size_t>(cfg.n_draws));
  for (int idx = 0; idx < cfg.n_draws; ++idx)
    ds.rows.push_back(simulate_observation(cfg, static_cast<uint64_t>(idx)));
  return ds;
}

std::vector<int> simulate_counts(const SimConfig& cfg) {
  validate(cfg);
  std::vector<int> out;
  out.reserve(static_cast<size_t>(cfg.n_draws));
  for (int idx = 0; idx < cfg.n_draws; ++idx)
    out.push_back(simulate_observation(cfg, static_cast<uint64_t>(idx)).count);
  return out;
}

}  // namespace wcount
