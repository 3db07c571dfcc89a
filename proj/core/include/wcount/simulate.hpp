#pragma once

#include <cstdint>
#include <vector>

#include "wcount/dataset.hpp"
#include "wcount/likelihood.hpp"
#include "wcount/model_spec.hpp"

namespace wcount {

// Deterministic splittable RNG: one independent SplitMix64 stream per draw
// index, so parallel generation is order-independent and a (seed, index)
// pair reproduces bit-identically on any platform with IEEE doubles.
// Normals use the Marsaglia polar method, gammas Marsaglia–Tsang (with the
// u^(1/shape) boost for shape < 1); both are fully specified here rather
// than delegated to implementation-defined std:: distributions.
class RngStream {
 public:
  static RngStream for_draw(uint64_t seed, uint64_t draw_index);

  uint64_t next_u64();
  double next_unit_open();  // uniform on (0, 1), never 0 or 1
  double next_normal();
  double next_gamma(double shape);  // Gamma(shape, 1)

 private:
  explicit RngStream(uint64_t state) : state_(state) {}
  uint64_t state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Inverse-transform Weibull interarrival sample: (-ln(1-u)/λ)^(1/c).
double draw_interarrival(double lambda_eff, double c, double u);

inline constexpr int kMaxEventsPerDraw = 1'000'000;

// Events in (0, t] of an ordinary renewal process (clock starts at an
// event). Throws ResourceError past kMaxEventsPerDraw.
int simulate_count(double lambda_eff, double c, double t, RngStream& rng);

struct SimConfig {
  ModelSpec model;      // generator family/heterogeneity/covariates
  ParamVector params;   // lambda or (r, alpha), c, beta
  int n_covariates = 0;       // iid N(0, sd^2) covariates when model.covariates
  double covariate_sd = 1.0;
  double t = 1.0;
  int n_draws = 1;
  uint64_t seed = 1;
};

// n_draws observations; per-unit rate is λ_i e^{x'β} with λ_i ~ Gamma(r, α)
// under heterogeneity, and shape c = 1 for the exponential family.
CountDataset simulate_dataset(const SimConfig& config);

// Marginal counts only (no covariate bookkeeping kept).
std::vector<int> simulate_counts(const SimConfig& config);

}  // namespace wcount
