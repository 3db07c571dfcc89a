#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "wcount/count_models.hpp"
#include "wcount/dataset.hpp"
#include "wcount/errors.hpp"
#include "wcount/simulate.hpp"

using wcount::ModelSpec;
using wcount::RngStream;
using wcount::SimConfig;
using wcount::draw_interarrival;
using wcount::simulate_count;
using wcount::simulate_counts;
using wcount::simulate_dataset;

namespace {

// Empirical cell vs expected probability, in binomial standard errors.
double cell_sigma_distance(int hits, int n, double p) {
  const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
  return std::fabs(static_cast<double>(hits) / n - p) / se;
}

std::vector<int> histogram(const std::vector<int>& counts, int imax) {
  std::vector<int> h(imax + 1, 0);
  for (int c : counts)
    if (c <= imax) ++h[c];
  return h;
}

}  // namespace

TEST_CASE("inverse-transform interarrival examples") {
  CHECK(draw_interarrival(1.0, 1.0, 1.0 - std::exp(-1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(draw_interarrival(1.0, 2.0, 1.0 - std::exp(-4.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // Scale property at c=1: draw(k*lambda) = draw(lambda)/k.
  for (double u : {0.1, 0.5, 0.9}) {
    CHECK(draw_interarrival(3.0, 1.0, u) ==
          doctest::Approx(draw_interarrival(1.0, 1.0, u) / 3.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(draw_interarrival(0.0, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(draw_interarrival(1.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(draw_interarrival(1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("streams are deterministic and index-separated") {
  RngStream a = RngStream::for_draw(42, 7);
  RngStream b = RngStream::for_draw(42, 7);
  RngStream c = RngStream::for_draw(42, 8);
  bool all_equal = true, any_diff = false;
  for (int k = 0; k < 64; ++k) {
    const uint64_t xa = a.next_u64(), xb = b.next_u64(), xc = c.next_u64();
    all_equal = all_equal && xa == xb;
    any_diff = any_diff || xa != xc;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("gamma sampler moments") {
  for (double shape : {0.7, 2.5}) {
    RngStream rng = RngStream::for_draw(1234, 0);
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = rng.next_gamma(shape);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.02));
    CHECK(var == doctest::Approx(shape).epsilon(0.06));
  }
}

TEST_CASE("poisson special case of the renewal simulator") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(4);
  cfg.params.lambda = 2.0;
  cfg.params.c = 1.0;
  cfg.n_draws = 300000;
  cfg.seed = 8;
  const auto counts = simulate_counts(cfg);
  double mean = 0.0;
  for (int c : counts) mean += c;
  mean /= cfg.n_draws;
  CHECK(std::fabs(mean - 2.0) <= 4.0 * std::sqrt(2.0 / cfg.n_draws));

  const auto h = histogram(counts, 6);
  for (int i = 0; i <= 6; ++i)
    CHECK(cell_sigma_distance(h[i], cfg.n_draws, wcount::poisson_pmf(2.0, i)) <=
          5.0);
}

TEST_CASE("weibull renewal counts match the series pmf") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(4);
  cfg.params.lambda = 2.93;
  cfg.params.c = 1.5;
  cfg.n_draws = 300000;
  cfg.seed = 21;
  const auto h = histogram(simulate_counts(cfg), 6);
  for (int i = 0; i <= 6; ++i) {
    const double p = wcount::weibull_count_pmf({2.93, 1.5}, 1.0, i).value;
    CHECK(cell_sigma_distance(h[i], cfg.n_draws, p) <= 5.0);
  }
}

TEST_CASE("gamma-heterogeneous counts at c=1 match the NBD") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(2);
  cfg.params.r = 2.0;
  cfg.params.alpha = 1.0;
  cfg.n_draws = 300000;
  cfg.seed = 33;
  const auto h = histogram(simulate_counts(cfg), 6);
  for (int i = 0; i <= 6; ++i)
    CHECK(cell_sigma_distance(h[i], cfg.n_draws,
                              wcount::nbd_pmf(2.0, 1.0, 1.0, i)) <= 5.0);
}

TEST_CASE("two-stage mixture simulation matches weibull_gamma_moments") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(6);
  cfg.params.r = 5.0;
  cfg.params.alpha = 2.0;
  cfg.params.c = 1.5;
  cfg.n_draws = 1000000;
  cfg.seed = 55;
  const auto counts = simulate_counts(cfg);
  double s = 0.0, s2 = 0.0;
  for (int c : counts) {
    s += c;
    s2 += static_cast<double>(c) * c;
  }
  const double mean = s / cfg.n_draws;
  const double var = s2 / cfg.n_draws - mean * mean;
  const auto m = wcount::weibull_gamma_moments({5.0, 2.0, 1.5}, 1.0);
  const double se_mean = std::sqrt(var / cfg.n_draws);
  CHECK(std::fabs(mean - m.mean) <= 4.0 * se_mean);
  // SE of a sample variance ~ sqrt((m4 - var^2)/n); a 4-sigma band with a
  // generous moment proxy.
  CHECK(std::fabs(var - m.variance) <= 6.0 * se_mean * 4.0);
}

TEST_CASE("simulated datasets are reproducible byte for byte") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(7);
  cfg.params.r = 4.0;
  cfg.params.alpha = 2.0;
  cfg.params.c = 1.5;
  cfg.params.beta = {0.3, -0.2};
  cfg.n_covariates = 2;
  cfg.n_draws = 500;
  cfg.seed = 99;
  std::ostringstream a, b;
  wcount::write_dataset_csv(a, simulate_dataset(cfg));
  wcount::write_dataset_csv(b, simulate_dataset(cfg));
  CHECK(a.str() == b.str());
  const auto ds = simulate_dataset(cfg);
  CHECK(ds.covariate_names.size() == 2);
  CHECK(ds.rows[0].covariates.size() == 2);
}

TEST_CASE("runaway event guard") {
  RngStream rng = RngStream::for_draw(1, 1);
  CHECK_THROWS_AS(simulate_count(2e6, 1.0, 1.0, rng), wcount::ResourceError);
}

TEST_CASE("beta = 0 regression generator matches the homogeneous law") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(5);
  cfg.params.lambda = 2.93;
  cfg.params.c = 1.5;
  cfg.params.beta = {0.0};
  cfg.n_covariates = 1;
  cfg.n_draws = 200000;
  cfg.seed = 3;
  const auto ds = simulate_dataset(cfg);
  double mean = 0.0;
  for (const auto& r : ds.rows) mean += r.count;
  mean /= cfg.n_draws;
  const auto m = wcount::weibull_count_moments({2.93, 1.5}, 1.0);
  CHECK(std::fabs(mean - m.mean) <=
        4.0 * std::sqrt(m.variance / cfg.n_draws));
}
