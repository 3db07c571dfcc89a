#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "wcount/fit.hpp"
#include "wcount/simulate.hpp"

using wcount::CountDataset;
using wcount::FitOptions;
using wcount::ModelSpec;
using wcount::Observation;
using wcount::SimConfig;
using wcount::bootstrap_se;

TEST_CASE("degenerate dataset of identical rows gives zero SEs") {
  CountDataset ds;
  for (int k = 0; k < 20; ++k) {
    Observation o;
    o.count = 3;
    ds.rows.push_back(o);
  }
  // Every resample reweights identical rows, so the weighted problem is the
  // same up to scale and every replicate lands on the same maximizer.
  const auto se = bootstrap_se(ds, ModelSpec::from_index(0), 10, 42);
  CHECK(se.at("lambda") <= 1e-7);
}

TEST_CASE("same seed is bit-identical, different seed is not") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(0);
  cfg.params.lambda = 2.0;
  cfg.n_draws = 200;
  cfg.seed = 9;
  const CountDataset ds = wcount::simulate_dataset(cfg);
  const auto a = bootstrap_se(ds, cfg.model, 8, 123);
  const auto b = bootstrap_se(ds, cfg.model, 8, 123);
  CHECK(a.at("lambda") == b.at("lambda"));
  const auto c = bootstrap_se(ds, cfg.model, 8, 124);
  CHECK(a.at("lambda") != c.at("lambda"));
}

TEST_CASE("poisson bootstrap SE matches the asymptotic sqrt(lambda/N)") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(0);
  cfg.params.lambda = 2.0;
  cfg.n_draws = 1000;
  cfg.seed = 31;
  const CountDataset ds = wcount::simulate_dataset(cfg);
  int dropped = -1;
  const auto se =
      bootstrap_se(ds, cfg.model, 200, 7, FitOptions{}, &dropped);
  CHECK(dropped == 0);
  const double expected = std::sqrt(2.0 / 1000.0);  // 0.0447
  CHECK(se.at("lambda") >= 0.7 * expected);
  CHECK(se.at("lambda") <= 1.3 * expected);
}

TEST_CASE("B validation") {
  CountDataset ds;
  Observation o;
  o.count = 1;
  ds.rows.push_back(o);
  CHECK_THROWS_AS(bootstrap_se(ds, ModelSpec::from_index(0), 1, 1),
                  std::invalid_argument);
}

TEST_CASE("fit_mle carries bootstrap results through") {
  SimConfig cfg;
  cfg.model = ModelSpec::from_index(0);
  cfg.params.lambda = 1.5;
  cfg.n_draws = 150;
  cfg.seed = 4;
  const CountDataset ds = wcount::simulate_dataset(cfg);
  FitOptions opts;
  opts.bootstrap = 6;
  opts.seed = 99;
  const auto fit = wcount::fit_mle(ds, cfg.model, opts);
  REQUIRE(fit.bootstrap_se.has_value());
  CHECK(fit.bootstrap_se->at("lambda") > 0.0);
  CHECK(fit.bootstrap_dropped == 0);
}
