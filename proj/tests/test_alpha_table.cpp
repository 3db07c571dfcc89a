#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "wcount/alpha_table.hpp"
#include "wcount/errors.hpp"

using wcount::AlphaTable;
using wcount::alpha_table_for;
using wcount::build_alpha_table;

namespace {

double entry_value(const AlphaTable& t, int i, int j) {
  return std::exp(t.log_entry(i, j));
}

}  // namespace

TEST_CASE("hand-evaluated entries at c=2") {
  const AlphaTable t = build_alpha_table(2.0, 8);
  CHECK(entry_value(t, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(entry_value(t, 0, 1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(entry_value(t, 0, 2) == doctest::Approx(12.0).epsilon(1e-13));
  // alpha_2^1 = alpha_0^0 Γ(5)/Γ(3) + alpha_1^0 Γ(3)/Γ(2) = 12 + 4
  CHECK(entry_value(t, 1, 2) == doctest::Approx(16.0).epsilon(1e-13));
}

TEST_CASE("frozen spot values at c=1.5") {
  const AlphaTable t = build_alpha_table(1.5, 8);
  CHECK(entry_value(t, 0, 1) == doctest::Approx(1.32934038817914).epsilon(1e-12));
  CHECK(entry_value(t, 1, 2) == doctest::Approx(4.76714586764426).epsilon(1e-12));
  CHECK(entry_value(t, 2, 3) == doctest::Approx(10.32518070273821).epsilon(1e-12));
  CHECK(entry_value(t, 3, 5) == doctest::Approx(110.33051269629512).epsilon(1e-12));
}

TEST_CASE("c=1 collapses to binomial coefficients") {
  const int jmax = 50;
  const AlphaTable t = build_alpha_table(1.0, jmax);
  // Pascal's triangle stays exact in doubles up to C(50,25) < 2^53.
  std::vector<std::vector<double>> binom(jmax + 1);
  for (int j = 0; j <= jmax; ++j) {
    binom[j].assign(j + 1, 1.0);
    for (int i = 1; i < j; ++i)
      binom[j][i] = binom[j - 1][i - 1] + binom[j - 1][i];
  }
  double worst = 0.0;
  for (int j = 0; j <= jmax; ++j)
    for (int i = 0; i <= j; ++i) {
      const double rel =
          std::fabs(entry_value(t, i, j) - binom[j][i]) / binom[j][i];
      worst = std::max(worst, rel);
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("alpha_1^1 equals gamma(c+1)") {
  for (double c : {0.3, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    const AlphaTable t = build_alpha_table(c, 2);
    CHECK(entry_value(t, 1, 1) ==
          doctest::Approx(std::tgamma(c + 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("positivity and finiteness across shapes") {
  for (double c : {0.3, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    const AlphaTable t = build_alpha_table(c, 50);
    for (int j = 0; j <= 50; ++j)
      for (int i = 0; i <= j; ++i) {
        CHECK(t.entry(i, j).sign == 1);
        CHECK(std::isfinite(t.log_entry(i, j)));
      }
  }
}

TEST_CASE("rebuild with larger j_max keeps the prefix bit-identical") {
  const AlphaTable small = build_alpha_table(1.7, 30);
  const AlphaTable big = build_alpha_table(1.7, 50);
  for (int j = 0; j <= 30; ++j)
    for (int i = 0; i <= j; ++i)
      CHECK(small.log_entry(i, j) == big.log_entry(i, j));
}

TEST_CASE("ceiling enforcement") {
  CHECK_THROWS_AS(build_alpha_table(1.5, wcount::kAlphaTableCeiling + 1),
                  wcount::ResourceError);
  CHECK_THROWS_AS(build_alpha_table(1.5, 64, 32), wcount::ResourceError);
  CHECK_THROWS_AS(build_alpha_table(-1.0, 8), std::domain_error);
}

TEST_CASE("cache returns shared tables with O(1) repeat lookups") {
  const auto a = alpha_table_for(1.234567, 40);
  const auto b = alpha_table_for(1.234567, 40);
  CHECK(a.get() == b.get());
  const auto c = alpha_table_for(1.234568, 40);
  CHECK(a.get() != c.get());
  CHECK(a->j_max() >= 40);
}

TEST_CASE("cache tolerates concurrent readers and inserters") {
  std::vector<std::thread> threads;
  std::vector<double> results(8, 0.0);
  for (int k = 0; k < 8; ++k)
    threads.emplace_back([k, &results] {
      const double c = 1.5 + 0.01 * (k % 3);
      for (int rep = 0; rep < 20; ++rep) {
        auto t = alpha_table_for(c, 48);
        results[k] = t->log_entry(2, 10);
      }
    });
  for (auto& t : threads) t.join();
  CHECK(results[0] == results[3]);  // same c -> identical entries
  CHECK(results[0] == results[6]);
}
