#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <vector>

#include "brwx/rng.hpp"
#include "brwx/stats.hpp"
#include "test_util.hpp"

using namespace brwx;
using brwx::testutil::poisson_draw;

TEST_CASE("ks statistic: plug-in bounds and edge cases") {
  auto identity = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const int n = 1000;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = (i + 0.5) / n;
  CHECK(stats::ks_statistic(grid, identity) <= 1.0 / n + 1e-12);

  std::vector<double> one{0.5};
  CHECK(stats::ks_statistic(one, identity) == doctest::Approx(0.5).epsilon(1e-12));

  std::vector<double> empty;
  CHECK_THROWS_AS(stats::ks_statistic(empty, identity), std::domain_error);
  std::vector<double> unsorted{0.9, 0.1};
  CHECK_THROWS_AS(stats::ks_statistic(unsorted, identity), std::domain_error);
}

TEST_CASE("ks statistic: null distribution quantile calibration") {
  auto identity = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const int n = 10000;
  const double crit = 1.63 / std::sqrt(static_cast<double>(n));
  int pass = 0;
  const int seeds = 100;
  std::vector<int> ok(seeds, 0);
  testutil::parallel_for(seeds, [&](int s) {
    RngStream rng(777000 + s, 0);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform();
    std::sort(v.begin(), v.end());
    ok[s] = stats::ks_statistic(v, identity) < crit;
  });
  for (int s = 0; s < seeds; ++s) pass += ok[s];
  CHECK(pass >= 99);
}

TEST_CASE("ks statistic is invariant under joint increasing transforms") {
  RngStream rng(4242, 0);
  std::vector<double> v(500);
  for (auto& x : v) x = rng.uniform();
  std::sort(v.begin(), v.end());
  auto identity = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const double base = stats::ks_statistic(v, identity);

  std::vector<double> t(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = std::exp(3.0 * v[i]);
  auto transformed_cdf = [&](double y) { return identity(std::log(y) / 3.0); };
  CHECK(stats::ks_statistic(t, transformed_cdf) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("poisson gof accepts synthetic Poisson data") {
  const int seeds = 50;
  std::vector<int> ok(seeds, 0);
  testutil::parallel_for(seeds, [&](int s) {
    RngStream rng(990000 + s, 0);
    std::vector<std::int64_t> counts(10000);
    for (auto& c : counts) c = poisson_draw(1.0, rng);
    ok[s] = stats::poisson_gof(counts, 1.0).pass();
  });
  int pass = 0;
  for (int v : ok) pass += v;
  CHECK(pass >= 48);  // 1% nominal false-fail rate on the chi-square
}

TEST_CASE("poisson gof rejects degenerate data") {
  std::vector<std::int64_t> zeros(1000, 0);
  CHECK_FALSE(stats::poisson_gof(zeros, 1.0).pass());

  // constant counts at a large mean: zero variance, nothing in the low bins
  std::vector<std::int64_t> constant(10000, 9);
  CHECK_FALSE(stats::poisson_gof(constant, 9.0).pass());

  std::vector<std::int64_t> tiny(50, 1);
  CHECK_THROWS_AS(stats::poisson_gof(tiny, 1.0), std::domain_error);
  std::vector<std::int64_t> counts(200, 1);
  CHECK_THROWS_AS(stats::poisson_gof(counts, 0.0), std::domain_error);
}

TEST_CASE("poisson gof mean check covers at 4 sigma") {
  const int seeds = 100;
  std::vector<int> ok(seeds, 0);
  testutil::parallel_for(seeds, [&](int s) {
    RngStream rng(550000 + s, 0);
    std::vector<std::int64_t> counts(2000);
    for (auto& c : counts) c = poisson_draw(0.5, rng);
    ok[s] = stats::poisson_gof(counts, 0.5).mean.pass;
  });
  int pass = 0;
  for (int v : ok) pass += v;
  CHECK(pass >= 99);
}

TEST_CASE("median confidence interval") {
  std::vector<double> sym;
  for (int i = -10; i <= 10; ++i) sym.push_back(i);
  CHECK(stats::median_ci(sym, 0.95).contains(0.0));

  std::vector<double> constant(25, 3.14);
  const auto ci = stats::median_ci(constant, 0.99);
  CHECK(ci.lo == 3.14);
  CHECK(ci.hi == 3.14);
  CHECK(ci.width() == 0.0);

  std::vector<double> small(10, 1.0);
  CHECK_THROWS_AS(stats::median_ci(small, 0.95), std::domain_error);
  CHECK_THROWS_AS(stats::median_ci(sym, 1.5), std::domain_error);
}

TEST_CASE("median ci coverage on uniform samples") {
  const int seeds = 100;
  std::vector<int> ok(seeds, 0);
  testutil::parallel_for(seeds, [&](int s) {
    RngStream rng(311100 + s, 0);
    std::vector<double> v(10000);
    for (auto& x : v) x = rng.uniform();
    ok[s] = stats::median_ci(v, 0.99).contains(0.5);
  });
  int pass = 0;
  for (int v : ok) pass += v;
  CHECK(pass >= 99);
}

TEST_CASE("median helper") {
  CHECK(stats::median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(stats::median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
}
