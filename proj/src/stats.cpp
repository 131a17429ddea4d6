#include "brwx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brwx::stats {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// log C(n, i) via lgamma
double log_binom(std::int64_t n, std::int64_t i) {
  return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
}

}  // namespace

const char* gof_test_name(GofTest t) {
  switch (t) {
    case GofTest::ks: return "ks";
    case GofTest::poisson_mean: return "poisson_mean";
    case GofTest::poisson_chisq: return "poisson_chisq";
    case GofTest::median_ci: return "median_ci";
  }
  return "?";
}

double ks_statistic(std::span<const double> sorted_samples,
                    const std::function<double(double)>& cdf) {
  require(!sorted_samples.empty(), "ks_statistic: empty sample");
  const double n = static_cast<double>(sorted_samples.size());
  double sup = 0.0;
  double prev = -HUGE_VAL;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double x = sorted_samples[i];
    require(x >= prev, "ks_statistic: samples must be sorted");
    prev = x;
    const double f = cdf(x);
    sup = std::max(sup, std::fabs((i + 1) / n - f));
    sup = std::max(sup, std::fabs(i / n - f));
  }
  return sup;
}

PoissonGof poisson_gof(std::span<const std::int64_t> counts, double mean, double level) {
  require(mean > 0.0, "poisson_gof: mean must be > 0");
  require(counts.size() >= 100, "poisson_gof: needs at least 100 replicates");
  require(level == 0.01 || level == 0.05, "poisson_gof: level must be 0.01 or 0.05");
  const double n = static_cast<double>(counts.size());

  // Bins {0, 1, 2, >=3}
  double observed[4] = {0, 0, 0, 0};
  double sum = 0.0;
  for (auto c : counts) {
    require(c >= 0, "poisson_gof: counts must be nonnegative");
    observed[c >= 3 ? 3 : c] += 1.0;
    sum += static_cast<double>(c);
  }
  const double p0 = std::exp(-mean);
  double expected[4] = {n * p0, n * p0 * mean, n * p0 * mean * mean / 2.0, 0.0};
  expected[3] = n - expected[0] - expected[1] - expected[2];

  // Merge adjacent bins until every expected count is >= 5.
  std::vector<double> obs(observed, observed + 4), exp_(expected, expected + 4);
  bool merged = true;
  while (merged && exp_.size() > 1) {
    merged = false;
    for (std::size_t i = 0; i < exp_.size(); ++i) {
      if (exp_[i] < 5.0) {
        const std::size_t j = (i == 0) ? 1 : i - 1;
        exp_[j] += exp_[i];
        obs[j] += obs[i];
        exp_.erase(exp_.begin() + i);
        obs.erase(obs.begin() + i);
        merged = true;
        break;
      }
    }
  }

  PoissonGof out;
  out.chisq.test = GofTest::poisson_chisq;
  out.chisq.n_samples = static_cast<std::int64_t>(counts.size());
  if (exp_.size() < 2) {
    out.chisq.statistic = HUGE_VAL;
    out.chisq.threshold = 0.0;
    out.chisq.pass = false;
    out.chisq.notes = "degenerate binning: all expected mass in one bin";
  } else {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < exp_.size(); ++i) {
      const double d = obs[i] - exp_[i];
      chi2 += d * d / exp_[i];
    }
    out.chisq.statistic = chi2;
    out.chisq.threshold = chi_square_critical(static_cast<int>(exp_.size()) - 1, level);
    out.chisq.pass = chi2 <= out.chisq.threshold;
  }

  out.mean.test = GofTest::poisson_mean;
  out.mean.n_samples = out.chisq.n_samples;
  out.mean.statistic = std::fabs(sum / n - mean) / std::sqrt(mean / n);
  out.mean.threshold = 4.0;
  out.mean.pass = out.mean.statistic <= out.mean.threshold;
  return out;
}

Interval median_ci(std::span<const double> samples, double level) {
  require(level > 0.0 && level < 1.0, "median_ci: level must lie in (0,1)");
  require(samples.size() >= 20, "median_ci: needs at least 20 samples");
  const std::int64_t n = static_cast<std::int64_t>(samples.size());
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());

  // Coverage of [x_(j), x_(n+1-j)] (1-indexed) is P(j <= Bin(n,1/2) <= n-j),
  // since the true median lies inside iff at least j samples fall on each
  // side. Pick the largest j whose coverage still reaches the level.
  const double log_half = -std::log(2.0) * n;
  std::vector<double> cum(n + 1);
  double acc = 0.0;
  for (std::int64_t i = 0; i <= n; ++i) {
    acc += std::exp(log_binom(n, i) + log_half);
    cum[i] = acc;
  }
  std::int64_t best_j = 1;
  for (std::int64_t j = n / 2; j >= 1; --j) {
    const double cover = cum[n - j] - (j >= 1 ? cum[j - 1] : 0.0);
    if (cover >= level) {
      best_j = j;
      break;
    }
  }
  return Interval{x[best_j - 1], x[n - best_j]};
}

double chi_square_critical(int df, double level) {
  static constexpr double k99[8] = {6.634896601021, 9.210340371976, 11.344866730144,
                                    13.276704135988, 15.086272469389, 16.811893829770,
                                    18.475306906582, 20.090235029663};
  static constexpr double k95[8] = {3.841458820694, 5.991464547108, 7.814727903251,
                                    9.487729036781, 11.070497693516, 12.591587243744,
                                    14.067140449341, 15.507313055865};
  require(df >= 1 && df <= 8, "chi_square_critical: df must lie in [1,8]");
  if (level == 0.01) return k99[df - 1];
  if (level == 0.05) return k95[df - 1];
  throw std::domain_error("chi_square_critical: level must be 0.01 or 0.05");
}

double median(std::vector<double> values) {
  require(!values.empty(), "median: empty input");
  const std::size_t m = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + m, values.end());
  double hi = values[m];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + m - 1, values.begin() + m);
  return 0.5 * (values[m - 1] + hi);
}

}  // namespace brwx::stats
