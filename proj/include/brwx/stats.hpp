#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace brwx::stats {

enum class GofTest { ks, poisson_mean, poisson_chisq, median_ci };

const char* gof_test_name(GofTest t);

struct GofReport {
  GofTest test = GofTest::ks;
  double statistic = 0.0;
  std::int64_t n_samples = 0;
  bool pass = false;
  double threshold = 0.0;
  std::string notes;
};

// Two-sided Kolmogorov-Smirnov distance between the empirical law of a
// sorted sample and a reference cdf: both i/n and (i-1)/n are compared at
// every sample point.
double ks_statistic(std::span<const double> sorted_samples,
                    const std::function<double(double)>& cdf);

struct PoissonGof {
  GofReport chisq;
  GofReport mean;
  bool pass() const { return chisq.pass && mean.pass; }
};

// Compares replicate counts to Poisson(mean): chi-square over the bins
// {0, 1, 2, >=3} (adjacent bins merged until every expected count is >= 5)
// at the given significance level, plus a 4-sigma sample-mean check.
// Requires mean > 0 and at least 100 replicates.
PoissonGof poisson_gof(std::span<const std::int64_t> counts, double mean,
                       double level = 0.01);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
};

// Distribution-free (order-statistic) confidence interval for the median.
// Requires at least 20 samples and level in (0,1).
Interval median_ci(std::span<const double> samples, double level);

// Upper critical value of the chi-square distribution, df in [1,8],
// level in {0.05, 0.01}.
double chi_square_critical(int df, double level);

// Median helper (copies, then selects).
double median(std::vector<double> values);

}  // namespace brwx::stats
