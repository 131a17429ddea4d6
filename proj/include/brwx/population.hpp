#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "brwx/distributions.hpp"
#include "brwx/rng.hpp"

namespace brwx::population {

enum class PathMode { exact, surrogate, hybrid };

// Per-generation log population sizes, log_sizes[i] = log Z_i with Z_0 = 1.
struct PopulationPath {
  std::vector<double> log_sizes{0.0};
  PathMode mode = PathMode::exact;
  double alpha = 0.0;
  bool truncated = false;      // exact simulation stopped at the cap
  int switch_generation = -1;  // first surrogate-driven generation, -1 if none

  int last_generation() const { return static_cast<int>(log_sizes.size()) - 1; }
};

// log(e^x + 1) without overflow
inline double softplus(double x) {
  return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Simulates Z_{i+1} as the sum of Z_i i.i.d. progeny draws, stopping (and
// flagging) the first time a generation exceeds cap. O(Z_i) work and O(1)
// memory per generation.
template <class Progeny>
PopulationPath simulate_exact_sizes(const Progeny& law, int n_max, double cap, RngStream& rng) {
  if (n_max < 1) throw std::domain_error("simulate_exact_sizes: n_max must be >= 1");
  if (cap < 1.0) throw std::domain_error("simulate_exact_sizes: cap must be >= 1");
  PopulationPath path;
  path.mode = PathMode::exact;
  path.alpha = law.alpha();
  path.log_sizes.reserve(n_max + 1);
  double z = 1.0;
  for (int i = 0; i < n_max; ++i) {
    const std::uint64_t parents = static_cast<std::uint64_t>(z);
    double next = 0.0;
    for (std::uint64_t p = 0; p < parents; ++p) next += law.sample(rng);
    path.log_sizes.push_back(std::log(next));
    if (next > cap) {
      path.truncated = true;
      break;
    }
    z = next;
  }
  return path;
}

// Sum of n i.i.d. progeny draws is ~ c_alpha n^{1/alpha} S_alpha for large n,
// with S_alpha positive stable. Fits c_alpha by matching medians of exact
// sums against stable draws; deterministic in the supplied stream.
template <class Progeny>
double fit_stable_calibration(const Progeny& law, RngStream& rng, int n_sums = 400,
                              std::uint64_t sum_size = 20000) {
  const double alpha = law.alpha();
  std::vector<double> scaled(n_sums), stable(n_sums);
  const double norm = std::pow(static_cast<double>(sum_size), 1.0 / alpha);
  for (int i = 0; i < n_sums; ++i) {
    double s = 0.0;
    for (std::uint64_t j = 0; j < sum_size; ++j) s += law.sample(rng);
    scaled[i] = s / norm;
    stable[i] = sample_positive_stable(alpha, rng);
  }
  auto med = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  return med(scaled) / med(stable);
}

// Exact recursion below the switch size, then the stable-increment surrogate
// log Z_{n+1} = (1/alpha) log Z_n + log(calibration * S_alpha). Valid only
// once populations are large; the switch must be at least log(1e4).
template <class Progeny>
PopulationPath simulate_surrogate_sizes(const Progeny& law, int n_max, double switch_log_size,
                                        RngStream& rng, double calibration = 1.0) {
  const double alpha = law.alpha();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("simulate_surrogate_sizes: alpha must lie in (0,1)");
  }
  if (n_max < 1) throw std::domain_error("simulate_surrogate_sizes: n_max must be >= 1");
  if (switch_log_size < std::log(1e4)) {
    throw std::domain_error("simulate_surrogate_sizes: switch_log_size must be >= log(1e4)");
  }
  PopulationPath path;
  path.mode = PathMode::hybrid;
  path.alpha = alpha;
  path.log_sizes.reserve(n_max + 1);
  const double log_cal = std::log(calibration);
  double log_z = 0.0;
  for (int i = 0; i < n_max; ++i) {
    if (log_z <= switch_log_size) {
      const std::uint64_t parents = static_cast<std::uint64_t>(std::exp(log_z) + 0.5);
      double next = 0.0;
      for (std::uint64_t p = 0; p < parents; ++p) next += law.sample(rng);
      log_z = std::log(next);
    } else {
      if (path.switch_generation < 0) path.switch_generation = i + 1;
      log_z = log_z / alpha + log_cal + std::log(sample_positive_stable(alpha, rng));
    }
    path.log_sizes.push_back(log_z);
  }
  return path;
}

struct WEstimate {
  double value = 0.0;
  int generation = 0;
  // |alpha^{i+1} log(Z_{i+1}+1) - alpha^i log(Z_i+1)|, i = 0..n-1
  std::vector<double> increments;
};

// alpha^n log(Z_n + 1) at the last available generation.
inline WEstimate estimate_w(const PopulationPath& path) {
  if (path.log_sizes.empty()) throw std::domain_error("estimate_w: empty path");
  WEstimate est;
  est.generation = path.last_generation();
  const double alpha = path.alpha;
  double prev = softplus(path.log_sizes[0]);  // log(Z_0 + 1)
  double pow_a = 1.0;
  for (int i = 1; i < static_cast<int>(path.log_sizes.size()); ++i) {
    const double cur = softplus(path.log_sizes[i]);
    est.increments.push_back(std::fabs(pow_a * alpha * cur - pow_a * prev));
    prev = cur;
    pow_a *= alpha;
  }
  est.value = pow_a * prev;
  return est;
}

// (1 / log Z_n) log sum_{i=0}^{n-1} Z_i^s, evaluated with log-sum-exp so
// surrogate paths with astronomically large Z_i cannot overflow.
inline double mass_concentration_stat(const PopulationPath& path, double s) {
  if (s <= 0.0) throw std::domain_error("mass_concentration_stat: s must be > 0");
  const int n = path.last_generation();
  if (n < 1) throw std::domain_error("mass_concentration_stat: path needs >= 2 generations");
  const double log_zn = path.log_sizes[n];
  if (log_zn == 0.0) throw std::domain_error("mass_concentration_stat: log Z_n = 0, undefined");
  double max_term = -HUGE_VAL;
  for (int i = 0; i < n; ++i) max_term = std::max(max_term, s * path.log_sizes[i]);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::exp(s * path.log_sizes[i] - max_term);
  return (max_term + std::log(acc)) / log_zn;
}

// log(sum of n i.i.d. progeny draws) / log n
template <class Progeny>
double heavy_sum_log_ratio(const Progeny& law, std::uint64_t n, RngStream& rng) {
  if (n < 2) throw std::domain_error("heavy_sum_log_ratio: n must be >= 2");
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) sum += law.sample(rng);
  return std::log(sum) / std::log(static_cast<double>(n));
}

}  // namespace brwx::population
