#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

#include "brwx/rng.hpp"

namespace brwx::testutil {

// Deterministic progeny/displacement doubles for exercising the simulation
// machinery without randomness.
struct ConstantProgeny {
  double m = 1.0;
  double a = 0.5;
  double alpha() const { return a; }
  double sample(RngStream&) const { return m; }
  double sample(double) const { return m; }
};

struct ConstantDisp {
  double x = 1.0;
  double sample(RngStream&) const { return x; }
  double sample(double) const { return x; }
};

inline void parallel_for(int total, const std::function<void(int)>& body) {
  unsigned hw = std::thread::hardware_concurrency();
  int t = hw ? static_cast<int>(hw) : 1;
  if (t > total) t = total;
  if (t <= 1) {
    for (int i = 0; i < total; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Poisson sampler by cdf inversion; test-only, fine for small means.
inline std::int64_t poisson_draw(double mean, RngStream& rng) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf && k < 10000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace brwx::testutil
