#include "brwx/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace brwx::theory {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

void check_alpha_r(double alpha, double r) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  require(r > 0.0, "r must be > 0");
}

}  // namespace

double light_tail_constant(double alpha, double r) {
  check_alpha_r(alpha, r);
  if (r <= 1.0) return 1.0;
  return std::pow(1.0 - std::pow(alpha, 1.0 / (r - 1.0)), 1.0 / r - 1.0);
}

double f_closed(double alpha, double r, int k) {
  check_alpha_r(alpha, r);
  require(k >= 0, "f_closed: k must be >= 0");
  if (r <= 1.0) return 1.0;
  const double q = std::pow(alpha, 1.0 / (r - 1.0));
  // sum_{i=0}^{k} q^i, q in (0,1)
  const double sum = (1.0 - std::pow(q, k + 1)) / (1.0 - q);
  return std::pow(sum, 1.0 - 1.0 / r);
}

double f_recursive(double alpha, double r, int k) {
  check_alpha_r(alpha, r);
  require(k >= 0, "f_recursive: k must be >= 0");
  double f = 1.0;
  if (r <= 1.0) {
    for (int i = 1; i <= k; ++i) f = std::max(std::pow(alpha, i / r), f);
    return f;
  }
  const double e = r / (r - 1.0);
  for (int i = 1; i <= k; ++i) {
    f = std::pow(std::pow(alpha, i / (r - 1.0)) + std::pow(f, e), 1.0 - 1.0 / r);
  }
  return f;
}

double f_bruteforce_oracle(double alpha, double r, int k, double grid_step) {
  check_alpha_r(alpha, r);
  require(k >= 0, "f_bruteforce_oracle: k must be >= 0");
  require(grid_step > 0.0 && grid_step <= 0.1, "f_bruteforce_oracle: grid_step in (0, 0.1]");
  const int inner = static_cast<int>(std::floor(1.0 / grid_step)) - 1;
  require(inner >= 1, "f_bruteforce_oracle: grid too coarse");
  // Closure of the step grid: the supremum sits at the boundary for r <= 1
  // (and for the late coordinates in general), so 0 and 1 are included.
  const int m = inner + 2;
  std::vector<double> d_pow(m), one_minus_pow(m);
  for (int j = 0; j < m; ++j) {
    const double d = (j == 0) ? 0.0 : (j == m - 1 ? 1.0 : grid_step * j);
    d_pow[j] = std::pow(d, 1.0 / r);
    one_minus_pow[j] = std::pow(1.0 - d, 1.0 / r);
  }
  // g_0 = max over d_0, then g_i = max over d_i of
  // alpha^{i/r} d_i^{1/r} + (1-d_i)^{1/r} g_{i-1}.
  double g = d_pow[m - 1];  // d^{1/r} is increasing
  for (int i = 1; i <= k; ++i) {
    const double w = std::pow(alpha, i / r);
    double best = 0.0;
    for (int j = 0; j < m; ++j) {
      const double v = w * d_pow[j] + one_minus_pow[j] * g;
      if (v > best) best = v;
    }
    g = best;
  }
  return g;
}

double alpha_k_closed(double alpha, double r, int k) {
  check_alpha_r(alpha, r);
  require(k >= 1, "alpha_k_closed: k must be >= 1");
  const double la = std::log(alpha);
  if (r <= 1.0) return std::exp(-k * la / r);
  // log sum_{i=1}^{k} Q^i with Q = alpha^{-1/(r-1)} > 1, computed from the
  // largest term to stay finite for large k.
  const double log_q = -la / (r - 1.0);
  const double log_sum =
      k * log_q + std::log1p(-std::exp(-k * log_q)) - std::log1p(-std::exp(-log_q));
  return std::exp((1.0 - 1.0 / r) * log_sum);
}

double alpha_k_recursive(double alpha, double r, int k) {
  check_alpha_r(alpha, r);
  require(k >= 1, "alpha_k_recursive: k must be >= 1");
  const double la = std::log(alpha);
  if (r <= 1.0) {
    double log_a = -la / r;
    for (int i = 2; i <= k; ++i) log_a += -la / r;
    return std::exp(log_a);
  }
  const double e = r / (r - 1.0);
  double log_a = -la / r;  // alpha_1
  for (int i = 2; i <= k; ++i) {
    // log alpha_{i} = -log(alpha)/r + (1/e) * log(alpha_{i-1}^e + 1)
    const double t = e * log_a;
    const double softplus = (t > 30.0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    log_a = -la / r + softplus / e;
  }
  return std::exp(log_a);
}

double deterministic_limit_factor(double alpha, double r, double w) {
  check_alpha_r(alpha, r);
  require(w >= 0.0, "deterministic_limit_factor: w must be >= 0");
  double factor = 1.0;
  if (r != 1.0) {
    const double base = std::max(1.0 - std::pow(alpha, 1.0 / (r - 1.0)), 0.0);
    factor = std::max(std::pow(base, 1.0 / r - 1.0), 1.0);
  }
  return factor * std::pow(w, 1.0 / r);
}

double frechet_kth_cdf(double beta, int k, double x) {
  require(beta > 0.0, "frechet_kth_cdf: beta must be > 0");
  require(k >= 1, "frechet_kth_cdf: k must be >= 1");
  require(x > 0.0, "frechet_kth_cdf: x must be > 0");
  const double lam = std::pow(x, -beta);
  // P(Poisson(lam) <= k-1)
  double term = std::exp(-lam);
  double sum = term;
  for (int j = 1; j < k; ++j) {
    term *= lam / j;
    sum += term;
  }
  return std::min(sum, 1.0);
}

double cloud_speed_heavy(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "cloud_speed_heavy: alpha must lie in (0,1)");
  return -std::log(alpha);
}

double cloud_speed_light(double alpha, double r) {
  check_alpha_r(alpha, r);
  return -std::log(alpha) / r;
}

double regvar_geometric_sum(double rho, double a, const std::function<double(double)>& h, int n) {
  require(rho > 0.0, "regvar_geometric_sum: rho must be > 0");
  require(a > 0.0 && a < 1.0, "regvar_geometric_sum: a must lie in (0,1)");
  require(n >= 1, "regvar_geometric_sum: n must be >= 1");
  const double denom = h(std::pow(a, -n));
  if (denom == 0.0 || !std::isfinite(denom)) {
    throw std::domain_error("regvar_geometric_sum: h(a^{-n}) is zero or not finite");
  }
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) sum += h(std::pow(a, -i)) / denom;
  return sum;
}

}  // namespace brwx::theory
