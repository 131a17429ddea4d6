#pragma once

#include <functional>

namespace brwx::theory {

// Limit of M_n / L(log Z_n): (1 - alpha^{1/(r-1)})^{1/r - 1} for r > 1,
// and 1 for 0 < r <= 1 (r = 1 is routed to the r <= 1 branch).
double light_tail_constant(double alpha, double r);

// Finite-depth lower-bound constants f_k, with f_0 = 1 and
// f_k^{r/(r-1)} = sum_{i=0}^{k} alpha^{i/(r-1)} for r > 1; f_k = 1 for r <= 1.
double f_closed(double alpha, double r, int k);

// Same sequence through the recursion
// f_k = (alpha^{k/(r-1)} + f_{k-1}^{r/(r-1)})^{1-1/r} (r > 1),
// f_k = max(alpha^{k/r}, f_{k-1}) (r <= 1).
double f_recursive(double alpha, double r, int k);

// Grid maximization of
//   h_k(d_0..d_k) = sum_i (alpha^i d_i prod_{q>i} (1-d_q))^{1/r}
// with each d on {step, 2 step, ..., 1-step}. The supremum factorizes one
// coordinate at a time, so this is an exact dynamic program over the grid,
// not a (1/step)^k enumeration.
double f_bruteforce_oracle(double alpha, double r, int k, double grid_step);

// Finite-depth upper-bound constants, k >= 1:
// (sum_{i=1}^{k} alpha^{-i/(r-1)})^{1-1/r} for r > 1, alpha^{-k/r} for r <= 1.
double alpha_k_closed(double alpha, double r, int k);

// Same sequence via alpha_1 = alpha^{-1/r} and
// alpha_{k+1} = alpha^{-1/r} (alpha_k^{r/(r-1)} + 1)^{(r-1)/r} (r > 1),
// alpha_{k+1} = alpha^{-1/r} alpha_k (r <= 1).
double alpha_k_recursive(double alpha, double r, int k);

// [(1 - alpha^{1/(r-1)})_+^{1/r-1} v 1] * w^{1/r}, with x_+ the
// non-negative part; total in (alpha, r, w) for r != 1, and r = 1 uses the
// r <= 1 value 1.
double deterministic_limit_factor(double alpha, double r, double w);

// Limit law of the k-th scaled maximum:
// exp(-x^{-beta}) sum_{j=0}^{k-1} x^{-beta j} / j!.
double frechet_kth_cdf(double beta, int k, double x);

// Growth exponents of the rightmost particle: -log(alpha) on the
// log-log scale (regularly varying case) and -log(alpha)/r on the log
// scale (light-tailed case).
double cloud_speed_heavy(double alpha);
double cloud_speed_light(double alpha, double r);

// Partial-sum ratio sum_{i=1}^{n} h(a^{-i}) / h(a^{-n}); for h regularly
// varying with index rho > 0 this converges to 1/(1 - a^rho).
double regvar_geometric_sum(double rho, double a, const std::function<double(double)>& h, int n);

}  // namespace brwx::theory
