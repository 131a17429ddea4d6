#pragma once

#include <cstdint>
#include <span>

#include "brwx/rng.hpp"

namespace brwx {

// Offspring law Z = floor(U^{-1/alpha}), U uniform on (0,1).
//
// P(Z >= k) = k^{-alpha} exactly for integer k >= 1, so the moment index is
// alpha in (0,1), the mean is infinite and extinction is impossible
// (Z >= 1 almost surely).
class ProgenyLaw {
 public:
  explicit ProgenyLaw(double alpha);

  double alpha() const noexcept { return alpha_; }

  // Inverse-transform draw; deterministic in u. The result is an exact
  // integer as long as it is representable (far beyond any usable cap).
  double sample(double u) const;
  double sample(RngStream& rng) const { return sample(rng.uniform()); }

  // P(Z >= k) = k^{-alpha}, exact. Requires k >= 1.
  double tail(std::uint64_t k) const;

  // Checks x^{-g(x)} <= x^alpha P(Z > x) <= x^{g(x)} with
  // g(x) = c/(1 + log x) on a grid of points >= 1.
  bool envelope_ok(double c, std::span<const double> grid) const;

 private:
  double alpha_;
};

enum class DispKind { pareto, weibull, gaussian, exponential };

// Displacement law. Four variants:
//   pareto(beta):     tail(x) = x^{-beta} on x >= 1 (regularly varying)
//   weibull(r, c):    hazard K(x) = c x^r on x >= 0
//   gaussian():       standard normal (hazard index 2)
//   exponential(rate): hazard rate * x (hazard index 1)
//
// K(x) = -log(tail(x)) and L = inverse_hazard is its left-continuous
// inverse; for the heavy variant C_n scaling comes from quantile_from_tail.
class DisplacementLaw {
 public:
  static DisplacementLaw pareto(double beta);
  static DisplacementLaw weibull(double r, double c);
  static DisplacementLaw gaussian();
  static DisplacementLaw exponential(double rate);

  DispKind kind() const noexcept { return kind_; }
  bool heavy_tailed() const noexcept { return kind_ == DispKind::pareto; }

  // Regular-variation index: beta for pareto, r for the hazard of the
  // light-tailed variants (gaussian -> 2, exponential -> 1).
  double rv_index() const noexcept;

  double cdf(double x) const;
  double tail(double x) const;

  // Left-continuous inverse of the cdf; p in (0,1).
  double quantile(double p) const;

  // x with tail(x) = q; exact algebra per variant (pareto: q^{-1/beta}).
  double quantile_from_tail(double q) const;

  // K(x) = -log(tail(x)). Throws overflow_error when the tail underflows.
  double hazard(double x) const;

  // L(u) = inf{x : K(x) > u}, u >= 0. For the gaussian variant this is a
  // Newton-polished inversion accurate to 1e-10 absolute.
  double inverse_hazard(double u) const;

  double sample(double u) const { return quantile(u); }
  double sample(RngStream& rng) const { return quantile(rng.uniform()); }

 private:
  DisplacementLaw(DispKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  DispKind kind_;
  double a_;  // beta (pareto), r (weibull)
  double b_;  // c (weibull), rate (exponential)
};

// One draw of the standard positive alpha-stable law, alpha in (0,1),
// normalized so the Laplace transform is exp(-lambda^alpha). Kanter's
// representation: deterministic in the two supplied uniforms.
double sample_positive_stable(double alpha, double u1, double u2);

inline double sample_positive_stable(double alpha, RngStream& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return sample_positive_stable(alpha, u1, u2);
}

namespace detail {
// Standard normal quantile (AS 241), |error| < 1e-13 over (0,1).
double normal_quantile(double p);
// x with -log(Phi_bar(x)) = u, for u >= 0.
double normal_inverse_hazard(double u);
}  // namespace detail

}  // namespace brwx
