#include "brwx/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace brwx {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// ProgenyLaw

ProgenyLaw::ProgenyLaw(double alpha) : alpha_(alpha) {
  require(alpha > 0.0 && alpha < 1.0, "ProgenyLaw: alpha must lie in (0,1)");
}

double ProgenyLaw::sample(double u) const {
  require(u > 0.0 && u < 1.0, "ProgenyLaw::sample: u must lie in (0,1)");
  return std::floor(std::pow(u, -1.0 / alpha_));
}

double ProgenyLaw::tail(std::uint64_t k) const {
  require(k >= 1, "ProgenyLaw::tail: k must be >= 1");
  return std::pow(static_cast<double>(k), -alpha_);
}

bool ProgenyLaw::envelope_ok(double c, std::span<const double> grid) const {
  for (double x : grid) {
    if (x < 1.0) return false;
    // P(Z > x) = (floor(x)+1)^{-alpha}; compare exponents in log space.
    const double lx = std::log(x);
    const double lhs = alpha_ * lx - alpha_ * std::log(std::floor(x) + 1.0);
    const double g = c / (1.0 + lx) * lx;
    if (lhs < -g || lhs > g) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Normal distribution helpers

namespace detail {

// Wichura's AS 241 rational approximations (PPND16).
double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    x = num / den;
  }
  return (q < 0.0) ? -x : x;
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.9189385332046727;

double normal_log_tail(double x) {
  // log Phi_bar(x) via erfc for moderate x, asymptotic series beyond the
  // erfc underflow point (x ~ 37.5).
  if (x < 30.0) {
    const double t = 0.5 * std::erfc(x / kSqrt2);
    if (t > 0.0) return std::log(t);
  }
  const double x2 = 1.0 / (x * x);
  const double series = 1.0 + x2 * (-1.0 + x2 * (3.0 + x2 * (-15.0 + x2 * 105.0)));
  return -0.5 * x * x - std::log(x) - kLogSqrt2Pi + std::log(series);
}

double normal_hazard_rate(double x) {
  // phi(x) / Phi_bar(x)
  const double log_phi = -0.5 * x * x - kLogSqrt2Pi;
  return std::exp(log_phi - normal_log_tail(x));
}

}  // namespace

double normal_inverse_hazard(double u) {
  require(u >= 0.0, "normal_inverse_hazard: u must be >= 0");
  if (u == 0.0) return -HUGE_VAL;  // K(x) -> 0 only as x -> -inf
  // Initial guess from AS 241 evaluated at tail probability e^{-u}:
  // r = sqrt(-log(e^{-u})) = sqrt(u), reusing the tail branches directly.
  double x;
  if (u > std::log(2.0)) {
    double r = std::sqrt(u);
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
    } else {
      r -= 5.0;
      x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
    }
  } else {
    x = normal_quantile(1.0 - std::exp(-u));
  }
  // Newton on f(x) = log Phi_bar(x) + u; f'(x) = -hazard rate.
  for (int it = 0; it < 4; ++it) {
    const double f = normal_log_tail(x) + u;
    const double step = f / normal_hazard_rate(x);
    x += step;
    if (std::fabs(step) < 1e-12 * (1.0 + std::fabs(x))) break;
  }
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DisplacementLaw

DisplacementLaw DisplacementLaw::pareto(double beta) {
  require(beta > 0.0, "DisplacementLaw::pareto: beta must be > 0");
  return DisplacementLaw(DispKind::pareto, beta, 0.0);
}

DisplacementLaw DisplacementLaw::weibull(double r, double c) {
  require(r > 0.0, "DisplacementLaw::weibull: r must be > 0");
  require(c > 0.0, "DisplacementLaw::weibull: c must be > 0");
  return DisplacementLaw(DispKind::weibull, r, c);
}

DisplacementLaw DisplacementLaw::gaussian() {
  return DisplacementLaw(DispKind::gaussian, 2.0, 0.0);
}

DisplacementLaw DisplacementLaw::exponential(double rate) {
  require(rate > 0.0, "DisplacementLaw::exponential: rate must be > 0");
  return DisplacementLaw(DispKind::exponential, 1.0, rate);
}

double DisplacementLaw::rv_index() const noexcept { return a_; }

double DisplacementLaw::cdf(double x) const {
  switch (kind_) {
    case DispKind::pareto:
      return x < 1.0 ? 0.0 : 1.0 - std::pow(x, -a_);
    case DispKind::weibull:
      return x <= 0.0 ? 0.0 : -std::expm1(-b_ * std::pow(x, a_));
    case DispKind::gaussian:
      return 0.5 * std::erfc(-x / 1.4142135623730951);
    case DispKind::exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-b_ * x);
  }
  return 0.0;
}

double DisplacementLaw::tail(double x) const {
  switch (kind_) {
    case DispKind::pareto:
      return x < 1.0 ? 1.0 : std::pow(x, -a_);
    case DispKind::weibull:
      return x <= 0.0 ? 1.0 : std::exp(-b_ * std::pow(x, a_));
    case DispKind::gaussian:
      return 0.5 * std::erfc(x / 1.4142135623730951);
    case DispKind::exponential:
      return x <= 0.0 ? 1.0 : std::exp(-b_ * x);
  }
  return 0.0;
}

double DisplacementLaw::quantile(double p) const {
  require(p > 0.0 && p < 1.0, "DisplacementLaw::quantile: p must lie in (0,1)");
  switch (kind_) {
    case DispKind::pareto:
      return std::exp(-std::log1p(-p) / a_);
    case DispKind::weibull:
      return std::pow(-std::log1p(-p) / b_, 1.0 / a_);
    case DispKind::gaussian:
      return detail::normal_quantile(p);
    case DispKind::exponential:
      return -std::log1p(-p) / b_;
  }
  return 0.0;
}

double DisplacementLaw::quantile_from_tail(double q) const {
  require(q > 0.0 && q < 1.0, "DisplacementLaw::quantile_from_tail: q must lie in (0,1)");
  switch (kind_) {
    case DispKind::pareto:
      return std::pow(q, -1.0 / a_);
    case DispKind::weibull:
      return std::pow(-std::log(q) / b_, 1.0 / a_);
    case DispKind::gaussian:
      return detail::normal_inverse_hazard(-std::log(q));
    case DispKind::exponential:
      return -std::log(q) / b_;
  }
  return 0.0;
}

double DisplacementLaw::hazard(double x) const {
  const double t = tail(x);
  if (t == 0.0) throw std::overflow_error("DisplacementLaw::hazard: tail underflows to 0");
  return -std::log(t);
}

double DisplacementLaw::inverse_hazard(double u) const {
  require(u >= 0.0, "DisplacementLaw::inverse_hazard: u must be >= 0");
  switch (kind_) {
    case DispKind::pareto:
      return std::exp(u / a_);
    case DispKind::weibull:
      return std::pow(u / b_, 1.0 / a_);
    case DispKind::gaussian:
      return detail::normal_inverse_hazard(u);
    case DispKind::exponential:
      return u / b_;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Positive stable sampler

double sample_positive_stable(double alpha, double u1, double u2) {
  require(alpha > 0.0 && alpha < 1.0, "sample_positive_stable: alpha must lie in (0,1)");
  require(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0,
          "sample_positive_stable: uniforms must lie in (0,1)");
  // Kanter: S = (A(pi U)/E)^{(1-alpha)/alpha} with
  // A(phi) = sin((1-alpha)phi) sin(alpha phi)^{alpha/(1-alpha)} / sin(phi)^{1/(1-alpha)}.
  const double phi = kPi * u1;
  const double log_e = std::log(-std::log(u2));
  const double log_a = std::log(std::sin((1.0 - alpha) * phi)) +
                       alpha / (1.0 - alpha) * std::log(std::sin(alpha * phi)) -
                       1.0 / (1.0 - alpha) * std::log(std::sin(phi));
  return std::exp((1.0 - alpha) / alpha * (log_a - log_e));
}

}  // namespace brwx
