#include "sofa/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace sofa {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

// Beyond this many sigmas the upper-tail CDF is handled through the Mills
// ratio (pdf/cdf) or by rejection (sampling).
constexpr double kFarTail = 20.0;
constexpr double kRejectionTail = 30.0;

double phi(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }
double lower_cdf(double t) { return 0.5 * std::erfc(-t / kSqrt2); }  // P(T <= t)
double upper_cdf(double t) { return 0.5 * std::erfc(t / kSqrt2); }   // P(T > t)

// Mills ratio Q(t) / phi(t) for large t, continued fraction evaluated
// backwards. Accurate to rounding for t >= kFarTail.
double mills_ratio(double t) {
  if (std::isinf(t)) return 0.0;
  double acc = t;
  for (int k = 60; k >= 1; --k) acc = t + k / acc;
  return 1.0 / acc;
}

void check_interval(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("kernel interval requires finite lo < hi");
  }
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || std::isinf(sigma)) {
    throw std::invalid_argument("gaussian kernel sigma must be positive and finite");
  }
}

// Standard normal restricted to [alpha, beta] with alpha >= 0 (upper side).
// Returns a draw by inverting Q on that interval.
double upper_side_inverse(double alpha, double beta, double u) {
  const double qa = upper_cdf(alpha);
  const double qb = upper_cdf(beta);
  const double q = qa - u * (qa - qb);
  if (!(q > std::numeric_limits<double>::min())) return beta;
  return kSqrt2 * boost::math::erfc_inv(2.0 * q);
}

// Rejection sampler for [alpha, beta] with alpha >= kRejectionTail.
double far_tail_rejection(double alpha, double beta, Rng& rng) {
  if (beta - alpha > 2.0 / alpha) {
    const double rate = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
    for (;;) {
      const double z = alpha - std::log1p(-uniform01(rng)) / rate;
      if (z > beta) continue;
      const double d = z - rate;
      if (uniform01(rng) <= std::exp(-0.5 * d * d)) return z;
    }
  }
  for (;;) {
    const double z = alpha + uniform01(rng) * (beta - alpha);
    if (uniform01(rng) <= std::exp(0.5 * (alpha - z) * (alpha + z))) return z;
  }
}

// Standard normal on [alpha, beta] (any placement relative to 0).
double standard_truncated_draw(double alpha, double beta, Rng& rng) {
  if (beta <= 0.0) return -standard_truncated_draw(-beta, -alpha, rng);
  if (alpha >= kRejectionTail) return far_tail_rejection(alpha, beta, rng);
  const double u = uniform01(rng);
  if (alpha >= 0.0) return upper_side_inverse(alpha, beta, u);

  // Interval straddles the mean: invert from whichever tail is closer.
  const double pa = lower_cdf(alpha);
  const double qb = upper_cdf(beta);
  const double mass = 1.0 - pa - qb;
  const double p = pa + u * mass;
  if (p <= 0.5) {
    if (!(p > std::numeric_limits<double>::min())) return alpha;
    return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
  }
  const double q = qb + (1.0 - u) * mass;
  if (!(q > std::numeric_limits<double>::min())) return beta;
  return kSqrt2 * boost::math::erfc_inv(2.0 * q);
}

// Standardized truncated normal helpers, oriented so the interval is never
// entirely below zero.
struct StdInterval {
  double alpha;
  double beta;
  bool mirrored;
};

StdInterval orient(double mean, double sigma, double lo, double hi) {
  const double alpha = (lo - mean) / sigma;
  const double beta = (hi - mean) / sigma;
  if (beta <= 0.0) return {-beta, -alpha, true};
  return {alpha, beta, false};
}

// P(alpha <= T <= t) / P(alpha <= T <= beta) for standard T, alpha <= t <= beta.
double std_truncated_cdf(double t, double alpha, double beta) {
  if (alpha >= kFarTail) {
    const double denom = mills_ratio(alpha) - std::exp(-0.5 * (beta - alpha) * (beta + alpha)) *
                                                  mills_ratio(beta);
    const double num =
        mills_ratio(alpha) - std::exp(-0.5 * (t - alpha) * (t + alpha)) * mills_ratio(t);
    return num / denom;
  }
  if (alpha >= 0.0) {
    const double qa = upper_cdf(alpha);
    return (qa - upper_cdf(t)) / (qa - upper_cdf(beta));
  }
  const double pa = lower_cdf(alpha);
  return (lower_cdf(t) - pa) / (lower_cdf(beta) - pa);
}

double std_truncated_pdf(double t, double alpha, double beta) {
  if (alpha >= kFarTail) {
    const double denom = mills_ratio(alpha) - std::exp(-0.5 * (beta - alpha) * (beta + alpha)) *
                                                  mills_ratio(beta);
    return std::exp(-0.5 * (t - alpha) * (t + alpha)) / denom;
  }
  const double mass = alpha >= 0.0 ? upper_cdf(alpha) - upper_cdf(beta)
                                   : lower_cdf(beta) - lower_cdf(alpha);
  return phi(t) / mass;
}

double log1p_square(double u) {
  const double a = std::abs(u);
  if (a <= 1.0) return std::log1p(a * a);
  return 2.0 * std::log(a) + std::log1p(1.0 / (a * a));
}

}  // namespace

void validate(const KernelVariant& kernel) {
  if (const auto* cauchy = std::get_if<SimplifiedCauchy>(&kernel)) {
    if (!(cauchy->a > 0.0) || !std::isfinite(cauchy->a)) {
      throw std::invalid_argument("epsilon schedule parameter a must be positive");
    }
    if (!(cauchy->b >= 0.0) || !std::isfinite(cauchy->b)) {
      throw std::invalid_argument("epsilon schedule parameter b must be non-negative");
    }
  }
}

double gaussian_sigma(double k, double radius) {
  if (!(k >= 1.0)) throw std::invalid_argument("gaussian_sigma requires k >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("gaussian_sigma requires R > 0");
  return radius / std::sqrt(std::log1p(k));
}

double epsilon_schedule(double k, double a, double b) {
  if (!(k >= 1.0)) throw std::invalid_argument("epsilon_schedule requires k >= 1");
  return std::exp(-(a + b * k) * std::log(k));
}

double clamp_epsilon(double eps) { return std::max(eps, kMinEpsilon); }

double sample_truncated_gaussian(double mean, double sigma, double lo, double hi, Rng& rng) {
  check_interval(lo, hi);
  check_sigma(sigma);
  const double t = standard_truncated_draw((lo - mean) / sigma, (hi - mean) / sigma, rng);
  return std::clamp(mean + sigma * t, lo, hi);
}

double sample_truncated_cauchy(double center, double eps, double lo, double hi, double u) {
  check_interval(lo, hi);
  if (!(eps > 0.0)) throw std::invalid_argument("cauchy kernel requires eps > 0");
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("uniform variate outside [0, 1]");
  if (u == 0.0) return lo;
  if (u == 1.0) return hi;
  const double s = std::sqrt(eps);
  const double theta_lo = std::atan((lo - center) / s);
  const double theta_hi = std::atan((hi - center) / s);
  const double x = center + s * std::tan(theta_lo + u * (theta_hi - theta_lo));
  return std::clamp(x, lo, hi);
}

double truncated_gaussian_pdf(double x, double mean, double sigma, double lo, double hi) {
  check_interval(lo, hi);
  check_sigma(sigma);
  if (x < lo || x > hi) return 0.0;
  const StdInterval iv = orient(mean, sigma, lo, hi);
  const double t = (iv.mirrored ? mean - x : x - mean) / sigma;
  return std_truncated_pdf(t, iv.alpha, iv.beta) / sigma;
}

double truncated_gaussian_cdf(double x, double mean, double sigma, double lo, double hi) {
  check_interval(lo, hi);
  check_sigma(sigma);
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const StdInterval iv = orient(mean, sigma, lo, hi);
  if (!iv.mirrored) return std_truncated_cdf((x - mean) / sigma, iv.alpha, iv.beta);
  return 1.0 - std_truncated_cdf((mean - x) / sigma, iv.alpha, iv.beta);
}

double truncated_cauchy_pdf(double x, double center, double eps, double lo, double hi) {
  check_interval(lo, hi);
  if (!(eps > 0.0)) throw std::invalid_argument("cauchy kernel requires eps > 0");
  if (x < lo || x > hi) return 0.0;
  const double s = std::sqrt(eps);
  const double z = std::atan((hi - center) / s) - std::atan((lo - center) / s);
  const double d = x - center;
  return s / (z * (eps + d * d));
}

double truncated_cauchy_cdf(double x, double center, double eps, double lo, double hi) {
  check_interval(lo, hi);
  if (!(eps > 0.0)) throw std::invalid_argument("cauchy kernel requires eps > 0");
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double s = std::sqrt(eps);
  const double theta_lo = std::atan((lo - center) / s);
  const double theta_hi = std::atan((hi - center) / s);
  return (std::atan((x - center) / s) - theta_lo) / (theta_hi - theta_lo);
}

Moments truncated_gaussian_moments(double mean, double sigma, double lo, double hi) {
  check_interval(lo, hi);
  check_sigma(sigma);
  const StdInterval iv = orient(mean, sigma, lo, hi);
  const double a = iv.alpha;
  const double b = iv.beta;
  double m1 = 0.0;
  double m2 = 0.0;  // E[T^2]
  if (a >= kFarTail) {
    const double ratio = std::exp(-0.5 * (b - a) * (b + a));
    const double denom = mills_ratio(a) - ratio * mills_ratio(b);
    m1 = (1.0 - ratio) / denom;
    m2 = 1.0 + (a - (std::isinf(b) ? 0.0 : b * ratio)) / denom;
  } else {
    const double mass = a >= 0.0 ? upper_cdf(a) - upper_cdf(b) : lower_cdf(b) - lower_cdf(a);
    const double pa = phi(a);
    const double pb = phi(b);
    m1 = (pa - pb) / mass;
    const double bpb = std::isinf(b) ? 0.0 : b * pb;
    const double apa = std::isinf(a) ? 0.0 : a * pa;
    m2 = 1.0 + (apa - bpb) / mass;
  }
  const double var_t = std::max(m2 - m1 * m1, 0.0);
  const double mean_t = iv.mirrored ? -m1 : m1;
  return {mean + sigma * mean_t, sigma * sigma * var_t};
}

Moments truncated_cauchy_moments(double center, double eps, double lo, double hi) {
  check_interval(lo, hi);
  if (!(eps > 0.0)) throw std::invalid_argument("cauchy kernel requires eps > 0");
  const double s = std::sqrt(eps);
  const double u_lo = (lo - center) / s;
  const double u_hi = (hi - center) / s;
  const double z = std::atan(u_hi) - std::atan(u_lo);
  const double shift = s * (log1p_square(u_hi) - log1p_square(u_lo)) / (2.0 * z);
  // E[(x - c)^2] = s (hi - lo) / z - s^2
  const double second = s * (hi - lo) / z - eps;
  return {center + shift, std::max(second - shift * shift, 0.0)};
}

}  // namespace sofa
