#pragma once

// Per-coordinate proposal kernels.
//
// BasicGaussian: the density (k+1)^(-r^2 / 2R^2) is separable and equals a
// Gaussian with sigma_k = R / sqrt(ln(k+1)); each coordinate is drawn from
// that Gaussian truncated to its interval.
//
// SimplifiedCauchy: each coordinate has density A / (eps + (x - c)^2) on its
// interval, i.e. a Cauchy law with scale sqrt(eps), drawn by inverting the
// normalized arctan CDF. eps follows eps(k) = k^-(a + b k).

#include <variant>

#include "sofa/rng.hpp"

namespace sofa {

struct BasicGaussian {};

struct SimplifiedCauchy {
  double a = 0.7;
  double b = 2.5e-6;
};

using KernelVariant = std::variant<BasicGaussian, SimplifiedCauchy>;

// Throws std::invalid_argument unless a > 0 and b >= 0 (both finite).
void validate(const KernelVariant& kernel);

// Smallest eps handed to the Cauchy inversion.
inline constexpr double kMinEpsilon = 1e-300;

// R / sqrt(ln(k + 1)). Throws std::invalid_argument if k < 1 or R <= 0.
double gaussian_sigma(double k, double radius);

// k^-(a + b k). Unclamped; throws std::invalid_argument if k < 1.
double epsilon_schedule(double k, double a, double b);

// max(eps, kMinEpsilon)
double clamp_epsilon(double eps);

// Gaussian(mean, sigma) conditioned on [lo, hi]. The mean may lie outside the
// interval. Exact inversion of the tail-oriented CDF; falls back to
// rejection sampling when the interval sits beyond ~30 sigma from the mean.
// Throws std::invalid_argument if lo >= hi or sigma is not positive.
double sample_truncated_gaussian(double mean, double sigma, double lo, double hi, Rng& rng);

// Inverse-CDF draw of the truncated Cauchy kernel from a uniform variate
// u in [0, 1]. Result is always in [lo, hi]; u = 0 gives lo, u = 1 gives hi.
// Throws std::invalid_argument if lo >= hi, eps <= 0, or u outside [0, 1].
double sample_truncated_cauchy(double center, double eps, double lo, double hi, double u);

// Normalized densities, CDFs and moments of the truncated kernels on [lo, hi].
// Used by the proposal-density diagnostics.
double truncated_gaussian_pdf(double x, double mean, double sigma, double lo, double hi);
double truncated_gaussian_cdf(double x, double mean, double sigma, double lo, double hi);
double truncated_cauchy_pdf(double x, double center, double eps, double lo, double hi);
double truncated_cauchy_cdf(double x, double center, double eps, double lo, double hi);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments truncated_gaussian_moments(double mean, double sigma, double lo, double hi);
Moments truncated_cauchy_moments(double center, double eps, double lo, double hi);

}  // namespace sofa
