#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <functional>
#include <vector>

#include "sofa/rng.hpp"
#include "sofa/sampler.hpp"

using namespace sofa;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Independent closed forms in 50-digit arithmetic.
double cauchy_cdf_oracle(double x, double c, double eps, double lo, double hi) {
  const Big s = sqrt(Big(eps));
  const Big a = atan((Big(lo) - c) / s);
  const Big b = atan((Big(hi) - c) / s);
  return static_cast<double>((atan((Big(x) - c) / s) - a) / (b - a));
}

Big big_phi(const Big& t) { return erfc(-t / sqrt(Big(2))) / 2; }

double gaussian_cdf_oracle(double x, double m, double sigma, double lo, double hi) {
  if (lo > m) {
    // Upper tail form, so a far interval does not cancel to 0/0.
    auto q = [&](double v) { return erfc((Big(v) - m) / sigma / sqrt(Big(2))) / 2; };
    return static_cast<double>((q(lo) - q(x)) / (q(lo) - q(hi)));
  }
  const Big a = big_phi((Big(lo) - m) / sigma);
  const Big b = big_phi((Big(hi) - m) / sigma);
  return static_cast<double>((big_phi((Big(x) - m) / sigma) - a) / (b - a));
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

template <class F>
double integrate(F f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
}

}  // namespace

TEST_CASE("schedules") {
  CHECK(epsilon_schedule(1.0, 0.7, 2.5e-6) == 1.0);
  CHECK(epsilon_schedule(100.0, 0.7, 0.0) == doctest::Approx(std::pow(100.0, -0.7)).epsilon(1e-15));
  CHECK(epsilon_schedule(2e4, 0.7, 2.5e-6) ==
        doctest::Approx(std::pow(2e4, -(0.7 + 0.05))).epsilon(1e-14));
  CHECK(clamp_epsilon(0.0) == kMinEpsilon);
  CHECK(clamp_epsilon(0.5) == 0.5);
  CHECK_THROWS_AS(epsilon_schedule(0.5, 0.7, 0.0), std::invalid_argument);
  CHECK(gaussian_sigma(std::exp(1.0) - 1.0, 3.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(gaussian_sigma(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(validate(KernelVariant{SimplifiedCauchy{0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(KernelVariant{SimplifiedCauchy{0.7, -1.0}}), std::invalid_argument);
  CHECK_NOTHROW(validate(KernelVariant{BasicGaussian{}}));
}

TEST_CASE("gaussian kernel density equals the power form") {
  // (k+1)^(-r^2 / 2R^2) == exp(-r^2 / 2 sigma_k^2)
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double k = 1.0 + 1e5 * uniform01(rng);
    const double radius = 0.1 + 10.0 * uniform01(rng);
    const double r = radius * uniform01(rng);
    const double sigma = gaussian_sigma(k, radius);
    const Big want = pow(Big(k) + 1, -Big(r) * r / (2 * Big(radius) * radius));
    const double got = std::exp(-r * r / (2.0 * sigma * sigma));
    CHECK(static_cast<double>(abs(Big(got) - want) / want) < 1e-12);
  }
}

TEST_CASE("cauchy inversion endpoints and bounds") {
  CHECK(sample_truncated_cauchy(0.3, 0.01, -1.0, 2.0, 0.0) == -1.0);
  CHECK(sample_truncated_cauchy(0.3, 0.01, -1.0, 2.0, 1.0) == 2.0);
  CHECK(sample_truncated_cauchy(0.5, 1e-300, 0.0, 1.0, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(sample_truncated_cauchy(0.0, 0.0, 0.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(sample_truncated_cauchy(0.0, 1.0, 1.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(sample_truncated_cauchy(0.0, 1.0, 0.0, 1.0, 1.5), std::invalid_argument);
  Rng rng(5);
  for (int i = 0; i < 20000; ++i) {
    const double eps = std::pow(10.0, -30.0 * uniform01(rng));
    const double c = -3.0 + 6.0 * uniform01(rng);
    const double x = sample_truncated_cauchy(c, eps, -1.0, 1.0, uniform01_closed(rng));
    REQUIRE(x >= -1.0);
    REQUIRE(x <= 1.0);
  }
}

TEST_CASE("cauchy cdf and inversion against the arctan oracle") {
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    const double lo = -5.0 * uniform01(rng);
    const double hi = lo + 0.1 + 5.0 * uniform01(rng);
    const double c = lo - 1.0 + (hi - lo + 2.0) * uniform01(rng);
    const double eps = std::pow(10.0, -8.0 * uniform01(rng));
    const double x = lo + (hi - lo) * uniform01(rng);
    CHECK(truncated_cauchy_cdf(x, c, eps, lo, hi) ==
          doctest::Approx(cauchy_cdf_oracle(x, c, eps, lo, hi)).epsilon(1e-10));
    const double u = uniform01(rng);
    const double back = sample_truncated_cauchy(c, eps, lo, hi, u);
    CHECK(cauchy_cdf_oracle(back, c, eps, lo, hi) == doctest::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("gaussian cdf against the erfc oracle, including far tails") {
  Rng rng(10);
  for (int i = 0; i < 300; ++i) {
    const double lo = -2.0 * uniform01(rng);
    const double hi = lo + 0.1 + 2.0 * uniform01(rng);
    const double sigma = std::pow(10.0, -2.0 + 2.5 * uniform01(rng));
    const double m = lo - 5.0 * sigma + (hi - lo + 10.0 * sigma) * uniform01(rng);
    const double x = lo + (hi - lo) * uniform01(rng);
    CHECK(truncated_gaussian_cdf(x, m, sigma, lo, hi) ==
          doctest::Approx(gaussian_cdf_oracle(x, m, sigma, lo, hi)).epsilon(1e-9));
  }
  // Interval 20 sigma above the mean.
  CHECK(truncated_gaussian_cdf(20.5, 0.0, 1.0, 20.0, 21.0) ==
        doctest::Approx(gaussian_cdf_oracle(20.5, 0.0, 1.0, 20.0, 21.0)).epsilon(1e-9));
}

TEST_CASE("empirical distributions pass KS at 1e4 samples") {
  Rng params(11);
  for (int set = 0; set < 5; ++set) {
    const double lo = -1.0 - uniform01(params);
    const double hi = 1.0 + uniform01(params);
    const double c = lo + (hi - lo) * uniform01(params);
    const double eps = std::pow(10.0, -4.0 * uniform01(params));
    const double sigma = 0.05 + uniform01(params);
    Rng rng(100 + set);
    std::vector<double> xc(10000), xg(10000);
    for (auto& x : xc) x = sample_truncated_cauchy(c, eps, lo, hi, uniform01_closed(rng));
    for (auto& x : xg) x = sample_truncated_gaussian(c, sigma, lo, hi, rng);
    // 1.63 / sqrt(n) is the 1% critical value.
    CHECK(ks_statistic(xc, [&](double x) { return cauchy_cdf_oracle(x, c, eps, lo, hi); }) < 0.0163);
    CHECK(ks_statistic(xg, [&](double x) { return gaussian_cdf_oracle(x, c, sigma, lo, hi); }) <
          0.0163);
  }
}

TEST_CASE("far-tail gaussian draws stay in range and follow the tail law") {
  Rng rng(12);
  std::vector<double> xs(5000);
  for (auto& x : xs) {
    x = sample_truncated_gaussian(0.0, 0.01, 0.5, 0.6, rng);
    REQUIRE(x >= 0.5);
    REQUIRE(x <= 0.6);
  }
  // Conditioned on x > 50 sigma, x - 0.5 is close to Exponential(rate 5000).
  double mean = 0.0;
  for (double x : xs) mean += (x - 0.5) / static_cast<double>(xs.size());
  CHECK(mean == doctest::Approx(1.0 / 5000.0).epsilon(0.05));
}

TEST_CASE("pdfs integrate to one and moments match quadrature") {
  struct Case {
    double c, s, lo, hi;
  };
  for (const Case& p : {Case{0.2, 0.3, -1.0, 1.0}, Case{-2.0, 0.5, -1.0, 0.5},
                        Case{0.0, 1e-3, -1.0, 1.0}, Case{3.0, 0.05, 0.0, 1.0}}) {
    CAPTURE(p.c);
    CAPTURE(p.s);
    for (int kind = 0; kind < 2; ++kind) {
      const double eps = p.s * p.s;
      auto pdf = [&](double x) {
        return kind == 0 ? truncated_cauchy_pdf(x, p.c, eps, p.lo, p.hi)
                         : truncated_gaussian_pdf(x, p.c, p.s, p.lo, p.hi);
      };
      // Split at the center so the quadrature sees the peak.
      const double mid = std::clamp(p.c, p.lo, p.hi);
      auto piecewise = [&](auto g) {
        double acc = 0.0;
        if (mid > p.lo) acc += integrate(g, p.lo, mid);
        if (mid < p.hi) acc += integrate(g, mid, p.hi);
        return acc;
      };
      const double mass = piecewise(pdf);
      const double mean = piecewise([&](double x) { return x * pdf(x); });
      const double second = piecewise([&](double x) { return x * x * pdf(x); });
      const Moments m = kind == 0 ? truncated_cauchy_moments(p.c, eps, p.lo, p.hi)
                                  : truncated_gaussian_moments(p.c, p.s, p.lo, p.hi);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(m.mean == doctest::Approx(mean).epsilon(1e-8));
      CHECK(m.variance == doctest::Approx(second - mean * mean).epsilon(1e-7));
    }
  }
}
