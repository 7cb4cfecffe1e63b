#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "sofa/dvm.hpp"

namespace sofa::dvm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSymmetryTol = 1e-12;

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Young:
      return "Y";
    case Stage::Juvenile:
      return "J";
    case Stage::Adult:
      return "A";
  }
  return "?";
}

FourierTrajectory::FourierTrajectory(std::size_t harmonics, std::vector<double> flat)
    : harmonics_(harmonics), coeffs_(std::move(flat)) {
  if (coeffs_.size() != kStageCount * terms()) {
    throw std::invalid_argument("Fourier trajectory needs 3 (2N + 1) coefficients");
  }
}

std::span<const double> FourierTrajectory::stage(Stage s) const {
  const std::size_t n = terms();
  return std::span<const double>(coeffs_).subspan(static_cast<std::size_t>(s) * n, n);
}

double eval_fourier(std::span<const double> c, double t) {
  if (c.size() % 2 == 0) throw std::invalid_argument("Fourier block must have odd length");
  double acc = c[0];
  for (std::size_t m = 1; 2 * m < c.size(); ++m) {
    const double arg = kTwoPi * static_cast<double>(m) * t;
    acc += c[2 * m - 1] * std::sin(arg) + c[2 * m] * std::cos(arg);
  }
  return acc;
}

double eval_fourier(const FourierTrajectory& traj, Stage stage, double t) {
  return eval_fourier(traj.stage(stage), t);
}

double eval_fourier_slope(std::span<const double> c, double t) {
  if (c.size() % 2 == 0) throw std::invalid_argument("Fourier block must have odd length");
  double acc = 0.0;
  for (std::size_t m = 1; 2 * m < c.size(); ++m) {
    const double w = kTwoPi * static_cast<double>(m);
    acc += w * (c[2 * m - 1] * std::cos(w * t) - c[2 * m] * std::sin(w * t));
  }
  return acc;
}

PiecewiseStage PiecewiseStage::symmetric(double shallow, double deep, double t0, double t1) {
  PiecewiseStage s{shallow, deep, t0, t1, 1.0 - t1, 1.0 - t0};
  s.validate();
  return s;
}

void PiecewiseStage::validate() const {
  const bool finite = std::isfinite(shallow) && std::isfinite(deep) && std::isfinite(t0) &&
                      std::isfinite(t1) && std::isfinite(t2) && std::isfinite(t3);
  if (!finite) throw std::invalid_argument("piecewise trajectory has non-finite parameters");
  if (!(0.0 <= t0 && t0 < t1 && t1 < t2 && t2 < t3 && t3 <= 1.0)) {
    throw std::invalid_argument("piecewise phase times must satisfy 0 <= t0 < t1 < t2 < t3 <= 1");
  }
  if (!(deep >= shallow && shallow >= 0.0)) {
    throw std::invalid_argument("piecewise depths must satisfy deep >= shallow >= 0");
  }
  if (std::abs(t2 - (1.0 - t1)) > kSymmetryTol || std::abs(t3 - (1.0 - t0)) > kSymmetryTol) {
    throw std::invalid_argument("piecewise trajectory must be symmetric about t = 0.5");
  }
}

double PiecewiseStage::at(double t) const {
  if (t < t0) return shallow;
  if (t < t1) return shallow + descent_speed() * (t - t0);
  if (t <= t2) return deep;
  if (t < t3) return deep + ascent_speed() * (t - t2);
  return shallow;
}

double PiecewiseStage::time_average() const {
  // Trapezoids on each piece.
  return shallow * t0 + 0.5 * (shallow + deep) * (t1 - t0) + deep * (t2 - t1) +
         0.5 * (deep + shallow) * (t3 - t2) + shallow * (1.0 - t3);
}

double eval_piecewise(const PiecewiseTrajectory& traj, Stage stage, double t) {
  return traj.stage(stage).at(t);
}

FourierTrajectory fourier_of_piecewise(const PiecewiseTrajectory& traj, std::size_t harmonics) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const std::size_t n = 2 * harmonics + 1;
  // Panels per piece so each panel spans at most a few oscillations.
  const std::size_t panels = 1 + harmonics / 2;
  std::vector<double> flat(kStageCount * n, 0.0);
  for (std::size_t s = 0; s < kStageCount; ++s) {
    const PiecewiseStage& p = traj.stages[s];
    p.validate();
    const double breaks[] = {0.0, p.t0, p.t1, p.t2, p.t3, 1.0};
    double* out = flat.data() + s * n;
    for (int piece = 0; piece < 5; ++piece) {
      const double a = breaks[piece];
      const double b = breaks[piece + 1];
      if (!(b > a)) continue;
      const double h = (b - a) / static_cast<double>(panels);
      for (std::size_t q = 0; q < panels; ++q) {
        const double lo = a + h * static_cast<double>(q);
        const double hi = q + 1 == panels ? b : lo + h;
        // Each coefficient is a separate integral; the rule is exact enough
        // that integrating term by term costs nothing in accuracy.
        out[0] += Rule::integrate([&](double t) { return p.at(t); }, lo, hi);
        for (std::size_t m = 1; m <= harmonics; ++m) {
          const double w = kTwoPi * static_cast<double>(m);
          out[2 * m - 1] += 2.0 * Rule::integrate([&](double t) { return p.at(t) * std::sin(w * t); }, lo, hi);
          out[2 * m] += 2.0 * Rule::integrate([&](double t) { return p.at(t) * std::cos(w * t); }, lo, hi);
        }
      }
    }
  }
  return FourierTrajectory(harmonics, std::move(flat));
}

SearchDomain domain_around(const FourierTrajectory& start, double constant_width,
                           double harmonic_width, double decay) {
  if (!(constant_width > 0.0) || !(harmonic_width > 0.0) || !(decay >= 0.0)) {
    throw std::invalid_argument("domain widths must be positive and decay non-negative");
  }
  const std::size_t n = start.terms();
  std::vector<double> widths(start.flat().size());
  for (std::size_t s = 0; s < kStageCount; ++s) {
    widths[s * n] = constant_width;
    for (std::size_t m = 1; m <= start.harmonics(); ++m) {
      const double w = harmonic_width / std::pow(static_cast<double>(m), decay);
      widths[s * n + 2 * m - 1] = w;
      widths[s * n + 2 * m] = w;
    }
  }
  return SearchDomain(std::vector<double>(start.flat().begin(), start.flat().end()),
                      std::move(widths));
}

}  // namespace sofa::dvm
