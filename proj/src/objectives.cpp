#include "sofa/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sofa {
namespace {

// Keeps far-field values strictly positive where exp() underflows.
constexpr double kTinyFitness = 1e-300;

double squared_distance(std::span<const double> z, const std::vector<double>& c) {
  if (z.size() > c.size()) throw std::invalid_argument("point longer than objective center");
  double acc = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double x = j < z.size() ? z[j] : 0.0;
    acc += (x - c[j]) * (x - c[j]);
  }
  return acc;
}

void check_width(double width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("bump width must be positive");
  }
}

FitnessOutcome positive(double value) {
  if (std::isnan(value)) return FitnessOutcome::infeasible(InfeasibleReason::NonFinite);
  return FitnessOutcome::feasible(std::max(value, kTinyFitness));
}

}  // namespace

std::string_view to_string(InfeasibleReason reason) {
  switch (reason) {
    case InfeasibleReason::NonPositiveEnergy:
      return "non-positive net energy";
    case InfeasibleReason::NoEigenvalueBracket:
      return "no eigenvalue in bracket";
    case InfeasibleReason::InvalidRates:
      return "invalid stage rates";
    case InfeasibleReason::NonFinite:
      return "non-finite value";
    case InfeasibleReason::Other:
      return "other";
  }
  return "other";
}

FitnessOutcome FitnessOutcome::feasible(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("feasible fitness must be positive and finite, got " +
                                std::to_string(value));
  }
  return FitnessOutcome(value);
}

double FitnessOutcome::value() const {
  if (!feasible_) throw std::logic_error("value() of an infeasible outcome");
  return value_;
}

Objective constant_objective(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("constant objective must be positive");
  }
  return Objective(
      "constant", [value](std::span<const double>) { return FitnessOutcome::feasible(value); });
}

Objective gaussian_bump(std::vector<double> center, double width) {
  check_width(width);
  KnownOptimum optimum{center, 1.0};
  const double inv_w2 = 1.0 / (width * width);
  return Objective(
      "gaussian_bump",
      [center = std::move(center), inv_w2](std::span<const double> z) {
        return positive(std::exp(-squared_distance(z, center) * inv_w2));
      },
      std::move(optimum));
}

Objective two_bump(std::vector<double> center1, double h1, std::vector<double> center2, double h2,
                   double width) {
  check_width(width);
  if (center1.size() != center2.size()) {
    throw std::invalid_argument("two_bump centers differ in dimension");
  }
  if (!(h1 > h2 && h2 > 0.0)) throw std::invalid_argument("two_bump requires h1 > h2 > 0");
  const double sep = std::sqrt(squared_distance(center2, center1));
  if (!(sep > 3.0 * width)) {
    throw std::invalid_argument("two_bump centers must be more than 3 widths apart");
  }

  // The maximizer lies on the line through the centers: solve
  // f'(t) = 0 for f(t) = h1 e^{-t^2/w^2} + h2 e^{-(sep - t)^2/w^2} on [0, w].
  const double w2 = width * width;
  auto slope = [&](double t) {
    return -t * h1 * std::exp(-t * t / w2) + (sep - t) * h2 * std::exp(-(sep - t) * (sep - t) / w2);
  };
  double lo = 0.0;
  double hi = width;
  if (slope(lo) > 0.0) {
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
  }
  const double t = lo;
  KnownOptimum optimum;
  optimum.coords.resize(center1.size());
  for (std::size_t j = 0; j < center1.size(); ++j) {
    optimum.coords[j] = center1[j] + t * (center2[j] - center1[j]) / sep;
  }
  optimum.value = h1 * std::exp(-t * t / w2) + h2 * std::exp(-(sep - t) * (sep - t) / w2);

  const double inv_w2 = 1.0 / w2;
  return Objective(
      "two_bump",
      [c1 = std::move(center1), c2 = std::move(center2), h1, h2,
       inv_w2](std::span<const double> z) {
        return positive(h1 * std::exp(-squared_distance(z, c1) * inv_w2) +
                        h2 * std::exp(-squared_distance(z, c2) * inv_w2));
      },
      std::move(optimum));
}

Objective spiky(std::vector<double> base_center, double base_width, std::vector<double> spike_center,
                double spike_width, double spike_height, double background) {
  check_width(base_width);
  check_width(spike_width);
  if (base_center.size() != spike_center.size()) {
    throw std::invalid_argument("spiky centers differ in dimension");
  }
  if (!(spike_height > 1.0)) throw std::invalid_argument("spike must be taller than the base");
  if (!(background > 0.0)) throw std::invalid_argument("background must be positive");
  const double inv_b = 1.0 / (base_width * base_width);
  const double inv_s = 1.0 / (spike_width * spike_width);
  const double at_spike =
      std::exp(-squared_distance(spike_center, base_center) * inv_b) + spike_height + background;
  KnownOptimum optimum{spike_center, at_spike};
  return Objective(
      "spiky",
      [bc = std::move(base_center), sc = std::move(spike_center), inv_b, inv_s, spike_height,
       background](std::span<const double> z) {
        return positive(std::exp(-squared_distance(z, bc) * inv_b) +
                        spike_height * std::exp(-squared_distance(z, sc) * inv_s) + background);
      },
      std::move(optimum));
}

RunRecord random_search_baseline(const SearchDomain& domain, const Objective& objective,
                                 std::size_t iterations, std::uint64_t seed) {
  Rng rng(seed);
  RunRecord record;
  record.dimension = domain.dimension();
  record.trials.reserve(iterations);
  const std::size_t dims = domain.dimension();
  double best = 0.0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < iterations; ++i) {
    std::vector<double> z(dims);
    for (std::size_t j = 0; j < dims; ++j) {
      const double lo = domain.lower(j);
      const double hi = domain.upper(j);
      z[j] = std::clamp(lo + uniform01(rng) * (hi - lo), lo, hi);
    }
    const FitnessOutcome outcome = objective.evaluate(z);
    const bool feasible = outcome.is_feasible();
    // Infeasible samples keep their slot with a zero fitness placeholder so
    // the series stays aligned with the iteration count.
    const double fitness = feasible ? outcome.value() : 0.0;
    record.trials.push_back({std::move(z), fitness, feasible, i + 1});
    if (feasible && (best == 0.0 || fitness > best)) {
      best = fitness;
      best_index = i;
    }
    record.best_fitness.push_back(best);
    record.best_index.push_back(best_index);
    record.attempts.push_back(1);
    record.infeasible.push_back(feasible ? 0 : 1);
  }
  return record;
}

}  // namespace sofa
