#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sofa/dvm.hpp"
#include "sofa/simd/kernels.hpp"

namespace sofa::dvm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHoursPerDay = 24.0;

// Slope of a piecewise stage in m/day, matching the branch chosen by at().
double piecewise_slope(const PiecewiseStage& p, double t) {
  if (t < p.t0) return 0.0;
  if (t < p.t1) return p.descent_speed();
  if (t <= p.t2) return 0.0;
  if (t < p.t3) return p.ascent_speed();
  return 0.0;
}

}  // namespace

DvmModel::DvmModel(EnvironmentConfig env, std::size_t harmonics, double fitness_scale,
                   EigenOptions eigen)
    : env_(std::move(env)), harmonics_(harmonics), fitness_scale_(fitness_scale), eigen_(eigen) {
  env_.validate();
  if (!(fitness_scale > 0.0) || !std::isfinite(fitness_scale)) {
    throw std::invalid_argument("fitness scale must be positive");
  }
  if (!(eigen_.lo < eigen_.hi)) throw std::invalid_argument("eigenvalue bracket must be non-empty");
  const std::size_t q_count = env_.quadrature_points;
  const std::size_t n = 2 * harmonics_ + 1;
  basis_.assign(n * q_count, 0.0);
  slope_basis_.assign(n * q_count, 0.0);
  daylight_.resize(q_count);
  for (std::size_t q = 0; q < q_count; ++q) {
    const double t = static_cast<double>(q) / static_cast<double>(q_count);
    basis_[q] = 1.0;
    for (std::size_t m = 1; m <= harmonics_; ++m) {
      const double w = kTwoPi * static_cast<double>(m);
      // Reduce m*q mod Q so the angle is exact for every row.
      const std::size_t phase = (m * q) % q_count;
      const double arg = kTwoPi * static_cast<double>(phase) / static_cast<double>(q_count);
      const double s = std::sin(arg);
      const double c = std::cos(arg);
      basis_[(2 * m - 1) * q_count + q] = s;
      basis_[(2 * m) * q_count + q] = c;
      slope_basis_[(2 * m - 1) * q_count + q] = w * c;
      slope_basis_[(2 * m) * q_count + q] = -w * s;
    }
    daylight_[q] = env_.daylight == EnvironmentConfig::Daylight::Constant
                       ? 1.0
                       : std::max(0.0, -std::cos(kTwoPi * t));
  }
}

RatesOutcome DvmModel::rates_from_samples(
    const std::array<std::vector<double>, kStageCount>& depth,
    const std::array<std::vector<double>, kStageCount>& slope) const {
  const auto& k = simd::kernels();
  const std::size_t q_count = env_.quadrature_points;
  const double inv_q = 1.0 / static_cast<double>(q_count);
  const EnvironmentConfig& e = env_;

  std::vector<double> z(q_count), speed(q_count);
  std::vector<double> exp_in(2 * q_count), exp_out(2 * q_count);
  std::vector<double> logi_in(3 * q_count), logi_out(3 * q_count);
  const double food_inv = 1.0 / (2.0 * e.food_layer_width * e.food_layer_width);

  std::array<double, kStageCount> mortality{};
  std::array<double, kStageCount> energy{};
  for (std::size_t s = 0; s < kStageCount; ++s) {
    double excursion = 0.0;
    for (std::size_t q = 0; q < q_count; ++q) {
      const double raw = depth[s][q];
      if (!std::isfinite(raw) || !std::isfinite(slope[s][q])) {
        return InfeasibleReason::NonFinite;
      }
      const double clamped = std::clamp(raw, 0.0, e.max_depth);
      excursion += std::abs(raw - clamped);
      z[q] = clamped;
      speed[q] = slope[s][q] / kHoursPerDay;  // m/h, negative when ascending
      exp_in[q] = -e.light_attenuation * clamped;
      const double dz = clamped - e.food_peak_depth;
      exp_in[q_count + q] = -dz * dz * food_inv;
      logi_in[q] = e.feeding_depth_softness > 0.0
                       ? (e.feeding_depth - clamped) / e.feeding_depth_softness
                       : 0.0;
      logi_in[q_count + q] = e.feeding_speed_softness > 0.0
                                 ? (e.feeding_speed_threshold - std::abs(speed[q])) /
                                       e.feeding_speed_softness
                                 : 0.0;
      logi_in[2 * q_count + q] = (e.thermocline_depth - clamped) / e.thermocline_width;
    }
    k.exp(exp_in, exp_out);
    k.logistic(logi_in, logi_out);

    double predation = 0.0;
    double intake = 0.0;
    double basal = 0.0;
    double swimming = 0.0;
    for (std::size_t q = 0; q < q_count; ++q) {
      const double light = e.surface_light * daylight_[q] * exp_out[q];
      predation += light / (light + e.light_half_saturation);
      const double food = e.food_max * exp_out[q_count + q];
      const double depth_on = e.feeding_depth_softness > 0.0
                                  ? logi_out[q]
                                  : (z[q] <= e.feeding_depth ? 1.0 : 0.0);
      const double speed_on = e.feeding_speed_softness > 0.0
                                  ? logi_out[q_count + q]
                                  : (std::abs(speed[q]) <= e.feeding_speed_threshold ? 1.0 : 0.0);
      intake += food / (food + e.food_half_saturation) * depth_on * speed_on;
      const double warm = logi_out[2 * q_count + q];
      basal += e.basal_cost_deep[s] + (e.basal_cost_surface[s] - e.basal_cost_deep[s]) * warm;
      swimming += std::max(0.0, -speed[q]);
    }
    mortality[s] = e.background_mortality[s] + e.visual_predation[s] * predation * inv_q +
                   e.boundary_mortality * excursion * inv_q;
    energy[s] = e.max_intake[s] * intake * inv_q - basal * inv_q - e.ascent_cost[s] * swimming * inv_q;
  }

  for (double en : energy) {
    if (!(en > 0.0)) return std::isnan(en) ? InfeasibleReason::NonFinite
                                           : InfeasibleReason::NonPositiveEnergy;
  }
  StageRates r;
  r.mortality_young = mortality[0];
  r.mortality_juvenile = mortality[1];
  r.mortality_adult = mortality[2];
  r.maturation_young = e.young_maturation_energy / energy[0];
  r.maturation_juvenile = r.maturation_young + e.juvenile_maturation_energy / energy[1];
  r.max_reproduction_age = r.maturation_juvenile + e.adult_lifespan;
  r.reproduction = e.egg_conversion * energy[2];
  if (!r.valid()) return InfeasibleReason::InvalidRates;
  return r;
}

RatesOutcome DvmModel::stage_rates(const FourierTrajectory& traj) const {
  if (traj.harmonics() != harmonics_) {
    throw std::invalid_argument("trajectory order does not match the model");
  }
  const auto& k = simd::kernels();
  const std::size_t q_count = env_.quadrature_points;
  const std::size_t n = 2 * harmonics_ + 1;
  std::array<std::vector<double>, kStageCount> depth;
  std::array<std::vector<double>, kStageCount> slope;
  for (Stage st : kStages) {
    const std::size_t s = static_cast<std::size_t>(st);
    const auto c = traj.stage(st);
    depth[s].assign(q_count, c[0]);
    slope[s].assign(q_count, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
      if (c[j] == 0.0) continue;
      k.axpy(c[j], std::span<const double>(basis_).subspan(j * q_count, q_count), depth[s]);
      k.axpy(c[j], std::span<const double>(slope_basis_).subspan(j * q_count, q_count), slope[s]);
    }
  }
  return rates_from_samples(depth, slope);
}

RatesOutcome DvmModel::stage_rates(const PiecewiseTrajectory& traj) const {
  const std::size_t q_count = env_.quadrature_points;
  std::array<std::vector<double>, kStageCount> depth;
  std::array<std::vector<double>, kStageCount> slope;
  for (std::size_t s = 0; s < kStageCount; ++s) {
    const PiecewiseStage& p = traj.stages[s];
    p.validate();
    depth[s].resize(q_count);
    slope[s].resize(q_count);
    for (std::size_t q = 0; q < q_count; ++q) {
      const double t = static_cast<double>(q) / static_cast<double>(q_count);
      depth[s][q] = p.at(t);
      slope[s][q] = piecewise_slope(p, t);
    }
  }
  return rates_from_samples(depth, slope);
}

std::variant<double, InfeasibleReason> DvmModel::growth_rate(const FourierTrajectory& traj) const {
  const RatesOutcome rates = stage_rates(traj);
  if (const auto* reason = std::get_if<InfeasibleReason>(&rates)) return *reason;
  const auto lambda = dominant_eigenvalue(std::get<StageRates>(rates), eigen_);
  if (!lambda) return InfeasibleReason::NoEigenvalueBracket;
  return *lambda;
}

FitnessOutcome DvmModel::fitness_of_rates(const StageRates& rates) const {
  if (!rates.valid()) return FitnessOutcome::infeasible(InfeasibleReason::InvalidRates);
  const auto lambda = dominant_eigenvalue(rates, eigen_);
  if (!lambda) return FitnessOutcome::infeasible(InfeasibleReason::NoEigenvalueBracket);
  const double j = std::exp(fitness_scale_ * *lambda);
  if (!(j > 0.0) || !std::isfinite(j)) return FitnessOutcome::infeasible(InfeasibleReason::NonFinite);
  return FitnessOutcome::feasible(j);
}

FitnessOutcome DvmModel::fitness(const FourierTrajectory& traj) const {
  const RatesOutcome rates = stage_rates(traj);
  if (const auto* reason = std::get_if<InfeasibleReason>(&rates)) {
    return FitnessOutcome::infeasible(*reason);
  }
  return fitness_of_rates(std::get<StageRates>(rates));
}

FitnessOutcome DvmModel::fitness(std::span<const double> flat) const {
  if (flat.size() != dimension()) {
    throw std::invalid_argument("DVM point has " + std::to_string(flat.size()) +
                                " coordinates, expected " + std::to_string(dimension()));
  }
  return fitness(FourierTrajectory(harmonics_, std::vector<double>(flat.begin(), flat.end())));
}

Objective DvmModel::objective() const {
  auto shared = std::make_shared<const DvmModel>(*this);
  return Objective("dvm", [shared](std::span<const double> z) { return shared->fitness(z); });
}

RatesOutcome stage_rates(const FourierTrajectory& traj, const EnvironmentConfig& env) {
  return DvmModel(env, traj.harmonics()).stage_rates(traj);
}

FitnessOutcome fitness(const FourierTrajectory& traj, const EnvironmentConfig& env,
                       double fitness_scale) {
  return DvmModel(env, traj.harmonics(), fitness_scale).fitness(traj);
}

}  // namespace sofa::dvm
