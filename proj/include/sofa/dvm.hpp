#pragma once

// Diel vertical migration fitness for a three-stage zooplankton population.
//
// A trajectory gives depth (m, positive downward) over one scaled day
// t in [0, 1], t = 0 at midnight. Each stage s in {Y, J, A} has its own
// trajectory. Daily averages over the trajectory give stage rates
// (mortalities, maturation times, fecundity), and the population growth
// rate lambda is the largest real root of
//
//   lambda = b exp(-a_Y tau_Y - a_J (tau_J - tau_Y))
//              [exp(-tau_J lambda) - exp(-tau_A lambda - a_J (tau_A - tau_J))] - a_A.
//
// Fitness is exp(scale * lambda): positive, and ordered exactly like lambda.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "sofa/domain.hpp"
#include "sofa/objective.hpp"

namespace sofa::dvm {

enum class Stage : std::size_t { Young = 0, Juvenile = 1, Adult = 2 };
inline constexpr std::array<Stage, 3> kStages{Stage::Young, Stage::Juvenile, Stage::Adult};
inline constexpr std::size_t kStageCount = 3;

std::string_view to_string(Stage stage);

// Truncated Fourier series per stage:
//   v_s(t) = v_1 + sum_{m=1..N} v_{2m} sin(2 pi m t) + v_{2m+1} cos(2 pi m t)
// Stored flat as [Y coefficients | J coefficients | A coefficients], each
// block n = 2N + 1 long, so the vector has D = 3n entries. Within a block,
// index 0 is the constant term, 2m-1 the sine and 2m the cosine of order m.
class FourierTrajectory {
 public:
  // Throws std::invalid_argument unless flat.size() == 3 (2N + 1).
  FourierTrajectory(std::size_t harmonics, std::vector<double> flat);

  std::size_t harmonics() const { return harmonics_; }
  std::size_t terms() const { return 2 * harmonics_ + 1; }
  std::span<const double> stage(Stage s) const;
  std::span<const double> flat() const { return coeffs_; }

 private:
  std::size_t harmonics_;
  std::vector<double> coeffs_;
};

// Depth (m) and its time derivative (m per day) of one stage's series.
double eval_fourier(std::span<const double> stage_coeffs, double t);
double eval_fourier(const FourierTrajectory& traj, Stage stage, double t);
double eval_fourier_slope(std::span<const double> stage_coeffs, double t);

// Five-piece symmetric trajectory: shallow H0 until t0, linear descent to H1
// at t1, deep until t2 = 1 - t1, linear ascent back to H0 at t3 = 1 - t0.
struct PiecewiseStage {
  double shallow = 0.0;  // H0
  double deep = 0.0;     // H1
  double t0 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;

  // Builds the symmetric stage; throws std::invalid_argument if the result
  // violates the invariants below.
  static PiecewiseStage symmetric(double shallow, double deep, double t0, double t1);

  // 0 <= t0 < t1 < t2 < t3 <= 1, deep >= shallow >= 0, t2 = 1 - t1, t3 = 1 - t0.
  void validate() const;

  double descent_speed() const { return (deep - shallow) / (t1 - t0); }  // c_0 (m/day)
  double ascent_speed() const { return (shallow - deep) / (t3 - t2); }   // c_1 (m/day)
  double at(double t) const;
  double time_average() const;
};

struct PiecewiseTrajectory {
  std::array<PiecewiseStage, kStageCount> stages;
  const PiecewiseStage& stage(Stage s) const { return stages[static_cast<std::size_t>(s)]; }
};

double eval_piecewise(const PiecewiseTrajectory& traj, Stage stage, double t);

// Fourier coefficients of a piecewise trajectory by Gauss-Legendre quadrature
// on each linear piece.
FourierTrajectory fourier_of_piecewise(const PiecewiseTrajectory& traj, std::size_t harmonics);

// Box centered on `start` for optimizing over Fourier coefficients. The
// constant term gets `constant_width`; both terms of order m get
// harmonic_width / m^decay, so the widths are square-summable for decay > 1/2.
SearchDomain domain_around(const FourierTrajectory& start, double constant_width,
                           double harmonic_width, double decay);

struct StageRates {
  double mortality_young = 0.0;     // a_Y (1/day)
  double mortality_juvenile = 0.0;  // a_J
  double mortality_adult = 0.0;     // a_A
  double maturation_young = 0.0;    // tau_Y (days)
  double maturation_juvenile = 0.0; // tau_J
  double max_reproduction_age = 0.0;// tau_A
  double reproduction = 0.0;        // b (eggs / female / day)

  // All finite and non-negative, tau_Y < tau_J < tau_A.
  bool valid() const;
};

// Stage-rate environment. All rates are per day, depths in meters.
// With these defaults the young stage does best near the surface, while for
// sharp (piecewise or high-order) trajectories the older stages' fitness has
// two local maxima in day depth: just above the feeding limit (about 70 m)
// and just below the thermocline (about 115 m).
struct EnvironmentConfig {
  enum class Daylight { Diel, Constant };

  // Light: surface_light * daylight(t) * exp(-light_attenuation * z), with
  // daylight(t) = max(0, -cos 2 pi t) for Diel and 1 for Constant.
  Daylight daylight = Daylight::Diel;
  double surface_light = 1.0;
  double light_attenuation = 0.09;
  double light_half_saturation = 0.01;

  // Mortality = background + visual_predation * L / (L + K) + boundary
  // penalty per meter outside [0, max_depth].
  std::array<double, kStageCount> visual_predation{0.1, 1.0, 1.5};
  std::array<double, kStageCount> background_mortality{0.05, 0.03, 0.02};
  double max_depth = 200.0;
  double boundary_mortality = 0.01;

  // Food: Gaussian layer food_max * exp(-(z - peak)^2 / (2 width^2)),
  // ingested at max_intake * F / (F + K) while both feeding switches are on.
  double food_max = 1.0;
  double food_peak_depth = 10.0;
  double food_layer_width = 30.0;
  double food_half_saturation = 0.2;
  std::array<double, kStageCount> max_intake{1.0, 1.2, 1.4};

  // Feeding switches (logistic; zero softness gives hard thresholds):
  // shallower than feeding_depth and vertical speed below the threshold (m/h).
  double feeding_depth = 80.0;
  double feeding_depth_softness = 2.0;
  double feeding_speed_threshold = 10.0;
  double feeding_speed_softness = 0.5;

  // Basal metabolism drops from surface to deep values across a thermocline;
  // swimming cost is charged per m/h of ascent.
  std::array<double, kStageCount> basal_cost_surface{0.1, 0.3, 0.35};
  std::array<double, kStageCount> basal_cost_deep{0.04, 0.05, 0.06};
  double thermocline_depth = 95.0;
  double thermocline_width = 4.0;
  std::array<double, kStageCount> ascent_cost{0.02, 0.015, 0.015};

  // Energy conversion: tau_Y = E_young / net_Y, tau_J = tau_Y + E_juv / net_J,
  // tau_A = tau_J + adult_lifespan, b = egg_conversion * net_A.
  double young_maturation_energy = 2.0;
  double juvenile_maturation_energy = 4.0;
  double adult_lifespan = 20.0;
  double egg_conversion = 20.0;

  std::size_t quadrature_points = 512;

  // Throws std::invalid_argument on negative coefficients or empty ranges.
  void validate() const;
};

struct EigenOptions {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t scan_points = 512;
};

// g(lambda) = RHS(lambda) - lambda.
double characteristic_residual(const StageRates& rates, double lambda);

// Largest real root of the characteristic equation in [lo, hi], with
// |g| < 1e-10; nullopt when there is no sign change in the range.
std::optional<double> dominant_eigenvalue(const StageRates& rates, const EigenOptions& options = {});

using RatesOutcome = std::variant<StageRates, InfeasibleReason>;

// Precomputed quadrature tables for one environment and series order.
// Immutable and safe to share between threads.
class DvmModel {
 public:
  DvmModel(EnvironmentConfig env, std::size_t harmonics, double fitness_scale = 1.0,
           EigenOptions eigen = {});

  std::size_t harmonics() const { return harmonics_; }
  std::size_t dimension() const { return kStageCount * (2 * harmonics_ + 1); }
  const EnvironmentConfig& environment() const { return env_; }
  double fitness_scale() const { return fitness_scale_; }

  RatesOutcome stage_rates(const FourierTrajectory& traj) const;
  RatesOutcome stage_rates(const PiecewiseTrajectory& traj) const;

  // Growth rate, or the reason the point is infeasible.
  std::variant<double, InfeasibleReason> growth_rate(const FourierTrajectory& traj) const;

  FitnessOutcome fitness(const FourierTrajectory& traj) const;
  FitnessOutcome fitness(std::span<const double> flat) const;
  FitnessOutcome fitness_of_rates(const StageRates& rates) const;

  Objective objective() const;

 private:
  RatesOutcome rates_from_samples(const std::array<std::vector<double>, kStageCount>& depth,
                                  const std::array<std::vector<double>, kStageCount>& slope) const;

  EnvironmentConfig env_;
  std::size_t harmonics_;
  double fitness_scale_;
  EigenOptions eigen_;
  std::vector<double> basis_;        // (2N+1) rows of Q samples
  std::vector<double> slope_basis_;  // d/dt of each row, m per day
  std::vector<double> daylight_;     // Q samples
};

// One-shot helpers that build a model internally.
RatesOutcome stage_rates(const FourierTrajectory& traj, const EnvironmentConfig& env);
FitnessOutcome fitness(const FourierTrajectory& traj, const EnvironmentConfig& env,
                       double fitness_scale = 1.0);

}  // namespace sofa::dvm
