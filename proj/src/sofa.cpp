#include "sofa/sofa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sofa/selection.hpp"

namespace sofa {
namespace {

std::size_t retry_budget(const InfeasiblePolicy& policy) {
  if (const auto* reject = std::get_if<RejectResample>(&policy)) return reject->max_retries;
  return RejectResample{}.max_retries;
}

double floor_value(const InfeasiblePolicy& policy, double best) {
  if (const auto* floor = std::get_if<FloorFitness>(&policy); floor && floor->floor) {
    return *floor->floor;
  }
  return kRelativeFloor * best;
}

std::vector<double> uniform_point(const SearchDomain& domain, std::size_t dims, Rng& rng) {
  std::vector<double> z(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    const double lo = domain.lower(j);
    const double hi = domain.upper(j);
    z[j] = std::clamp(lo + uniform01(rng) * (hi - lo), lo, hi);
  }
  return z;
}

// Running dispersion of the first coordinate over the last `window` trials.
class DispersionWindow {
 public:
  explicit DispersionWindow(std::size_t window) : values_(window) {}

  void push(double x) {
    if (values_.empty()) return;
    values_[next_] = x;
    next_ = (next_ + 1) % values_.size();
    filled_ = std::min(filled_ + 1, values_.size());
  }

  bool full() const { return !values_.empty() && filled_ == values_.size(); }

  double stddev() const {
    double mean = 0.0;
    for (double v : values_) mean += v;
    mean /= static_cast<double>(values_.size());
    double ss = 0.0;
    for (double v : values_) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values_.size() - 1));
  }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
  std::size_t filled_ = 0;
};

}  // namespace

SofaConfig resolve(SofaConfig config, const SearchDomain& domain) {
  validate(config.kernel);
  if (config.max_dims == 0) config.max_dims = domain.dimension();
  if (config.initial_dims < 1) throw std::invalid_argument("initial_dims must be at least 1");
  if (config.max_dims < config.initial_dims) {
    throw std::invalid_argument("max_dims must be at least initial_dims");
  }
  if (config.max_dims > domain.dimension()) {
    throw std::invalid_argument("max_dims " + std::to_string(config.max_dims) +
                                " exceeds the domain dimension " +
                                std::to_string(domain.dimension()));
  }
  if (config.growth_interval < 1) throw std::invalid_argument("growth_interval must be >= 1");
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (config.termination_std_threshold) {
    if (!(*config.termination_std_threshold > 0.0)) {
      throw std::invalid_argument("termination threshold must be positive");
    }
    if (config.termination_window < 2) {
      throw std::invalid_argument("termination window must be at least 2");
    }
  }
  if (const auto* floor = std::get_if<FloorFitness>(&config.infeasible_policy)) {
    if (floor->floor && !(*floor->floor > 0.0 && std::isfinite(*floor->floor))) {
      throw std::invalid_argument("floor fitness must be positive");
    }
  }
  return config;
}

std::size_t active_dims(const SofaConfig& config, std::size_t k) {
  if (k < 1) throw std::invalid_argument("active_dims requires k >= 1");
  const std::size_t steps = (k - 1) / config.growth_interval;
  const std::size_t grown = config.initial_dims + config.dims_block * steps;
  return std::min(config.max_dims, grown);
}

const TrialPoint& RunRecord::final_best() const {
  if (best_index.empty()) throw std::logic_error("empty run record");
  return trials[best_index.back()];
}

std::vector<double> propose(const TrialPoint& reference, const SearchDomain& domain,
                            std::size_t k, const SofaConfig& config, Rng& rng) {
  const std::size_t dims = active_dims(config, k + 1);
  std::vector<double> z(dims);
  auto ref_coord = [&](std::size_t j) {
    return j < reference.coords.size() ? reference.coords[j] : domain.center(j);
  };

  if (std::holds_alternative<BasicGaussian>(config.kernel)) {
    const double radius = config.gaussian_radius == GaussianRadius::FullCube
                              ? domain.kernel_radius()
                              : domain.projection(dims).diagonal();
    const double sigma = gaussian_sigma(static_cast<double>(k), radius);
    for (std::size_t j = 0; j < dims; ++j) {
      z[j] = sample_truncated_gaussian(ref_coord(j), sigma, domain.lower(j), domain.upper(j), rng);
    }
  } else {
    const auto& cauchy = std::get<SimplifiedCauchy>(config.kernel);
    const double eps =
        clamp_epsilon(epsilon_schedule(static_cast<double>(k + 1), cauchy.a, cauchy.b));
    for (std::size_t j = 0; j < dims; ++j) {
      z[j] = sample_truncated_cauchy(ref_coord(j), eps, domain.lower(j), domain.upper(j),
                                     uniform01(rng));
    }
  }
  return z;
}

RunRecord run(const SearchDomain& domain, const Objective& objective, const SofaConfig& raw) {
  const SofaConfig config = resolve(raw, domain);
  Rng rng(config.seed);

  RunRecord record;
  record.dimension = domain.dimension();
  record.trials.reserve(config.max_iterations);
  record.best_fitness.reserve(config.max_iterations);
  record.best_index.reserve(config.max_iterations);
  record.attempts.reserve(config.max_iterations);
  record.infeasible.reserve(config.max_iterations);

  SelectionPool pool;
  DispersionWindow dispersion(config.termination_std_threshold ? config.termination_window : 0);

  auto evaluate = [&](std::span<const double> z) {
    if (!domain.contains(z)) ++record.out_of_domain;
    const std::vector<double> full = domain.pad_with_centers(z);
    return objective.evaluate(full);
  };

  auto append = [&](std::vector<double> z, double fitness, bool feasible, std::uint32_t attempts,
                    std::uint32_t infeasible) {
    const std::size_t index = record.trials.size();
    if (!z.empty()) dispersion.push(z.front());
    record.trials.push_back({std::move(z), fitness, feasible, index + 1});
    pool.add(fitness);
    const bool improved = record.best_fitness.empty() || fitness > record.best_fitness.back();
    record.best_fitness.push_back(improved ? fitness : record.best_fitness.back());
    record.best_index.push_back(improved ? index : record.best_index.back());
    record.attempts.push_back(attempts);
    record.infeasible.push_back(infeasible);
  };

  // z_1: uniform over the initial projection.
  {
    const std::size_t dims = active_dims(config, 1);
    const std::size_t budget = retry_budget(config.infeasible_policy);
    std::uint32_t rejected = 0;
    std::vector<double> z;
    std::optional<FitnessOutcome> outcome;
    for (std::size_t attempt = 0; attempt <= budget; ++attempt) {
      z = uniform_point(domain, dims, rng);
      outcome = evaluate(z);
      if (outcome->is_feasible()) break;
      ++rejected;
    }
    if (outcome->is_feasible()) {
      append(std::move(z), outcome->value(), true, rejected + 1, rejected);
    } else {
      const auto* floor = std::get_if<FloorFitness>(&config.infeasible_policy);
      if (floor == nullptr || !floor->floor) {
        throw RunAborted("objective infeasible at every one of " + std::to_string(budget + 1) +
                         " uniform first points (last reason: " +
                         std::string(to_string(outcome->reason())) + ")");
      }
      append(std::move(z), *floor->floor, false, rejected, rejected);
    }
  }

  while (record.trials.size() < config.max_iterations) {
    const std::size_t k = record.trials.size();
    const std::size_t ref = pool.draw(static_cast<double>(k), rng);
    const TrialPoint& reference = record.trials[ref];

    const bool resample = std::holds_alternative<RejectResample>(config.infeasible_policy);
    const std::size_t budget = resample ? retry_budget(config.infeasible_policy) : 0;
    std::uint32_t rejected = 0;
    std::vector<double> z;
    std::optional<FitnessOutcome> outcome;
    for (std::size_t attempt = 0; attempt <= budget; ++attempt) {
      z = propose(reference, domain, k, config, rng);
      outcome = evaluate(z);
      if (outcome->is_feasible()) break;
      ++rejected;
    }
    if (outcome->is_feasible()) {
      append(std::move(z), outcome->value(), true, rejected + 1, rejected);
    } else {
      const double floor = floor_value(config.infeasible_policy, record.best_fitness.back());
      append(std::move(z), floor, false, rejected, rejected);
    }

    if (config.termination_std_threshold && dispersion.full() &&
        dispersion.stddev() < *config.termination_std_threshold) {
      record.stopped_by_dispersion = true;
      break;
    }
  }
  return record;
}

}  // namespace sofa
