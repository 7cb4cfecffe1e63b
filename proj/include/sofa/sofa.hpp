#pragma once

// Survival of the Fittest optimizer.
//
// Iteration k (k trials stored so far):
//   1. pick a reference among all stored trials with probability
//      J_i^k / sum_j J_j^k;
//   2. draw z_{k+1} coordinate-wise from the configured kernel centered at the
//      reference, over the first active_dims(k + 1) coordinates of the box;
//   3. evaluate and store.
// z_1 is uniform over the initial projection. The loop ends at
// max_iterations trials, or earlier if the dispersion criterion is enabled
// and fires.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "sofa/domain.hpp"
#include "sofa/objective.hpp"
#include "sofa/rng.hpp"
#include "sofa/sampler.hpp"

namespace sofa {

struct TrialPoint {
  std::vector<double> coords;  // active prefix; later coordinates are the domain centers
  double fitness = 0.0;        // > 0; the floor value for infeasible points
  bool feasible = true;
  std::size_t iteration = 0;   // 1-based
};

// Infeasible proposals are resampled around the same reference up to
// max_retries times; the last one is then recorded with the relative floor.
struct RejectResample {
  std::size_t max_retries = 100;
};

// Infeasible proposals are recorded with fitness `floor`, or with
// 1e-12 * (best fitness so far) when no floor is given.
struct FloorFitness {
  std::optional<double> floor;
};

using InfeasiblePolicy = std::variant<RejectResample, FloorFitness>;

inline constexpr double kRelativeFloor = 1e-12;

// Which diagonal scales the Gaussian kernel when fewer than D coordinates
// are active.
enum class GaussianRadius { FullCube, ActiveProjection };

struct SofaConfig {
  KernelVariant kernel = SimplifiedCauchy{};
  std::size_t max_iterations = 10000;
  std::size_t initial_dims = 1;
  std::size_t dims_block = 1;
  std::size_t growth_interval = 1;
  std::size_t max_dims = 0;  // 0: the domain dimension
  std::optional<double> termination_std_threshold;
  std::size_t termination_window = 500;
  InfeasiblePolicy infeasible_policy = RejectResample{};
  GaussianRadius gaussian_radius = GaussianRadius::FullCube;
  std::uint64_t seed = 1;
};

// Replaces max_dims == 0 with the domain dimension and checks every field.
// Throws std::invalid_argument.
SofaConfig resolve(SofaConfig config, const SearchDomain& domain);

// min(max_dims, initial_dims + dims_block * floor((k - 1) / growth_interval)).
// Expects a resolved config; throws std::invalid_argument if k < 1.
std::size_t active_dims(const SofaConfig& config, std::size_t k);

struct RunRecord {
  std::size_t dimension = 0;
  std::vector<TrialPoint> trials;            // trials[i].iteration == i + 1
  std::vector<double> best_fitness;          // best so far after each iteration
  std::vector<std::size_t> best_index;       // index into trials
  std::vector<std::uint32_t> attempts;       // evaluations spent on each iteration
  std::vector<std::uint32_t> infeasible;     // infeasible evaluations per iteration
  std::size_t out_of_domain = 0;             // evaluated proposals outside the box, rejected ones included
  bool stopped_by_dispersion = false;

  std::size_t iterations() const { return trials.size(); }
  const TrialPoint& final_best() const;
};

class RunAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Proposal z_{k+1} around `reference`. Length active_dims(config, k + 1);
// every coordinate lies in its closed interval. Expects a resolved config.
std::vector<double> propose(const TrialPoint& reference, const SearchDomain& domain,
                            std::size_t k, const SofaConfig& config, Rng& rng);

// Full run. Throws RunAborted when no feasible first point is found, and
// std::invalid_argument for an invalid configuration.
RunRecord run(const SearchDomain& domain, const Objective& objective, const SofaConfig& config);

}  // namespace sofa
