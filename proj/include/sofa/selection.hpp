#pragma once

// Reference-point selection: index i is drawn with probability
//   J_i^k / sum_j J_j^k.
// The weights are evaluated in the log domain as exp(k (ln J_i - ln J_max)),
// so the largest weight is exactly 1 and nothing overflows at large k.
// Weights whose log is below kLogWeightCutoff (relative mass < 1.6e-28 each)
// are treated as exactly zero; SelectionPool relies on this to drop history
// points that can never be selected again.

#include <cstddef>
#include <span>
#include <vector>

#include "sofa/rng.hpp"

namespace sofa {

inline constexpr double kLogWeightCutoff = -64.0;

// Normalized selection probabilities. Throws std::invalid_argument on an
// empty vector or a fitness that is not positive and finite.
std::vector<double> selection_weights(std::span<const double> fitnesses, double k);

// One draw over the full history; consumes exactly one uniform variate.
std::size_t select_reference(std::span<const double> fitnesses, double k, Rng& rng);

// Incremental sampler used by the optimizer loop, with the same distribution
// as selection_weights (entries below the cutoff at some earlier exponent
// are dropped; their weight can only shrink further).
//
// Redoing all weights per draw would cost O(history) exps per iteration.
// Instead, weights w_i(k0) = exp(k0 (ln J_i - ref)) are cached with prefix
// sums at some earlier exponent k0 <= k. Since ln J_i <= ref for cached
// entries, w_i(k) <= w_i(k0), so drawing i from the cache and accepting with
// probability exp((k - k0)(ln J_i - ref)) is exact rejection sampling.
// Entries added since the last rebuild form a short tail whose weights are
// computed exactly on each draw. The cache is rebuilt when k has grown by
// a few percent, the tail is long, or a new best would make tail weights
// large. Draws are deterministic given the engine state, but consume a
// variable number of variates.
class SelectionPool {
 public:
  // Appends history entry number size(). Throws like selection_weights.
  void add(double fitness);

  // Draws a history index with exponent k. k must not decrease between calls.
  std::size_t draw(double k, Rng& rng);

  std::size_t size() const { return total_; }
  std::size_t active() const { return cache_log_.size() + tail_log_.size(); }
  double best_fitness() const;

 private:
  void rebuild(double k);

  std::vector<double> cache_log_;
  std::vector<std::size_t> cache_index_;
  std::vector<double> prefix_;
  std::vector<double> tail_log_;
  std::vector<std::size_t> tail_index_;
  std::vector<double> tail_weight_;
  double cache_k_ = 0.0;
  double ref_ = 0.0;
  double log_max_ = 0.0;
  double last_k_ = 0.0;
  std::size_t total_ = 0;
};

}  // namespace sofa
