#pragma once

// Err and P_delta over repeated runs, computed on best-so-far fitness.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sofa/sofa.hpp"

namespace sofa::harness {

// J_star - J_best. Negative values are returned as is: they mean the
// reference optimum is stale.
double function_error(double j_star, double j_best);

// Compact per-run series kept after a run finishes.
struct RunSeries {
  std::vector<double> best_fitness;    // best so far after iteration k (index k - 1)
  std::vector<std::uint32_t> attempts;
  std::vector<std::uint32_t> infeasible;

  static RunSeries from_record(const RunRecord& record);
  std::size_t iterations() const { return best_fitness.size(); }
  // Best-so-far at iteration k (1-based); runs that stopped early keep
  // their final value.
  double best_at(std::size_t k) const;
};

// Fraction of runs whose best-so-far at iteration k satisfies
// |J_star - J_best| < delta. Throws std::invalid_argument on an empty list.
double convergence_probability(std::span<const RunSeries> runs, double j_star, double delta,
                               std::size_t k);
double convergence_probability(std::span<const RunRecord> runs, double j_star, double delta,
                               std::size_t k);

struct MetricSeries {
  std::vector<double> deltas;
  std::vector<double> mean_err;                // index k - 1
  std::vector<std::vector<double>> p_delta;    // [delta][k - 1]
  std::vector<double> unfeasible_frac;         // infeasible / attempted evaluations

  std::size_t iterations() const { return mean_err.size(); }
};

// Deterministic reduction in the order given (callers pass runs sorted by id).
MetricSeries aggregate(std::span<const RunSeries> runs, double j_star,
                       const std::vector<double>& deltas);

// Trailing mean over up to `window` values ending at each index.
std::vector<double> windowed_average(std::span<const double> values, std::size_t window);

// "1e-3", "5e-4", "2.5e-4": mantissa in shortest form, integer exponent.
std::string format_delta(double delta);

// Shortest round-trip decimal form.
std::string format_double(double value);

// Header: iteration,mean_err,p_<delta>...,unfeasible_frac
void write_metrics_csv(std::ostream& out, const MetricSeries& metrics);
void write_window_csv(std::ostream& out, const MetricSeries& metrics, std::size_t window);

// Inverse of write_metrics_csv; throws std::runtime_error on malformed input.
MetricSeries read_metrics_csv(std::istream& in);

}  // namespace sofa::harness
