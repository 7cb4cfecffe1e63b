#pragma once

// Repeated seeded runs, reference optimum, metrics and artifacts.
//
// Run i always uses seed derive_seed(master, kRunStream, i), whichever worker
// executes it, and aggregation walks runs in id order, so every CSV written
// here is identical for any worker count.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sofa/harness/config.hpp"
#include "sofa/harness/metrics.hpp"

namespace sofa::harness {

inline constexpr std::uint64_t kRunStream = 0;
inline constexpr std::uint64_t kEstimateStream = 1;
inline constexpr std::uint64_t kBaselineStream = 2;

struct ExperimentOptions {
  std::optional<std::size_t> workers;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  bool write_files = true;
  bool use_cache = true;  // reuse reference.json when its provenance matches
};

struct RunOutcome {
  std::size_t id = 0;
  std::uint64_t seed = 0;
  RunSeries series;
  double final_best = 0.0;
  std::vector<double> best_coords;  // padded to the full dimension
  std::size_t out_of_domain = 0;    // evaluated proposals outside the box
  bool stopped_by_dispersion = false;
};

struct DensityCheckpoint {
  std::size_t k = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double mass = 0.0;            // sum(density) * h
  std::vector<double> x;        // cell midpoints
  std::vector<double> density;  // cell-averaged density
};

struct ExperimentResult {
  ReferenceOptimum reference;
  MetricSeries metrics;
  std::vector<RunOutcome> runs;  // sorted by id
  std::size_t out_of_domain = 0;
  std::optional<MetricSeries> baseline;
  std::vector<DensityCheckpoint> density;
  std::filesystem::path output_dir;
  double elapsed_seconds = 0.0;
};

std::uint64_t run_seed(std::uint64_t master, std::size_t run);

// Runs `count` jobs on up to `workers` threads (0: hardware concurrency).
// The first exception, by job id, is rethrown after all threads finish.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& job);

// Reference optimum for an experiment, in priority order: config value,
// analytic optimum of the objective, matching cache file in output_dir,
// fresh estimate (written to the cache when write_files is set).
ReferenceOptimum resolve_reference(const ExperimentConfig& config, const Problem& problem,
                                   const ExperimentOptions& options = {});

// Best point over `estimate.seeds` runs of iterations * multiplier each.
ReferenceOptimum estimate_reference_optimum(const ExperimentConfig& config, const Problem& problem,
                                            std::size_t workers);

// Provenance key stored next to an estimated optimum.
nlohmann::json reference_provenance(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const ExperimentOptions& options = {});

// Powers of ten from 10 up to `iterations`.
std::vector<std::size_t> default_checkpoints(std::size_t iterations);

// Proposal density of `coordinate` for z_{k+1} at each checkpoint k, on
// `grid` equal cells over the coordinate's interval. Each value is the
// mixture mass of its cell divided by the cell width, so the cells sum to 1
// up to rounding. Mean and stddev are exact mixture moments.
std::vector<DensityCheckpoint> export_density_evolution(const RunRecord& record,
                                                        std::size_t coordinate,
                                                        const std::vector<std::size_t>& checkpoints,
                                                        std::size_t grid,
                                                        const SearchDomain& domain,
                                                        const SofaConfig& config);

// Long format: k,x,density
void write_density_csv(std::ostream& out, const std::vector<DensityCheckpoint>& density);
// k,mean,std,mass
void write_density_summary_csv(std::ostream& out, const std::vector<DensityCheckpoint>& density);

}  // namespace sofa::harness
