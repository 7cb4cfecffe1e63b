#pragma once

// Experiment configuration, read from a JSON file. Every key except
// "objective" and "domain" is optional; defaults are listed in README.md.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sofa/domain.hpp"
#include "sofa/dvm.hpp"
#include "sofa/objective.hpp"
#include "sofa/sofa.hpp"

namespace sofa::harness {

struct ReferenceOptimum {
  double value = 0.0;            // J*
  std::vector<double> coords;    // v*, may be empty when only J* is given
  std::string source;            // "config", "analytic", "estimated", "cache"
};

struct EstimateOptions {
  std::size_t iterations_multiplier = 10;
  std::size_t seeds = 10;
};

struct DensityOptions {
  std::size_t coordinate = 0;                   // 0-based
  std::vector<std::size_t> checkpoints;         // empty: powers of ten up to the run length
  std::size_t grid = 200;
  std::size_t run = 0;                          // which repetition to export
};

struct RecordFiles {
  enum class Mode { All, First, None };
  Mode mode = Mode::All;
  std::size_t count = 0;  // for Mode::First

  bool keep(std::size_t run) const {
    return mode == Mode::All || (mode == Mode::First && run < count);
  }
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  std::size_t repetitions = 200;
  std::size_t iterations = 200000;
  std::size_t workers = 0;  // 0: hardware concurrency
  std::vector<double> deltas{1e-3, 5e-4};
  std::filesystem::path output_dir = "results";
  nlohmann::json objective;
  nlohmann::json domain;
  SofaConfig sofa;  // seed and max_iterations are set per run
  std::optional<ReferenceOptimum> reference;
  EstimateOptions estimate;
  std::optional<DensityOptions> density;
  RecordFiles record_files;
  std::size_t unfeasible_window = 100;
  bool baseline = false;  // also run uniform random search with the same budget

  nlohmann::json raw;  // the parsed file, kept for provenance
};

// Objective and domain materialized from a config.
struct Problem {
  SearchDomain domain;
  Objective objective;
  std::shared_ptr<const dvm::DvmModel> model;  // set for "dvm" objectives
};

// Parses and validates (including building the problem once), so that a bad
// config fails before any run starts. A relative output_dir is resolved
// against `base_dir` when one is given, else left relative to the working
// directory. Throws std::invalid_argument naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

Problem build_problem(const ExperimentConfig& config);

SofaConfig parse_sofa(const nlohmann::json& doc);
dvm::EnvironmentConfig parse_environment(const nlohmann::json& doc);
nlohmann::json environment_to_json(const dvm::EnvironmentConfig& env);

}  // namespace sofa::harness
