// Command-line front end: run experiments, estimate reference optima, export
// proposal densities from run records, and tabulate metrics files.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sofa/harness/config.hpp"
#include "sofa/harness/experiment.hpp"
#include "sofa/harness/record_io.hpp"
#include "sofa/harness/report.hpp"
#include "sofa/simd/kernels.hpp"

namespace {

using namespace sofa;
using namespace sofa::harness;

struct Overrides {
  std::string output_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t workers = 0;
  bool workers_set = false;
  bool no_cache = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--output-dir", o.output_dir, "Directory for results (overrides the config)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t s) { o.seed = s; o.seed_set = true; }, "Master seed");
  cmd->add_option_function<std::size_t>(
      "--workers", [&o](std::size_t w) { o.workers = w; o.workers_set = true; },
      "Worker threads (0: all cores)");
  cmd->add_flag("--no-cache", o.no_cache, "Ignore a cached reference.json");
}

ExperimentOptions to_options(const Overrides& o) {
  ExperimentOptions opt;
  if (!o.output_dir.empty()) opt.output_dir = o.output_dir;
  if (o.seed_set) opt.seed = o.seed;
  if (o.workers_set) opt.workers = o.workers;
  opt.use_cache = !o.no_cache;
  return opt;
}

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

void print_final(const std::string& label, const MetricSeries& m) {
  const std::size_t last = m.iterations() - 1;
  std::cout << label << ": iterations " << m.iterations() << ", mean_err "
            << format_double(m.mean_err[last]);
  for (std::size_t d = 0; d < m.deltas.size(); ++d) {
    std::cout << ", p_" << format_delta(m.deltas[d]) << ' ' << format_double(m.p_delta[d][last]);
  }
  std::cout << ", unfeasible_frac " << format_double(m.unfeasible_frac[last]) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Survival of the fittest optimizer: experiments and tools"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel instruction set: auto, scalar, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  Overrides run_over;
  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("config", run_config, "Experiment config file")->required()->check(CLI::ExistingFile);
  add_overrides(run_cmd, run_over);

  Overrides est_over;
  std::string est_config;
  auto* est_cmd = app.add_subcommand("estimate-optimum", "Estimate and cache the reference optimum");
  est_cmd->add_option("config", est_config, "Experiment config file")->required()->check(CLI::ExistingFile);
  add_overrides(est_cmd, est_over);

  std::string record_path, density_config, checkpoints_text, density_out, summary_out;
  std::size_t coordinate = 1;
  std::size_t grid = 200;
  auto* den_cmd = app.add_subcommand("density", "Export proposal densities from a run record");
  den_cmd->add_option("record", record_path, "Run record CSV")->required()->check(CLI::ExistingFile);
  den_cmd->add_option("--config", density_config, "Config the run was produced with")
      ->required()
      ->check(CLI::ExistingFile);
  den_cmd->add_option("--coordinate", coordinate, "Coordinate number (1-based)")
      ->check(CLI::PositiveNumber);
  den_cmd->add_option("--checkpoints", checkpoints_text,
                      "Comma-separated iterations (default 10, 100, ... up to the run length)");
  den_cmd->add_option("--grid", grid, "Number of cells")->check(CLI::PositiveNumber);
  den_cmd->add_option("--output", density_out, "Long-format CSV (default: stdout)");
  den_cmd->add_option("--summary", summary_out, "Per-checkpoint mean/std CSV");

  std::vector<std::string> report_inputs;
  std::vector<std::string> report_labels;
  std::string report_iters, report_out;
  auto* rep_cmd = app.add_subcommand("report", "Tabulate metrics CSVs at selected iterations");
  rep_cmd->add_option("metrics", report_inputs, "metrics.csv files")->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--labels", report_labels, "Label per input, comma-separated (default: file path)")
      ->delimiter(',');
  rep_cmd->add_option("--iterations", report_iters, "Comma-separated iterations");
  rep_cmd->add_option("--output", report_out, "Output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    simd::select_isa(simd::parse_isa(isa));

    if (*run_cmd) {
      const ExperimentConfig config = load_config(run_config);
      const ExperimentResult result = run_experiment(config, to_options(run_over));
      std::cout << "reference J* " << format_double(result.reference.value) << " ("
                << result.reference.source << ")\n";
      print_final("sofa", result.metrics);
      if (result.baseline) print_final("random", *result.baseline);
      std::cout << "proposals outside the domain: " << result.out_of_domain << '\n';
      std::cout << "results in " << result.output_dir.string() << " (" << result.elapsed_seconds
                << " s)\n";
    } else if (*est_cmd) {
      ExperimentConfig config = load_config(est_config);
      config.reference.reset();
      ExperimentOptions opt = to_options(est_over);
      const Problem problem = build_problem(config);
      const ReferenceOptimum ref = resolve_reference(config, problem, opt);
      std::cout << "J* " << format_double(ref.value) << " (" << ref.source << ")\n";
      std::cout << "v*";
      for (double x : ref.coords) std::cout << ' ' << format_double(x);
      std::cout << '\n';
    } else if (*den_cmd) {
      const ExperimentConfig config = load_config(density_config);
      const Problem problem = build_problem(config);
      const RunRecord record = read_record(record_path);
      if (record.dimension != problem.domain.dimension()) {
        throw std::invalid_argument("record dimension does not match the config domain");
      }
      if (coordinate > problem.domain.dimension()) {
        throw std::invalid_argument("--coordinate exceeds the domain dimension");
      }
      const auto checkpoints = checkpoints_text.empty() ? default_checkpoints(record.iterations())
                                                        : parse_list(checkpoints_text);
      SofaConfig sofa = config.sofa;
      sofa.max_iterations = std::max<std::size_t>(1, record.iterations());
      const auto density = export_density_evolution(record, coordinate - 1, checkpoints, grid,
                                                    problem.domain, sofa);
      if (density_out.empty()) {
        write_density_csv(std::cout, density);
      } else {
        std::ofstream out(density_out);
        write_density_csv(out, density);
      }
      if (!summary_out.empty()) {
        std::ofstream out(summary_out);
        write_density_summary_csv(out, density);
      } else if (!density_out.empty()) {
        write_density_summary_csv(std::cout, density);
      }
    } else if (*rep_cmd) {
      if (!report_labels.empty() && report_labels.size() != report_inputs.size()) {
        throw std::invalid_argument("--labels needs one label per input");
      }
      std::vector<LabeledMetrics> inputs;
      for (std::size_t i = 0; i < report_inputs.size(); ++i) {
        std::ifstream in(report_inputs[i]);
        inputs.push_back({report_labels.empty() ? report_inputs[i] : report_labels[i],
                          read_metrics_csv(in)});
      }
      const auto iters = parse_list(report_iters);
      if (report_out.empty()) {
        write_report(std::cout, inputs, iters);
      } else {
        std::ofstream out(report_out);
        write_report(out, inputs, iters);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
