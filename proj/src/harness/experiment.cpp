#include "sofa/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sofa/density.hpp"
#include "sofa/harness/record_io.hpp"
#include "sofa/objectives.hpp"
#include "sofa/rng.hpp"
#include "sofa/simd/kernels.hpp"

namespace sofa::harness {
namespace {

using nlohmann::json;

std::size_t resolve_workers(std::size_t requested, std::size_t jobs) {
  std::size_t w = requested;
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(w, jobs));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SofaConfig run_config(const ExperimentConfig& config, std::size_t iterations, std::uint64_t seed) {
  SofaConfig c = config.sofa;
  c.max_iterations = iterations;
  c.seed = seed;
  return c;
}

json metrics_tail(const MetricSeries& m) {
  json out;
  const std::size_t last = m.iterations() - 1;
  out["iterations"] = m.iterations();
  out["mean_err"] = m.mean_err[last];
  for (std::size_t d = 0; d < m.deltas.size(); ++d) {
    out["p_" + format_delta(m.deltas[d])] = m.p_delta[d][last];
  }
  out["unfeasible_frac"] = m.unfeasible_frac[last];
  return out;
}

std::string run_file_name(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%04zu.csv", id);
  return buf;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t master, std::size_t run) {
  return derive_seed(master, kRunStream, run);
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& job) {
  if (count == 0) return;
  const std::size_t threads = resolve_workers(workers, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

json reference_provenance(const ExperimentConfig& config) {
  return json{
      {"objective", config.objective},
      {"domain", config.domain},
      {"sofa", config.raw.value("sofa", json::object())},
      {"iterations", config.iterations * config.estimate.iterations_multiplier},
      {"seeds", config.estimate.seeds},
      {"master_seed", config.seed},
  };
}

ReferenceOptimum estimate_reference_optimum(const ExperimentConfig& config, const Problem& problem,
                                            std::size_t workers) {
  const std::size_t iterations = config.iterations * config.estimate.iterations_multiplier;
  const std::size_t seeds = config.estimate.seeds;
  std::vector<double> best(seeds, 0.0);
  std::vector<std::vector<double>> coords(seeds);
  parallel_for(seeds, workers, [&](std::size_t i) {
    const RunRecord r =
        run(problem.domain, problem.objective,
            run_config(config, iterations, derive_seed(config.seed, kEstimateStream, i)));
    const TrialPoint& b = r.final_best();
    best[i] = b.fitness;
    coords[i] = problem.domain.pad_with_centers(b.coords);
  });
  std::size_t arg = 0;
  for (std::size_t i = 1; i < seeds; ++i) {
    if (best[i] > best[arg]) arg = i;
  }
  return ReferenceOptimum{best[arg], coords[arg], "estimated"};
}

ReferenceOptimum resolve_reference(const ExperimentConfig& config, const Problem& problem,
                                   const ExperimentOptions& options) {
  if (config.reference) return *config.reference;
  if (const auto& known = problem.objective.known_optimum()) {
    return ReferenceOptimum{known->value, known->coords, "analytic"};
  }
  const std::filesystem::path dir = options.output_dir.value_or(config.output_dir);
  const std::filesystem::path cache = dir / "reference.json";
  ExperimentConfig keyed = config;
  if (options.seed) keyed.seed = *options.seed;
  const json provenance = reference_provenance(keyed);
  if (options.use_cache && std::filesystem::exists(cache)) {
    std::ifstream in(cache);
    json doc = json::parse(in, nullptr, false);
    if (!doc.is_discarded() && doc.value("provenance", json()) == provenance) {
      return ReferenceOptimum{doc.at("J_star").get<double>(),
                              doc.at("v_star").get<std::vector<double>>(), "cache"};
    }
  }
  ReferenceOptimum ref =
      estimate_reference_optimum(keyed, problem, options.workers.value_or(config.workers));
  if (options.write_files) {
    std::filesystem::create_directories(dir);
    json doc{{"J_star", ref.value}, {"v_star", ref.coords}, {"provenance", provenance}};
    write_text(cache, doc.dump(2) + "\n");
  }
  return ref;
}

std::vector<std::size_t> default_checkpoints(std::size_t iterations) {
  std::vector<std::size_t> out;
  for (std::size_t k = 10; k <= iterations; k *= 10) out.push_back(k);
  if (out.empty()) out.push_back(iterations);
  return out;
}

std::vector<DensityCheckpoint> export_density_evolution(const RunRecord& record,
                                                        std::size_t coordinate,
                                                        const std::vector<std::size_t>& checkpoints,
                                                        std::size_t grid,
                                                        const SearchDomain& domain,
                                                        const SofaConfig& raw_config) {
  if (grid < 1) throw std::invalid_argument("density grid must have at least one cell");
  const SofaConfig config = resolve(raw_config, domain);
  std::vector<DensityCheckpoint> out;
  for (std::size_t k : checkpoints) {
    const ProposalMixture mixture(record, k, coordinate, domain, config);
    DensityCheckpoint cp;
    cp.k = k;
    const Moments m = mixture.moments();
    cp.mean = m.mean;
    cp.stddev = std::sqrt(std::max(0.0, m.variance));
    const double lo = mixture.lower();
    const double hi = mixture.upper();
    const double h = (hi - lo) / static_cast<double>(grid);
    double prev = 0.0;  // mixture cdf at lo
    double mass = 0.0;
    cp.x.resize(grid);
    cp.density.resize(grid);
    for (std::size_t c = 0; c < grid; ++c) {
      const double b = c + 1 == grid ? hi : lo + h * static_cast<double>(c + 1);
      const double cur = mixture.cdf(b);
      cp.x[c] = lo + h * (static_cast<double>(c) + 0.5);
      cp.density[c] = (cur - prev) / h;
      mass += cp.density[c] * h;
      prev = cur;
    }
    cp.mass = mass;
    out.push_back(std::move(cp));
  }
  return out;
}

void write_density_csv(std::ostream& out, const std::vector<DensityCheckpoint>& density) {
  out << "k,x,density\n";
  for (const auto& cp : density) {
    for (std::size_t i = 0; i < cp.x.size(); ++i) {
      out << cp.k << ',' << format_double(cp.x[i]) << ',' << format_double(cp.density[i]) << '\n';
    }
  }
}

void write_density_summary_csv(std::ostream& out, const std::vector<DensityCheckpoint>& density) {
  out << "k,mean,std,mass\n";
  for (const auto& cp : density) {
    out << cp.k << ',' << format_double(cp.mean) << ',' << format_double(cp.stddev) << ','
        << format_double(cp.mass) << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& input, const ExperimentOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentConfig config = input;
  if (options.seed) config.seed = *options.seed;
  if (options.output_dir) config.output_dir = *options.output_dir;
  const std::size_t workers = options.workers.value_or(config.workers);

  const Problem problem = build_problem(config);
  ExperimentResult result;
  result.output_dir = config.output_dir;
  const std::filesystem::path runs_dir = config.output_dir / "runs";
  if (options.write_files) {
    std::filesystem::create_directories(config.output_dir);
    if (config.record_files.mode != RecordFiles::Mode::None) {
      std::filesystem::create_directories(runs_dir);
    }
  }
  ExperimentOptions ref_options = options;
  ref_options.output_dir = config.output_dir;
  ref_options.seed = config.seed;
  result.reference = resolve_reference(config, problem, ref_options);

  const std::size_t reps = config.repetitions;
  result.runs.resize(reps);
  std::optional<RunRecord> density_record;
  std::mutex density_mutex;
  parallel_for(reps, workers, [&](std::size_t i) {
    RunOutcome& o = result.runs[i];
    o.id = i;
    o.seed = run_seed(config.seed, i);
    RunRecord r = run(problem.domain, problem.objective, run_config(config, config.iterations, o.seed));
    o.out_of_domain = r.out_of_domain;
    o.series = RunSeries::from_record(r);
    o.final_best = r.final_best().fitness;
    o.best_coords = problem.domain.pad_with_centers(r.final_best().coords);
    o.stopped_by_dispersion = r.stopped_by_dispersion;
    if (options.write_files && config.record_files.keep(i)) {
      write_record(runs_dir / run_file_name(i), r, problem.domain);
    }
    if (config.density && config.density->run == i) {
      std::lock_guard lock(density_mutex);
      density_record = std::move(r);
    }
  });
  std::vector<RunSeries> series;
  series.reserve(reps);
  for (const RunOutcome& o : result.runs) {
    series.push_back(o.series);
    result.out_of_domain += o.out_of_domain;
  }
  result.metrics = aggregate(series, result.reference.value, config.deltas);

  if (config.baseline) {
    std::vector<RunSeries> base(reps);
    parallel_for(reps, workers, [&](std::size_t i) {
      base[i] = RunSeries::from_record(random_search_baseline(
          problem.domain, problem.objective, config.iterations,
          derive_seed(config.seed, kBaselineStream, i)));
    });
    result.baseline = aggregate(base, result.reference.value, config.deltas);
  }

  if (config.density && density_record) {
    const auto checkpoints = config.density->checkpoints.empty()
                                 ? default_checkpoints(density_record->iterations())
                                 : config.density->checkpoints;
    result.density = export_density_evolution(*density_record, config.density->coordinate,
                                              checkpoints, config.density->grid, problem.domain,
                                              run_config(config, config.iterations, 0));
  }

  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (options.write_files) {
    std::ostringstream metrics;
    write_metrics_csv(metrics, result.metrics);
    write_text(config.output_dir / "metrics.csv", metrics.str());
    std::ostringstream window;
    write_window_csv(window, result.metrics, config.unfeasible_window);
    write_text(config.output_dir / "unfeasible_window.csv", window.str());
    if (result.baseline) {
      std::ostringstream base;
      write_metrics_csv(base, *result.baseline);
      write_text(config.output_dir / "baseline_metrics.csv", base.str());
    }
    if (!result.density.empty()) {
      std::ostringstream d;
      write_density_csv(d, result.density);
      write_text(config.output_dir / "density.csv", d.str());
      std::ostringstream ds;
      write_density_summary_csv(ds, result.density);
      write_text(config.output_dir / "density_summary.csv", ds.str());
    }

    json summary;
    summary["name"] = config.name;
    summary["seed"] = config.seed;
    summary["repetitions"] = reps;
    summary["iterations"] = config.iterations;
    summary["dimension"] = problem.domain.dimension();
    summary["objective"] = problem.objective.name();
    summary["isa"] = std::string(simd::isa_name(simd::kernels().isa));
    summary["reference"] = {{"J_star", result.reference.value},
                            {"v_star", result.reference.coords},
                            {"source", result.reference.source}};
    summary["final"] = metrics_tail(result.metrics);
    if (result.baseline) summary["baseline_final"] = metrics_tail(*result.baseline);
    double best = 0.0;
    std::size_t best_run = 0;
    json runs = json::array();
    for (const RunOutcome& o : result.runs) {
      runs.push_back({{"id", o.id},
                      {"seed", o.seed},
                      {"final_best", o.final_best},
                      {"iterations", o.series.iterations()},
                      {"stopped_by_dispersion", o.stopped_by_dispersion}});
      if (o.final_best > best) {
        best = o.final_best;
        best_run = o.id;
      }
    }
    summary["best"] = {{"run", best_run},
                       {"fitness", best},
                       {"coords", result.runs[best_run].best_coords}};
    summary["stale_reference"] = best > result.reference.value;
    summary["out_of_domain"] = result.out_of_domain;
    summary["elapsed_seconds"] = result.elapsed_seconds;
    summary["runs"] = std::move(runs);
    write_text(config.output_dir / "summary.json", summary.dump(2) + "\n");
  }
  return result;
}

}  // namespace sofa::harness
