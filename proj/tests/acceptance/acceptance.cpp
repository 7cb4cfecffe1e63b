// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures (capped at 1), so ctest reports any failing criterion.

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sofa/dvm.hpp"
#include "sofa/harness/experiment.hpp"
#include "sofa/objectives.hpp"
#include "sofa/sampler.hpp"
#include "sofa/selection.hpp"
#include "sofa/simd/kernels.hpp"
#include "sofa/sofa.hpp"

using namespace sofa;
namespace fs = std::filesystem;

namespace {

int failures = 0;
std::atomic<std::size_t> outside{0};  // proposals outside the box, all runs

struct Outcome {
  bool pass = false;
  std::string detail;
};

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = limit_seconds <= 0.0 || secs < limit_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s [%.2fs%s]\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
              in_time ? "" : ", over time limit");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunRecord tracked_run(const SearchDomain& d, const Objective& obj, const SofaConfig& c) {
  RunRecord r = run(d, obj, c);
  outside += r.out_of_domain;
  return r;
}

double ks(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

Outcome selection_exactness() {
  const std::vector<double> f{1.0, 2.0};
  const auto w = selection_weights(f, 2.0);
  const double werr = std::max(std::abs(w[0] - 0.2), std::abs(w[1] - 0.8));
  Rng rng(1);
  const std::size_t n = 1000000;
  std::size_t ones = 0;
  for (std::size_t i = 0; i < n; ++i) ones += select_reference(f, 2.0, rng);
  const double sd = std::sqrt(n * 0.8 * 0.2);
  const double z = (static_cast<double>(ones) - 0.8 * n) / sd;
  return {werr < 1e-12 && std::abs(z) <= 3.0,
          fmt("weight error %.1e, empirical p1 = %.5f (z = %.2f)", werr, ones / double(n), z)};
}

Outcome argmax_concentration() {
  const std::vector<double> f{1.0, 1.1, 1.05};
  const auto w = selection_weights(f, 500.0);
  Rng rng(2);
  std::size_t other = 0;
  for (int i = 0; i < 100000; ++i) other += select_reference(f, 500.0, rng) != 1;
  return {w[1] >= 1.0 - 1e-9 && other <= 2,
          fmt("P(argmax) = 1 - %.2e, %zu non-argmax draws in 1e5", 1.0 - w[1], other)};
}

Outcome sampler_ks() {
  Rng params(3);
  double worst_c = 0.0;
  double worst_g = 0.0;
  const boost::math::normal normal;
  for (int set = 0; set < 20; ++set) {
    const double lo = -10.0 * uniform01(params);
    const double hi = lo + 0.1 + 10.0 * uniform01(params);
    const double c = lo - 1.0 + (hi - lo + 2.0) * uniform01(params);
    const double eps = std::pow(10.0, -6.0 + 6.0 * uniform01(params));
    const double sigma = std::pow(10.0, -2.0 + 2.0 * uniform01(params)) * (hi - lo);
    Rng rng(1000 + set);
    std::vector<double> xc(100000), xg(100000);
    for (double& x : xc) x = sample_truncated_cauchy(c, eps, lo, hi, uniform01_closed(rng));
    for (double& x : xg) x = sample_truncated_gaussian(c, sigma, lo, hi, rng);
    const double s = std::sqrt(eps);
    const double a0 = std::atan((lo - c) / s);
    const double a1 = std::atan((hi - c) / s);
    worst_c = std::max(worst_c, ks(xc, [&](double x) { return (std::atan((x - c) / s) - a0) / (a1 - a0); }));
    const double p0 = boost::math::cdf(normal, (lo - c) / sigma);
    const double p1 = boost::math::cdf(normal, (hi - c) / sigma);
    worst_g = std::max(worst_g, ks(xg, [&](double x) {
      return (boost::math::cdf(normal, (x - c) / sigma) - p0) / (p1 - p0);
    }));
  }
  return {worst_c < 0.01 && worst_g < 0.01, fmt("max KS cauchy %.4f, gaussian %.4f", worst_c, worst_g)};
}

Outcome kernel_identity() {
  Rng rng(4);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double k = std::floor(1.0 + 1e6 * uniform01(rng));
    const double radius = 0.01 + 100.0 * uniform01(rng);
    const double r = radius * uniform01(rng);
    const double sigma = gaussian_sigma(k, radius);
    const double power = std::pow(k + 1.0, -r * r / (2.0 * radius * radius));
    const double gauss = std::exp(-r * r / (2.0 * sigma * sigma));
    worst = std::max(worst, std::abs(gauss - power) / power);
  }
  return {worst < 1e-12, fmt("max relative error %.2e", worst)};
}

Outcome density_property() {
  const SearchDomain d({0.5, 0.5}, {1.0, 1.0});
  const Objective obj = constant_objective(1.0);
  std::vector<std::size_t> occupied(50);
  harness::parallel_for(50, 0, [&](std::size_t i) {
    SofaConfig c;
    c.max_iterations = 10000;
    c.seed = derive_seed(5, 0, i);
    const RunRecord r = tracked_run(d, obj, c);
    std::set<int> cells;
    for (const auto& t : r.trials) {
      const int a = std::min(9, static_cast<int>(t.coords[0] * 10.0));
      const int b = std::min(9, static_cast<int>(t.coords[1] * 10.0));
      cells.insert(10 * a + b);
    }
    occupied[i] = cells.size();
  });
  const auto good = std::count_if(occupied.begin(), occupied.end(), [](std::size_t n) { return n >= 95; });
  return {good >= 47, fmt("%td/50 runs cover >= 95 cells (min %zu)", good,
                          *std::min_element(occupied.begin(), occupied.end()))};
}

Outcome convergence_property() {
  // Global bump at the domain center, local bump 6 widths away along the diagonal.
  const std::size_t dim = 10;
  const double w = 2.0;
  const std::vector<double> c1(dim, 0.0);
  const std::vector<double> c2(dim, 6.0 * w / std::sqrt(double(dim)));
  const Objective obj = two_bump(c1, 1.0, c2, 0.9, w);
  const SearchDomain d(std::vector<double>(dim, 0.0), std::vector<double>(dim, 20.0));
  const double j_star = obj.known_optimum()->value;
  std::vector<double> err(50);
  std::vector<int> near1(50);
  harness::parallel_for(50, 0, [&](std::size_t i) {
    SofaConfig c;
    c.kernel = SimplifiedCauchy{0.7, 2.5e-6};
    c.max_iterations = 20000;
    c.seed = derive_seed(6, 0, i);
    const RunRecord r = tracked_run(d, obj, c);
    const auto z = d.pad_with_centers(r.final_best().coords);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      d1 += (z[j] - c1[j]) * (z[j] - c1[j]);
      d2 += (z[j] - c2[j]) * (z[j] - c2[j]);
    }
    err[i] = j_star - r.final_best().fitness;
    near1[i] = d1 < d2;
  });
  const auto conv = std::count_if(err.begin(), err.end(), [](double e) { return e < 1e-3; });
  const auto near = std::count(near1.begin(), near1.end(), 1);
  return {conv >= 45 && near >= 45,
          fmt("Err < 1e-3 in %td/50, nearer center1 in %td/50, max Err %.2e", conv, near,
              *std::max_element(err.begin(), err.end()))};
}

long double g_oracle(const dvm::StageRates& r, long double x) {
  const long double scale = r.reproduction *
                            std::exp(-(long double)r.mortality_young * r.maturation_young -
                                     (long double)r.mortality_juvenile * (r.maturation_juvenile - r.maturation_young));
  const long double late = (long double)r.mortality_juvenile * (r.max_reproduction_age - r.maturation_juvenile);
  return scale * (std::exp(-(long double)r.maturation_juvenile * x) -
                  std::exp(-(long double)r.max_reproduction_age * x - late)) -
         r.mortality_adult - x;
}

std::optional<double> oracle_root(const dvm::StageRates& r) {
  const long double lo = -10, hi = 10;
  const std::size_t points = 1000000;
  long double right = hi;
  if (g_oracle(r, right) > 0) return std::nullopt;
  for (std::size_t i = 1; i <= points; ++i) {
    const long double left = hi - (hi - lo) * i / points;
    if (g_oracle(r, left) >= 0) {
      long double a = left, b = right;
      for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (a + b);
        (g_oracle(r, mid) >= 0 ? a : b) = mid;
      }
      return static_cast<double>(0.5L * (a + b));
    }
    right = left;
  }
  return std::nullopt;
}

Outcome eigen_solver() {
  dvm::StageRates zero{0.1, 0.2, 0.3, 1.0, 2.0, 10.0, 0.0};
  const auto z = dvm::dominant_eigenvalue(zero);
  bool ok = z && *z == -0.3;
  Rng rng(7);
  double worst_g = 0.0;
  double worst_diff = 0.0;
  int solved = 0;
  int outside_bracket = 0;
  // Draw until 100 rate sets have their dominant root inside [-10, 10]; for
  // the others the solver must also report no root.
  while (solved < 100) {
    dvm::StageRates r;
    r.mortality_young = 0.5 * uniform01(rng);
    r.mortality_juvenile = 0.5 * uniform01(rng);
    r.mortality_adult = 0.5 * uniform01(rng);
    r.maturation_young = 0.5 + 10.0 * uniform01(rng);
    r.maturation_juvenile = r.maturation_young + 0.5 + 10.0 * uniform01(rng);
    r.max_reproduction_age = r.maturation_juvenile + 1.0 + 30.0 * uniform01(rng);
    r.reproduction = 50.0 * uniform01(rng);
    const auto got = dvm::dominant_eigenvalue(r);
    const auto want = oracle_root(r);
    if (got.has_value() != want.has_value()) {
      ok = false;
      continue;
    }
    if (!got) {
      ++outside_bracket;
      continue;
    }
    ++solved;
    worst_g = std::max(worst_g, std::abs(dvm::characteristic_residual(r, *got)));
    worst_diff = std::max(worst_diff, std::abs(*got - *want));
  }
  ok = ok && worst_g < 1e-10 && worst_diff < 1e-8;
  return {ok, fmt("b = 0 gives %.17g; 100 roots (%d draws without one, agreed), max |g| %.1e, "
                  "max oracle diff %.1e",
                  z ? *z : NAN, outside_bracket, worst_g, worst_diff)};
}

Outcome fourier_machinery() {
  Rng rng(8);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> c(2 * 27 + 1);
    for (double& x : c) x = -50.0 + 100.0 * uniform01(rng);
    const double t = uniform01(rng);
    long double acc = 0.0L;
    for (std::size_t m = 27; m >= 1; --m) {
      const long double arg = 2.0L * std::numbers::pi_v<long double> * m * t;
      acc += c[2 * m - 1] * std::sin(arg) + c[2 * m] * std::cos(arg);
    }
    acc += c[0];
    worst = std::max(worst, std::abs(dvm::eval_fourier(c, t) - static_cast<double>(acc)) /
                                (1.0 + std::abs(static_cast<double>(acc))));
  }
  const dvm::PiecewiseTrajectory traj{{dvm::PiecewiseStage::symmetric(8.0, 12.0, 0.2, 0.3),
                                       dvm::PiecewiseStage::symmetric(8.0, 60.0, 0.2, 0.3),
                                       dvm::PiecewiseStage::symmetric(15.0, 110.0, 0.15, 0.27)}};
  std::vector<double> l2;
  for (std::size_t n : {5u, 15u, 27u}) {
    const auto f = dvm::fourier_of_piecewise(traj, n);
    // Midpoint rule on a fine grid; every stage contributes.
    const std::size_t q = 200000;
    double acc = 0.0;
    for (dvm::Stage s : dvm::kStages) {
      for (std::size_t i = 0; i < q; ++i) {
        const double t = (i + 0.5) / q;
        const double e = traj.stage(s).at(t) - dvm::eval_fourier(f, s, t);
        acc += e * e / q;
      }
    }
    l2.push_back(std::sqrt(acc));
  }
  const bool decreasing = l2[0] > l2[1] && l2[1] > l2[2];
  return {worst < 1e-12 && decreasing,
          fmt("eval error %.1e; L2 error N=5 %.4f, N=15 %.4f, N=27 %.4f", worst, l2[0], l2[1], l2[2])};
}

std::optional<harness::ExperimentResult> demo;

Outcome dvm_demo() {
  harness::ExperimentConfig c = harness::load_config(fs::path(SOFA_SOURCE_DIR) / "configs/dvm_demo.json");
  harness::ExperimentOptions opt;
  opt.output_dir = fs::current_path() / "acceptance_out" / "dvm_demo";
  demo = harness::run_experiment(c, opt);
  outside += demo->out_of_domain;
  const auto& m = demo->metrics;
  bool monotone = true;
  for (std::size_t k = 1; k < m.iterations(); ++k) monotone = monotone && m.mean_err[k] <= m.mean_err[k - 1];
  const double p = m.p_delta[0].back();
  bool shrinking = demo->density.size() >= 2;
  std::string stds;
  for (std::size_t i = 0; i < demo->density.size(); ++i) {
    if (i > 0) shrinking = shrinking && demo->density[i].stddev < demo->density[i - 1].stddev;
    stds += fmt("%s%.3g", i ? " > " : "", demo->density[i].stddev);
  }
  return {monotone && p >= 0.5 && shrinking,
          fmt("J* = %.6g (%s), mean Err monotone: %s, final Err %.2e, P_1e-3 = %.2f, density std %s",
              demo->reference.value, demo->reference.source.c_str(), monotone ? "yes" : "no",
              m.mean_err.back(), p, stds.c_str())};
}

Outcome determinism() {
  const nlohmann::json doc = nlohmann::json::parse(R"({
    "name": "determinism", "seed": 99, "repetitions": 16, "iterations": 5000,
    "objective": {"type": "two_bump", "center1": 0.0, "center2": 1.2, "width": 0.5},
    "domain": {"dimension": 4, "widths": 6.0},
    "record_files": "none"
  })");
  const harness::ExperimentConfig c = harness::parse_config(doc);
  std::string csv[2];
  const std::size_t workers[2] = {1, 8};
  for (int i = 0; i < 2; ++i) {
    harness::ExperimentOptions opt;
    opt.workers = workers[i];
    opt.output_dir = fs::current_path() / "acceptance_out" / ("determinism_" + std::to_string(workers[i]));
    const auto r = harness::run_experiment(c, opt);
    outside += r.out_of_domain;
    std::ifstream in(*opt.output_dir / "metrics.csv", std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    csv[i] = s.str();
  }
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {same, fmt("metrics.csv %s (%zu bytes)", same ? "byte-identical" : "differs", csv[0].size())};
}

}  // namespace

int main() {
  std::printf("kernels: %s\n", std::string(simd::isa_name(simd::kernels().isa)).c_str());
  criterion(1, "selection weights exact", 1.0, selection_exactness);
  criterion(2, "large-k argmax concentration", 1.0, argmax_concentration);
  criterion(3, "sampler KS", 10.0, sampler_ks);
  criterion(4, "gaussian kernel identity", 1.0, kernel_identity);
  criterion(5, "constant objective dense coverage", 60.0, density_property);
  criterion(6, "two-bump convergence", 300.0, convergence_property);
  criterion(7, "eigenvalue solver", 30.0, eigen_solver);
  criterion(8, "Fourier machinery", 10.0, fourier_machinery);
  criterion(10, "DVM demo", 600.0, dvm_demo);
  criterion(11, "determinism across workers", 60.0, determinism);
  criterion(9, "in-domain proposals", 0.0, [] {
    return Outcome{outside == 0, fmt("%zu proposals outside the box over criteria 5, 6, 10, 11",
                                     outside.load())};
  });
  return failures == 0 ? 0 : 1;
}
