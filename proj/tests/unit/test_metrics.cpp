#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>
#include <vector>

#include "sofa/harness/metrics.hpp"
#include "sofa/harness/record_io.hpp"
#include "sofa/harness/report.hpp"
#include "sofa/objectives.hpp"

using namespace sofa;
using namespace sofa::harness;

namespace {

RunSeries series(std::vector<double> best, std::vector<std::uint32_t> attempts = {},
                 std::vector<std::uint32_t> infeasible = {}) {
  RunSeries s;
  s.best_fitness = std::move(best);
  s.attempts = attempts.empty() ? std::vector<std::uint32_t>(s.best_fitness.size(), 1) : attempts;
  s.infeasible =
      infeasible.empty() ? std::vector<std::uint32_t>(s.best_fitness.size(), 0) : infeasible;
  return s;
}

}  // namespace

TEST_CASE("function error keeps its sign") {
  CHECK(function_error(1.0, 0.75) == 0.25);
  CHECK(function_error(1.0, 1.25) == -0.25);
}

TEST_CASE("convergence probability counts strict hits") {
  const std::vector<RunSeries> runs{series({0.5, 0.9995}), series({0.5, 0.998}),
                                    series({0.999, 0.999}), series({0.9999, 1.0})};
  CHECK(convergence_probability(runs, 1.0, 1e-3, 1) == 0.25);
  // 1 - 0.999 is not strictly below 1e-3 in binary, so that run misses.
  CHECK(convergence_probability(runs, 1.0, 1e-3, 2) == 0.5);
  // 0.9995 rounds up, so its error is just under 5e-4.
  CHECK(convergence_probability(runs, 1.0, 5e-4, 2) == 0.5);
  // Stopped runs keep their last value.
  CHECK(convergence_probability(runs, 1.0, 1e-3, 100) == 0.5);
  CHECK_THROWS_AS(convergence_probability(std::span<const RunSeries>{}, 1.0, 1e-3, 1),
                  std::invalid_argument);
}

TEST_CASE("aggregate equals a direct loop") {
  const std::vector<RunSeries> runs{series({0.2, 0.6, 0.99}, {1, 3, 1}, {0, 2, 0}),
                                    series({0.4, 0.9999, 0.9999}, {2, 1, 1}, {1, 0, 0})};
  const MetricSeries m = aggregate(runs, 1.0, {1e-3, 5e-4});
  REQUIRE(m.iterations() == 3);
  CHECK(m.mean_err[0] == doctest::Approx(0.7));
  CHECK(m.mean_err[1] == doctest::Approx((0.4 + 0.0001) / 2.0));
  CHECK(m.p_delta[0][1] == 0.5);
  CHECK(m.p_delta[1][2] == 0.5);
  CHECK(m.unfeasible_frac[0] == doctest::Approx(1.0 / 3.0));
  CHECK(m.unfeasible_frac[1] == doctest::Approx(0.5));
  CHECK(m.unfeasible_frac[2] == 0.0);
}

TEST_CASE("aggregate over records matches RunSeries") {
  const SearchDomain d({0.0, 0.0}, {2.0, 2.0});
  std::vector<RunRecord> records;
  std::vector<RunSeries> compact;
  for (std::uint64_t s = 0; s < 4; ++s) {
    records.push_back(random_search_baseline(d, gaussian_bump({0.0, 0.0}, 0.5), 300, s));
    compact.push_back(RunSeries::from_record(records.back()));
  }
  for (std::size_t k : {1u, 50u, 300u}) {
    CHECK(convergence_probability(records, 1.0, 1e-2, k) ==
          convergence_probability(compact, 1.0, 1e-2, k));
  }
}

TEST_CASE("windowed average") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto w = windowed_average(v, 2);
  CHECK(w == std::vector<double>{1.0, 1.5, 2.5, 3.5});
  CHECK(windowed_average(v, 10).back() == 2.5);
}

TEST_CASE("number formatting") {
  CHECK(format_delta(1e-3) == "1e-3");
  CHECK(format_delta(5e-4) == "5e-4");
  CHECK(format_delta(2.5e-4) == "2.5e-4");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("metrics csv round trip") {
  const std::vector<RunSeries> runs{series({0.2, 0.6, 0.99}), series({0.4, 0.9999, 1.0 / 3.0 + 0.6})};
  const MetricSeries m = aggregate(runs, 1.0, {1e-3, 5e-4});
  std::stringstream io;
  write_metrics_csv(io, m);
  const std::string text = io.str();
  CHECK(text.rfind("iteration,mean_err,p_1e-3,p_5e-4,unfeasible_frac\n", 0) == 0);
  const MetricSeries back = read_metrics_csv(io);
  CHECK(back.deltas == m.deltas);
  CHECK(back.mean_err == m.mean_err);
  CHECK(back.p_delta == m.p_delta);
  std::stringstream bad("iteration,foo\n1,2\n");
  CHECK_THROWS_AS(read_metrics_csv(bad), std::runtime_error);
}

TEST_CASE("record files round trip exactly") {
  const SearchDomain d({0.5, 0.5, 3.0}, {1.0, 1.0, 2.0});
  SofaConfig c;
  c.max_iterations = 200;
  c.initial_dims = 1;
  c.growth_interval = 50;
  c.infeasible_policy = FloorFitness{1e-9};
  const Objective obj("odd", [](std::span<const double> z) {
    return z[0] > 0.8 ? FitnessOutcome::infeasible(InfeasibleReason::Other)
                      : FitnessOutcome::feasible(1.0 + z[0] * z[1]);
  });
  const RunRecord r = run(d, obj, c);
  std::stringstream io;
  write_record(io, r, d);
  const RunRecord back = read_record(io);
  REQUIRE(back.iterations() == r.iterations());
  for (std::size_t i = 0; i < r.iterations(); ++i) {
    CHECK(back.trials[i].fitness == r.trials[i].fitness);
    CHECK(back.trials[i].feasible == r.trials[i].feasible);
    CHECK(back.trials[i].coords == d.pad_with_centers(r.trials[i].coords));
    CHECK(back.best_fitness[i] == r.best_fitness[i]);
    CHECK(back.best_index[i] == r.best_index[i]);
    CHECK(back.attempts[i] == r.attempts[i]);
    CHECK(back.infeasible[i] == r.infeasible[i]);
  }
  std::stringstream bad("iteration,fitness\n1,abc\n");
  CHECK_THROWS_AS(read_record(bad), std::runtime_error);
}

TEST_CASE("report picks decades and the last iteration") {
  CHECK(report_iterations(2000) == std::vector<std::size_t>{1, 10, 100, 1000, 2000});
  CHECK(report_iterations(100) == std::vector<std::size_t>{1, 10, 100});
  const std::vector<RunSeries> runs{series({0.2, 0.6, 0.99})};
  const MetricSeries a = aggregate(runs, 1.0, {1e-3});
  const MetricSeries b = aggregate(runs, 1.0, {1e-2});
  std::stringstream out;
  write_report(out, {{"sofa", a}, {"random", a}}, {1, 3, 10});
  std::string line;
  std::getline(out, line);
  CHECK(line == "source,iteration,mean_err,p_1e-3,unfeasible_frac");
  int rows = 0;
  while (std::getline(out, line)) ++rows;
  CHECK(rows == 4);
  std::stringstream sink;
  CHECK_THROWS_AS(write_report(sink, {{"a", a}, {"b", b}}), std::invalid_argument);
}
