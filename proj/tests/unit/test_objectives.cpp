#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "sofa/objectives.hpp"

using namespace sofa;

TEST_CASE("constant and gaussian bump values") {
  const Objective c = constant_objective(2.5);
  CHECK(c.evaluate(std::vector<double>{3.0, -1.0}).value() == 2.5);
  CHECK_FALSE(c.known_optimum().has_value());
  CHECK_THROWS_AS(constant_objective(0.0), std::invalid_argument);

  const Objective g = gaussian_bump({1.0, 2.0}, 0.5);
  CHECK(g.evaluate(std::vector<double>{1.0, 2.0}).value() == 1.0);
  CHECK(g.evaluate(std::vector<double>{1.5, 2.0}).value() == doctest::Approx(std::exp(-1.0)));
  // Short points are zero padded.
  CHECK(g.evaluate(std::vector<double>{1.0}).value() == doctest::Approx(std::exp(-16.0)));
  // Far field stays strictly positive.
  CHECK(g.evaluate(std::vector<double>{100.0, 100.0}).value() > 0.0);
  CHECK_THROWS_AS(g.evaluate(std::vector<double>{1.0, 2.0, 3.0}), std::invalid_argument);
  REQUIRE(g.known_optimum());
  CHECK(g.known_optimum()->value == 1.0);
  CHECK_THROWS_AS(gaussian_bump({0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("two_bump optimum agrees with a brute-force line search") {
  for (double sep_w : {3.5, 4.0, 6.0}) {
    CAPTURE(sep_w);
    const double w = 0.7;
    const std::vector<double> c1{0.1, -0.2, 0.3};
    std::vector<double> c2 = c1;
    for (double& x : c2) x += sep_w * w / std::sqrt(3.0);
    const Objective f = two_bump(c1, 1.0, c2, 0.9, w);
    const auto& opt = *f.known_optimum();
    CHECK(f.evaluate(opt.coords).value() == doctest::Approx(opt.value).epsilon(1e-15));

    // The maximizer is on the segment; scan it at a fine step, then compare.
    const double sep = sep_w * w;
    double best = 0.0;
    for (int i = 0; i <= 2000000; ++i) {
      const double t = sep * 0.5 * i / 2000000.0;
      std::vector<double> z(3);
      for (int j = 0; j < 3; ++j) z[j] = c1[j] + t * (c2[j] - c1[j]) / sep;
      best = std::max(best, f.evaluate(z).value());
    }
    CHECK(best - opt.value < 1e-15);
    CHECK(opt.value - best < 1e-12);

    // No nearby off-segment point does better.
    for (int j = 0; j < 3; ++j) {
      for (double h : {-1e-4, 1e-4}) {
        auto z = opt.coords;
        z[j] += h;
        CHECK(f.evaluate(z).value() <= opt.value);
      }
    }
  }
}

TEST_CASE("two_bump validation") {
  CHECK_THROWS_AS(two_bump({0.0}, 0.9, {5.0}, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(two_bump({0.0}, 1.0, {2.0}, 0.9, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(two_bump({0.0}, 1.0, {5.0, 0.0}, 0.9, 1.0), std::invalid_argument);
}

TEST_CASE("spiky objective peaks at the spike") {
  const Objective s = spiky({0.0, 0.0}, 1.0, {0.5, 0.5}, 0.01, 2.0);
  const auto& opt = *s.known_optimum();
  CHECK(s.evaluate(opt.coords).value() == doctest::Approx(opt.value));
  CHECK(opt.value == doctest::Approx(std::exp(-0.5) + 2.0 + 1e-3));
  CHECK(s.evaluate(std::vector<double>{0.0, 0.0}).value() < opt.value);
  CHECK_THROWS_AS(spiky({0.0}, 1.0, {0.5}, 0.01, 0.5), std::invalid_argument);
}

TEST_CASE("random search baseline") {
  const SearchDomain d({0.0, 0.0}, {2.0, 2.0});
  const Objective g = gaussian_bump({0.0, 0.0}, 0.5);
  const RunRecord a = random_search_baseline(d, g, 5000, 3);
  const RunRecord b = random_search_baseline(d, g, 5000, 3);
  REQUIRE(a.iterations() == 5000);
  double mean_x = 0.0;
  for (std::size_t i = 0; i < a.iterations(); ++i) {
    REQUIRE(d.contains(a.trials[i].coords));
    CHECK(a.trials[i].coords == b.trials[i].coords);
    CHECK(a.attempts[i] == 1);
    if (i > 0) CHECK(a.best_fitness[i] >= a.best_fitness[i - 1]);
    mean_x += a.trials[i].coords[0] / 5000.0;
  }
  CHECK(std::abs(mean_x) < 0.05);
  // Uniform search on a 2x2 square with a 0.5 bump: best within ~0.02.
  CHECK(a.best_fitness.back() > 0.99);

  const Objective half("half", [](std::span<const double> z) {
    return z[0] < 0.0 ? FitnessOutcome::infeasible(InfeasibleReason::Other)
                      : FitnessOutcome::feasible(1.0);
  });
  const RunRecord h = random_search_baseline(d, half, 2000, 4);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < h.iterations(); ++i) bad += h.infeasible[i];
  CHECK(bad == doctest::Approx(1000).epsilon(0.1));
}

TEST_CASE("outcome tags") {
  const FitnessOutcome bad = FitnessOutcome::infeasible(InfeasibleReason::NoEigenvalueBracket);
  CHECK_FALSE(bad.is_feasible());
  CHECK_THROWS_AS(bad.value(), std::logic_error);
  CHECK(to_string(bad.reason()) == "no eigenvalue in bracket");
  CHECK_THROWS_AS(FitnessOutcome::feasible(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FitnessOutcome::feasible(INFINITY), std::invalid_argument);
}
