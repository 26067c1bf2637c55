#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "trendlab/difference.hpp"
#include "trendlab/dual.hpp"
#include "trendlab/solver.hpp"

using namespace trendlab;

namespace {

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Piecewise linear mean with a few random knots plus unit noise.
TimeSeries random_instance(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(-5.0, 5.0);
  std::uniform_int_distribution<std::int64_t> where(2, std::int64_t(n) - 1);
  PiecewiseLinearSpec spec{{{1, level(rng)}}};
  std::vector<std::int64_t> cuts{where(rng), where(rng)};
  std::sort(cuts.begin(), cuts.end());
  for (auto c : cuts) {
    if (c > spec.knots.back().index) spec.knots.push_back({c, level(rng)});
  }
  spec.knots.push_back({std::int64_t(n), level(rng)});
  return generate(spec, {1.0, seed * 7919 + 1});
}

}  // namespace

TEST_CASE("zero lambda returns the data") {
  const auto y = random_instance(40, 1);
  for (int order : {1, 2}) {
    SolverConfig cfg;
    cfg.order = order;
    const auto est = solve(y, cfg);
    CHECK(est.converged());
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(est.m[i] == y[i]);
    CHECK(check_kkt(y, est.m, 0.0, order).passed);
  }
}

TEST_CASE("at and beyond lambda_max the fit is a single polynomial") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (int order : {1, 2}) {
      const auto y = random_instance(80, 100 + seed);
      const double lmax = lambda_max(y, order);
      SolverConfig cfg;
      cfg.order = order;
      cfg.lambda = 1.01 * lmax;
      const auto est = solve(y, cfg);
      REQUIRE(est.converged());
      CHECK(max_abs(est.w) <= 1e-8 * max_abs(y.values()));

      cfg.lambda = lmax;  // boundary inclusive
      const auto at = solve(y, cfg);
      const auto fit = polynomial_fit(y, order);
      for (std::size_t i = 0; i < y.size(); ++i) CHECK(at.m[i] == fit[i]);

      // slightly below, at least one difference is active
      cfg.lambda = 0.98 * lmax;
      const auto below = solve(y, cfg);
      REQUIRE(below.converged());
      CHECK(max_abs(below.w) > default_activity_threshold(y));
    }
  }
}

TEST_CASE("lambda_max") {
  SUBCASE("affine data") {
    std::vector<double> v;
    for (int t = 1; t <= 30; ++t) v.push_back(2.0 - 0.5 * t);
    CHECK(lambda_max(TimeSeries(v)) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("quadratic data") {
    std::vector<double> v;
    for (int t = 1; t <= 10; ++t) v.push_back(double(t * t));
    // direct solve of D D^T z = D y gives z = (12, 28, 42, 50, 50, 42, 28, 12)
    CHECK(oracle::lambda_max_direct(v, 2) == doctest::Approx(50.0));
    CHECK(lambda_max(TimeSeries(v)) == doctest::Approx(50.0).epsilon(1e-12));
  }
  SUBCASE("cumulative-sum and direct routes agree") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto y = random_instance(50, seed);
      for (int order : {1, 2}) {
        CHECK(lambda_max(y, order) ==
              doctest::Approx(oracle::lambda_max_direct(y.values(), order)).epsilon(1e-8));
      }
    }
  }
  SUBCASE("staircase example at 1.01 lambda_max is fused") {
    const auto y = generate(staircase_example(), {1.0, 4});
    SolverConfig cfg;
    cfg.lambda = 1.01 * lambda_max(y);
    const auto est = solve(y, cfg);
    CHECK(max_abs(est.w) <= 1e-8 * max_abs(y.values()));
  }
}

TEST_CASE("matches the projected-gradient dual oracle") {
  int instances = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto y = random_instance(60, 500 + seed);
    const double tol = 1e-4 * (1.0 + max_abs(y.values()));
    for (double lambda : {1.0, 10.0, 100.0}) {
      SolverConfig cfg;
      cfg.lambda = lambda;
      const auto est = solve(y, cfg);
      REQUIRE(est.converged());
      const auto ref = oracle::projected_gradient_dual(y.values(), 2, lambda);
      double dev = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) dev = std::max(dev, std::abs(est.m[i] - ref.m[i]));
      CHECK(dev <= tol);
      ++instances;
    }
  }
  CHECK(instances == 150);
}

TEST_CASE("order-1 solve matches the oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto y = random_instance(45, 900 + seed);
    for (double lambda : {0.5, 3.0, 20.0}) {
      SolverConfig cfg;
      cfg.order = 1;
      cfg.lambda = lambda;
      const auto est = solve(y, cfg);
      REQUIRE(est.converged());
      CHECK(check_kkt(y, est.m, lambda, 1).passed);
      const auto ref = oracle::projected_gradient_dual(y.values(), 1, lambda);
      for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(est.m[i] == doctest::Approx(ref.m[i]).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("estimates are optimal and self-consistent") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto y = random_instance(100, 40 + seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> frac(0.01, 1.0);
    const double lmax = lambda_max(y);
    const double l1 = frac(rng) * lmax;
    const double l2 = std::min(lmax, l1 * 1.7);

    SolverConfig cfg;
    cfg.lambda = l1;
    const auto a = solve(y, cfg);
    cfg.lambda = l2;
    const auto b = solve(y, cfg);
    REQUIRE(a.converged());
    REQUIRE(b.converged());

    // w is the recomputed difference of m
    const auto w = difference(2, a.m);
    REQUIRE(w.size() == a.w.size());
    for (std::size_t j = 0; j < w.size(); ++j) CHECK(a.w[j] == w[j]);
    CHECK(objective(y, b.m, l1, 2) >= objective(y, a.m, l1, 2) - 1e-9);
    CHECK(check_kkt(y, a.m, l1).passed);
    CHECK(check_kkt(y, b.m, l2).passed);
    CHECK(a.dual_residual <= cfg.dual_tolerance);
    CHECK(a.primal_residual <= cfg.primal_tolerance);
  }
}

TEST_CASE("warm start reproduces the cold solution") {
  const auto y = generate(staircase_example(), {1.0, 21});
  SolverConfig cfg;
  cfg.lambda = 20000.0;
  const auto cold = solve(y, cfg);
  REQUIRE(cold.converged());

  cfg.warm_start = std::make_shared<TrendEstimate>(cold);
  const auto warm = solve(y, cfg);
  REQUIRE(warm.converged());
  CHECK(warm.iterations == 0);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(warm.m[i] == doctest::Approx(cold.m[i]));

  // a warm start from a different lambda still lands on the new optimum
  cfg.lambda = 26000.0;
  const auto shifted = solve(y, cfg);
  SolverConfig fresh;
  fresh.lambda = 26000.0;
  const auto reference = solve(y, fresh);
  REQUIRE(shifted.converged());
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(shifted.m[i] == doctest::Approx(reference.m[i]).epsilon(1e-9));
  }
}

TEST_CASE("ADMM backend agrees with the interior-point backend") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto y = random_instance(60, 300 + seed);
    for (int order : {1, 2}) {
      for (double lambda : {1.0, 10.0}) {
        SolverConfig cfg;
        cfg.order = order;
        cfg.lambda = lambda;
        const auto ipm = solve(y, cfg);
        cfg.backend = SolverBackend::admm;
        cfg.max_iterations = 200000;
        const auto admm = solve(y, cfg);
        REQUIRE(ipm.converged());
        REQUIRE(admm.converged());
        for (std::size_t i = 0; i < y.size(); ++i) {
          CHECK(admm.m[i] == doctest::Approx(ipm.m[i]).epsilon(1e-8).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("iteration budget exhaustion is reported, not hidden") {
  const auto y = generate(staircase_example(), {1.0, 5});
  for (auto backend : {SolverBackend::interior_point, SolverBackend::admm}) {
    SolverConfig cfg;
    cfg.lambda = 20000.0;
    cfg.max_iterations = 1;
    cfg.backend = backend;
    const auto est = solve(y, cfg);
    CHECK(est.status == SolveStatus::not_converged);
    CHECK(est.m.size() == y.size());
    CHECK(est.iterations == 1);
    CHECK(est.primal_residual + est.dual_residual > 0.0);
  }
}

TEST_CASE("invalid configurations are rejected") {
  const auto y = random_instance(20, 1);
  SolverConfig cfg;
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(solve(y, cfg), std::invalid_argument);
  cfg.lambda = 1.0;
  cfg.order = 3;
  CHECK_THROWS_AS(solve(y, cfg), std::invalid_argument);
  cfg.order = 2;
  cfg.primal_tolerance = 0.0;
  CHECK_THROWS_AS(solve(y, cfg), std::invalid_argument);
  cfg.primal_tolerance = 1e-8;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(solve(y, cfg), std::invalid_argument);
}

TEST_CASE("alternating example at lambda = 130000") {
  // One realization; recovery rates across seeds belong to the acceptance suite.
  const auto y = generate(alternating_example(), {1.0, 2});
  SolverConfig cfg;
  cfg.lambda = 130000.0;
  const auto est = solve(y, cfg);
  REQUIRE(est.converged());
  const double threshold = default_activity_threshold(y);
  int kinks = 0;
  for (std::size_t j = 0; j < est.w.size(); ++j) {
    if (std::abs(est.w[j]) <= threshold) continue;
    ++kinks;
    const double t = double(j + 2);
    CHECK(std::min(std::abs(t - 3333.0), std::abs(t - 6666.0)) <= 200.0);
  }
  CHECK(kinks >= 2);
}
