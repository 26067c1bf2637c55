#include <random>

#include "doctest.h"
#include "trendlab/changepoint.hpp"

using namespace trendlab;

namespace {

ChangePoint point(std::size_t t, double kink, double margin = 0.0) {
  return {t, kink, kink > 0 ? 1 : -1, 1, margin};
}

ChangePointReport fit_and_extract(const TimeSeries& y, double lambda) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  const TrendEstimate est = solve(y, cfg);
  REQUIRE(est.converged());
  return extract(est, dual_path(y, est.m), default_cluster_radius(y.size()));
}

bool any_within(const ChangePointReport& r, std::size_t t, std::size_t window) {
  for (const auto& p : r.points) {
    const auto d = p.location > t ? p.location - t : t - p.location;
    if (d <= window) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("defaults scale with the length") {
  CHECK(default_cluster_radius(100) == 5);
  CHECK(default_cluster_radius(10000) == 20);
  CHECK(default_window(10000) == 200);
  CHECK(default_window(10) == 1);
}

TEST_CASE("same-sign neighbours merge to the kink-weighted location") {
  const auto r = merge({point(100, 1.0, 0.5), point(104, 3.0, 0.1), point(300, -2.0)}, 5);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].location == 103);
  CHECK(r.points[0].slope_change == doctest::Approx(4.0));
  CHECK(r.points[0].cluster_size == 2);
  CHECK(r.points[0].dual_margin == 0.1);
  CHECK(r.points[1].location == 300);
  CHECK(r.sign_pattern == std::vector<int>{1, -1});
  CHECK(r.alternating);
  CHECK(r.staircase_segments.empty());
}

TEST_CASE("opposite signs and distant points stay apart") {
  CHECK(merge({point(10, 1.0), point(11, -1.0)}, 5).points.size() == 2);
  CHECK(merge({point(10, 1.0), point(16, 1.0)}, 5).points.size() == 2);
  CHECK(merge({point(10, 1.0), point(15, 1.0)}, 5).points.size() == 1);
  CHECK(merge({point(10, 1.0), point(11, 1.0)}, 0).points.size() == 2);
  // chains merge transitively
  CHECK(merge({point(10, 1.0), point(14, 1.0), point(18, 1.0)}, 4).points.size() == 1);
}

TEST_CASE("staircase segments are maximal equal-sign runs") {
  const auto r = merge({point(10, -1), point(50, -1), point(90, -1), point(130, 1), point(170, -1),
                        point(210, 1), point(250, 1)},
                       5);
  CHECK(r.sign_pattern == std::vector<int>{-1, -1, -1, 1, -1, 1, 1});
  CHECK(!r.alternating);
  using Seg = std::pair<std::size_t, std::size_t>;
  CHECK(r.staircase_segments == std::vector<Seg>{{0, 2}, {5, 6}});
}

TEST_CASE("merging is idempotent") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> where(2, 400);
  std::uniform_real_distribution<double> kink(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ChangePoint> raw;
    const int count = 1 + trial % 30;
    for (int i = 0; i < count; ++i) {
      double k = kink(rng);
      if (k == 0.0) k = 1.0;
      raw.push_back(point(where(rng), k, std::abs(kink(rng))));
    }
    const std::size_t radius = trial % 12;
    const auto once = merge(raw, radius);
    const auto twice = merge(once.points, radius);
    REQUIRE(once.points == twice.points);
    CHECK(once.staircase_segments == twice.staircase_segments);
  }
}

TEST_CASE("extract refuses an uncertified estimate") {
  const auto y = generate(staircase_example(), {1.0, 3});
  SolverConfig cfg;
  cfg.lambda = 20000;
  cfg.max_iterations = 1;
  const TrendEstimate est = solve(y, cfg);
  REQUIRE(!est.converged());
  CHECK_THROWS_AS(extract(est, dual_path(y, est.m), 20), NotCertified);
}

TEST_CASE("extract rejects a dual path of another series") {
  const auto y = generate(alternating_example(), {1.0, 1});
  SolverConfig cfg;
  cfg.lambda = 2 * lambda_max(y);
  const TrendEstimate est = solve(y, cfg);
  const auto short_y = y.slice(1, 100);
  CHECK_THROWS_AS(extract(est, dual_path(short_y, std::vector<double>(100, 0.0)), 20),
                  std::invalid_argument);
}

TEST_CASE("fused estimate has no change points") {
  const auto y = generate(alternating_example(), {1.0, 4});
  const auto r = fit_and_extract(y, 1.01 * lambda_max(y));
  CHECK(r.points.empty());
  CHECK(r.alternating);
}

TEST_CASE("example 1 realization: two alternating points near the knots") {
  // one realization where the kinks near each knot fall inside one cluster
  const auto y = generate(alternating_example(), {1.0, 6});
  const auto r = fit_and_extract(y, 130000);
  REQUIRE(r.points.size() == 2);
  CHECK(r.sign_pattern == std::vector<int>{1, -1});
  CHECK(r.alternating);
  const auto metrics = match(r, alternating_example(), 200);
  CHECK(metrics.exact_recovery());
}

TEST_CASE("example 2 shows a fake point between the first two knots") {
  const auto y = generate(staircase_example(), {1.0, 4});
  const double lambda = 20000;
  const auto r = fit_and_extract(y, lambda);
  CHECK(any_within(r, 2500, 200));
  CHECK(any_within(r, 5000, 200));
  CHECK(any_within(r, 7500, 200));
  bool fake = false;
  for (const auto& p : r.points) fake = fake || (p.location > 2700 && p.location < 4800);
  CHECK(fake);
  bool consecutive_negative = false;
  for (std::size_t i = 1; i < r.sign_pattern.size(); ++i) {
    consecutive_negative = consecutive_negative || (r.sign_pattern[i - 1] == -1 && r.sign_pattern[i] == -1);
  }
  CHECK(consecutive_negative);
  CHECK(!r.alternating);

  const auto metrics = match(r, staircase_example(), 200);
  CHECK(metrics.matched_true_points == 3);
  CHECK(metrics.spurious >= 1);
}

TEST_CASE("merged points sit on the tube boundary with the sign of z") {
  for (std::uint64_t seed : {0u, 5u, 9u}) {
    const auto y = generate(staircase_example(), {1.0, seed});
    SolverConfig cfg;
    cfg.lambda = 20000;
    const auto est = solve(y, cfg);
    REQUIRE(est.converged());
    const auto z = dual_path(y, est.m);
    const auto r = extract(est, z, default_cluster_radius(y.size()));
    REQUIRE(!r.points.empty());
    for (const auto& p : r.points) {
      CHECK(p.dual_margin <= 1e-6 * cfg.lambda);
      CHECK(p.sign == (z[p.location] > 0 ? 1 : -1));
    }
  }
}

TEST_CASE("match counts") {
  const PiecewiseLinearSpec truth{{{1, 0}, {300, 1}, {600, 0}, {1000, 2}}};

  SUBCASE("perfect estimate, unit window") {
    const auto r = merge({point(300, -1), point(600, 1)}, 5);
    const auto m = match(r, PiecewiseLinearSpec{{{1, 0}, {300, 1}, {600, 0}, {1000, 3}}}, 1);
    CHECK(m.missed == 0);
    CHECK(m.spurious == 0);
    CHECK(m.localization_errors == std::vector<std::size_t>{0, 0});
  }
  SUBCASE("empty report") {
    const auto m = match(ChangePointReport{}, PiecewiseLinearSpec{{{1, 0}, {300, 1}, {600, 0}, {1000, 2}}}, 20);
    CHECK(m.missed == 2);
    CHECK(m.spurious == 0);
    CHECK(m.matched_true_points == 0);
  }
  SUBCASE("greedy takes the closest pair first") {
    const auto r = merge({point(295, 1), point(320, -1), point(700, 1)}, 5);
    const auto m = match(r, truth, 30);
    CHECK(m.matched_true_points == 1);
    CHECK(m.localization_errors == std::vector<std::size_t>{5});
    CHECK(m.missed == 1);
    CHECK(m.spurious == 2);
    CHECK(m.matched_true_points + m.missed == 2);
  }
  SUBCASE("window N matches min(estimated, true)") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> where(2, 999);
    for (int count = 0; count < 6; ++count) {
      std::vector<ChangePoint> pts;
      for (int i = 0; i < count; ++i) pts.push_back(point(where(rng), i % 2 ? 1.0 : -1.0));
      const auto r = merge(pts, 0);
      const auto m = match(r, truth, 1000);
      CHECK(m.matched_true_points == static_cast<int>(std::min<std::size_t>(r.points.size(), 2)));
    }
  }
  CHECK_THROWS_AS(match(ChangePointReport{}, truth, 0), std::invalid_argument);
}
