#include <cmath>

#include "doctest.h"
#include "trendlab/dual.hpp"
#include "trendlab/refine.hpp"

using namespace trendlab;

namespace {

RefineConfig anchored(double lambda0, std::size_t n) {
  RefineConfig cfg;
  cfg.lambda_rule = PowerLawLambda::anchored(lambda0, n);
  return cfg;
}

}  // namespace

TEST_CASE("power-law lambda") {
  const PowerLawLambda standard;
  CHECK(standard(10000) == doctest::Approx(130000).epsilon(1e-12));
  const auto rule = PowerLawLambda::anchored(20000, 10000);
  CHECK(rule(10000) == doctest::Approx(20000).epsilon(1e-12));
  CHECK(rule(5000) == doctest::Approx(20000 * std::pow(0.5, 1.3)).epsilon(1e-12));
  CHECK_THROWS_AS(PowerLawLambda::anchored(1, 100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PowerLawLambda::anchored(1, 100, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(PowerLawLambda::anchored(-1, 100, 1.5), std::invalid_argument);
}

TEST_CASE("config validation") {
  RefineConfig cfg;
  cfg.min_segment = 3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.min_segment = 10;
  cfg.max_depth = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.max_depth = 4;
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(refine(TimeSeries({1, 2, 3, 4, 5}), cfg), std::invalid_argument);
}

TEST_CASE("segmented fit recovers noiseless pieces") {
  const PiecewiseLinearSpec spec{{{1, 0}, {40, 3}, {70, -1}, {100, 2}}};
  const auto mean = mean_from_spec(spec, 100);
  const TimeSeries y(mean);
  // each kink closes the segment on its left
  const std::vector<ChangePoint> pts{{40, -1, -1, 1, 0}, {70, 1, 1, 1, 0}};
  const auto fit = segmented_fit(y, pts);
  using Seg = std::pair<std::size_t, std::size_t>;
  CHECK(fit.segments == std::vector<Seg>{{1, 40}, {41, 70}, {71, 100}});
  for (std::size_t t = 0; t < 100; ++t) CHECK(fit.m[t] == doctest::Approx(mean[t]).epsilon(1e-12));
}

TEST_CASE("segmented fit without points is one least-squares line") {
  const TimeSeries y({1, 3, 2, 5, 4});
  const auto fit = segmented_fit(y, {});
  REQUIRE(fit.segments.size() == 1);
  // slope 0.8, intercept 0.6
  for (std::size_t t = 1; t <= 5; ++t) CHECK(fit.m[t - 1] == doctest::Approx(0.6 + 0.8 * t));
}

TEST_CASE("a single noisy line refines to nothing") {
  const auto y = generate(PiecewiseLinearSpec{{{1, 0}, {2000, 5}}}, {1.0, 8});
  const auto trace = refine(y, anchored(3 * lambda_max(y), y.size()));
  REQUIRE(trace.rounds.size() == 1);
  CHECK(trace.rounds[0].report.points.empty());
  CHECK(trace.final_points.empty());
  CHECK(trace.final_estimate.segments.size() == 1);
  CHECK(trace.stop == RefineStop::few_points);
  CHECK(monitor(trace, y).empty());
}

TEST_CASE("alternating truth: refinement accepts round 0 as is") {
  const auto y = generate(alternating_example(), {1.0, 6});
  const auto trace = refine(y, anchored(130000, y.size()));
  REQUIRE(trace.rounds.size() == 1);
  CHECK(trace.final_points == trace.rounds[0].report.points);
  const auto metrics = match(ChangePointReport{trace.final_points}, alternating_example(), 200);
  CHECK(metrics.exact_recovery());
}

TEST_CASE("staircase chain: nesting, monotone acceptance, termination") {
  for (std::uint64_t seed : {0u, 2u, 9u, 16u}) {
    CAPTURE(seed);
    const auto y = generate(staircase_example(), {1.0, seed});
    const auto cfg = anchored(20000, y.size());
    const auto trace = refine(y, cfg);
    REQUIRE(!trace.rounds.empty());
    CHECK(trace.rounds.size() <= static_cast<std::size_t>(cfg.max_depth));
    CHECK(trace.rounds.front().first == 1);
    CHECK(trace.rounds.front().last == y.size());
    CHECK(trace.rounds.front().lambda == doctest::Approx(20000));

    for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
      const auto& round = trace.rounds[r];
      CHECK(round.lambda == doctest::Approx(cfg.lambda_rule(round.last - round.first + 1)));
      if (round.report.points.size() > 2) {
        REQUIRE(round.accepted.size() == 2);
        CHECK(round.accepted[0] == round.report.points.front());
        CHECK(round.accepted[1] == round.report.points.back());
      } else {
        CHECK(round.accepted == round.report.points);
        CHECK(r + 1 == trace.rounds.size());
      }
      for (const auto& p : round.report.points) {
        CHECK(p.location > round.first);
        CHECK(p.location < round.last);
      }
      if (r == 0) continue;
      const auto& outer = trace.rounds[r - 1];
      // strictly inside the previous accepted pair, past the guard band
      CHECK(round.first == outer.accepted.front().location + 1 + trace.cluster_radius);
      CHECK(round.last + 1 + trace.cluster_radius == outer.accepted.back().location);
    }

    // every accepted point survives into the final set
    for (const auto& round : trace.rounds) {
      for (const auto& p : round.accepted) {
        bool kept = false;
        for (const auto& q : trace.final_points) kept = kept || q.location == p.location;
        CHECK(kept);
      }
    }
    for (std::size_t i = 1; i < trace.final_points.size(); ++i) {
      CHECK(trace.final_points[i - 1].location < trace.final_points[i].location);
    }
    CHECK(trace.final_estimate.segments.size() == trace.final_points.size() + 1);
  }
}

TEST_CASE("depth and segment limits stop the chain") {
  const auto y = generate(staircase_example(), {1.0, 0});
  auto cfg = anchored(20000, y.size());
  cfg.max_depth = 1;
  auto trace = refine(y, cfg);
  CHECK(trace.rounds.size() == 1);
  CHECK(trace.stop == RefineStop::max_depth);
  CHECK(trace.final_points.size() == 2);

  cfg.max_depth = 32;
  cfg.min_segment = y.size();
  trace = refine(y, cfg);
  CHECK(trace.rounds.size() == 1);
  CHECK(trace.stop == RefineStop::short_segment);
}

TEST_CASE("failed inner solve carries the partial trace") {
  const auto y = generate(staircase_example(), {1.0, 0});
  auto cfg = anchored(20000, y.size());
  cfg.inherit_solver.max_iterations = 1;
  try {
    refine(y, cfg);
    FAIL("expected RefineFailed");
  } catch (const RefineFailed& e) {
    REQUIRE(e.trace().rounds.size() == 1);
    CHECK(!e.trace().rounds[0].estimate.converged());
  }
}

TEST_CASE("monitor reads removed round-0 points off the deepest covering round") {
  const auto y = generate(staircase_example(), {1.0, 2});
  const auto trace = refine(y, anchored(20000, y.size()));
  REQUIRE(trace.rounds.size() >= 2);
  const auto monitored = monitor(trace, y);

  std::size_t removed = 0;
  for (const auto& p : trace.rounds[0].report.points) {
    bool kept = false;
    for (const auto& q : trace.final_points) kept = kept || q.location == p.location;
    removed += kept ? 0 : 1;
  }
  CHECK(monitored.size() == removed);

  for (const auto& entry : monitored) {
    const auto& round = trace.rounds[entry.round];
    CHECK(entry.location > round.first);
    CHECK(entry.location < round.last);
    for (std::size_t deeper = entry.round + 1; deeper < trace.rounds.size(); ++deeper) {
      const auto& r = trace.rounds[deeper];
      CHECK((entry.location <= r.first + 1 || entry.location >= r.last - 1));
    }
    const auto segment = y.slice(round.first, round.last);
    const auto z = dual_path(segment, round.estimate.m);
    const std::size_t local[] = {entry.location - round.first + 1};
    CHECK(entry.margin == doctest::Approx(tube_margin(z, round.lambda, local)[0]));
    CHECK(entry.margin >= -1e-6 * round.lambda);
  }

  // points the final round kept active sit on its tube boundary
  const auto& last = trace.rounds.back();
  const auto z = dual_path(y.slice(last.first, last.last), last.estimate.m);
  for (const auto& p : last.report.points) {
    const std::size_t local[] = {p.location - last.first + 1};
    CHECK(tube_margin(z, last.lambda, local)[0] <= 1e-5 * last.lambda);
  }
}

TEST_CASE("monitor rejects a series of another length") {
  const auto y = generate(staircase_example(), {1.0, 2});
  const auto trace = refine(y, anchored(20000, y.size()));
  CHECK_THROWS_AS(monitor(trace, y.slice(1, 500)), std::invalid_argument);
}
