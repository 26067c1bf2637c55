#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trendlab/changepoint.hpp"
#include "trendlab/dual.hpp"
#include "trendlab/refine.hpp"
#include "trendlab/signal.hpp"
#include "trendlab/solver.hpp"

namespace trendlab {

struct ScenarioConfig {
  /// Template mean; knots are rescaled to each length in `sizes`.
  PiecewiseLinearSpec spec_family;
  std::vector<std::size_t> sizes;
  double c = 1.3;
  double kappa = PowerLawLambda{}.kappa;
  int trials = 50;
  std::uint64_t base_seed = 0;  // trial i uses seed base_seed + i at every size
  double window_fraction = 0.02;
  double sigma = 1.0;
  /// Per-size merging radius; max(5, N / 500) when unset.
  std::optional<std::size_t> cluster_radius;
  SolverConfig solver;  // lambda is overwritten per size
  /// Worker count; 0 means hardware concurrency capped by TRENDLAB_THREADS.
  unsigned threads = 0;

  void validate() const;
  double lambda_for(std::size_t n) const { return PowerLawLambda{c, kappa}(n); }
};

/// Alternating slope changes (the 1 -> 2 -> 4 -> 1 shape), lambda(10000) = 130000.
ScenarioConfig alternating_scenario();

/// Staircase shape, lambda(10000) = 20000.
ScenarioConfig staircase_scenario();

struct TrialOutcome {
  std::size_t n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  std::string failure;  // why the trial was excluded
  DetectionMetrics metrics;
  /// Largest residual moment over lambda across the trial's solves; the
  /// weighted moment enters only at order 2.
  double moment_ratio = 0.0;
};

struct RateRow {
  std::size_t n = 0;
  double lambda = 0.0;
  double exact_rate = 0.0;  // over converged trials
  double mean_localization_error = 0.0;  // NaN when nothing matched
  double mean_spurious = 0.0;
  int failed_trials = 0;
  int trials = 0;
};

struct RateTable {
  std::vector<RateRow> rows;  // ordered as ScenarioConfig::sizes
  std::vector<TrialOutcome> outcomes;  // ordered by (size, trial)
};

/// Resolves ScenarioConfig::threads against the machine and TRENDLAB_THREADS.
unsigned worker_count(unsigned requested);

/// Runs every (size, trial) pair, on worker threads when available. The
/// table does not depend on the thread count or scheduling.
RateTable run_consistency(const ScenarioConfig& config, bool use_refine);

struct ExampleBundle {
  int which = 1;
  PiecewiseLinearSpec truth;
  NoiseConfig noise;
  TimeSeries series{std::vector<double>(3, 0.0)};
  TrendEstimate estimate;
  DualPath dual;
  ChangePointReport report;
  DetectionMetrics metrics;
  std::optional<RefinementTrace> refinement;  // example 2 only
  std::optional<DetectionMetrics> refined_metrics;
};

/// Example 1: alternating truth at lambda = 130000. Example 2: staircase
/// truth at lambda = 20000 followed by refinement anchored at that lambda.
/// Both use N = 10000 and unit noise.
ExampleBundle reproduce_example(int which, std::uint64_t seed);

}  // namespace trendlab
