#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trendlab/changepoint.hpp"
#include "trendlab/signal.hpp"
#include "trendlab/solver.hpp"

namespace trendlab {

/// lambda(n) = kappa * n^c with 1 < c < 2.
struct PowerLawLambda {
  double c = 1.3;
  double kappa = 130000.0 / std::pow(10000.0, 1.3);

  double operator()(std::size_t n) const;
  void validate() const;

  /// Rule with exponent c whose value at n equals lambda0.
  static PowerLawLambda anchored(double lambda0, std::size_t n, double c = 1.3);
};

struct RefineConfig {
  PowerLawLambda lambda_rule;
  /// Merging radius used in every round and as the guard band around
  /// accepted points; max(5, N / 500) of the full series when unset.
  std::optional<std::size_t> cluster_radius;
  std::size_t min_segment = 10;
  int max_depth = 32;
  /// Order, tolerances and backend for the inner solves; lambda is replaced
  /// per round and any warm start is ignored.
  SolverConfig inherit_solver;

  void validate() const;
};

enum class RefineStop {
  few_points,     // last round reported at most two points, all accepted
  short_segment,  // the next interior segment would be shorter than min_segment
  max_depth,
};

struct RefinementRound {
  std::size_t first = 1;  // 1-based inclusive segment of the original series
  std::size_t last = 1;
  double lambda = 0.0;
  TrendEstimate estimate;    // over the segment only
  ChangePointReport report;  // locations in original coordinates
  std::vector<ChangePoint> accepted;
};

/// Per-segment least-squares lines between consecutive final points. Each
/// change point closes the segment to its left.
struct SegmentedFit {
  std::vector<double> m;
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // 1-based inclusive
};

struct RefinementTrace {
  std::vector<RefinementRound> rounds;
  std::vector<ChangePoint> final_points;
  SegmentedFit final_estimate;
  std::size_t cluster_radius = 0;
  RefineStop stop = RefineStop::few_points;
};

/// An inner solve did not converge; the rounds completed so far, including
/// the failing one, are attached.
class RefineFailed : public std::runtime_error {
 public:
  RefineFailed(const std::string& what, RefinementTrace partial)
      : std::runtime_error(what), trace_(std::move(partial)) {}
  const RefinementTrace& trace() const noexcept { return trace_; }

 private:
  RefinementTrace trace_;
};

/// The inward chain: solve, trust the first and last detected points, and
/// re-solve strictly between them until a round reports at most two points.
RefinementTrace refine(const TimeSeries& y, const RefineConfig& config);

SegmentedFit segmented_fit(const TimeSeries& y, std::span<const ChangePoint> points);

struct MonitoredPoint {
  std::size_t location = 0;
  std::size_t round = 0;  // round whose dual path was read
  double lambda = 0.0;    // that round's lambda
  double margin = 0.0;    // lambda - |z_t|
};

/// For each round-0 point whose location is not among final_points: the
/// margin lambda - |z_t| in the deepest round whose tube contains it.
/// Points no later round covers are skipped.
std::vector<MonitoredPoint> monitor(const RefinementTrace& trace, const TimeSeries& y);

}  // namespace trendlab
