#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trendlab/dual.hpp"
#include "trendlab/signal.hpp"
#include "trendlab/solver.hpp"

namespace trendlab {

/// Raised when diagnostics are requested for an estimate that was not
/// certified optimal.
class NotCertified : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ChangePoint {
  std::size_t location = 0;   // 1-based vertex t, in the tube
  double slope_change = 0.0;  // summed kink of the merged members
  int sign = 0;
  int cluster_size = 1;
  double dual_margin = 0.0;   // smallest lambda - |z_t| over the members

  friend bool operator==(const ChangePoint&, const ChangePoint&) = default;
};

struct ChangePointReport {
  std::vector<ChangePoint> points;
  std::vector<int> sign_pattern;
  bool alternating = true;
  /// Maximal runs [i, j] (indices into `points`, i < j) of equal sign.
  std::vector<std::pair<std::size_t, std::size_t>> staircase_segments;
};

struct DetectionMetrics {
  std::size_t window = 0;
  int matched_true_points = 0;
  int missed = 0;
  int spurious = 0;
  std::vector<std::size_t> localization_errors;  // one per matched true point, in truth order

  bool exact_recovery() const noexcept { return missed == 0 && spurious == 0; }
};

/// max(5, N / 500)
std::size_t default_cluster_radius(std::size_t n);

/// round(0.02 N), at least 1
std::size_t default_window(std::size_t n);

/// Reads active differences off a certified estimate and merges same-sign
/// neighbours no more than `cluster_radius` samples apart. Throws
/// NotCertified for an unconverged estimate and std::invalid_argument when
/// `z` does not belong to the estimate's length and order.
ChangePointReport extract(const TrendEstimate& estimate, const DualPath& z,
                          std::size_t cluster_radius);

/// Merges an arbitrary point list (locations need not be sorted) and derives
/// the sign pattern. merge(merge(p).points) == merge(p).
ChangePointReport merge(std::vector<ChangePoint> points, std::size_t cluster_radius);

/// Greedy one-to-one matching within +-window: pairs are taken in order of
/// increasing distance, ties broken by true then estimated location.
DetectionMetrics match(const ChangePointReport& report, const PiecewiseLinearSpec& truth,
                       std::size_t window);

}  // namespace trendlab
