#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trendlab/signal.hpp"

namespace trendlab {

/// Dual sequence z_0..z_{N+1} reconstructed from the residual y - m.
///
/// Order 2: z_t = sum_{i=1}^{t-1} (t - i)(y_i - m_i), the doubly integrated
/// residual. z_0 = z_1 = 0 by construction; an optimal m has z_N = z_{N+1} = 0
/// and |z_t| <= lambda on the tube t = 2..N-1, where z_t pairs with the slope
/// change at vertex t. With this orientation z is the Lagrange multiplier of
/// w = D m itself, so z_t = +lambda where the slope increases and -lambda
/// where it decreases.
///
/// Order 1: z_t = sum_{i=1}^{t} (m_i - y_i), the singly integrated residual
/// oriented the same way (z_t = +lambda where the level steps up), with
/// z_0 = 0 and the tube t = 1..N-1; z_{N+1} repeats z_N.
struct DualPath {
  int order = 2;
  std::vector<double> z;

  std::size_t length() const noexcept { return z.size() - 2; }
  std::size_t tube_first() const noexcept { return order == 2 ? 2 : 1; }
  std::size_t tube_last() const noexcept { return length() - 1; }
  double operator[](std::size_t t) const noexcept { return z[t]; }
};

/// O(N) double (or single) cumulative sum. Throws std::invalid_argument on a
/// length mismatch.
DualPath dual_path(const TimeSeries& y, std::span<const double> m, int order = 2);

/// Sums whose vanishing is equivalent to the boundary conditions
/// z_N = z_{N+1} = 0: sum (y_i - m_i) and sum i (y_i - m_i).
struct ResidualMoments {
  double sum = 0.0;
  double weighted_sum = 0.0;
};
ResidualMoments residual_moments(const TimeSeries& y, std::span<const double> m);

/// Numerical zero for slope changes: 1e-6 * max|y| / N.
double default_activity_threshold(const TimeSeries& y);

struct KktTolerances {
  std::optional<double> activity_threshold;  // default_activity_threshold(y) when unset
  double boundary_band = 1e-5;  // |z_t| >= lambda (1 - band) counts as touching
  double tube = 1e-6;           // allowed max(|z| - lambda, 0), relative to lambda
  double boundary = 1e-6;       // allowed |z_N|, |z_{N+1}|, relative to lambda
};

struct KktReport {
  double max_tube_violation = 0.0;
  std::pair<double, double> boundary_residuals{0.0, 0.0};
  /// Vertices t on the boundary whose active slope change has the wrong sign.
  std::vector<std::size_t> sign_violations;
  /// Vertices t with an active slope change but z_t strictly inside the tube.
  std::vector<std::size_t> interior_active;
  double activity_threshold = 0.0;
  bool passed = false;
};

/// Diagnoses the optimality conditions for candidate `m`. Never throws on a
/// violation; only on malformed input.
KktReport check_kkt(const TimeSeries& y, std::span<const double> m, double lambda, int order = 2,
                    const KktTolerances& tolerances = {});

/// lambda - |z_t| at each 1-based vertex in `locations`; throws
/// std::out_of_range for a vertex outside the tube.
std::vector<double> tube_margin(const DualPath& z, double lambda,
                                std::span<const std::size_t> locations);

}  // namespace trendlab
