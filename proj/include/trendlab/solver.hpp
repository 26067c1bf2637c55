#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "trendlab/signal.hpp"

namespace trendlab {

enum class SolveStatus {
  converged,      // KKT-certified optimum within the configured tolerances
  not_converged,  // iteration budget exhausted; m holds the last iterate
};

/// Solver output. `w` is always recomputed as the order-k difference of `m`.
struct TrendEstimate {
  std::vector<double> m;
  std::vector<double> w;
  double lambda = 0.0;
  int order = 2;
  int iterations = 0;
  /// Relative primal residual ||D m - w_split|| / scale of the returned
  /// point (zero for a certified point, whose split variable equals D m).
  double primal_residual = 0.0;
  /// Relative dual residual: for a certified point, the largest violation of
  /// stationarity or the tube constraint, divided by lambda.
  double dual_residual = 0.0;
  /// Numerical zero for w used when reading off the support; set by solve()
  /// from the data scale (see default_activity_threshold).
  double activity_threshold = 0.0;
  SolveStatus status = SolveStatus::not_converged;

  bool converged() const noexcept { return status == SolveStatus::converged; }
};

enum class SolverBackend {
  interior_point,  // primal-dual barrier method on the box-constrained dual
  admm,            // alternating-direction splitting on w = D m
};

struct SolverConfig {
  int order = 2;
  double lambda = 0.0;
  int max_iterations = 20000;
  double primal_tolerance = 1e-8;
  double dual_tolerance = 1e-8;
  /// Splitting weight rho (ADMM only); defaults to lambda when unset.
  std::optional<double> penalty_parameter;
  SolverBackend backend = SolverBackend::interior_point;
  std::shared_ptr<const TrendEstimate> warm_start;

  void validate() const;
};

/// Minimizes 1/2 sum (y_t - m_t)^2 + lambda sum |(D^k m)_t| for k in {1, 2}.
///
/// Both backends only locate the optimal support. Whenever an iterate
/// suggests a support and sign pattern, it is handed to an exact reduced
/// solve (the fit is piecewise polynomial with knots on the support) followed
/// by active-set correction; a reduced fit whose dual path stays in the tube
/// with matching signs is an optimum and is returned as converged.
///
/// The interior-point backend solves the dual with Newton steps on
/// D D^T + diag; the ADMM backend solves (I + rho D^T D) m = rhs. Both
/// systems are banded and factorized in O(N).
TrendEstimate solve(const TimeSeries& y, const SolverConfig& config);

/// Smallest lambda at which the fit is a single polynomial of degree k - 1
/// (affine for k = 2, constant for k = 1).
double lambda_max(const TimeSeries& y, int order = 2);

/// Least-squares polynomial fit of degree order - 1.
std::vector<double> polynomial_fit(const TimeSeries& y, int order);

double objective(const TimeSeries& y, std::span<const double> m, double lambda, int order);

}  // namespace trendlab
