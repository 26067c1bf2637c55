#include "trendlab/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "trendlab/difference.hpp"

namespace trendlab {
namespace {

// Neumaier-compensated running sum.
class RunningSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void require_same_length(const TimeSeries& y, std::span<const double> m) {
  if (m.size() != y.size()) {
    throw std::invalid_argument("length mismatch: y has " + std::to_string(y.size()) +
                                " samples, m has " + std::to_string(m.size()));
  }
}

}  // namespace

DualPath dual_path(const TimeSeries& y, std::span<const double> m, int order) {
  require_order(order);
  require_same_length(y, m);
  const std::size_t n = y.size();
  DualPath path{order, std::vector<double>(n + 2, 0.0)};
  auto& z = path.z;
  RunningSum first;
  if (order == 1) {
    // D^T for first differences is a negated difference, hence m - y here
    for (std::size_t t = 1; t <= n; ++t) {
      first.add(m[t - 1] - y[t - 1]);
      z[t] = first.value();
    }
    z[n + 1] = z[n];
    return path;
  }
  // z_{t+1} = z_t + sum_{i<=t} r_i
  RunningSum second;
  for (std::size_t t = 1; t <= n; ++t) {
    first.add(y[t - 1] - m[t - 1]);
    second.add(first.value());
    z[t + 1] = second.value();
  }
  return path;
}

ResidualMoments residual_moments(const TimeSeries& y, std::span<const double> m) {
  require_same_length(y, m);
  RunningSum plain;
  RunningSum weighted;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - m[i];
    plain.add(r);
    weighted.add(static_cast<double>(i + 1) * r);
  }
  return {plain.value(), weighted.value()};
}

double default_activity_threshold(const TimeSeries& y) {
  double peak = 0.0;
  for (double v : y.values()) peak = std::max(peak, std::abs(v));
  return 1e-6 * peak / static_cast<double>(y.size());
}

KktReport check_kkt(const TimeSeries& y, std::span<const double> m, double lambda, int order,
                    const KktTolerances& tolerances) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  const DualPath path = dual_path(y, m, order);
  const std::vector<double> w = difference(order, m);
  const std::size_t n = y.size();

  KktReport report;
  report.activity_threshold = tolerances.activity_threshold.value_or(default_activity_threshold(y));
  report.boundary_residuals = {std::abs(path.z[n]), std::abs(path.z[n + 1])};

  const double touch = lambda * (1.0 - tolerances.boundary_band);
  for (std::size_t t = path.tube_first(); t <= path.tube_last(); ++t) {
    const double zt = path.z[t];
    report.max_tube_violation = std::max(report.max_tube_violation, std::abs(zt) - lambda);
    // z_t pairs with difference row t - order
    const double wt = w[t - static_cast<std::size_t>(order)];
    const bool active = std::abs(wt) > report.activity_threshold;
    if (!active) continue;
    if (std::abs(zt) < touch) {
      report.interior_active.push_back(t);
    } else if (lambda > 0.0 && (wt > 0.0) != (zt > 0.0)) {
      report.sign_violations.push_back(t);
    }
  }

  const bool tube_ok = report.max_tube_violation <= tolerances.tube * lambda;
  const bool boundary_ok = report.boundary_residuals.first <= tolerances.boundary * lambda &&
                           report.boundary_residuals.second <= tolerances.boundary * lambda;
  report.passed = tube_ok && boundary_ok && report.sign_violations.empty() &&
                  report.interior_active.empty();
  return report;
}

std::vector<double> tube_margin(const DualPath& z, double lambda,
                                std::span<const std::size_t> locations) {
  std::vector<double> out;
  out.reserve(locations.size());
  for (std::size_t t : locations) {
    if (t < z.tube_first() || t > z.tube_last()) {
      throw std::out_of_range("location " + std::to_string(t) + " outside tube " +
                              std::to_string(z.tube_first()) + ".." +
                              std::to_string(z.tube_last()));
    }
    out.push_back(lambda - std::abs(z.z[t]));
  }
  return out;
}

}  // namespace trendlab
