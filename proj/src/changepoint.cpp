#include "trendlab/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

#include "trendlab/difference.hpp"

namespace trendlab {
namespace {

ChangePoint combine(std::span<const ChangePoint> members) {
  if (members.size() == 1) return members.front();
  ChangePoint out;
  double weight = 0.0;
  double weighted_location = 0.0;
  out.dual_margin = members.front().dual_margin;
  out.cluster_size = 0;
  for (const ChangePoint& p : members) {
    const double a = std::abs(p.slope_change);
    weight += a;
    weighted_location += a * static_cast<double>(p.location);
    out.slope_change += p.slope_change;
    out.cluster_size += p.cluster_size;
    out.dual_margin = std::min(out.dual_margin, p.dual_margin);
  }
  out.location = weight > 0.0 ? static_cast<std::size_t>(std::llround(weighted_location / weight))
                              : members.front().location;
  out.sign = members.front().sign;
  return out;
}

}  // namespace

std::size_t default_cluster_radius(std::size_t n) { return std::max<std::size_t>(5, n / 500); }

std::size_t default_window(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.02 * static_cast<double>(n))));
}

ChangePointReport merge(std::vector<ChangePoint> points, std::size_t cluster_radius) {
  std::stable_sort(points.begin(), points.end(),
                   [](const ChangePoint& a, const ChangePoint& b) { return a.location < b.location; });
  ChangePointReport report;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= points.size(); ++i) {
    const bool joins = i < points.size() && points[i].sign == points[i - 1].sign &&
                       points[i].location - points[i - 1].location <= cluster_radius;
    if (joins) continue;
    if (i > begin) {
      report.points.push_back(combine(std::span(points).subspan(begin, i - begin)));
    }
    begin = i;
  }

  for (const ChangePoint& p : report.points) report.sign_pattern.push_back(p.sign);
  for (std::size_t i = 0; i < report.points.size();) {
    std::size_t j = i;
    while (j + 1 < report.points.size() && report.points[j + 1].sign == report.points[i].sign) ++j;
    if (j > i) report.staircase_segments.emplace_back(i, j);
    i = j + 1;
  }
  report.alternating = report.staircase_segments.empty();
  return report;
}

ChangePointReport extract(const TrendEstimate& estimate, const DualPath& z,
                          std::size_t cluster_radius) {
  if (!estimate.converged()) {
    throw NotCertified("change points requested for an estimate that did not converge");
  }
  const std::size_t n = estimate.m.size();
  if (z.order != estimate.order || z.z.size() != n + 2) {
    throw std::invalid_argument("dual path does not match the estimate");
  }
  const std::vector<double> w = difference(estimate.order, estimate.m);
  std::vector<ChangePoint> raw;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(std::abs(w[j]) > estimate.activity_threshold)) continue;
    ChangePoint p;
    p.location = vertex_of_row(estimate.order, j);
    p.slope_change = w[j];
    p.sign = w[j] > 0.0 ? 1 : -1;
    p.dual_margin = estimate.lambda - std::abs(z.z[p.location]);
    raw.push_back(p);
  }
  return merge(std::move(raw), cluster_radius);
}

DetectionMetrics match(const ChangePointReport& report, const PiecewiseLinearSpec& truth,
                       std::size_t window) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  const std::vector<std::int64_t> knots = truth.change_points();

  // (distance, true index, estimated index)
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < knots.size(); ++a) {
    for (std::size_t b = 0; b < report.points.size(); ++b) {
      const auto d = static_cast<std::size_t>(
          std::llabs(knots[a] - static_cast<std::int64_t>(report.points[b].location)));
      if (d <= window) pairs.emplace_back(d, a, b);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<bool> true_used(knots.size(), false);
  std::vector<bool> est_used(report.points.size(), false);
  std::vector<std::size_t> error(knots.size(), 0);
  for (const auto& [d, a, b] : pairs) {
    if (true_used[a] || est_used[b]) continue;
    true_used[a] = est_used[b] = true;
    error[a] = d;
  }

  DetectionMetrics out;
  out.window = window;
  for (std::size_t a = 0; a < knots.size(); ++a) {
    if (true_used[a]) {
      ++out.matched_true_points;
      out.localization_errors.push_back(error[a]);
    } else {
      ++out.missed;
    }
  }
  out.spurious = static_cast<int>(std::count(est_used.begin(), est_used.end(), false));
  return out;
}

}  // namespace trendlab
