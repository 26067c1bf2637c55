#include "trendlab/refine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trendlab/dual.hpp"

namespace trendlab {

double PowerLawLambda::operator()(std::size_t n) const {
  return kappa * std::pow(static_cast<double>(n), c);
}

void PowerLawLambda::validate() const {
  if (!(c > 1.0 && c < 2.0)) throw std::invalid_argument("exponent c must lie in (1, 2)");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive");
}

PowerLawLambda PowerLawLambda::anchored(double lambda0, std::size_t n, double c) {
  PowerLawLambda rule{c, lambda0 / std::pow(static_cast<double>(n), c)};
  rule.validate();
  return rule;
}

void RefineConfig::validate() const {
  lambda_rule.validate();
  inherit_solver.validate();
  if (min_segment < static_cast<std::size_t>(inherit_solver.order) + 2) {
    throw std::invalid_argument("min_segment too small for the difference order");
  }
  if (max_depth < 1) throw std::invalid_argument("max_depth must be positive");
}

SegmentedFit segmented_fit(const TimeSeries& y, std::span<const ChangePoint> points) {
  const std::size_t n = y.size();
  std::vector<std::size_t> cuts;
  for (const ChangePoint& p : points) {
    if (p.location >= 1 && p.location < n) cuts.push_back(p.location);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(n);

  SegmentedFit fit;
  fit.m.resize(n);
  std::size_t first = 1;
  for (std::size_t last : cuts) {
    fit.segments.emplace_back(first, last);
    // centred least squares on t - mean(t)
    const double count = static_cast<double>(last - first + 1);
    const double centre = 0.5 * static_cast<double>(first + last);
    double sy = 0.0, sty = 0.0, stt = 0.0;
    for (std::size_t t = first; t <= last; ++t) {
      const double u = static_cast<double>(t) - centre;
      sy += y[t - 1];
      sty += u * y[t - 1];
      stt += u * u;
    }
    const double level = sy / count;
    const double slope = stt > 0.0 ? sty / stt : 0.0;
    for (std::size_t t = first; t <= last; ++t) {
      fit.m[t - 1] = level + slope * (static_cast<double>(t) - centre);
    }
    first = last + 1;
  }
  return fit;
}

RefinementTrace refine(const TimeSeries& y, const RefineConfig& config) {
  config.validate();
  const std::size_t n = y.size();
  if (n < config.min_segment) {
    throw std::invalid_argument("series shorter than min_segment");
  }

  RefinementTrace trace;
  trace.cluster_radius = config.cluster_radius.value_or(default_cluster_radius(n));
  const std::size_t guard = trace.cluster_radius;

  std::vector<ChangePoint> accepted;
  std::size_t first = 1;
  std::size_t last = n;
  for (int depth = 0;; ++depth) {
    RefinementRound round;
    round.first = first;
    round.last = last;
    round.lambda = config.lambda_rule(last - first + 1);

    const TimeSeries segment = y.slice(first, last);
    SolverConfig inner = config.inherit_solver;
    inner.lambda = round.lambda;
    inner.warm_start.reset();
    round.estimate = solve(segment, inner);
    if (!round.estimate.converged()) {
      trace.rounds.push_back(std::move(round));
      throw RefineFailed("inner solve did not converge on segment " + std::to_string(first) +
                             ".." + std::to_string(last),
                         std::move(trace));
    }

    round.report = extract(round.estimate, dual_path(segment, round.estimate.m, inner.order),
                           trace.cluster_radius);
    for (ChangePoint& p : round.report.points) p.location += first - 1;

    const auto& pts = round.report.points;
    const bool done = pts.size() <= 2;
    const std::size_t front = done ? 0 : pts.front().location;
    const std::size_t back = done ? 0 : pts.back().location;
    if (done) {
      round.accepted = pts;
      trace.stop = RefineStop::few_points;
    } else {
      round.accepted = {pts.front(), pts.back()};
    }
    accepted.insert(accepted.end(), round.accepted.begin(), round.accepted.end());
    trace.rounds.push_back(std::move(round));
    if (done) break;

    const std::size_t next_first = front + 1 + guard;
    const std::size_t next_last = back > guard + 1 ? back - 1 - guard : 0;
    if (next_last < next_first || next_last - next_first + 1 < config.min_segment) {
      trace.stop = RefineStop::short_segment;
      break;
    }
    if (depth + 1 >= config.max_depth) {
      trace.stop = RefineStop::max_depth;
      break;
    }
    first = next_first;
    last = next_last;
  }

  trace.final_points = merge(std::move(accepted), trace.cluster_radius).points;
  trace.final_estimate = segmented_fit(y, trace.final_points);
  return trace;
}

std::vector<MonitoredPoint> monitor(const RefinementTrace& trace, const TimeSeries& y) {
  std::vector<MonitoredPoint> out;
  if (trace.rounds.empty()) return out;
  if (y.size() != trace.rounds.front().last) {
    throw std::invalid_argument("series does not match the trace");
  }

  // dual paths are recomputed lazily, one per round
  std::vector<std::optional<DualPath>> paths(trace.rounds.size());
  auto path_of = [&](std::size_t r) -> const DualPath& {
    if (!paths[r]) {
      const RefinementRound& round = trace.rounds[r];
      paths[r] = dual_path(y.slice(round.first, round.last), round.estimate.m, round.estimate.order);
    }
    return *paths[r];
  };

  for (const ChangePoint& p : trace.rounds.front().report.points) {
    const bool kept = std::any_of(trace.final_points.begin(), trace.final_points.end(),
                                  [&](const ChangePoint& q) { return q.location == p.location; });
    if (kept) continue;
    for (std::size_t r = trace.rounds.size(); r-- > 1;) {
      const RefinementRound& round = trace.rounds[r];
      if (p.location < round.first || p.location > round.last) continue;
      const DualPath& z = path_of(r);
      const std::size_t local = p.location - round.first + 1;
      if (local < z.tube_first() || local > z.tube_last()) continue;
      out.push_back({p.location, r, round.lambda, round.lambda - std::abs(z[local])});
      break;
    }
  }
  return out;
}

}  // namespace trendlab
