#include "trendlab/signal.hpp"

#include <cmath>
#include <string>

namespace trendlab {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 3) {
    throw InvalidSeries("time series needs at least 3 samples, got " +
                        std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidSeries("non-finite value at t=" + std::to_string(i + 1));
    }
  }
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t last) const {
  if (first < 1 || last > values_.size() || first > last) {
    throw InvalidSeries("slice [" + std::to_string(first) + ", " + std::to_string(last) +
                        "] outside 1.." + std::to_string(values_.size()));
  }
  return TimeSeries(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first - 1),
                                        values_.begin() + static_cast<std::ptrdiff_t>(last)));
}

void PiecewiseLinearSpec::validate() const {
  if (knots.size() < 2) {
    throw InvalidSpec("spec needs at least two knots");
  }
  if (knots.front().index != 1) {
    throw InvalidSpec("first knot must sit at t=1");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].value)) {
      throw InvalidSpec("knot " + std::to_string(i) + " has a non-finite value");
    }
    if (i > 0 && knots[i].index <= knots[i - 1].index) {
      throw InvalidSpec("knot indices must be strictly increasing (knot " + std::to_string(i) +
                        " at t=" + std::to_string(knots[i].index) + ")");
    }
  }
  if (knots.back().index < 3) {
    throw InvalidSpec("spec length must be at least 3");
  }
}

std::size_t PiecewiseLinearSpec::length() const {
  return knots.empty() ? 0 : static_cast<std::size_t>(knots.back().index);
}

std::vector<std::int64_t> PiecewiseLinearSpec::change_points() const {
  std::vector<std::int64_t> out;
  for (std::size_t i = 1; i + 1 < knots.size(); ++i) out.push_back(knots[i].index);
  return out;
}

GaussianStream::GaussianStream(std::uint64_t seed) : engine_(seed) {}

double GaussianStream::uniform_symmetric() {
  // 53 random mantissa bits -> [0, 1) -> [-1, 1)
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = uniform_symmetric();
    v = uniform_symmetric();
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

std::vector<double> mean_from_spec(const PiecewiseLinearSpec& spec, std::size_t n) {
  spec.validate();
  if (spec.length() != n) {
    throw InvalidSpec("last knot at t=" + std::to_string(spec.length()) +
                      " does not match n=" + std::to_string(n));
  }
  std::vector<double> mean(n);
  for (std::size_t k = 0; k + 1 < spec.knots.size(); ++k) {
    const auto& a = spec.knots[k];
    const auto& b = spec.knots[k + 1];
    const double span = static_cast<double>(b.index - a.index);
    for (std::int64_t t = a.index; t <= b.index; ++t) {
      const double frac = static_cast<double>(t - a.index) / span;
      mean[static_cast<std::size_t>(t - 1)] = a.value + frac * (b.value - a.value);
    }
    // exact at knots regardless of rounding in the interpolation
    mean[static_cast<std::size_t>(a.index - 1)] = a.value;
    mean[static_cast<std::size_t>(b.index - 1)] = b.value;
  }
  return mean;
}

TimeSeries generate(const PiecewiseLinearSpec& spec, const NoiseConfig& noise) {
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
    throw InvalidSpec("sigma must be a finite nonnegative number");
  }
  std::vector<double> y = mean_from_spec(spec, spec.length());
  if (noise.sigma > 0.0) {
    GaussianStream gauss(noise.seed);
    for (double& v : y) v += noise.sigma * gauss.next();
  }
  return TimeSeries(std::move(y));
}

PiecewiseLinearSpec rescale(const PiecewiseLinearSpec& spec, std::size_t n) {
  spec.validate();
  if (n < 3) throw InvalidSpec("rescaled length must be at least 3");
  const double from = static_cast<double>(spec.length() - 1);
  const double to = static_cast<double>(n - 1);
  PiecewiseLinearSpec out;
  for (const auto& k : spec.knots) {
    const auto t = 1 + static_cast<std::int64_t>(
                           std::llround(static_cast<double>(k.index - 1) * to / from));
    out.knots.push_back({t, k.value});
  }
  out.validate();
  return out;
}

PiecewiseLinearSpec alternating_example() {
  return {{{1, 1.0}, {3333, 2.0}, {6666, 4.0}, {10000, 1.0}}};
}

PiecewiseLinearSpec staircase_example() {
  return {{{1, 1.0}, {2500, 4.0}, {5000, 4.0}, {7500, 2.0}, {10000, 1.0}}};
}

}  // namespace trendlab
