#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trendlab {

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidSeries : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Observed sequence y_1..y_N. Always holds at least three finite samples.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// 1-based inclusive sub-range [first, last].
  TimeSeries slice(std::size_t first, std::size_t last) const;

 private:
  std::vector<double> values_;
};

/// Knot of a piecewise linear mean. `index` is 1-based.
struct Knot {
  std::int64_t index = 1;
  double value = 0.0;

  friend bool operator==(const Knot&, const Knot&) = default;
};

/// Ground-truth mean as a list of knots; first knot at t = 1, last at t = N.
/// Interior knots are the true change points.
struct PiecewiseLinearSpec {
  std::vector<Knot> knots;

  void validate() const;
  std::size_t length() const;
  std::vector<std::int64_t> change_points() const;

  friend bool operator==(const PiecewiseLinearSpec&, const PiecewiseLinearSpec&) = default;
};

struct NoiseConfig {
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

/// Identity of the Gaussian stream used by generate(); written into output
/// metadata so files can be traced to the sampler that produced them.
inline constexpr const char* kGeneratorId = "mt19937_64+marsaglia-polar/1";

/// Seeded standard-normal stream. The uniform draw uses the top 53 bits of
/// std::mt19937_64, whose output sequence is fixed by the standard, so the
/// stream is identical across platforms and standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed);
  double next();

 private:
  double uniform_symmetric();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<double> mean_from_spec(const PiecewiseLinearSpec& spec, std::size_t n);
TimeSeries generate(const PiecewiseLinearSpec& spec, const NoiseConfig& noise);

/// Rescales knot positions from the spec's own length to `n` samples,
/// keeping values. Knot t maps to 1 + round((t - 1)(n - 1) / (N - 1)).
PiecewiseLinearSpec rescale(const PiecewiseLinearSpec& spec, std::size_t n);

/// Alternating slope changes: 1 -> 2 -> 4 -> 1 over N = 10000 with knots at
/// 3333 and 6666.
PiecewiseLinearSpec alternating_example();

/// Staircase: 1 -> 4 -> 4 -> 2 -> 1 over N = 10000 with knots at 2500, 5000,
/// 7500. The first two slope changes are both negative.
PiecewiseLinearSpec staircase_example();

}  // namespace trendlab
