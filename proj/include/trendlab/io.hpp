#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "trendlab/changepoint.hpp"
#include "trendlab/dual.hpp"
#include "trendlab/experiments.hpp"
#include "trendlab/refine.hpp"
#include "trendlab/signal.hpp"

namespace trendlab {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal that reads back to the same double; independent of the
/// global locale.
std::string format_double(double value);

/// Strict "t,y" reader: the header line must be exactly "t,<column>", t must
/// run 1, 2, ... without gaps and values must be finite. A CR before LF is
/// accepted.
TimeSeries read_series_csv(std::istream& in, std::string_view column = "y");
TimeSeries read_series_csv(const std::filesystem::path& path, std::string_view column = "y");

/// "t,<column>" rows for t = first_t, first_t + 1, ...
void write_column_csv(std::ostream& out, std::string_view column, std::span<const double> values,
                      std::size_t first_t = 1);

/// "t,z" rows for t = 0..N+1, shifted by `offset` for a segment of a longer
/// series.
void write_dual_csv(std::ostream& out, const DualPath& z, std::size_t offset = 0);

/// "N,lambda,exact_rate,mean_loc_err,mean_spurious,failed_trials"
void write_rate_table_csv(std::ostream& out, const RateTable& table);

/// Spec files: {"n": int, "knots": [[index, value], ...], "sigma": float, "seed": int}.
struct SpecFile {
  PiecewiseLinearSpec spec;
  NoiseConfig noise;
};
SpecFile parse_spec_file(const nlohmann::json& j);
SpecFile read_spec_file(const std::filesystem::path& path);
nlohmann::json spec_file_json(const SpecFile& file);

void to_json(nlohmann::json& j, const ChangePoint& p);
void to_json(nlohmann::json& j, const ChangePointReport& r);
void to_json(nlohmann::json& j, const DetectionMetrics& m);
void to_json(nlohmann::json& j, const KktReport& r);
void to_json(nlohmann::json& j, const RefinementTrace& t);
void to_json(nlohmann::json& j, const RateRow& r);

const char* to_string(RefineStop stop);
const char* to_string(SolveStatus status);

/// Writes a reproduction bundle as plot-ready files into `dir` (created if
/// missing).
void write_bundle(const ExampleBundle& bundle, const std::filesystem::path& dir);

}  // namespace trendlab
