#include "trendlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace trendlab {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

template <class T>
void write_csv(const std::filesystem::path& path, T&& writer) {
  auto out = open_out(path);
  writer(out);
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

TimeSeries read_series_csv(std::istream& in, std::string_view column) {
  std::string line;
  std::size_t number = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  const std::string header = "t," + std::string(column);
  if (!next()) throw ParseError(1, "empty input, expected header \"" + header + "\"");
  if (line != header) throw ParseError(number, "expected header \"" + header + "\", got \"" + line + "\"");

  std::vector<double> values;
  bool blank_seen = false;
  while (next()) {
    if (line.empty()) {
      blank_seen = true;
      continue;
    }
    if (blank_seen) throw ParseError(number - 1, "blank line inside data");
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError(number, "expected two comma-separated fields");
    }
    const char* begin = line.data();
    const char* mid = begin + comma;
    const char* end = begin + line.size();

    std::uint64_t t = 0;
    auto rt = std::from_chars(begin, mid, t);
    if (rt.ec != std::errc{} || rt.ptr != mid) throw ParseError(number, "t is not an integer");
    if (t != values.size() + 1) {
      throw ParseError(number, "t must be " + std::to_string(values.size() + 1) + ", got " +
                                   std::to_string(t));
    }
    double y = 0.0;
    auto ry = std::from_chars(mid + 1, end, y);
    if (ry.ec != std::errc{} || ry.ptr != end) throw ParseError(number, std::string(column) + " is not a number");
    if (!std::isfinite(y)) throw ParseError(number, std::string(column) + " is not finite");
    values.push_back(y);
  }
  if (values.size() < 3) throw ParseError(number, "need at least 3 samples");
  return TimeSeries(std::move(values));
}

TimeSeries read_series_csv(const std::filesystem::path& path, std::string_view column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_series_csv(in, column);
}

void write_column_csv(std::ostream& out, std::string_view column, std::span<const double> values,
                      std::size_t first_t) {
  out << "t," << column << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << first_t + i << ',' << format_double(values[i]) << '\n';
  }
}

void write_dual_csv(std::ostream& out, const DualPath& z, std::size_t offset) {
  out << "t,z\n";
  for (std::size_t t = 0; t < z.z.size(); ++t) out << t + offset << ',' << format_double(z.z[t]) << '\n';
}

void write_rate_table_csv(std::ostream& out, const RateTable& table) {
  out << "N,lambda,exact_rate,mean_loc_err,mean_spurious,failed_trials\n";
  for (const RateRow& r : table.rows) {
    out << r.n << ',' << format_double(r.lambda) << ',' << format_double(r.exact_rate) << ','
        << format_double(r.mean_localization_error) << ',' << format_double(r.mean_spurious) << ','
        << r.failed_trials << '\n';
  }
}

SpecFile parse_spec_file(const nlohmann::json& j) {
  auto fail = [](const std::string& what) { throw InvalidSpec("spec file: " + what); };
  if (!j.is_object()) fail("expected an object");
  for (const char* key : {"n", "knots"}) {
    if (!j.contains(key)) fail(std::string("missing \"") + key + "\"");
  }
  if (!j["n"].is_number_integer()) fail("\"n\" must be an integer");
  if (!j["knots"].is_array()) fail("\"knots\" must be an array");

  SpecFile out;
  for (const auto& k : j["knots"]) {
    if (!k.is_array() || k.size() != 2 || !k[0].is_number_integer() || !k[1].is_number()) {
      fail("each knot must be [index, value]");
    }
    out.spec.knots.push_back({k[0].get<std::int64_t>(), k[1].get<double>()});
  }
  out.spec.validate();
  if (j["n"].get<std::int64_t>() != out.spec.knots.back().index) fail("\"n\" must equal the last knot index");
  if (j.contains("sigma")) {
    if (!j["sigma"].is_number() || !(j["sigma"].get<double>() >= 0.0)) fail("\"sigma\" must be nonnegative");
    out.noise.sigma = j["sigma"].get<double>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("\"seed\" must be a nonnegative integer");
    out.noise.seed = j["seed"].get<std::uint64_t>();
  }
  return out;
}

SpecFile read_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidSpec(path.string() + ": " + e.what());
  }
  return parse_spec_file(j);
}

nlohmann::json spec_file_json(const SpecFile& file) {
  nlohmann::json knots = nlohmann::json::array();
  for (const Knot& k : file.spec.knots) knots.push_back({k.index, k.value});
  return {{"n", file.spec.length()}, {"knots", knots}, {"sigma", file.noise.sigma},
          {"seed", file.noise.seed}};
}

void to_json(nlohmann::json& j, const ChangePoint& p) {
  j = {{"t", p.location},
       {"slope_change", p.slope_change},
       {"sign", p.sign},
       {"cluster_size", p.cluster_size},
       {"dual_margin", p.dual_margin}};
}

void to_json(nlohmann::json& j, const ChangePointReport& r) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& [a, b] : r.staircase_segments) segments.push_back({a, b});
  j = {{"points", r.points},
       {"sign_pattern", r.sign_pattern},
       {"alternating", r.alternating},
       {"staircase_segments", segments}};
}

void to_json(nlohmann::json& j, const DetectionMetrics& m) {
  j = {{"window", m.window},
       {"matched_true_points", m.matched_true_points},
       {"missed", m.missed},
       {"spurious", m.spurious},
       {"localization_errors", m.localization_errors},
       {"exact_recovery", m.exact_recovery()}};
}

void to_json(nlohmann::json& j, const KktReport& r) {
  j = {{"passed", r.passed},
       {"max_tube_violation", r.max_tube_violation},
       {"boundary_residuals", {r.boundary_residuals.first, r.boundary_residuals.second}},
       {"sign_violations", r.sign_violations},
       {"interior_active", r.interior_active},
       {"activity_threshold", r.activity_threshold}};
}

void to_json(nlohmann::json& j, const RefinementTrace& t) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const RefinementRound& r : t.rounds) {
    rounds.push_back({{"segment", {r.first, r.last}},
                      {"lambda", r.lambda},
                      {"status", to_string(r.estimate.status)},
                      {"iterations", r.estimate.iterations},
                      {"report", r.report},
                      {"accepted", r.accepted}});
  }
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& [a, b] : t.final_estimate.segments) segments.push_back({a, b});
  j = {{"cluster_radius", t.cluster_radius},
       {"stop", to_string(t.stop)},
       {"rounds", rounds},
       {"final_points", t.final_points},
       {"final_segments", segments}};
}

void to_json(nlohmann::json& j, const RateRow& r) {
  j = {{"N", r.n},
       {"lambda", r.lambda},
       {"exact_rate", r.exact_rate},
       {"mean_loc_err", std::isnan(r.mean_localization_error) ? nlohmann::json(nullptr)
                                                                : nlohmann::json(r.mean_localization_error)},
       {"mean_spurious", r.mean_spurious},
       {"failed_trials", r.failed_trials},
       {"trials", r.trials}};
}

const char* to_string(RefineStop stop) {
  switch (stop) {
    case RefineStop::few_points: return "few_points";
    case RefineStop::short_segment: return "short_segment";
    case RefineStop::max_depth: return "max_depth";
  }
  return "unknown";
}

const char* to_string(SolveStatus status) {
  return status == SolveStatus::converged ? "converged" : "not_converged";
}

void write_bundle(const ExampleBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::size_t n = b.series.size();
  write_json(dir / "truth.json", spec_file_json({b.truth, b.noise}));
  write_csv(dir / "series.csv", [&](std::ostream& o) { write_column_csv(o, "y", b.series.values()); });
  write_csv(dir / "truth_mean.csv",
            [&](std::ostream& o) { write_column_csv(o, "m", mean_from_spec(b.truth, n)); });
  write_csv(dir / "trend.csv", [&](std::ostream& o) { write_column_csv(o, "m", b.estimate.m); });
  write_csv(dir / "dual.csv", [&](std::ostream& o) { write_dual_csv(o, b.dual); });
  write_json(dir / "changepoints.json", b.report);
  nlohmann::json metrics = {{"lambda", b.estimate.lambda}, {"detection", b.metrics}};
  if (b.refined_metrics) metrics["refined_detection"] = *b.refined_metrics;
  write_json(dir / "metrics.json", metrics);

  if (!b.refinement) return;
  const RefinementTrace& trace = *b.refinement;
  write_json(dir / "refine_trace.json", trace);
  write_json(dir / "final_changepoints.json", merge(trace.final_points, trace.cluster_radius));
  write_csv(dir / "final_trend.csv",
            [&](std::ostream& o) { write_column_csv(o, "m", trace.final_estimate.m); });
  for (std::size_t r = 1; r < trace.rounds.size(); ++r) {
    const RefinementRound& round = trace.rounds[r];
    const std::string stem = "round_" + std::to_string(r);
    write_csv(dir / (stem + "_trend.csv"),
              [&](std::ostream& o) { write_column_csv(o, "m", round.estimate.m, round.first); });
    const DualPath z = dual_path(b.series.slice(round.first, round.last), round.estimate.m);
    write_csv(dir / (stem + "_dual.csv"), [&](std::ostream& o) { write_dual_csv(o, z, round.first - 1); });
  }
}

}  // namespace trendlab
