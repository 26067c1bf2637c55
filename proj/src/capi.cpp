#include "trendlab/trendlab.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "trendlab/changepoint.hpp"
#include "trendlab/dual.hpp"
#include "trendlab/experiments.hpp"
#include "trendlab/io.hpp"
#include "trendlab/refine.hpp"
#include "trendlab/solver.hpp"

using namespace trendlab;

struct tl_series {
  TimeSeries y;
};

struct tl_spec {
  SpecFile file;
};

struct tl_fit {
  TimeSeries y;
  TrendEstimate estimate;
  DualPath dual;
};

struct tl_refinement {
  TimeSeries y;
  RefinementTrace trace;
};

struct tl_rate_table {
  RateTable table;
};

struct tl_text {
  std::string data;
};

namespace {

thread_local std::string last_error;

class NullArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
T& require(T* p, const char* name) {
  if (p == nullptr) throw NullArgument(std::string(name) + " is null");
  return *p;
}

const char* require_text(const char* p, const char* name) {
  if (p == nullptr) throw NullArgument(std::string(name) + " is null");
  return p;
}

tl_status fail(tl_status status, const char* what) {
  last_error = what;
  return status;
}

tl_status translate() {
  try {
    throw;
  } catch (const ParseError& e) {
    return fail(TL_PARSE_ERROR, e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return fail(TL_PARSE_ERROR, e.what());
  } catch (const NotCertified& e) {
    return fail(TL_NOT_CERTIFIED, e.what());
  } catch (const IoError& e) {
    return fail(TL_IO_ERROR, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(TL_IO_ERROR, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(TL_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(TL_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(TL_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(TL_INTERNAL_ERROR, "unknown error");
  }
}

template <class F>
tl_status guarded(F&& body) noexcept {
  try {
    return body();
  } catch (...) {
    return translate();
  }
}

tl_status emit(std::string text, tl_text** out) {
  require(out, "out");
  *out = new tl_text{std::move(text)};
  return TL_OK;
}

tl_status emit(const nlohmann::json& j, tl_text** out) { return emit(j.dump(2), out); }

SolverConfig solver_config(const tl_solver_options& o) {
  SolverConfig c;
  c.order = o.order;
  c.lambda = o.lambda;
  c.max_iterations = o.max_iterations;
  c.primal_tolerance = o.tolerance;
  c.dual_tolerance = o.tolerance;
  if (o.backend == TL_BACKEND_ADMM) {
    c.backend = SolverBackend::admm;
  } else if (o.backend != TL_BACKEND_INTERIOR_POINT) {
    throw std::invalid_argument("unknown backend");
  }
  c.validate();
  return c;
}

template <class Writer>
void write_file(const char* path, Writer&& writer) {
  std::ofstream out(require_text(path, "path"), std::ios::binary);
  if (!out) throw IoError(std::string("cannot write ") + path);
  writer(out);
  if (!out) throw IoError(std::string("write failed: ") + path);
}

}  // namespace

extern "C" {

const char* tl_version(void) { return "0.1.0"; }
const char* tl_generator_id(void) { return kGeneratorId; }

const char* tl_status_string(tl_status status) {
  switch (status) {
    case TL_OK: return "ok";
    case TL_INVALID_ARGUMENT: return "invalid argument";
    case TL_PARSE_ERROR: return "parse error";
    case TL_IO_ERROR: return "i/o error";
    case TL_NOT_CONVERGED: return "not converged";
    case TL_NOT_CERTIFIED: return "not certified";
    case TL_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* tl_last_error(void) { return last_error.c_str(); }

const char* tl_text_data(const tl_text* text) { return text ? text->data.c_str() : ""; }
size_t tl_text_size(const tl_text* text) { return text ? text->data.size() : 0; }
void tl_text_free(tl_text* text) { delete text; }

tl_status tl_series_create(const double* values, size_t n, tl_series** out) {
  return guarded([&] {
    require(out, "out");
    if (values == nullptr && n > 0) throw NullArgument("values is null");
    *out = new tl_series{TimeSeries(std::vector<double>(values, values + n))};
    return TL_OK;
  });
}

tl_status tl_series_read_csv(const char* path, const char* column, tl_series** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tl_series{read_series_csv(std::filesystem::path(require_text(path, "path")),
                                         column ? column : "y")};
    return TL_OK;
  });
}

tl_status tl_series_write_csv(const tl_series* series, const char* column, const char* path) {
  return guarded([&] {
    const auto& s = require(series, "series");
    write_file(path, [&](std::ostream& o) { write_column_csv(o, column ? column : "y", s.y.values()); });
    return TL_OK;
  });
}

size_t tl_series_length(const tl_series* series) { return series ? series->y.size() : 0; }
const double* tl_series_values(const tl_series* series) {
  return series ? series->y.values().data() : nullptr;
}
void tl_series_free(tl_series* series) { delete series; }

tl_status tl_spec_parse_json(const char* text, tl_spec** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tl_spec{parse_spec_file(nlohmann::json::parse(require_text(text, "text")))};
    return TL_OK;
  });
}

tl_status tl_spec_read_json(const char* path, tl_spec** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tl_spec{read_spec_file(require_text(path, "path"))};
    return TL_OK;
  });
}

tl_status tl_spec_example(int which, tl_spec** out) {
  return guarded([&] {
    require(out, "out");
    if (which != 1 && which != 2) throw std::invalid_argument("example must be 1 or 2");
    *out = new tl_spec{{which == 1 ? alternating_example() : staircase_example(), {}}};
    return TL_OK;
  });
}

tl_status tl_spec_set_noise(tl_spec* spec, double sigma, uint64_t seed) {
  return guarded([&] {
    auto& s = require(spec, "spec");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    s.file.noise = {sigma, seed};
    return TL_OK;
  });
}

double tl_spec_sigma(const tl_spec* spec) { return spec ? spec->file.noise.sigma : 0.0; }
uint64_t tl_spec_seed(const tl_spec* spec) { return spec ? spec->file.noise.seed : 0; }
size_t tl_spec_length(const tl_spec* spec) { return spec ? spec->file.spec.length() : 0; }

tl_status tl_spec_json(const tl_spec* spec, tl_text** out) {
  return guarded([&] { return emit(spec_file_json(require(spec, "spec").file), out); });
}

tl_status tl_spec_mean(const tl_spec* spec, tl_series** out) {
  return guarded([&] {
    const auto& s = require(spec, "spec");
    require(out, "out");
    *out = new tl_series{TimeSeries(mean_from_spec(s.file.spec, s.file.spec.length()))};
    return TL_OK;
  });
}

tl_status tl_spec_generate(const tl_spec* spec, tl_series** out) {
  return guarded([&] {
    const auto& s = require(spec, "spec");
    require(out, "out");
    *out = new tl_series{generate(s.file.spec, s.file.noise)};
    return TL_OK;
  });
}

void tl_spec_free(tl_spec* spec) { delete spec; }

void tl_solver_options_init(tl_solver_options* options) {
  if (!options) return;
  const SolverConfig defaults;
  options->order = defaults.order;
  options->lambda = defaults.lambda;
  options->max_iterations = defaults.max_iterations;
  options->tolerance = defaults.primal_tolerance;
  options->backend = TL_BACKEND_INTERIOR_POINT;
}

tl_status tl_lambda_max(const tl_series* series, int order, double* out) {
  return guarded([&] {
    const auto& s = require(series, "series");
    require(out, "out") = lambda_max(s.y, order);
    return TL_OK;
  });
}

tl_status tl_fit_run(const tl_series* series, const tl_solver_options* options, tl_fit** out) {
  return guarded([&] {
    const auto& s = require(series, "series");
    const SolverConfig config = solver_config(require(options, "options"));
    require(out, "out");
    TrendEstimate est = solve(s.y, config);
    DualPath z = dual_path(s.y, est.m, config.order);
    const bool ok = est.converged();
    *out = new tl_fit{s.y, std::move(est), std::move(z)};
    if (ok) return TL_OK;
    return fail(TL_NOT_CONVERGED, "iteration budget exhausted before a certified optimum");
  });
}

int tl_fit_converged(const tl_fit* fit) { return fit && fit->estimate.converged() ? 1 : 0; }
size_t tl_fit_length(const tl_fit* fit) { return fit ? fit->estimate.m.size() : 0; }
const double* tl_fit_trend(const tl_fit* fit) { return fit ? fit->estimate.m.data() : nullptr; }
const double* tl_fit_differences(const tl_fit* fit) { return fit ? fit->estimate.w.data() : nullptr; }
const double* tl_fit_dual(const tl_fit* fit) { return fit ? fit->dual.z.data() : nullptr; }
double tl_fit_lambda(const tl_fit* fit) { return fit ? fit->estimate.lambda : 0.0; }
int tl_fit_order(const tl_fit* fit) { return fit ? fit->estimate.order : 0; }
int tl_fit_iterations(const tl_fit* fit) { return fit ? fit->estimate.iterations : 0; }

double tl_fit_objective(const tl_fit* fit) {
  return fit ? objective(fit->y, fit->estimate.m, fit->estimate.lambda, fit->estimate.order) : 0.0;
}

void tl_fit_residuals(const tl_fit* fit, double* primal, double* dual) {
  if (!fit) return;
  if (primal) *primal = fit->estimate.primal_residual;
  if (dual) *dual = fit->estimate.dual_residual;
}

tl_status tl_fit_kkt_json(const tl_fit* fit, tl_text** out) {
  return guarded([&] {
    const auto& f = require(fit, "fit");
    nlohmann::json j = check_kkt(f.y, f.estimate.m, f.estimate.lambda, f.estimate.order);
    j["lambda"] = f.estimate.lambda;
    return emit(j, out);
  });
}

tl_status tl_fit_changepoints_json(const tl_fit* fit, long cluster_radius, tl_text** out) {
  return guarded([&] {
    const auto& f = require(fit, "fit");
    const std::size_t radius = cluster_radius < 0 ? default_cluster_radius(f.y.size())
                                                  : static_cast<std::size_t>(cluster_radius);
    nlohmann::json j = extract(f.estimate, f.dual, radius);
    j["cluster_radius"] = radius;
    return emit(j, out);
  });
}

tl_status tl_fit_write_trend_csv(const tl_fit* fit, const char* path) {
  return guarded([&] {
    const auto& f = require(fit, "fit");
    write_file(path, [&](std::ostream& o) { write_column_csv(o, "m", f.estimate.m); });
    return TL_OK;
  });
}

tl_status tl_fit_write_dual_csv(const tl_fit* fit, const char* path) {
  return guarded([&] {
    const auto& f = require(fit, "fit");
    write_file(path, [&](std::ostream& o) { write_dual_csv(o, f.dual); });
    return TL_OK;
  });
}

void tl_fit_free(tl_fit* fit) { delete fit; }

tl_status tl_check_kkt(const tl_series* series, const tl_series* trend, double lambda, int order,
                       tl_text** out) {
  return guarded([&] {
    const auto& y = require(series, "series").y;
    const auto& m = require(trend, "trend").y;
    nlohmann::json j = check_kkt(y, m.values(), lambda, order);
    j["lambda"] = lambda;
    return emit(j, out);
  });
}

tl_status tl_check_kkt_passed(const tl_series* series, const tl_series* trend, double lambda,
                              int order, int* passed) {
  return guarded([&] {
    const auto& y = require(series, "series").y;
    const auto& m = require(trend, "trend").y;
    require(passed, "passed") = check_kkt(y, m.values(), lambda, order).passed ? 1 : 0;
    return TL_OK;
  });
}

void tl_refine_options_init(tl_refine_options* options) {
  if (!options) return;
  const RefineConfig defaults;
  options->c = defaults.lambda_rule.c;
  options->kappa = defaults.lambda_rule.kappa;
  options->lambda0 = 0.0;
  options->cluster_radius = -1;
  options->min_segment = defaults.min_segment;
  options->max_depth = defaults.max_depth;
  tl_solver_options_init(&options->solver);
}

tl_status tl_refine_run(const tl_series* series, const tl_refine_options* options,
                        tl_refinement** out) {
  return guarded([&] {
    const auto& s = require(series, "series");
    const auto& o = require(options, "options");
    require(out, "out");
    RefineConfig config;
    config.lambda_rule = o.lambda0 > 0.0 ? PowerLawLambda::anchored(o.lambda0, s.y.size(), o.c)
                                         : PowerLawLambda{o.c, o.kappa};
    if (o.cluster_radius >= 0) config.cluster_radius = static_cast<std::size_t>(o.cluster_radius);
    config.min_segment = o.min_segment;
    config.max_depth = o.max_depth;
    tl_solver_options inner = o.solver;
    inner.lambda = 0.0;
    config.inherit_solver = solver_config(inner);
    try {
      *out = new tl_refinement{s.y, refine(s.y, config)};
      return TL_OK;
    } catch (const RefineFailed& e) {
      *out = new tl_refinement{s.y, e.trace()};
      return fail(TL_NOT_CONVERGED, e.what());
    }
  });
}

size_t tl_refinement_point_count(const tl_refinement* r) { return r ? r->trace.final_points.size() : 0; }
size_t tl_refinement_round_count(const tl_refinement* r) { return r ? r->trace.rounds.size() : 0; }
double tl_refinement_round0_lambda(const tl_refinement* r) {
  return r && !r->trace.rounds.empty() ? r->trace.rounds.front().lambda : 0.0;
}

tl_status tl_refinement_trace_json(const tl_refinement* refinement, tl_text** out) {
  return guarded([&] { return emit(nlohmann::json(require(refinement, "refinement").trace), out); });
}

tl_status tl_refinement_final_json(const tl_refinement* refinement, tl_text** out) {
  return guarded([&] {
    const auto& t = require(refinement, "refinement").trace;
    nlohmann::json j = merge(t.final_points, t.cluster_radius);
    j["cluster_radius"] = t.cluster_radius;
    return emit(j, out);
  });
}

tl_status tl_refinement_monitor_json(const tl_refinement* refinement, tl_text** out) {
  return guarded([&] {
    const auto& r = require(refinement, "refinement");
    nlohmann::json j = nlohmann::json::array();
    for (const MonitoredPoint& p : monitor(r.trace, r.y)) {
      j.push_back({{"t", p.location}, {"round", p.round}, {"lambda", p.lambda}, {"margin", p.margin}});
    }
    return emit(j, out);
  });
}

tl_status tl_refinement_write_final_trend_csv(const tl_refinement* refinement, const char* path) {
  return guarded([&] {
    const auto& r = require(refinement, "refinement");
    write_file(path, [&](std::ostream& o) { write_column_csv(o, "m", r.trace.final_estimate.m); });
    return TL_OK;
  });
}

void tl_refinement_free(tl_refinement* refinement) { delete refinement; }

void tl_scenario_options_init(tl_scenario_options* options) {
  if (!options) return;
  const ScenarioConfig defaults = alternating_scenario();
  options->shape = TL_SHAPE_ALTERNATING;
  options->spec = nullptr;
  options->sizes = nullptr;
  options->size_count = 0;
  options->c = defaults.c;
  options->kappa = 0.0;
  options->trials = defaults.trials;
  options->base_seed = defaults.base_seed;
  options->window_fraction = defaults.window_fraction;
  options->sigma = defaults.sigma;
  options->use_refine = 0;
  options->threads = 0;
  tl_solver_options_init(&options->solver);
}

tl_status tl_monte_carlo(const tl_scenario_options* options, tl_rate_table** out) {
  return guarded([&] {
    const auto& o = require(options, "options");
    require(out, "out");
    if (o.shape != TL_SHAPE_ALTERNATING && o.shape != TL_SHAPE_STAIRCASE) {
      throw std::invalid_argument("unknown scenario shape");
    }
    ScenarioConfig config = o.shape == TL_SHAPE_STAIRCASE ? staircase_scenario() : alternating_scenario();
    if (o.spec) config.spec_family = o.spec->file.spec;
    if (o.sizes) config.sizes.assign(o.sizes, o.sizes + o.size_count);
    config.c = o.c;
    if (o.kappa > 0.0) {
      config.kappa = o.kappa;
    } else {
      // keep the shape's anchor at N = 10000 under the requested exponent
      config.kappa = PowerLawLambda::anchored(config.lambda_for(10000), 10000, o.c).kappa;
    }
    config.trials = o.trials;
    config.base_seed = o.base_seed;
    config.window_fraction = o.window_fraction;
    config.sigma = o.sigma;
    config.threads = o.threads;
    tl_solver_options inner = o.solver;
    inner.lambda = 0.0;
    config.solver = solver_config(inner);
    *out = new tl_rate_table{run_consistency(config, o.use_refine != 0)};
    return TL_OK;
  });
}

tl_status tl_rate_table_json(const tl_rate_table* table, tl_text** out) {
  return guarded([&] { return emit(nlohmann::json{{"rows", require(table, "table").table.rows}}, out); });
}

tl_status tl_rate_table_write_csv(const tl_rate_table* table, const char* path) {
  return guarded([&] {
    const auto& t = require(table, "table");
    write_file(path, [&](std::ostream& o) { write_rate_table_csv(o, t.table); });
    return TL_OK;
  });
}

int tl_rate_table_failed_trials(const tl_rate_table* table) {
  int failed = 0;
  if (table) {
    for (const RateRow& r : table->table.rows) failed += r.failed_trials;
  }
  return failed;
}

void tl_rate_table_free(tl_rate_table* table) { delete table; }

tl_status tl_reproduce(int which, uint64_t seed, const char* dir, tl_text** summary) {
  return guarded([&] {
    const ExampleBundle bundle = reproduce_example(which, seed);
    write_bundle(bundle, require_text(dir, "dir"));
    if (summary) {
      nlohmann::json j = {{"example", which},
                          {"seed", seed},
                          {"lambda", bundle.estimate.lambda},
                          {"alternating", bundle.report.alternating},
                          {"points", bundle.report.points.size()},
                          {"detection", bundle.metrics}};
      if (bundle.refined_metrics) j["refined_detection"] = *bundle.refined_metrics;
      return emit(j, summary);
    }
    return TL_OK;
  });
}

}  // extern "C"
