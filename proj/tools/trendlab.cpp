// trendlab command-line front end. Links only the C interface.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trendlab/trendlab.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNumericError = 2;

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

int exit_code_for(tl_status s) {
  return s == TL_NOT_CONVERGED || s == TL_NOT_CERTIFIED || s == TL_INTERNAL_ERROR ? kNumericError
                                                                                  : kInputError;
}

void check(tl_status s) {
  if (s == TL_OK) return;
  throw Failure(exit_code_for(s), std::string(tl_status_string(s)) + ": " + tl_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Free(p); }
};
using Series = std::unique_ptr<tl_series, Deleter<tl_series, tl_series_free>>;
using Spec = std::unique_ptr<tl_spec, Deleter<tl_spec, tl_spec_free>>;
using Fit = std::unique_ptr<tl_fit, Deleter<tl_fit, tl_fit_free>>;
using Refinement = std::unique_ptr<tl_refinement, Deleter<tl_refinement, tl_refinement_free>>;
using Table = std::unique_ptr<tl_rate_table, Deleter<tl_rate_table, tl_rate_table_free>>;

json take(tl_text* text) {
  std::unique_ptr<tl_text, Deleter<tl_text, tl_text_free>> owned(text);
  return json::parse(tl_text_data(text));
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kInputError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return hex(fnv1a(buf.str()));
}

Series read_series(const std::string& path, const char* column = "y") {
  tl_series* raw = nullptr;
  check(tl_series_read_csv(path.c_str(), column, &raw));
  return Series(raw);
}

// One invocation: effective parameters, input digests, outputs and the manifest.
class Run {
 public:
  std::string command;
  json parameters = json::object();
  json inputs = json::object();
  fs::path out_dir = ".";

  void add_input(const std::string& role, const std::string& path) {
    inputs[role] = {{"path", path}, {"fnv1a64", file_digest(path)}};
  }

  // Inputs enter by content so moving a file does not change the hash.
  std::string parameter_hash() const {
    json digests = json::object();
    for (const auto& [role, entry] : inputs.items()) digests[role] = entry["fnv1a64"];
    const json canonical = {{"command", command}, {"parameters", parameters}, {"inputs", digests}};
    return hex(fnv1a(canonical.dump()));
  }

  fs::path output(const std::string& name) {
    outputs_.push_back(name);
    return out_dir / name;
  }

  void write_json(const std::string& name, json doc, const std::string& status) {
    doc["status"] = status;
    doc["parameter_hash"] = parameter_hash();
    std::ofstream f(output(name), std::ios::binary);
    if (!f) throw Failure(kInputError, "cannot write " + (out_dir / name).string());
    f << doc.dump(2) << '\n';
  }

  void write_manifest(const std::string& status, int exit_code, const std::string& message) const {
    json manifest = {{"tool", "trendlab"},
                     {"version", tl_version()},
                     {"generator", tl_generator_id()},
                     {"command", command},
                     {"parameters", parameters},
                     {"inputs", inputs},
                     {"parameter_hash", parameter_hash()},
                     {"status", status},
                     {"exit_code", exit_code},
                     {"outputs", outputs_}};
    if (!message.empty()) manifest["message"] = message;
    std::ofstream f(out_dir / "manifest.json", std::ios::binary);
    if (f) f << manifest.dump(2) << '\n';
  }

 private:
  std::vector<std::string> outputs_;
};

struct SolverFlags {
  int order = 2;
  double tol = 1e-8;
  int max_iter = 20000;
  std::string backend = "ipm";

  void attach(CLI::App* app) {
    app->add_option("--order", order, "Difference order (1 = piecewise constant, 2 = piecewise linear)")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    app->add_option("--tol", tol, "Primal and dual tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--max-iter", max_iter, "Iteration budget")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--backend", backend, "Solver backend")
        ->check(CLI::IsMember({"ipm", "admm"}))
        ->capture_default_str();
  }

  tl_solver_options options(double lambda) const {
    tl_solver_options o;
    tl_solver_options_init(&o);
    o.order = order;
    o.lambda = lambda;
    o.tolerance = tol;
    o.max_iterations = max_iter;
    o.backend = backend == "admm" ? TL_BACKEND_ADMM : TL_BACKEND_INTERIOR_POINT;
    return o;
  }

  void echo(json& p) const {
    p["order"] = order;
    p["tol"] = tol;
    p["max_iter"] = max_iter;
    p["backend"] = backend;
  }
};

struct Outcome {
  std::string status;
  int exit_code;
};

Outcome fit_command(Run& run, const std::string& input, double lambda, const SolverFlags& solver,
                    long radius) {
  run.parameters["lambda"] = lambda;
  run.parameters["cluster_radius"] = radius;
  solver.echo(run.parameters);
  run.add_input("series", input);
  const Series y = read_series(input);

  const tl_solver_options opt = solver.options(lambda);
  tl_fit* raw = nullptr;
  const tl_status s = tl_fit_run(y.get(), &opt, &raw);
  if (s != TL_OK && s != TL_NOT_CONVERGED) check(s);
  const Fit fit(raw);
  const bool converged = tl_fit_converged(fit.get()) == 1;
  const std::string status = converged ? "converged" : "not_converged";

  check(tl_fit_write_trend_csv(fit.get(), run.output("trend.csv").c_str()));
  check(tl_fit_write_dual_csv(fit.get(), run.output("dual.csv").c_str()));

  tl_text* text = nullptr;
  check(tl_fit_kkt_json(fit.get(), &text));
  json kkt = take(text);
  const bool passed = kkt["passed"].get<bool>();
  double primal = 0.0, dual = 0.0;
  tl_fit_residuals(fit.get(), &primal, &dual);
  kkt["iterations"] = tl_fit_iterations(fit.get());
  kkt["objective"] = tl_fit_objective(fit.get());
  kkt["primal_residual"] = primal;
  kkt["dual_residual"] = dual;
  run.write_json("kkt.json", kkt, status);

  json points;
  if (converged) {
    check(tl_fit_changepoints_json(fit.get(), radius, &text));
    points = take(text);
  } else {
    points = {{"points", json::array()},
              {"sign_pattern", json::array()},
              {"alternating", true},
              {"staircase_segments", json::array()},
              {"message", "no change points from an uncertified fit"}};
  }
  run.write_json("changepoints.json", points, status);
  return {status, converged && passed ? kOk : kNumericError};
}

struct RefineFlags {
  double c = 1.3;
  std::optional<double> kappa;
  std::optional<double> lambda0;
  long radius = -1;
  std::size_t min_segment = 10;
  int max_depth = 32;
};

Outcome refine_command(Run& run, const std::string& input, const RefineFlags& flags,
                       const SolverFlags& solver) {
  tl_refine_options opt;
  tl_refine_options_init(&opt);
  opt.c = flags.c;
  if (flags.kappa) opt.kappa = *flags.kappa;
  if (flags.lambda0) opt.lambda0 = *flags.lambda0;
  opt.cluster_radius = flags.radius;
  opt.min_segment = flags.min_segment;
  opt.max_depth = flags.max_depth;
  opt.solver = solver.options(0.0);

  run.parameters["c"] = flags.c;
  run.parameters["kappa"] = flags.lambda0 ? json(nullptr) : json(opt.kappa);
  run.parameters["lambda0"] = flags.lambda0 ? json(*flags.lambda0) : json(nullptr);
  run.parameters["cluster_radius"] = flags.radius;
  run.parameters["min_segment"] = flags.min_segment;
  run.parameters["max_depth"] = flags.max_depth;
  solver.echo(run.parameters);
  run.add_input("series", input);
  const Series y = read_series(input);

  tl_refinement* raw = nullptr;
  const tl_status s = tl_refine_run(y.get(), &opt, &raw);
  if (s != TL_OK && s != TL_NOT_CONVERGED) check(s);
  const Refinement r(raw);
  const std::string status = s == TL_OK ? "converged" : "not_converged";

  tl_text* text = nullptr;
  check(tl_refinement_trace_json(r.get(), &text));
  run.write_json("trace.json", take(text), status);
  if (s != TL_OK) {
    run.write_json("final_changepoints.json",
                   {{"points", json::array()},
                    {"sign_pattern", json::array()},
                    {"alternating", true},
                    {"staircase_segments", json::array()},
                    {"message", "refinement stopped at an uncertified inner fit"}},
                   status);
    return {status, kNumericError};
  }
  check(tl_refinement_final_json(r.get(), &text));
  run.write_json("final_changepoints.json", take(text), status);
  check(tl_refinement_monitor_json(r.get(), &text));
  run.write_json("monitor.json", {{"removed", take(text)}}, status);
  check(tl_refinement_write_final_trend_csv(r.get(), run.output("final_trend.csv").c_str()));
  return {status, kOk};
}

Outcome lambda_max_command(Run& run, const std::string& input, int order) {
  run.parameters["order"] = order;
  run.add_input("series", input);
  const Series y = read_series(input);
  double value = 0.0;
  check(tl_lambda_max(y.get(), order, &value));
  run.write_json("lambda_max.json", {{"lambda_max", value}, {"order", order}, {"n", tl_series_length(y.get())}},
                 "ok");
  std::cout << json(value).dump() << '\n';
  return {"ok", kOk};
}

Outcome kkt_command(Run& run, const std::string& input, const std::string& trend, double lambda, int order) {
  run.parameters["lambda"] = lambda;
  run.parameters["order"] = order;
  run.add_input("series", input);
  run.add_input("trend", trend);
  const Series y = read_series(input);
  const Series m = read_series(trend, "m");
  tl_text* text = nullptr;
  check(tl_check_kkt(y.get(), m.get(), lambda, order, &text));
  json report = take(text);
  const bool passed = report["passed"].get<bool>();
  run.write_json("kkt.json", report, passed ? "passed" : "failed");
  return {passed ? "passed" : "failed", passed ? kOk : kNumericError};
}

Outcome simulate_command(Run& run, const std::string& spec_path, std::optional<std::uint64_t> seed,
                         std::optional<double> sigma) {
  run.add_input("spec", spec_path);
  tl_spec* raw = nullptr;
  check(tl_spec_read_json(spec_path.c_str(), &raw));
  const Spec spec(raw);
  check(tl_spec_set_noise(spec.get(), sigma.value_or(tl_spec_sigma(spec.get())),
                          seed.value_or(tl_spec_seed(spec.get()))));
  run.parameters["seed"] = tl_spec_seed(spec.get());
  run.parameters["sigma"] = tl_spec_sigma(spec.get());

  tl_series* series = nullptr;
  check(tl_spec_generate(spec.get(), &series));
  const Series y(series);
  check(tl_series_write_csv(y.get(), "y", run.output("series.csv").c_str()));
  tl_text* text = nullptr;
  check(tl_spec_json(spec.get(), &text));
  run.write_json("truth.json", take(text), "ok");
  return {"ok", kOk};
}

struct MonteCarloFlags {
  std::string scenario = "alternating";
  std::string spec;
  std::vector<std::size_t> sizes{500, 2000, 8000};
  double c = 1.3;
  std::optional<double> kappa;
  int trials = 50;
  std::uint64_t seed = 0;
  double window_fraction = 0.02;
  double sigma = 1.0;
  bool refine = false;
  unsigned threads = 0;
};

Outcome monte_carlo_command(Run& run, const MonteCarloFlags& f, const SolverFlags& solver) {
  tl_scenario_options opt;
  tl_scenario_options_init(&opt);
  opt.shape = f.scenario == "staircase" ? TL_SHAPE_STAIRCASE : TL_SHAPE_ALTERNATING;
  Spec spec;
  if (!f.spec.empty()) {
    run.add_input("spec", f.spec);
    tl_spec* raw = nullptr;
    check(tl_spec_read_json(f.spec.c_str(), &raw));
    spec.reset(raw);
    opt.spec = spec.get();
  }
  opt.sizes = f.sizes.data();
  opt.size_count = f.sizes.size();
  opt.c = f.c;
  opt.kappa = f.kappa.value_or(0.0);
  opt.trials = f.trials;
  opt.base_seed = f.seed;
  opt.window_fraction = f.window_fraction;
  opt.sigma = f.sigma;
  opt.use_refine = f.refine ? 1 : 0;
  opt.threads = f.threads;
  opt.solver = solver.options(0.0);

  run.parameters["scenario"] = f.spec.empty() ? json(f.scenario) : json(nullptr);
  run.parameters["sizes"] = f.sizes;
  run.parameters["c"] = f.c;
  run.parameters["kappa"] = f.kappa ? json(*f.kappa) : json(nullptr);
  run.parameters["trials"] = f.trials;
  run.parameters["seed"] = f.seed;
  run.parameters["window_fraction"] = f.window_fraction;
  run.parameters["sigma"] = f.sigma;
  run.parameters["refine"] = f.refine;
  solver.echo(run.parameters);

  tl_rate_table* raw = nullptr;
  check(tl_monte_carlo(&opt, &raw));
  const Table table(raw);
  check(tl_rate_table_write_csv(table.get(), run.output("rates.csv").c_str()));
  tl_text* text = nullptr;
  check(tl_rate_table_json(table.get(), &text));
  const int failed = tl_rate_table_failed_trials(table.get());
  const std::string status = failed == 0 ? "ok" : "failed_trials";
  run.write_json("rates.json", take(text), status);
  return {status, failed == 0 ? kOk : kNumericError};
}

Outcome reproduce_command(Run& run, int which, std::uint64_t seed) {
  run.parameters["example"] = which;
  run.parameters["seed"] = seed;
  tl_text* text = nullptr;
  check(tl_reproduce(which, seed, run.out_dir.c_str(), &text));
  run.write_json("summary.json", take(text), "converged");
  return {"converged", kOk};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l1 trend filtering with dual certificates and change point refinement", "trendlab"};
  app.set_version_flag("--version", std::string(tl_version()));
  app.require_subcommand(1);

  Run run;
  std::function<Outcome()> action;
  std::string out = ".";
  auto with_out = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output directory")->capture_default_str();
  };

  std::string input;
  double lambda = 0.0;
  long radius = -1;
  SolverFlags solver;

  auto* fit = app.add_subcommand("fit", "Fit a trend and write trend, dual, change point and KKT files");
  fit->add_option("input,-i,--input", input, "Series CSV (t,y)")->required()->check(CLI::ExistingFile);
  fit->add_option("--lambda", lambda, "Penalty weight")->required()->check(CLI::NonNegativeNumber);
  fit->add_option("--cluster-radius", radius, "Merge radius for change points (default max(5, N/500))");
  solver.attach(fit);
  with_out(fit);
  fit->callback([&] { action = [&] { return fit_command(run, input, lambda, solver, radius); }; });

  RefineFlags rflags;
  auto* ref = app.add_subcommand("refine", "Run the inward refinement chain");
  ref->add_option("input,-i,--input", input, "Series CSV (t,y)")->required()->check(CLI::ExistingFile);
  ref->add_option("--c", rflags.c, "Exponent of lambda(n) = kappa n^c")->capture_default_str();
  auto* kappa = ref->add_option("--kappa", rflags.kappa, "Multiplier of lambda(n) = kappa n^c");
  auto* lambda0 = ref->add_option("--lambda0", rflags.lambda0, "Round-0 lambda; sets kappa from the series length");
  kappa->excludes(lambda0);
  ref->add_option("--cluster-radius", rflags.radius, "Merge radius and guard band (default max(5, N/500))");
  ref->add_option("--min-segment", rflags.min_segment, "Shortest segment to re-solve")->capture_default_str();
  ref->add_option("--max-depth", rflags.max_depth, "Maximum number of rounds")->capture_default_str();
  solver.attach(ref);
  with_out(ref);
  ref->callback([&] { action = [&] { return refine_command(run, input, rflags, solver); }; });

  int order = 2;
  auto* lmax = app.add_subcommand("lambda-max", "Smallest lambda that fuses the whole series");
  lmax->add_option("input,-i,--input", input, "Series CSV (t,y)")->required()->check(CLI::ExistingFile);
  lmax->add_option("--order", order, "Difference order")->check(CLI::IsMember({1, 2}))->capture_default_str();
  with_out(lmax);
  lmax->callback([&] { action = [&] { return lambda_max_command(run, input, order); }; });

  std::string trend;
  auto* kkt = app.add_subcommand("kkt", "Check optimality of a candidate trend");
  kkt->add_option("input,-i,--input", input, "Series CSV (t,y)")->required()->check(CLI::ExistingFile);
  kkt->add_option("--trend", trend, "Candidate trend CSV (t,m)")->required()->check(CLI::ExistingFile);
  kkt->add_option("--lambda", lambda, "Penalty weight")->required()->check(CLI::NonNegativeNumber);
  kkt->add_option("--order", order, "Difference order")->check(CLI::IsMember({1, 2}))->capture_default_str();
  with_out(kkt);
  kkt->callback([&] { action = [&] { return kkt_command(run, input, trend, lambda, order); }; });

  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  auto* sim = app.add_subcommand("simulate", "Generate a noisy series from a knot spec");
  sim->add_option("--spec", spec_path, "Spec JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Override the spec's seed");
  sim->add_option("--sigma", sigma, "Override the spec's noise level")->check(CLI::NonNegativeNumber);
  with_out(sim);
  sim->callback([&] { action = [&] { return simulate_command(run, spec_path, seed, sigma); }; });

  MonteCarloFlags mc;
  auto* mcs = app.add_subcommand("monte-carlo", "Recovery rates over repeated simulations");
  mcs->add_option("--scenario", mc.scenario, "Built-in mean shape")
      ->check(CLI::IsMember({"alternating", "staircase"}))
      ->capture_default_str();
  mcs->add_option("--spec", mc.spec, "Custom template mean (spec JSON)")->check(CLI::ExistingFile);
  mcs->add_option("--sizes", mc.sizes, "Series lengths")->delimiter(',')->capture_default_str();
  mcs->add_option("--c", mc.c, "Exponent of lambda(N) = kappa N^c")->capture_default_str();
  mcs->add_option("--kappa", mc.kappa, "Multiplier (default anchors the scenario's lambda at N = 10000)");
  mcs->add_option("--trials", mc.trials, "Trials per length")->check(CLI::PositiveNumber)->capture_default_str();
  mcs->add_option("--seed", mc.seed, "Base seed; trial i uses seed + i")->capture_default_str();
  mcs->add_option("--window-fraction", mc.window_fraction, "Detection window as a fraction of N")
      ->capture_default_str();
  mcs->add_option("--sigma", mc.sigma, "Noise level")->check(CLI::NonNegativeNumber)->capture_default_str();
  mcs->add_flag("--refine", mc.refine, "Use the refinement chain");
  mcs->add_option("--threads", mc.threads, "Worker threads (0: all, capped by TRENDLAB_THREADS)")
      ->capture_default_str();
  solver.attach(mcs);
  with_out(mcs);
  mcs->callback([&] { action = [&] { return monte_carlo_command(run, mc, solver); }; });

  int which = 1;
  std::uint64_t rseed = 0;
  auto* rep = app.add_subcommand("reproduce", "Write the plot-ready bundle for a worked example");
  rep->add_option("--example", which, "1 (alternating) or 2 (staircase)")->required()->check(CLI::IsMember({1, 2}));
  rep->add_option("--seed", rseed, "Noise seed")->capture_default_str();
  with_out(rep);
  rep->callback([&] { action = [&] { return reproduce_command(run, which, rseed); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  run.command = app.get_subcommands().front()->get_name();
  run.out_dir = out;
  std::error_code ec;
  fs::create_directories(run.out_dir, ec);
  if (ec) {
    std::cerr << "trendlab: cannot create " << out << ": " << ec.message() << '\n';
    return kInputError;
  }

  try {
    const Outcome outcome = action();
    run.write_manifest(outcome.status, outcome.exit_code, "");
    return outcome.exit_code;
  } catch (const Failure& e) {
    std::cerr << "trendlab " << run.command << ": " << e.what() << '\n';
    run.write_manifest(e.code() == kInputError ? "input_error" : "numeric_error", e.code(), e.what());
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "trendlab " << run.command << ": " << e.what() << '\n';
    run.write_manifest("internal_error", kNumericError, e.what());
    return kNumericError;
  }
}
