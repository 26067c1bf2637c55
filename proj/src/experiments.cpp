#include "trendlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

namespace trendlab {
namespace {

double moment_ratio(std::span<const double> y, std::span<const double> m, double lambda, int order) {
  const ResidualMoments r = residual_moments(TimeSeries(std::vector<double>(y.begin(), y.end())), m);
  const double worst = order == 2 ? std::max(std::abs(r.sum), std::abs(r.weighted_sum)) : std::abs(r.sum);
  return worst / lambda;
}

TrialOutcome run_trial(const ScenarioConfig& config, const PiecewiseLinearSpec& spec,
                       std::size_t n, int trial, bool use_refine) {
  TrialOutcome out;
  out.n = n;
  out.trial = trial;
  out.seed = config.base_seed + static_cast<std::uint64_t>(trial);
  const TimeSeries y = generate(spec, {config.sigma, out.seed});
  const std::size_t radius = config.cluster_radius.value_or(default_cluster_radius(n));
  const auto window = static_cast<std::size_t>(
      std::max(1.0, std::round(config.window_fraction * static_cast<double>(n))));
  const double lambda = config.lambda_for(n);

  ChangePointReport report;
  if (use_refine) {
    RefineConfig rc;
    rc.lambda_rule = {config.c, config.kappa};
    rc.cluster_radius = radius;
    rc.inherit_solver = config.solver;
    try {
      const RefinementTrace trace = refine(y, rc);
      for (const RefinementRound& r : trace.rounds) {
        const auto segment = y.values().subspan(r.first - 1, r.last - r.first + 1);
        out.moment_ratio = std::max(out.moment_ratio,
                                    moment_ratio(segment, r.estimate.m, r.lambda, r.estimate.order));
      }
      report.points = trace.final_points;
    } catch (const RefineFailed& e) {
      out.failure = e.what();
      return out;
    }
  } else {
    SolverConfig sc = config.solver;
    sc.lambda = lambda;
    const TrendEstimate est = solve(y, sc);
    if (!est.converged()) {
      out.failure = "solve did not converge";
      return out;
    }
    report = extract(est, dual_path(y, est.m, sc.order), radius);
    out.moment_ratio = moment_ratio(y.values(), est.m, lambda, sc.order);
  }
  out.converged = true;
  out.metrics = match(report, spec, window);
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  spec_family.validate();
  if (sizes.empty()) throw std::invalid_argument("no sizes given");
  for (std::size_t n : sizes) {
    if (n < 10) throw std::invalid_argument("sizes must be at least 10");
  }
  PowerLawLambda{c, kappa}.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (!(window_fraction > 0.0 && window_fraction < 0.5)) {
    throw std::invalid_argument("window_fraction must lie in (0, 0.5)");
  }
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  solver.validate();
}

ScenarioConfig alternating_scenario() {
  ScenarioConfig config;
  config.spec_family = alternating_example();
  config.sizes = {500, 2000, 8000};
  return config;
}

ScenarioConfig staircase_scenario() {
  ScenarioConfig config;
  config.spec_family = staircase_example();
  config.sizes = {500, 2000, 8000};
  config.kappa = PowerLawLambda::anchored(20000, 10000, config.c).kappa;
  return config;
}

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  unsigned count = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TRENDLAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) {
      count = std::min<unsigned>(count, static_cast<unsigned>(cap));
    }
  }
  return count;
}

RateTable run_consistency(const ScenarioConfig& config, bool use_refine) {
  config.validate();
  std::vector<PiecewiseLinearSpec> specs;
  for (std::size_t n : config.sizes) specs.push_back(rescale(config.spec_family, n));

  const std::size_t per_size = static_cast<std::size_t>(config.trials);
  const std::size_t total = specs.size() * per_size;
  std::vector<TrialOutcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};

  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total && !failed;) {
      const std::size_t s = i / per_size;
      try {
        outcomes[i] = run_trial(config, specs[s], config.sizes[s], static_cast<int>(i % per_size),
                                use_refine);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<std::size_t>(worker_count(config.threads), total);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (error) std::rethrow_exception(error);

  RateTable table;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    RateRow row;
    row.n = config.sizes[s];
    row.lambda = config.lambda_for(row.n);
    row.trials = config.trials;
    int ok = 0, exact = 0, spurious = 0;
    double error_sum = 0.0;
    std::size_t matched = 0;
    for (std::size_t t = 0; t < per_size; ++t) {
      const TrialOutcome& o = outcomes[s * per_size + t];
      if (!o.converged) {
        ++row.failed_trials;
        continue;
      }
      ++ok;
      exact += o.metrics.exact_recovery() ? 1 : 0;
      spurious += o.metrics.spurious;
      for (std::size_t e : o.metrics.localization_errors) error_sum += static_cast<double>(e);
      matched += o.metrics.localization_errors.size();
    }
    row.exact_rate = ok > 0 ? static_cast<double>(exact) / ok : 0.0;
    row.mean_spurious = ok > 0 ? static_cast<double>(spurious) / ok : 0.0;
    row.mean_localization_error =
        matched > 0 ? error_sum / static_cast<double>(matched) : std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back(row);
  }
  table.outcomes = std::move(outcomes);
  return table;
}

ExampleBundle reproduce_example(int which, std::uint64_t seed) {
  if (which != 1 && which != 2) throw std::invalid_argument("example must be 1 or 2");
  ExampleBundle b;
  b.which = which;
  b.truth = which == 1 ? alternating_example() : staircase_example();
  b.noise = {1.0, seed};
  b.series = generate(b.truth, b.noise);
  const double lambda = which == 1 ? 130000.0 : 20000.0;
  const std::size_t n = b.series.size();

  SolverConfig sc;
  sc.lambda = lambda;
  b.estimate = solve(b.series, sc);
  if (!b.estimate.converged()) throw std::runtime_error("solve did not converge");
  b.dual = dual_path(b.series, b.estimate.m);
  b.report = extract(b.estimate, b.dual, default_cluster_radius(n));
  b.metrics = match(b.report, b.truth, default_window(n));

  if (which == 2) {
    RefineConfig rc;
    rc.lambda_rule = PowerLawLambda::anchored(lambda, n);
    b.refinement = refine(b.series, rc);
    b.refined_metrics = match(merge(b.refinement->final_points, b.refinement->cluster_radius), b.truth, default_window(n));
  }
  return b;
}

}  // namespace trendlab
