#include "trendlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "trendlab/banded.hpp"
#include "trendlab/difference.hpp"
#include "trendlab/dual.hpp"

namespace trendlab {
namespace {

constexpr int kPolishRounds = 12;
constexpr int kSupportSettle = 3;
constexpr int kRebalanceEvery = 25;
constexpr double kRebalanceRatio = 10.0;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

double soft(double x, double k) {
  if (x > k) return x - k;
  if (x < -k) return x + k;
  return 0.0;
}

struct Support {
  std::vector<std::size_t> rows;  // difference rows, ascending
  std::vector<int> signs;

  friend bool operator==(const Support&, const Support&) = default;
};

Support support_of(std::span<const double> w) {
  Support s;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) {
      s.rows.push_back(j);
      s.signs.push_back(sign_of(w[j]));
    }
  }
  return s;
}

// Exact minimizer of the objective over fits whose k-th difference vanishes
// off `support`, with |.| replaced by the given signs on the support. For
// k = 2 the fit is continuous piecewise linear with knots at the support
// vertices (hat basis, tridiagonal Gram); for k = 1 it is piecewise constant.
std::vector<double> reduced_fit(const TimeSeries& y, int order, double lambda,
                                const Support& support) {
  const std::size_t n = y.size();
  const std::size_t a = support.rows.size();
  std::vector<double> m(n);

  if (order == 1) {
    // segment i spans [start_i, start_{i+1}); break after position rows[r]
    std::vector<std::size_t> start{0};
    for (std::size_t j : support.rows) start.push_back(j + 1);
    start.push_back(n);
    for (std::size_t i = 0; i + 1 < start.size(); ++i) {
      double total = 0.0;
      for (std::size_t t = start[i]; t < start[i + 1]; ++t) total += y[t];
      double ct_s = 0.0;  // (C^T s)_i with row r of C = e_{r+1} - e_r
      if (i > 0) ct_s += support.signs[i - 1];
      if (i < a) ct_s -= support.signs[i];
      const double level =
          (total - lambda * ct_s) / static_cast<double>(start[i + 1] - start[i]);
      std::fill(m.begin() + static_cast<std::ptrdiff_t>(start[i]),
                m.begin() + static_cast<std::ptrdiff_t>(start[i + 1]), level);
    }
    return m;
  }

  // nodes (0-based positions): 0, vertices of support rows, n - 1
  std::vector<std::size_t> node{0};
  for (std::size_t j : support.rows) node.push_back(j + 1);
  node.push_back(n - 1);
  const std::size_t q = node.size();

  BandedSpd gram(q, 1);
  std::vector<double> rhs(q, 0.0);
  for (std::size_t i = 0; i + 1 < q; ++i) {
    const double h = static_cast<double>(node[i + 1] - node[i]);
    for (std::size_t t = node[i]; t < node[i + 1]; ++t) {
      const double frac = static_cast<double>(t - node[i]) / h;
      const double left = 1.0 - frac;
      gram.at(i, i) += left * left;
      gram.at(i + 1, i) += left * frac;
      gram.at(i + 1, i + 1) += frac * frac;
      rhs[i] += left * y[t];
      rhs[i + 1] += frac * y[t];
    }
  }
  gram.at(q - 1, q - 1) += 1.0;
  rhs[q - 1] += y[n - 1];

  // slope change at node i: (b_{i+1} - b_i)/h_i - (b_i - b_{i-1})/h_{i-1}
  for (std::size_t r = 0; r < a; ++r) {
    const std::size_t i = r + 1;
    const double inv_left = 1.0 / static_cast<double>(node[i] - node[i - 1]);
    const double inv_right = 1.0 / static_cast<double>(node[i + 1] - node[i]);
    const double ls = lambda * support.signs[r];
    rhs[i - 1] -= ls * inv_left;
    rhs[i] += ls * (inv_left + inv_right);
    rhs[i + 1] -= ls * inv_right;
  }

  gram.factorize();
  gram.solve(rhs);

  for (std::size_t i = 0; i + 1 < q; ++i) {
    const double h = static_cast<double>(node[i + 1] - node[i]);
    for (std::size_t t = node[i]; t < node[i + 1]; ++t) {
      const double frac = static_cast<double>(t - node[i]) / h;
      m[t] = rhs[i] + frac * (rhs[i + 1] - rhs[i]);
    }
  }
  m[n - 1] = rhs[q - 1];
  return m;
}

struct Certificate {
  std::vector<double> m;
  double tube_violation = 0.0;  // relative to lambda
};

// Primal-dual active-set correction starting from `support`. Kinks whose
// slope change comes out with the wrong sign are dropped; for every
// contiguous run of vertices where |z| leaves the tube, the vertex of largest
// excess joins the support with the sign of z. Returns a fit whose dual path
// satisfies the tube and sign conditions, or nothing.
std::optional<Certificate> certify(const TimeSeries& y, int order, double lambda,
                                   Support support, double tube_tolerance) {
  const std::size_t n = y.size();
  const auto k = static_cast<std::size_t>(order);
  const double allowed = tube_tolerance * lambda;
  for (int round = 0; round < kPolishRounds; ++round) {
    std::vector<double> m = reduced_fit(y, order, lambda, support);
    const std::vector<double> w = difference(order, m);
    const DualPath path = dual_path(y, m, order);

    Support next;
    bool ok = true;
    double violation = 0.0;
    std::size_t r = 0;
    std::size_t run_peak = 0;
    double run_excess = -1.0;
    auto close_run = [&] {
      if (run_excess < 0.0) return;
      next.rows.push_back(run_peak);
      next.signs.push_back(sign_of(path.z[run_peak + k]));
      run_excess = -1.0;
    };
    for (std::size_t j = 0; j + k < n; ++j) {
      const double zt = path.z[j + k];
      const bool in_support = r < support.rows.size() && support.rows[r] == j;
      if (in_support) {
        close_run();
        const int s = support.signs[r++];
        if (sign_of(w[j]) == -s) {
          ok = false;
          continue;
        }
        next.rows.push_back(j);
        next.signs.push_back(s);
        continue;
      }
      const double excess = std::abs(zt) - lambda;
      violation = std::max(violation, excess);
      if (excess > allowed) {
        ok = false;
        // a run also ends where z crosses from one side of the tube to the other
        if (run_excess >= 0.0 && sign_of(zt) != sign_of(path.z[run_peak + k])) close_run();
        if (excess > run_excess) {
          run_excess = excess;
          run_peak = j;
        }
      } else {
        close_run();
      }
    }
    close_run();
    if (ok) {
      const double scale = std::max(lambda, std::numeric_limits<double>::min());
      const double boundary = std::max(std::abs(path.z[n]), std::abs(path.z[n + 1]));
      return Certificate{std::move(m), std::max(violation, boundary) / scale};
    }
    if (next == support) break;
    support = std::move(next);
  }
  return std::nullopt;
}

TrendEstimate finish(const SolverConfig& config, std::vector<double> m, int iterations,
                     double primal, double dual, SolveStatus status) {
  TrendEstimate est;
  est.w = difference(config.order, m);
  est.m = std::move(m);
  est.lambda = config.lambda;
  est.order = config.order;
  est.iterations = iterations;
  est.primal_residual = primal;
  est.dual_residual = dual;
  est.status = status;
  return est;
}

}  // namespace

void SolverConfig::validate() const {
  require_order(order);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be a finite nonnegative number");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(primal_tolerance > 0.0) || !(dual_tolerance > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (penalty_parameter && !(*penalty_parameter > 0.0)) {
    throw std::invalid_argument("penalty parameter must be positive");
  }
}

std::vector<double> polynomial_fit(const TimeSeries& y, int order) {
  require_order(order);
  const std::size_t n = y.size();
  double mean = 0.0;
  for (double v : y.values()) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> fit(n, mean);
  if (order == 1) return fit;
  const double center = 0.5 * static_cast<double>(n + 1);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i + 1) - center;
    sxy += dt * (y[i] - mean);
    sxx += dt * dt;
  }
  const double slope = sxy / sxx;
  for (std::size_t i = 0; i < n; ++i) {
    fit[i] = mean + slope * (static_cast<double>(i + 1) - center);
  }
  return fit;
}

double lambda_max(const TimeSeries& y, int order) {
  require_order(order);
  const std::vector<double> fit = polynomial_fit(y, order);
  const DualPath path = dual_path(y, fit, order);
  double peak = 0.0;
  for (std::size_t t = path.tube_first(); t <= path.tube_last(); ++t) {
    peak = std::max(peak, std::abs(path.z[t]));
  }
  return peak;
}

double objective(const TimeSeries& y, std::span<const double> m, double lambda, int order) {
  if (m.size() != y.size()) throw std::invalid_argument("length mismatch in objective");
  double fit = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) fit += 0.5 * (y[i] - m[i]) * (y[i] - m[i]);
  double pen = 0.0;
  for (double v : difference(order, m)) pen += std::abs(v);
  return fit + lambda * pen;
}

namespace {

// Remembers which supports were already handed to certify() so a stalled
// iterate does not repeat the same active-set correction.
class Certifier {
 public:
  Certifier(const TimeSeries& y, const SolverConfig& config) : y_(y), config_(config) {}

  std::optional<Certificate> operator()(const Support& s) {
    if (!seen_.insert(fingerprint(s)).second) return std::nullopt;
    return certify(y_, config_.order, config_.lambda, s, config_.dual_tolerance);
  }

 private:
  static std::uint64_t fingerprint(const Support& s) {
    // FNV-1a over (row, sign) pairs
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ULL;
    };
    mix(s.rows.size());
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      mix(s.rows[i]);
      mix(static_cast<std::uint64_t>(s.signs[i] + 1));
    }
    return h;
  }

  const TimeSeries& y_;
  const SolverConfig& config_;
  std::unordered_set<std::uint64_t> seen_;
};

BandedSpd admm_system(std::size_t n, int order, double rho) {
  BandedSpd a(n, static_cast<std::size_t>(order));
  for (std::size_t i = 0; i < n; ++i) a.at(i, i) = 1.0;
  add_gram(order, rho, a);
  a.factorize();
  return a;
}

TrendEstimate run_admm(const TimeSeries& y, const SolverConfig& config, Certifier& certifier) {
  const int k = config.order;
  const double lambda = config.lambda;
  const std::size_t n = y.size();
  const std::size_t p = n - static_cast<std::size_t>(k);
  double rho = config.penalty_parameter.value_or(lambda);

  std::vector<double> m(y.values().begin(), y.values().end());
  std::vector<double> u(p, 0.0);
  if (config.warm_start && config.warm_start->m.size() == n && config.warm_start->order == k) {
    m = config.warm_start->m;
    const DualPath path = dual_path(y, m, k);
    for (std::size_t j = 0; j < p; ++j) {
      u[j] = std::clamp(path.z[j + static_cast<std::size_t>(k)], -lambda, lambda) / rho;
    }
  }
  std::vector<double> dm = difference(k, m);
  std::vector<double> w(p);
  for (std::size_t j = 0; j < p; ++j) w[j] = soft(dm[j] + u[j], lambda / rho);

  BandedSpd system = admm_system(n, k, rho);
  Support previous = support_of(w);
  int settled = 0;
  double eps_pri = std::numeric_limits<double>::infinity();
  double eps_dual = std::numeric_limits<double>::infinity();
  std::vector<double> diff(p);

  int it = 0;
  for (it = 1; it <= config.max_iterations; ++it) {
    for (std::size_t j = 0; j < p; ++j) diff[j] = w[j] - u[j];
    std::vector<double> rhs = difference_transpose(k, diff);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = y[i] + rho * rhs[i];
    system.solve(rhs);
    m = std::move(rhs);
    dm = difference(k, m);

    double r2 = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double w_new = soft(dm[j] + u[j], lambda / rho);
      diff[j] = w_new - w[j];
      w[j] = w_new;
      const double r = dm[j] - w[j];
      u[j] += r;
      r2 += r * r;
    }
    const double r_norm = std::sqrt(r2);
    const double s_norm = rho * norm2(difference_transpose(k, diff));
    const double z_norm = rho * norm2(difference_transpose(k, u));
    eps_pri = r_norm / std::max({norm2(dm), norm2(w), 1e-300});
    eps_dual = s_norm / std::max(z_norm, 1e-300);

    Support current = support_of(w);
    settled = current == previous ? settled + 1 : 0;
    previous = std::move(current);

    const bool done = eps_pri <= config.primal_tolerance && eps_dual <= config.dual_tolerance;
    if (settled >= kSupportSettle || done) {
      if (auto cert = certifier(previous)) {
        return finish(config, std::move(cert->m), it, 0.0, cert->tube_violation,
                      SolveStatus::converged);
      }
    }
    if (done) break;

    if (it % kRebalanceEvery == 0) {
      double scale = 1.0;
      if (r_norm > kRebalanceRatio * s_norm) scale = 2.0;
      if (s_norm > kRebalanceRatio * r_norm) scale = 0.5;
      if (scale != 1.0) {
        rho *= scale;
        for (double& v : u) v /= scale;
        system = admm_system(n, k, rho);
      }
    }
  }
  it = std::min(it, config.max_iterations);

  // residual targets met but the support never certified: try the set where
  // the dual estimate sits on the boundary
  Support from_dual;
  for (std::size_t j = 0; j < p; ++j) {
    const double zt = rho * u[j];
    if (std::abs(zt) >= lambda * (1.0 - 1e-6)) {
      from_dual.rows.push_back(j);
      from_dual.signs.push_back(sign_of(zt));
    }
  }
  if (auto cert = certifier(from_dual)) {
    return finish(config, std::move(cert->m), it, 0.0, cert->tube_violation,
                  SolveStatus::converged);
  }
  return finish(config, std::move(m), it, eps_pri, eps_dual, SolveStatus::not_converged);
}

// Autocorrelation of the difference stencil: the bands of D D^T.
std::vector<double> gram_bands(int order) {
  if (order == 1) return {2.0, -1.0};
  return {6.0, -4.0, 1.0};
}

// Supports suggested by an interior iterate: complementarity (multiplier
// larger than slack) and a few boundary bands on |v|.
std::vector<Support> candidate_supports(std::span<const double> v, std::span<const double> mu1,
                                        std::span<const double> mu2, std::span<const double> f1,
                                        std::span<const double> f2, double lambda) {
  std::vector<Support> out(1);
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (mu1[j] > -f1[j]) {
      out[0].rows.push_back(j);
      out[0].signs.push_back(+1);
    } else if (mu2[j] > -f2[j]) {
      out[0].rows.push_back(j);
      out[0].signs.push_back(-1);
    }
  }
  for (double band : {1e-3, 1e-5, 1e-7}) {
    Support s;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (std::abs(v[j]) >= lambda * (1.0 - band)) {
        s.rows.push_back(j);
        s.signs.push_back(sign_of(v[j]));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> apply_ddt(int order, std::span<const double> v) {
  return difference(order, difference_transpose(order, v));
}

// Primal-dual barrier method on
//   minimize 1/2 v^T D D^T v - (D y)^T v   subject to  -lambda <= v <= lambda,
// with m = y - D^T v. Line search and barrier update follow the standard
// l1 trend filtering interior-point scheme.
TrendEstimate run_interior_point(const TimeSeries& y, const SolverConfig& config,
                                 Certifier& certifier) {
  constexpr double kAlpha = 0.01;
  constexpr double kBeta = 0.5;
  constexpr double kMu = 2.0;
  constexpr int kMaxLineSearch = 40;
  constexpr int kMaxStall = 15;

  const int k = config.order;
  const double lambda = config.lambda;
  const std::size_t n = y.size();
  const std::size_t p = n - static_cast<std::size_t>(k);
  const std::vector<double> bands = gram_bands(k);
  const std::vector<double> dy = difference(k, y.values());

  std::vector<double> v(p, 0.0);
  std::vector<double> mu1(p, 1.0);
  std::vector<double> mu2(p, 1.0);
  std::vector<double> f1(p, -lambda);
  std::vector<double> f2(p, -lambda);
  double t = 1e-10;
  double step = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  double rel_gap = gap;
  double res_norm = gap;
  double best_gap = gap;
  int stalled = 0;

  auto residual_norm = [&](std::span<const double> ddtv, std::span<const double> a,
                           std::span<const double> b, std::span<const double> g1,
                           std::span<const double> g2) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double rd = ddtv[j] - dy[j] + a[j] - b[j];
      const double c1 = -a[j] * g1[j] - 1.0 / t;
      const double c2 = -b[j] * g2[j] - 1.0 / t;
      s += rd * rd + c1 * c1 + c2 * c2;
    }
    return std::sqrt(s);
  };

  std::vector<double> dv(p), dmu1(p), dmu2(p);
  std::vector<double> nv(p), nmu1(p), nmu2(p), nf1(p), nf2(p);

  int it = 0;
  for (it = 1; it <= config.max_iterations; ++it) {
    const std::vector<double> dtv = difference_transpose(k, v);
    const std::vector<double> ddtv = difference(k, dtv);

    // duality gap: primal value at m = y - D^T v against the dual value
    double dtv2 = 0.0;
    for (double x : dtv) dtv2 += x * x;
    double pen = 0.0;
    double dyv = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      pen += std::abs(dy[j] - ddtv[j]);
      dyv += dy[j] * v[j];
    }
    const double pobj = 0.5 * dtv2 + lambda * pen;
    const double dobj = -0.5 * dtv2 + dyv;
    gap = pobj - dobj;
    rel_gap = gap / std::max(std::abs(pobj), 1.0);

    if (rel_gap < 1e-2) {
      for (const Support& s : candidate_supports(v, mu1, mu2, f1, f2, lambda)) {
        if (auto cert = certifier(s)) {
          return finish(config, std::move(cert->m), it, 0.0, cert->tube_violation,
                        SolveStatus::converged);
        }
      }
    }
    // rounding in D D^T v puts a floor under the attainable gap
    if (rel_gap < 0.5 * best_gap) {
      best_gap = rel_gap;
      stalled = 0;
    } else if (++stalled >= kMaxStall && rel_gap < 1e-6) {
      break;
    }

    if (step >= 0.2) t = std::max(2.0 * static_cast<double>(p) * kMu / gap, 1.2 * t);

    // Newton system (D D^T + diag(mu1/(-f1) + mu2/(-f2))) dv = r
    BandedSpd newton(p, bands.size() - 1);
    for (std::size_t j = 0; j < p; ++j) {
      newton.at(j, j) = bands[0] - mu1[j] / f1[j] - mu2[j] / f2[j];
      for (std::size_t d = 1; d < bands.size() && d <= j; ++d) newton.at(j, j - d) = bands[d];
    }
    for (std::size_t j = 0; j < p; ++j) {
      dv[j] = -ddtv[j] + dy[j] + (1.0 / t) / f1[j] - (1.0 / t) / f2[j];
    }
    newton.factorize();
    newton.solve(dv);
    for (std::size_t j = 0; j < p; ++j) {
      dmu1[j] = -(mu1[j] + ((1.0 / t) + dv[j] * mu1[j]) / f1[j]);
      dmu2[j] = -(mu2[j] + ((1.0 / t) - dv[j] * mu2[j]) / f2[j]);
    }

    res_norm = residual_norm(ddtv, mu1, mu2, f1, f2);
    step = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (dmu1[j] < 0.0) step = std::min(step, -0.99 * mu1[j] / dmu1[j]);
      if (dmu2[j] < 0.0) step = std::min(step, -0.99 * mu2[j] / dmu2[j]);
    }
    bool accepted = false;
    for (int ls = 0; ls < kMaxLineSearch; ++ls) {
      bool inside = true;
      for (std::size_t j = 0; j < p; ++j) {
        nv[j] = v[j] + step * dv[j];
        nmu1[j] = mu1[j] + step * dmu1[j];
        nmu2[j] = mu2[j] + step * dmu2[j];
        nf1[j] = nv[j] - lambda;
        nf2[j] = -nv[j] - lambda;
        if (nf1[j] >= 0.0 || nf2[j] >= 0.0) inside = false;
      }
      if (inside) {
        const std::vector<double> nddtv = apply_ddt(k, nv);
        if (residual_norm(nddtv, nmu1, nmu2, nf1, nf2) <= (1.0 - kAlpha * step) * res_norm) {
          accepted = true;
          break;
        }
      }
      step *= kBeta;
    }
    if (!accepted) break;  // no progress possible at this precision
    v.swap(nv);
    mu1.swap(nmu1);
    mu2.swap(nmu2);
    f1.swap(nf1);
    f2.swap(nf2);
  }
  it = std::min(it, config.max_iterations);

  // final attempt from the boundary set of the last dual iterate
  Support from_dual;
  for (std::size_t j = 0; j < p; ++j) {
    if (std::abs(v[j]) >= lambda * (1.0 - 1e-6)) {
      from_dual.rows.push_back(j);
      from_dual.signs.push_back(sign_of(v[j]));
    }
  }
  if (auto cert = certifier(from_dual)) {
    return finish(config, std::move(cert->m), it, 0.0, cert->tube_violation,
                  SolveStatus::converged);
  }
  std::vector<double> m = difference_transpose(k, v);
  for (std::size_t i = 0; i < n; ++i) m[i] = y[i] - m[i];
  return finish(config, std::move(m), it, rel_gap, res_norm / std::max(lambda, 1.0),
                SolveStatus::not_converged);
}

}  // namespace

namespace {

TrendEstimate solve_core(const TimeSeries& y, const SolverConfig& config) {
  const int k = config.order;
  const std::size_t n = y.size();
  if (n < static_cast<std::size_t>(k) + 1) {
    throw std::invalid_argument("series too short for difference order " + std::to_string(k));
  }
  const double lambda = config.lambda;

  if (lambda == 0.0) {
    std::vector<double> m(y.values().begin(), y.values().end());
    return finish(config, std::move(m), 0, 0.0, 0.0, SolveStatus::converged);
  }

  // fused limit, boundary inclusive
  {
    std::vector<double> fit = polynomial_fit(y, k);
    const DualPath path = dual_path(y, fit, k);
    double peak = 0.0;
    for (std::size_t t = path.tube_first(); t <= path.tube_last(); ++t) {
      peak = std::max(peak, std::abs(path.z[t]));
    }
    if (peak <= lambda) {
      return finish(config, std::move(fit), 0, 0.0, 0.0, SolveStatus::converged);
    }
  }

  Certifier certifier(y, config);
  const auto& warm = config.warm_start;
  if (warm && warm->m.size() == n && warm->order == k) {
    const double threshold = default_activity_threshold(y);
    Support s;
    const std::vector<double> w = difference(k, warm->m);
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (std::abs(w[j]) > threshold) {
        s.rows.push_back(j);
        s.signs.push_back(sign_of(w[j]));
      }
    }
    if (auto cert = certifier(s)) {
      return finish(config, std::move(cert->m), 0, 0.0, cert->tube_violation,
                    SolveStatus::converged);
    }
  }

  if (config.backend == SolverBackend::admm) return run_admm(y, config, certifier);
  return run_interior_point(y, config, certifier);
}

}  // namespace

TrendEstimate solve(const TimeSeries& y, const SolverConfig& config) {
  config.validate();
  TrendEstimate est = solve_core(y, config);
  est.activity_threshold = default_activity_threshold(y);
  return est;
}

}  // namespace trendlab
