#include "asink/regpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "asink/kernels.hpp"
#include "asink/solvers.hpp"

namespace asink {

namespace {

// Exponent of the row update, beta / (alpha + beta), with the two limit modes.
double row_exponent(double alpha, double beta) {
  if (alpha == 0.0) return 1.0;
  if (std::isinf(alpha)) return 0.0;
  return beta / (alpha + beta);
}

bool relaxed(double alpha) { return alpha > 0.0 && std::isfinite(alpha); }

void check_args(double alpha, double beta, const SolveOptions& options) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("solve_point: alpha must be >= 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("solve_point: beta must be positive");
  }
  if (options.sweeps < 1) throw std::invalid_argument("solve_point: sweeps must be >= 1");
}

void init_potentials(const std::optional<LogScalings>& warm, double beta, std::size_t m,
                     std::size_t n, Vector& f, Vector& g) {
  f.assign(m, 0.0);
  g.assign(n, 0.0);
  if (!warm) return;
  if (warm->u.size() != m || warm->v.size() != n) {
    throw std::invalid_argument("solve_point: warm start has wrong shape");
  }
  // (u, v) are temperature-free; log a = beta u rescales them to the new beta.
  for (std::size_t i = 0; i < m; ++i) f[i] = beta * warm->u[i];
  for (std::size_t j = 0; j < n; ++j) g[j] = beta * warm->v[j];
}

// (1/alpha) log sum_i w_i exp(-alpha f_i / beta): the shift lambda (in u units)
// that makes sum_i w_i exp(-alpha (u_i + lambda)) = 1.
double balancing_shift(std::span<const double> log_w, std::span<const double> f, double alpha,
                       double beta) {
  Vector x(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) x[i] = log_w[i] - alpha * f[i] / beta;
  return log_sum_exp(x) / alpha;
}

bool keep_going(long sweep, double residual, const SolveOptions& o) {
  if (sweep < o.sweeps) return true;
  if (!o.high_accuracy) return false;
  return residual > o.tolerance && sweep < o.max_sweeps;
}

void require_finite(std::span<const double> x, long sweep) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw NumericError("solve_point: non-finite potential at sweep " + std::to_string(sweep),
                         sweep);
    }
  }
}

RegPathPoint finish(const PreparedProblem& prep, double alpha, double beta, Vector f, Vector g,
                    double log_norm, double residual, long sweeps, double tol) {
  if (alpha == 0.0) {
    // Dual is only defined up to (u + l, v - l); pin u[0] = 0.
    const double s = f[0];
    for (double& x : f) x -= s;
    for (double& x : g) x += s;
  }
  RegPathPoint pt;
  pt.alpha = alpha;
  pt.beta = beta;
  pt.plan.matrix = kernels::plan_matrix(prep.cost(), beta, f, g, prep.log_ref() - log_norm);
  pt.u = std::move(f);
  pt.v = std::move(g);
  pt.log_norm = log_norm;
  for (double& x : pt.u) x /= beta;
  for (double& x : pt.v) x /= beta;
  pt.residual = residual;
  pt.sweeps = sweeps;
  pt.converged = residual <= tol;
  return pt;
}

}  // namespace

RegPathPoint solve_point(const Problem& prob, double alpha, double beta,
                         const std::optional<LogScalings>& warm, const SolveOptions& options) {
  check_args(alpha, beta, options);
  const PreparedProblem prep(prob);
  const std::size_t m = prep.rows();
  const std::size_t n = prep.cols();
  const double r = row_exponent(alpha, beta);

  Vector f;
  Vector g;
  init_potentials(warm, beta, m, n, f, g);
  Vector lse_m(m);
  Vector lse_n(n);
  double residual = std::numeric_limits<double>::infinity();
  long sweep = 0;
  do {
    ++sweep;
    kernels::row_logsumexp(prep.cost(), beta, g, prep.log_ref(), lse_m);
    double change = 0.0;
    Vector f_new(m);
    for (std::size_t i = 0; i < m; ++i) f_new[i] = r * (prep.log_p()[i] - lse_m[i]);
    kernels::row_logsumexp(prep.cost_t(), beta, f_new, prep.log_ref(), lse_n);
    for (std::size_t j = 0; j < n; ++j) g[j] = prep.log_q()[j] - lse_n[j];
    if (relaxed(alpha)) {
      // Exact ascent along the direction (u + l, v - l), which leaves the plan
      // unchanged; without it that mode only contracts by r per sweep.
      const double shift = beta * balancing_shift(prep.log_p(), f_new, alpha, beta);
      for (double& x : f_new) x += shift;
      for (double& x : g) x -= shift;
    }
    require_finite(f_new, sweep);
    require_finite(g, sweep);
    for (std::size_t i = 0; i < m; ++i) change = std::max(change, std::abs(f_new[i] - f[i]));
    f = std::move(f_new);
    residual = change;
  } while (keep_going(sweep, residual, options));

  return finish(prep, alpha, beta, std::move(f), std::move(g), 0.0, residual, sweep,
                options.tolerance);
}

RegPathPoint solve_point_symmetric(const Problem& prob, double alpha, double beta,
                                   const std::optional<LogScalings>& warm,
                                   const SolveOptions& options) {
  check_args(alpha, beta, options);
  const PreparedProblem prep(prob);
  const std::size_t m = prep.rows();
  const std::size_t n = prep.cols();
  const double r = row_exponent(alpha, beta);

  Vector f;
  Vector g;
  init_potentials(warm, beta, m, n, f, g);
  // Plan is exp(f + g - beta c - log_norm) pi_ref with unit mass.
  double log_norm = kernels::total_logsumexp(prep.cost(), beta, f, g, prep.log_ref());
  Vector lse_m(m);
  Vector lse_n(n);
  double residual = std::numeric_limits<double>::infinity();
  long sweep = 0;
  do {
    ++sweep;
    Vector f_new(m);
    kernels::row_logsumexp(prep.cost(), beta, g, prep.log_ref(), lse_m);
    for (std::size_t i = 0; i < m; ++i) f_new[i] = r * (prep.log_p()[i] - lse_m[i] + log_norm);
    kernels::row_logsumexp(prep.cost_t(), beta, f_new, prep.log_ref(), lse_n);
    for (std::size_t j = 0; j < n; ++j) g[j] = r * (prep.log_q()[j] - lse_n[j] + log_norm);
    log_norm = kernels::total_logsumexp(prep.cost(), beta, f_new, g, prep.log_ref());
    if (relaxed(alpha)) {
      // Exact ascent along the two plan-preserving directions: shifting u
      // alone and v alone (the normalization absorbs the change of mass).
      const double su = beta * balancing_shift(prep.log_p(), f_new, alpha, beta);
      const double sv = beta * balancing_shift(prep.log_q(), g, alpha, beta);
      for (double& x : f_new) x += su;
      for (double& x : g) x += sv;
      log_norm += su + sv;
    }
    require_finite(f_new, sweep);
    require_finite(g, sweep);
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) change = std::max(change, std::abs(f_new[i] - f[i]));
    f = std::move(f_new);
    residual = change;
  } while (keep_going(sweep, residual, options));

  RegPathPoint pt = finish(prep, alpha, beta, std::move(f), std::move(g), log_norm, residual,
                           sweep, options.tolerance);
  return pt;
}

std::vector<RegPathPoint> path(const Problem& prob, const Schedule& sched,
                               std::span<const long> ts, const PathOptions& options) {
  if (ts.empty()) throw std::invalid_argument("path: empty time list");
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (ts[k] < 1 || (k > 0 && ts[k] <= ts[k - 1])) {
      throw std::invalid_argument("path: times must be increasing and >= 1");
    }
  }
  std::vector<RegPathPoint> out;
  out.reserve(ts.size());
  std::optional<LogScalings> warm;
  for (long t : ts) {
    SolveOptions so;
    so.sweeps = out.empty() ? options.first_sweeps : options.warm_sweeps;
    so.high_accuracy = options.high_accuracy;
    so.tolerance = options.tolerance;
    so.max_sweeps = options.max_sweeps;
    const double beta = sched.beta(t);
    double alpha = sched.alpha(t);
    if (options.symmetric) {
      // The symmetric iteration is mirror descent with step 1/2, which doubles
      // the effective relaxation strength.
      alpha *= 2.0;
      out.push_back(solve_point_symmetric(prob, alpha, beta, warm, so));
    } else {
      out.push_back(solve_point(prob, alpha, beta, warm, so));
    }
    warm = out.back().scalings();
  }
  return out;
}

namespace {

double relaxation_factor(double alpha, double beta) {
  if (alpha == 0.0) return 0.0;
  if (std::isinf(alpha)) return beta;
  return alpha * beta / (alpha + beta);
}

double log_p_inf(std::span<const double> p) {
  double mx = 0.0;
  for (double x : p) {
    if (!(x > 0.0)) throw std::invalid_argument("bound: p must be positive");
    mx = std::max(mx, std::abs(std::log(x)));
  }
  return mx;
}

}  // namespace

double lemma4_bound(double alpha, double beta, std::span<const double> p, const Matrix& c) {
  if (!(alpha >= 0.0) || !(beta > 0.0)) throw std::invalid_argument("lemma4_bound: bad alpha/beta");
  return 2.0 * relaxation_factor(alpha, beta) * (4.0 * log_p_inf(p) / beta + osc_norm(c));
}

double theorem2_bound(double alpha, double beta, std::span<const double> p, const Matrix& c) {
  if (!(alpha >= 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("theorem2_bound: bad alpha/beta");
  }
  const double mn = static_cast<double>(p.size()) * static_cast<double>(c.cols());
  return std::log(mn) / beta +
         8.0 * relaxation_factor(alpha, beta) * (4.0 * log_p_inf(p) / beta + osc_norm(c));
}

Vector debiased_marginal(std::span<const double> p, std::span<const double> u, double alpha) {
  if (p.size() != u.size()) throw std::invalid_argument("debiased_marginal: dimension mismatch");
  if (!(alpha >= 0.0)) throw std::invalid_argument("debiased_marginal: alpha must be >= 0");
  Vector logw(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) logw[i] = std::log(p[i]) + alpha * u[i];
  for (double x : logw) {
    if (!std::isfinite(x)) throw NumericError("debiased_marginal: overflow");
  }
  const double z = log_sum_exp(logw);
  Vector out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::exp(logw[i] - z);
  return out;
}

double online_gap_bound(double alpha, double beta, std::size_t m, std::size_t n) {
  return std::sqrt(2.0 * alpha * std::log(static_cast<double>(m) * static_cast<double>(n)) / beta);
}

}  // namespace asink
