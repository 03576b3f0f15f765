// Relaxed entropic OT problems along an annealing schedule:
//
//   min_{pi in Gamma(*, q)}  <c, pi> + KL(pi 1 | p) / alpha + KL(pi | pi_ref) / beta
//
// and the symmetric variant over the simplex with both marginals relaxed.
// Solved by log-domain generalized Sinkhorn sweeps on the dual potentials.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "asink/core.hpp"
#include "asink/schedule.hpp"

namespace asink {

struct RegPathPoint {
  double alpha = 0.0;
  double beta = 0.0;
  Plan plan;
  Vector u;  // dual potential on rows, pi 1 = exp(-alpha u) * p
  Vector v;  // dual potential on columns
  // Symmetric points only: plan = exp(beta (u + v - c) - log_norm) pi_ref.
  double log_norm = 0.0;
  double residual = 0.0;  // l-inf change of log a over the last sweep
  long sweeps = 0;
  bool converged = false;  // residual <= tolerance

  LogScalings scalings() const { return {u, v, beta}; }
};

struct SolveOptions {
  long sweeps = 100;
  /// Keep sweeping past `sweeps` until residual <= tolerance (or max_sweeps).
  bool high_accuracy = false;
  double tolerance = 1e-10;
  long max_sweeps = 200000;
};

/// alpha = 0 gives balanced EOT_beta(p, q); alpha = +inf drops the first
/// marginal penalty. The dual is unique for 0 < alpha < inf; for alpha = 0
/// the returned potentials are shifted so that u[0] = 0.
/// `converged` is false (not an error) when residual > options.tolerance.
RegPathPoint solve_point(const Problem& prob, double alpha, double beta,
                         const std::optional<LogScalings>& warm, const SolveOptions& options);

/// Both marginals relaxed with strength 1/alpha, plan constrained to unit mass.
RegPathPoint solve_point_symmetric(const Problem& prob, double alpha, double beta,
                                   const std::optional<LogScalings>& warm,
                                   const SolveOptions& options);

struct PathOptions {
  long first_sweeps = 100;
  long warm_sweeps = 50;
  bool high_accuracy = false;
  double tolerance = 1e-10;
  long max_sweeps = 200000;
  bool symmetric = false;
};

/// One point per t in ts (nonempty, increasing, >= 1) at (alpha_t, beta_t),
/// each warm-started from the previous one.
std::vector<RegPathPoint> path(const Problem& prob, const Schedule& sched,
                               std::span<const long> ts, const PathOptions& options = {});

/// (2 alpha beta / (alpha + beta)) (4 ||log p||_inf / beta + ||c||_osc).
double lemma4_bound(double alpha, double beta, std::span<const double> p, const Matrix& c);

/// log(mn)/beta + (8 alpha beta / (alpha + beta)) (4 ||log p||_inf / beta + ||c||_osc).
double theorem2_bound(double alpha, double beta, std::span<const double> p, const Matrix& c);

/// exp(alpha u) * p / ||exp(alpha u) * p||_1.
Vector debiased_marginal(std::span<const double> p, std::span<const double> u, double alpha);

/// sqrt(2 alpha log(mn) / beta): distance scale between the online and
/// regularization paths. Reported only.
double online_gap_bound(double alpha, double beta, std::size_t m, std::size_t n);

}  // namespace asink
