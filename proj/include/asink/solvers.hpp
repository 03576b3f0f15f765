// Log-domain Sinkhorn iterations with a time-varying inverse temperature.
//
// The state carries (log a_t, log b_t) where pi_t = diag(a_t) K_t diag(b_t)
// and K_t = exp(-beta_t c) * pi_ref. Kernels are never materialized; every
// half-step is a row log-sum-exp over beta_t c computed on the fly.
#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "asink/core.hpp"
#include "asink/schedule.hpp"

namespace asink {

enum class Variant { standard, annealed, debiased, symmetric, symmetric_debiased };

std::string_view to_string(Variant v);
/// Throws std::invalid_argument on unknown names.
Variant parse_variant(std::string_view name);
bool is_symmetric(Variant v);

/// A problem with the transposed cost and log-marginals cached for the
/// column half-steps.
class PreparedProblem {
 public:
  explicit PreparedProblem(Problem prob);

  const Problem& problem() const { return prob_; }
  const Matrix& cost() const { return prob_.cost; }
  const Matrix& cost_t() const { return cost_t_; }
  const Vector& log_p() const { return log_p_; }
  const Vector& log_q() const { return log_q_; }
  /// log of the uniform reference entry, -log(mn).
  double log_ref() const { return log_ref_; }
  std::size_t rows() const { return prob_.rows(); }
  std::size_t cols() const { return prob_.cols(); }

 private:
  Problem prob_;
  Matrix cost_t_;
  Vector log_p_;
  Vector log_q_;
  double log_ref_;
};

struct SolverState {
  long t = 0;
  Vector log_a;
  Vector log_b;
  double beta = 1.0;       // beta_t
  double prev_beta = 1.0;  // beta_{(t-1) v 0}

  /// (u, v) = (log a, log b) / beta_t.
  LogScalings scalings() const;
};

/// a_0 = b_0 = 1 and beta = prev_beta = beta_0.
SolverState initial_state(const PreparedProblem& prob, const Schedule& sched);

SolverState step_standard(SolverState s, const PreparedProblem& prob, double beta);
SolverState step_annealed(SolverState s, const PreparedProblem& prob, const Schedule& sched);
SolverState step_debiased(SolverState s, const PreparedProblem& prob, const Schedule& sched);
SolverState step_symmetric(SolverState s, const PreparedProblem& prob, const Schedule& sched,
                           bool debias);
SolverState step(Variant v, SolverState s, const PreparedProblem& prob, const Schedule& sched);

/// pi_t induced by the state.
Plan current_plan(const SolverState& s, const PreparedProblem& prob);

/// The plan pi_0 = diag(a_0) K_0 diag(b_0) with b_0 = 1 and a_0 = p / (K_0 b_0),
/// so that pi_0 has first marginal p. a_0 is never read by the asymmetric
/// iterations; this choice is the one minimizing KL(pi|pi_0) over a_0 for any
/// pi with first marginal p.
Plan initial_plan(const PreparedProblem& prob, const Schedule& sched);

/// One row of diagnostics at iteration t.
struct RunRecord {
  long t = 0;
  double beta = 0.0;
  double alpha = 0.0;
  double cost_inner = 0.0;
  double l1_p = 0.0;
  double l1_q = 0.0;
  std::optional<double> subopt_rounded;
  std::optional<double> bound_thm2;
};

struct SolverConfig {
  explicit SolverConfig(Variant v, Schedule s, long iters = 1000)
      : variant(v), schedule(std::move(s)), max_iters(iters) {}

  Variant variant;
  Schedule schedule;
  long max_iters;
  /// Record every record_every iterations ...
  long record_every = 1;
  /// ... or, when set, at t = 1..10 and round(10^(k/8)) instead.
  bool geometric_records = false;
  /// Extra iterations to record regardless of the stride.
  std::vector<long> record_at;

  void validate() const;
};

struct RunOptions {
  /// Exact OT(p,q); when present records carry the rounded suboptimality.
  std::optional<double> ot_value;
  /// Called after every iteration with the new state.
  std::function<void(const SolverState&)> observer;
};

struct RunResult {
  Plan plan;
  SolverState state;
  std::vector<RunRecord> records;
};

/// Runs config.max_iters iterations. Deterministic. Step failures propagate as
/// NumericError carrying the failing iteration.
RunResult run(const SolverConfig& config, const PreparedProblem& prob,
              const RunOptions& options = {});
RunResult run(const SolverConfig& config, const Problem& prob, const RunOptions& options = {});

/// Diagnostics for the plan of `s` (which must be at iteration s.t >= 1).
RunRecord make_record(const SolverState& s, const PreparedProblem& prob,
                      const std::optional<double>& ot_value);

/// True at t = 1..10 and at t = round(10^(k/8)), k >= 8.
bool is_geometric_sample(long t);

}  // namespace asink
