#include "asink/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "asink/kernels.hpp"
#include "asink/regpath.hpp"
#include "asink/rounding.hpp"

namespace asink {

namespace {

void require_finite(std::span<const double> x, const char* what, long t) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite " << what << " at iteration " << t;
      throw NumericError(msg.str(), t);
    }
  }
}

// log a = log p - log(K b), K = exp(-beta c) pi_ref.
Vector row_projection(const PreparedProblem& prob, double beta, std::span<const double> log_b) {
  Vector lse(prob.rows());
  kernels::row_logsumexp(prob.cost(), beta, log_b, prob.log_ref(), lse);
  for (std::size_t i = 0; i < lse.size(); ++i) lse[i] = prob.log_p()[i] - lse[i];
  return lse;
}

// log b = log q - log(K^T a).
Vector col_projection(const PreparedProblem& prob, double beta, std::span<const double> log_a) {
  Vector lse(prob.cols());
  kernels::row_logsumexp(prob.cost_t(), beta, log_a, prob.log_ref(), lse);
  for (std::size_t j = 0; j < lse.size(); ++j) lse[j] = prob.log_q()[j] - lse[j];
  return lse;
}

// Shared body of the annealed and debiased updates:
//   log a_t = d log a_{t-1} + log p - log(K_{t-1} b_{t-1}),
// then beta_t, then the exact projection on the second marginal.
SolverState asymmetric_step(SolverState s, const PreparedProblem& prob, double next_beta,
                            double debias) {
  const long t = s.t + 1;
  Vector log_a = row_projection(prob, s.beta, s.log_b);
  if (debias != 0.0) {
    for (std::size_t i = 0; i < log_a.size(); ++i) log_a[i] += debias * s.log_a[i];
  }
  require_finite(log_a, "log a", t);
  Vector log_b = col_projection(prob, next_beta, log_a);
  require_finite(log_b, "log b", t);
  s.prev_beta = s.beta;
  s.beta = next_beta;
  s.log_a = std::move(log_a);
  s.log_b = std::move(log_b);
  s.t = t;
  return s;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::standard:
      return "standard";
    case Variant::annealed:
      return "annealed";
    case Variant::debiased:
      return "debiased";
    case Variant::symmetric:
      return "symmetric";
    case Variant::symmetric_debiased:
      return "symmetric_debiased";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::standard, Variant::annealed, Variant::debiased, Variant::symmetric,
                    Variant::symmetric_debiased}) {
    if (name == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

bool is_symmetric(Variant v) {
  return v == Variant::symmetric || v == Variant::symmetric_debiased;
}

PreparedProblem::PreparedProblem(Problem prob) : prob_(std::move(prob)) {
  prob_.validate();
  cost_t_ = prob_.cost.transposed();
  log_p_.resize(prob_.rows());
  log_q_.resize(prob_.cols());
  std::transform(prob_.p.begin(), prob_.p.end(), log_p_.begin(), [](double x) { return std::log(x); });
  std::transform(prob_.q.begin(), prob_.q.end(), log_q_.begin(), [](double x) { return std::log(x); });
  log_ref_ = -std::log(static_cast<double>(prob_.rows()) * static_cast<double>(prob_.cols()));
}

LogScalings SolverState::scalings() const {
  LogScalings out{log_a, log_b, beta};
  for (double& x : out.u) x /= beta;
  for (double& x : out.v) x /= beta;
  return out;
}

SolverState initial_state(const PreparedProblem& prob, const Schedule& sched) {
  SolverState s;
  s.log_a.assign(prob.rows(), 0.0);
  s.log_b.assign(prob.cols(), 0.0);
  s.beta = sched.beta(0);
  s.prev_beta = s.beta;
  return s;
}

SolverState step_standard(SolverState s, const PreparedProblem& prob, double beta) {
  s.beta = beta;
  return asymmetric_step(std::move(s), prob, beta, 0.0);
}

SolverState step_annealed(SolverState s, const PreparedProblem& prob, const Schedule& sched) {
  const double next = sched.beta(s.t + 1);
  return asymmetric_step(std::move(s), prob, next, 0.0);
}

SolverState step_debiased(SolverState s, const PreparedProblem& prob, const Schedule& sched) {
  const double next = sched.beta(s.t + 1);
  // exponent 1 - beta_{(t-2) v 0} / beta_{t-1} on a_{t-1}
  const double debias = 1.0 - s.prev_beta / s.beta;
  return asymmetric_step(std::move(s), prob, next, debias);
}

SolverState step_symmetric(SolverState s, const PreparedProblem& prob, const Schedule& sched,
                           bool debias) {
  const long t = s.t + 1;
  const double keep = 0.5 + (debias ? 1.0 - s.prev_beta / s.beta : 0.0);
  // Both half-steps read the previous iterate.
  Vector row = row_projection(prob, s.beta, s.log_b);
  Vector col = col_projection(prob, s.beta, s.log_a);
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = keep * s.log_a[i] + 0.5 * row[i];
  for (std::size_t j = 0; j < col.size(); ++j) col[j] = keep * s.log_b[j] + 0.5 * col[j];
  require_finite(row, "log a", t);
  require_finite(col, "log b", t);
  const double next = sched.beta(t);
  // Normalize the plan to unit mass, splitting the correction evenly between
  // a and b. With this split the normalized iterates match the ones obtained
  // by normalizing offline.
  const double log_mass =
      kernels::total_logsumexp(prob.cost(), next, row, col, prob.log_ref());
  if (!std::isfinite(log_mass)) {
    throw NumericError("non-finite plan mass at iteration " + std::to_string(t), t);
  }
  for (double& x : row) x -= 0.5 * log_mass;
  for (double& x : col) x -= 0.5 * log_mass;
  s.prev_beta = s.beta;
  s.beta = next;
  s.log_a = std::move(row);
  s.log_b = std::move(col);
  s.t = t;
  return s;
}

SolverState step(Variant v, SolverState s, const PreparedProblem& prob, const Schedule& sched) {
  switch (v) {
    case Variant::standard:
      return step_standard(std::move(s), prob, sched.beta(0));
    case Variant::annealed:
      return step_annealed(std::move(s), prob, sched);
    case Variant::debiased:
      return step_debiased(std::move(s), prob, sched);
    case Variant::symmetric:
      return step_symmetric(std::move(s), prob, sched, false);
    case Variant::symmetric_debiased:
      return step_symmetric(std::move(s), prob, sched, true);
  }
  throw std::invalid_argument("unknown variant");
}

Plan current_plan(const SolverState& s, const PreparedProblem& prob) {
  return Plan{kernels::plan_matrix(prob.cost(), s.beta, s.log_a, s.log_b, prob.log_ref())};
}

Plan initial_plan(const PreparedProblem& prob, const Schedule& sched) {
  const double beta0 = sched.beta(0);
  const Vector log_b(prob.cols(), 0.0);
  const Vector log_a = row_projection(prob, beta0, log_b);
  return Plan{kernels::plan_matrix(prob.cost(), beta0, log_a, log_b, prob.log_ref())};
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (record_every < 1) throw std::invalid_argument("SolverConfig: record_every must be >= 1");
}

bool is_geometric_sample(long t) {
  if (t < 1) return false;
  if (t <= 10) return true;
  const long k = std::lround(8.0 * std::log10(static_cast<double>(t)));
  for (long kk = k - 1; kk <= k + 1; ++kk) {
    if (std::lround(std::pow(10.0, static_cast<double>(kk) / 8.0)) == t) return true;
  }
  return false;
}

RunRecord make_record(const SolverState& s, const PreparedProblem& prob,
                      const std::optional<double>& ot_value) {
  const Problem& pr = prob.problem();
  const Plan plan = current_plan(s, prob);
  RunRecord rec;
  rec.t = s.t;
  rec.beta = s.beta;
  rec.alpha = s.t >= 1 ? s.beta - s.prev_beta : 0.0;
  rec.cost_inner = inner(pr.cost, plan.matrix);
  rec.l1_p = l1_distance(plan.row_sums(), pr.p);
  rec.l1_q = l1_distance(plan.col_sums(), pr.q);
  if (ot_value) {
    const RoundingResult r = round_to_polytope(plan, pr.p, pr.q);
    rec.subopt_rounded = inner(pr.cost, r.plan.matrix) - *ot_value;
  }
  rec.bound_thm2 = theorem2_bound(rec.alpha, rec.beta, pr.p, pr.cost);
  return rec;
}

RunResult run(const SolverConfig& config, const PreparedProblem& prob, const RunOptions& options) {
  config.validate();
  std::vector<long> extra = config.record_at;
  std::sort(extra.begin(), extra.end());
  SolverState s = initial_state(prob, config.schedule);
  RunResult out;
  for (long t = 1; t <= config.max_iters; ++t) {
    s = step(config.variant, std::move(s), prob, config.schedule);
    if (options.observer) options.observer(s);
    const bool due = config.geometric_records ? is_geometric_sample(t)
                                              : t % config.record_every == 0;
    if (due || t == config.max_iters || std::binary_search(extra.begin(), extra.end(), t)) {
      out.records.push_back(make_record(s, prob, options.ot_value));
    }
  }
  out.plan = current_plan(s, prob);
  out.state = std::move(s);
  return out;
}

RunResult run(const SolverConfig& config, const Problem& prob, const RunOptions& options) {
  return run(config, PreparedProblem(prob), options);
}

}  // namespace asink
