// Exact OT by min-cost flow, plus evaluators used to check solver iterates
// against optimality conditions and mirror-descent inequalities.
#pragma once

#include <span>
#include <vector>

#include "asink/core.hpp"
#include "asink/schedule.hpp"

namespace asink {

struct ExactSolution {
  double value = 0.0;
  Plan plan;
  Vector u;  // u_i + v_j <= c_ij, with equality on the support of plan
  Vector v;
};

/// Successive shortest paths on the bipartite transportation graph with
/// Dijkstra on reduced costs. Throws std::invalid_argument when sum(p) and
/// sum(q) differ by more than 1e-9.
ExactSolution exact_ot(const Problem& prob);

/// Heuristic: re-solves with a 1e-9 cost perturbation and compares the
/// potentials up to shift.
bool dual_looks_unique(const Problem& prob, const ExactSolution& sol, double tol = 1e-6);

/// inf_l ||u1 - u2 - l||_inf + ||v1 - v2 + l||_inf.
double potential_seminorm(std::span<const double> u1, std::span<const double> v1,
                          std::span<const double> u2, std::span<const double> v2);

/// l-inf residual of the dual fixed-point system of EOT_beta(p, q), in units of u:
///   u_i = -(1/beta) log sum_j exp(beta (v_j - c_ij)) pi_ref_ij + (1/beta) log p_i
/// and the symmetric equation for v.
double schrodinger_residual(const LogScalings& s, const Problem& prob, double beta);

struct OmdReport {
  bool monotone_checked = false;
  bool pointwise_checked = false;
  // Smallest rhs - lhs seen; +inf when nothing was checked.
  double monotone_slack;
  double regret_slack;
  double pointwise_slack;
  // First iteration with slack < -tol, or -1.
  long monotone_violation = -1;
  long regret_violation = -1;
  long pointwise_violation = -1;

  bool ok() const {
    return monotone_violation < 0 && regret_violation < 0 && pointwise_violation < 0;
  }
};

/// Checks the online mirror descent inequalities for the asymmetric
/// iteration with F_t(pi) = alpha_t <c, pi> + KL(pi 1 | p) on
/// plans = (pi_0, pi_1, ..., pi_T). `reference` must have second marginal q.
/// The monotone and pointwise checks run only for concave schedules over
/// the horizon; the pointwise check uses the cost shifted to c >= 0.
OmdReport omd_check(std::span<const Plan> plans, const Problem& prob, const Schedule& sched,
                    const Plan& reference, double tol = 1e-10);

}  // namespace asink
