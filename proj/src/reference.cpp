#include "asink/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-12;

}  // namespace

ExactSolution exact_ot(const Problem& prob) {
  prob.validate();
  const std::size_t m = prob.rows();
  const std::size_t n = prob.cols();
  const Matrix& c = prob.cost;
  if (std::abs(sum(prob.p) - sum(prob.q)) > 1e-9) {
    throw std::invalid_argument("exact_ot: marginals have different mass");
  }

  Vector supply(prob.p);
  Vector demand(prob.q);
  Matrix flow(m, n);
  // Reduced cost of i -> j is c_ij + phi_r[i] - phi_c[j] >= 0, and of the
  // reverse arc j -> i (present when flow > 0) its negative.
  Vector phi_r(m, 0.0);
  Vector phi_c(n, kInf);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) phi_c[j] = std::min(phi_c[j], c(i, j));
  }

  Vector dist_r(m);
  Vector dist_c(n);
  std::vector<char> done_r(m);
  std::vector<char> done_c(n);
  std::vector<long> pred_c(n);  // row preceding column j on the path
  std::vector<long> pred_r(m);  // column preceding row i, or -1 for a source

  for (;;) {
    std::fill(dist_r.begin(), dist_r.end(), kInf);
    std::fill(dist_c.begin(), dist_c.end(), kInf);
    std::fill(done_r.begin(), done_r.end(), 0);
    std::fill(done_c.begin(), done_c.end(), 0);
    bool any_source = false;
    for (std::size_t i = 0; i < m; ++i) {
      pred_r[i] = -1;
      if (supply[i] > kEps) {
        dist_r[i] = 0.0;
        any_source = true;
      }
    }
    if (!any_source) break;

    // Dense Dijkstra over rows and columns.
    long target = -1;
    double dtarget = kInf;
    for (;;) {
      double best = kInf;
      long node = -1;
      bool is_row = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (!done_r[i] && dist_r[i] < best) {
          best = dist_r[i];
          node = static_cast<long>(i);
          is_row = true;
        }
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!done_c[j] && dist_c[j] < best) {
          best = dist_c[j];
          node = static_cast<long>(j);
          is_row = false;
        }
      }
      if (node < 0) break;
      if (is_row) {
        const auto i = static_cast<std::size_t>(node);
        done_r[i] = 1;
        for (std::size_t j = 0; j < n; ++j) {
          if (done_c[j]) continue;
          const double rc = std::max(0.0, c(i, j) + phi_r[i] - phi_c[j]);
          if (best + rc < dist_c[j]) {
            dist_c[j] = best + rc;
            pred_c[j] = node;
          }
        }
      } else {
        const auto j = static_cast<std::size_t>(node);
        done_c[j] = 1;
        if (demand[j] > kEps) {
          target = node;
          dtarget = best;
          break;
        }
        for (std::size_t i = 0; i < m; ++i) {
          if (done_r[i] || flow(i, j) <= 0.0) continue;
          const double rc = std::max(0.0, -c(i, j) - phi_r[i] + phi_c[j]);
          if (best + rc < dist_r[i]) {
            dist_r[i] = best + rc;
            pred_r[i] = node;
          }
        }
      }
    }
    if (target < 0) break;

    for (std::size_t i = 0; i < m; ++i) phi_r[i] += std::min(dist_r[i], dtarget);
    for (std::size_t j = 0; j < n; ++j) phi_c[j] += std::min(dist_c[j], dtarget);

    // Bottleneck along the path target <- row <- col <- ... <- source row.
    double amount = demand[static_cast<std::size_t>(target)];
    long j = target;
    long i = pred_c[static_cast<std::size_t>(j)];
    for (;;) {
      const long prev = pred_r[static_cast<std::size_t>(i)];
      if (prev < 0) {
        amount = std::min(amount, supply[static_cast<std::size_t>(i)]);
        break;
      }
      amount = std::min(amount, flow(static_cast<std::size_t>(i), static_cast<std::size_t>(prev)));
      j = prev;
      i = pred_c[static_cast<std::size_t>(j)];
    }

    j = target;
    demand[static_cast<std::size_t>(j)] -= amount;
    for (;;) {
      i = pred_c[static_cast<std::size_t>(j)];
      const auto iu = static_cast<std::size_t>(i);
      flow(iu, static_cast<std::size_t>(j)) += amount;
      const long prev = pred_r[iu];
      if (prev < 0) {
        supply[iu] -= amount;
        break;
      }
      double& back = flow(iu, static_cast<std::size_t>(prev));
      back -= amount;
      if (back <= kEps) back = 0.0;
      j = prev;
    }
  }

  ExactSolution out;
  out.plan.matrix = std::move(flow);
  out.value = inner(c, out.plan.matrix);
  out.u.resize(m);
  out.v.resize(n);
  for (std::size_t i = 0; i < m; ++i) out.u[i] = -phi_r[i];
  for (std::size_t j = 0; j < n; ++j) out.v[j] = phi_c[j];
  return out;
}

bool dual_looks_unique(const Problem& prob, const ExactSolution& sol, double tol) {
  Problem perturbed = prob;
  // Deterministic pattern in [-1, 1].
  for (std::size_t i = 0; i < prob.rows(); ++i) {
    for (std::size_t j = 0; j < prob.cols(); ++j) {
      const double w = static_cast<double>((7 * i + 13 * j) % 17) / 8.0 - 1.0;
      perturbed.cost(i, j) += 1e-9 * w;
    }
  }
  const ExactSolution alt = exact_ot(perturbed);
  return potential_seminorm(sol.u, sol.v, alt.u, alt.v) <= tol;
}

double potential_seminorm(std::span<const double> u1, std::span<const double> v1,
                          std::span<const double> u2, std::span<const double> v2) {
  if (u1.size() != u2.size() || v1.size() != v2.size()) {
    throw std::invalid_argument("potential_seminorm: dimension mismatch");
  }
  if (u1.empty() || v1.empty()) throw std::invalid_argument("potential_seminorm: empty input");
  double du_lo = kInf, du_hi = -kInf, dv_lo = kInf, dv_hi = -kInf;
  for (std::size_t i = 0; i < u1.size(); ++i) {
    const double d = u1[i] - u2[i];
    du_lo = std::min(du_lo, d);
    du_hi = std::max(du_hi, d);
  }
  for (std::size_t j = 0; j < v1.size(); ++j) {
    const double d = v1[j] - v2[j];
    dv_lo = std::min(dv_lo, d);
    dv_hi = std::max(dv_hi, d);
  }
  // ||du - l||_inf = r1 + |l - m1| and ||dv + l||_inf = r2 + |l + m2|; the
  // sum of the two absolute values is minimized anywhere between the kinks.
  const double m1 = 0.5 * (du_hi + du_lo);
  const double r1 = 0.5 * (du_hi - du_lo);
  const double m2 = 0.5 * (dv_hi + dv_lo);
  const double r2 = 0.5 * (dv_hi - dv_lo);
  return r1 + r2 + std::abs(m1 + m2);
}

double schrodinger_residual(const LogScalings& s, const Problem& prob, double beta) {
  prob.validate();
  const std::size_t m = prob.rows();
  const std::size_t n = prob.cols();
  if (s.u.size() != m || s.v.size() != n) {
    throw std::invalid_argument("schrodinger_residual: dimension mismatch");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("schrodinger_residual: beta must be positive");
  const double log_ref = -std::log(static_cast<double>(m) * static_cast<double>(n));
  double res = 0.0;
  Vector buf(std::max(m, n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) buf[j] = beta * (s.v[j] - prob.cost(i, j));
    const double rhs = (std::log(prob.p[i]) - log_sum_exp(std::span(buf).first(n)) - log_ref) / beta;
    res = std::max(res, std::abs(s.u[i] - rhs));
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) buf[i] = beta * (s.u[i] - prob.cost(i, j));
    const double rhs = (std::log(prob.q[j]) - log_sum_exp(std::span(buf).first(m)) - log_ref) / beta;
    res = std::max(res, std::abs(s.v[j] - rhs));
  }
  return res;
}

OmdReport omd_check(std::span<const Plan> plans, const Problem& prob, const Schedule& sched,
                    const Plan& reference, double tol) {
  prob.validate();
  if (plans.size() < 2) throw std::invalid_argument("omd_check: need pi_0 and at least one iterate");
  const long horizon = static_cast<long>(plans.size()) - 1;
  const Vector ref_rows = reference.row_sums();
  if (l1_distance(reference.col_sums(), prob.q) > 1e-9) {
    throw std::invalid_argument("omd_check: reference plan does not have second marginal q");
  }

  Matrix shifted = prob.cost;
  const double cmin = *std::min_element(shifted.values().begin(), shifted.values().end());
  for (double& x : shifted.values()) x -= cmin;

  const bool concave = validate_concave(sched, horizon);
  OmdReport rep;
  rep.monotone_checked = concave;
  rep.pointwise_checked = concave;
  rep.monotone_slack = kInf;
  rep.regret_slack = kInf;
  rep.pointwise_slack = kInf;

  const double kl_ref = kl_divergence(reference.matrix, plans[0].matrix);
  const double kl_ref_rows = kl_divergence(ref_rows, prob.p);
  const double ref_cost = inner(prob.cost, reference.matrix);
  const double ref_cost_shifted = inner(shifted, reference.matrix);
  const double beta0 = sched.beta(0);

  auto objective = [&](const Plan& pi, double alpha) {
    return alpha * inner(prob.cost, pi.matrix) + kl_divergence(pi.row_sums(), prob.p);
  };

  CompensatedSum regret;
  for (long t = 1; t <= horizon; ++t) {
    const Plan& cur = plans[static_cast<std::size_t>(t)];
    const Plan& prev = plans[static_cast<std::size_t>(t - 1)];
    const double alpha = sched.alpha(t);
    const double f_cur = objective(cur, alpha);
    const double td = static_cast<double>(t);

    // F_t includes the constraint pi^T 1 = q, so a previous iterate off that
    // set has F_t = +inf and the monotone inequality holds trivially.
    if (concave && l1_distance(prev.col_sums(), prob.q) <= 1e-9) {
      const double slack = objective(prev, alpha) - f_cur;
      rep.monotone_slack = std::min(rep.monotone_slack, slack);
      if (slack < -tol && rep.monotone_violation < 0) rep.monotone_violation = t;
    }

    regret.add(f_cur - (alpha * ref_cost + kl_ref_rows));
    const double rslack = kl_ref / td - regret.value() / td;
    rep.regret_slack = std::min(rep.regret_slack, rslack);
    if (rslack < -tol && rep.regret_violation < 0) rep.regret_violation = t;

    if (concave) {
      const double lhs =
          alpha * inner(shifted, cur.matrix) + kl_divergence(cur.row_sums(), prob.p);
      const double rhs =
          kl_ref_rows + (sched.beta(t) - beta0) / td * ref_cost_shifted + kl_ref / td;
      const double slack = rhs - lhs;
      rep.pointwise_slack = std::min(rep.pointwise_slack, slack);
      if (slack < -tol && rep.pointwise_violation < 0) rep.pointwise_violation = t;
    }
  }
  return rep;
}

}  // namespace asink
