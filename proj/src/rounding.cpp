#include "asink/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asink {

RoundingResult round_to_polytope(const Plan& pi, std::span<const double> p,
                                 std::span<const double> q) {
  const std::size_t m = pi.matrix.rows();
  const std::size_t n = pi.matrix.cols();
  if (p.size() != m || q.size() != n) {
    throw std::invalid_argument("round_to_polytope: dimension mismatch");
  }
  const auto vals = pi.matrix.values();
  if (std::none_of(vals.begin(), vals.end(), [](double x) { return x > 0.0; })) {
    throw std::invalid_argument("round_to_polytope: plan is identically zero");
  }

  RoundingResult out;
  out.plan.matrix = pi.matrix;
  Matrix& x = out.plan.matrix;

  const Vector rows = pi.row_sums();
  for (std::size_t i = 0; i < m; ++i) {
    // p_i / 0 = +inf, so min{1, .} = 1
    const double a = rows[i] > 0.0 ? std::min(1.0, p[i] / rows[i]) : 1.0;
    if (a < 1.0) {
      for (double& v : x.row(i)) v *= a;
    }
  }

  const Vector cols = out.plan.col_sums();
  Vector b(n);
  for (std::size_t j = 0; j < n; ++j) b[j] = cols[j] > 0.0 ? std::min(1.0, q[j] / cols[j]) : 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < n; ++j) r[j] *= b[j];
  }

  const Vector rows2 = out.plan.row_sums();
  const Vector cols2 = out.plan.col_sums();
  out.delta_p.resize(m);
  out.delta_q.resize(n);
  // Both residuals are nonnegative by construction; clip rounding noise.
  for (std::size_t i = 0; i < m; ++i) out.delta_p[i] = std::max(0.0, p[i] - rows2[i]);
  for (std::size_t j = 0; j < n; ++j) out.delta_q[j] = std::max(0.0, q[j] - cols2[j]);
  out.l1_correction = sum(out.delta_p);

  if (out.l1_correction >= 1e-14) {
    for (std::size_t i = 0; i < m; ++i) {
      const double s = out.delta_p[i] / out.l1_correction;
      if (s == 0.0) continue;
      auto r = x.row(i);
      for (std::size_t j = 0; j < n; ++j) r[j] += s * out.delta_q[j];
    }
  }
  return out;
}

double certificate_rhs(double beta, double l1_p, double l1_q, std::size_t m, std::size_t n,
                       double osc) {
  return std::log(static_cast<double>(m) * static_cast<double>(n)) / beta +
         4.0 * (l1_p + l1_q) * osc;
}

Certificate lemma3_certificate(const Plan& pi, double beta, const Problem& prob, double ot_value) {
  if (!(beta > 0.0)) throw std::invalid_argument("lemma3_certificate: beta must be positive");
  const RoundingResult r = round_to_polytope(pi, prob.p, prob.q);
  Certificate c;
  c.lhs = inner(prob.cost, r.plan.matrix) - ot_value;
  c.rhs = certificate_rhs(beta, l1_distance(pi.row_sums(), prob.p),
                          l1_distance(pi.col_sums(), prob.q), prob.rows(), prob.cols(),
                          osc_norm(prob.cost));
  return c;
}

}  // namespace asink
