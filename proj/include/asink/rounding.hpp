// Rounding of an arbitrary nonnegative plan onto the transport polytope
// Gamma(p, q), and the suboptimality certificate it yields for Gibbs plans.
#pragma once

#include <span>

#include "asink/core.hpp"

namespace asink {

struct RoundingResult {
  Plan plan;
  Vector delta_p;  // p - pi'' 1
  Vector delta_q;  // q - pi''^T 1
  double l1_correction = 0.0;  // ||delta_p||_1
};

/// Downscales rows to at most p, then columns to at most q, and spreads the
/// missing mass with the rank-one term delta_p delta_q^T / ||delta_p||_1.
/// The rank-one term is skipped when ||delta_p||_1 < 1e-14.
/// Throws std::invalid_argument when pi is identically zero or shapes differ.
RoundingResult round_to_polytope(const Plan& pi, std::span<const double> p,
                                 std::span<const double> q);

struct Certificate {
  double lhs = 0.0;  // <c, round(pi)> - OT(p, q)
  double rhs = 0.0;  // log(mn)/beta + 4 (||pi 1 - p||_1 + ||pi^T 1 - q||_1) ||c||_osc
  bool holds(double tol = 1e-8) const { return lhs <= rhs + tol; }
};

/// Right-hand side of the certificate from the marginal errors alone.
double certificate_rhs(double beta, double l1_p, double l1_q, std::size_t m, std::size_t n,
                       double osc);

/// Evaluates both sides for a plan of the form diag(a) exp(-beta c) diag(b).
Certificate lemma3_certificate(const Plan& pi, double beta, const Problem& prob, double ot_value);

}  // namespace asink
