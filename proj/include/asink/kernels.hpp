// Dense log-domain kernels for Gibbs kernels K = exp(-beta c) * pi_ref.
//
// Every routine exists twice: a serial reference in `serial::` and an
// OpenMP version in `parallel::`. Work is split over output rows and each
// row is reduced in a fixed order, so both produce bit-identical results.
// The unqualified names dispatch to the parallel version when OpenMP is
// enabled.
#pragma once

#include <span>

#include "asink/core.hpp"

namespace asink::kernels {

/// Sums over the whole plan exp(f_i + g_j - beta c_ij + log_ref).
struct PlanStats {
  Vector row_sums;
  Vector col_sums;
  double cost_inner = 0.0;  // <c, pi>
  double mass = 0.0;
};

namespace serial {

/// out_i = logsumexp_j(pot_j - beta c_ij) + log_ref.
void row_logsumexp(const Matrix& c, double beta, std::span<const double> pot, double log_ref,
                   std::span<double> out);

/// logsumexp_ij(f_i + g_j - beta c_ij) + log_ref.
double total_logsumexp(const Matrix& c, double beta, std::span<const double> f,
                       std::span<const double> g, double log_ref);

PlanStats plan_stats(const Matrix& c, double beta, std::span<const double> f,
                     std::span<const double> g, double log_ref);

Matrix plan_matrix(const Matrix& c, double beta, std::span<const double> f,
                   std::span<const double> g, double log_ref);

}  // namespace serial

namespace parallel {

void row_logsumexp(const Matrix& c, double beta, std::span<const double> pot, double log_ref,
                   std::span<double> out);
double total_logsumexp(const Matrix& c, double beta, std::span<const double> f,
                       std::span<const double> g, double log_ref);
PlanStats plan_stats(const Matrix& c, double beta, std::span<const double> f,
                     std::span<const double> g, double log_ref);
Matrix plan_matrix(const Matrix& c, double beta, std::span<const double> f,
                   std::span<const double> g, double log_ref);

}  // namespace parallel

#ifdef ASINK_HAVE_OPENMP
using parallel::plan_matrix;
using parallel::plan_stats;
using parallel::row_logsumexp;
using parallel::total_logsumexp;
#else
using serial::plan_matrix;
using serial::plan_stats;
using serial::row_logsumexp;
using serial::total_logsumexp;
#endif

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int thread_count();

}  // namespace asink::kernels
