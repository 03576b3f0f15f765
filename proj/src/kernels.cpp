#include "asink/kernels.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#ifdef ASINK_HAVE_OPENMP
#include <omp.h>
#endif

namespace asink::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSkipBelow = -50.0;

// logsumexp_j(pot_j - beta c_j) using `buf` as scratch of the row length.
double row_lse(std::span<const double> c, double beta, std::span<const double> pot,
               double* buf) {
  const std::size_t n = c.size();
  double mx = kNegInf;
  for (std::size_t j = 0; j < n; ++j) {
    buf[j] = pot[j] - beta * c[j];
    mx = std::max(mx, buf[j]);
  }
  if (std::isinf(mx)) return mx;
  // The sum is >= 1, so terms below exp(-50) ~ 2e-22 stay under half an ulp
  // even for rows of 10^5 entries. Skipping them saves most of the exp calls
  // at large beta.
  CompensatedSum s;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = buf[j] - mx;
    if (d > kSkipBelow) s.add(std::exp(d));
  }
  return mx + std::log(s.value());
}

// pi_ij = exp(f_i + g_j - beta c_ij + log_ref) for one row.
void plan_row(std::span<const double> c, double beta, double fi, std::span<const double> g,
              double log_ref, std::span<double> out) {
  for (std::size_t j = 0; j < c.size(); ++j) {
    out[j] = std::exp(fi + g[j] - beta * c[j] + log_ref);
  }
}

void check_row_shapes(const Matrix& c, std::span<const double> pot, std::span<double> out) {
  if (pot.size() != c.cols() || out.size() != c.rows()) {
    throw std::invalid_argument("row_logsumexp: dimension mismatch");
  }
}

void check_plan_shapes(const Matrix& c, std::span<const double> f, std::span<const double> g) {
  if (f.size() != c.rows() || g.size() != c.cols()) {
    throw std::invalid_argument("plan kernel: dimension mismatch");
  }
}

PlanStats reduce_plan(const Matrix& c, const Matrix& plan) {
  PlanStats st;
  st.row_sums.assign(plan.rows(), 0.0);
  std::vector<CompensatedSum> cols(plan.cols());
  CompensatedSum inner_acc;
  CompensatedSum mass_acc;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    auto pr = plan.row(i);
    auto cr = c.row(i);
    CompensatedSum r;
    for (std::size_t j = 0; j < pr.size(); ++j) {
      r.add(pr[j]);
      cols[j].add(pr[j]);
      inner_acc.add(pr[j] * cr[j]);
    }
    st.row_sums[i] = r.value();
    mass_acc.add(st.row_sums[i]);
  }
  st.col_sums.resize(plan.cols());
  for (std::size_t j = 0; j < plan.cols(); ++j) st.col_sums[j] = cols[j].value();
  st.cost_inner = inner_acc.value();
  st.mass = mass_acc.value();
  return st;
}

}  // namespace

namespace serial {

void row_logsumexp(const Matrix& c, double beta, std::span<const double> pot, double log_ref,
                   std::span<double> out) {
  check_row_shapes(c, pot, out);
  std::vector<double> buf(c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i) {
    out[i] = row_lse(c.row(i), beta, pot, buf.data()) + log_ref;
  }
}

double total_logsumexp(const Matrix& c, double beta, std::span<const double> f,
                       std::span<const double> g, double log_ref) {
  check_plan_shapes(c, f, g);
  Vector rows(c.rows());
  row_logsumexp(c, beta, g, 0.0, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] += f[i];
  return log_sum_exp(rows) + log_ref;
}

Matrix plan_matrix(const Matrix& c, double beta, std::span<const double> f,
                   std::span<const double> g, double log_ref) {
  check_plan_shapes(c, f, g);
  Matrix plan(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i) plan_row(c.row(i), beta, f[i], g, log_ref, plan.row(i));
  return plan;
}

PlanStats plan_stats(const Matrix& c, double beta, std::span<const double> f,
                     std::span<const double> g, double log_ref) {
  return reduce_plan(c, plan_matrix(c, beta, f, g, log_ref));
}

}  // namespace serial

namespace parallel {

void row_logsumexp(const Matrix& c, double beta, std::span<const double> pot, double log_ref,
                   std::span<double> out) {
  check_row_shapes(c, pot, out);
  const long m = static_cast<long>(c.rows());
#pragma omp parallel
  {
    std::vector<double> buf(c.cols());
#pragma omp for schedule(static)
    for (long i = 0; i < m; ++i) {
      out[i] = row_lse(c.row(i), beta, pot, buf.data()) + log_ref;
    }
  }
}

double total_logsumexp(const Matrix& c, double beta, std::span<const double> f,
                       std::span<const double> g, double log_ref) {
  check_plan_shapes(c, f, g);
  Vector rows(c.rows());
  row_logsumexp(c, beta, g, 0.0, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] += f[i];
  return log_sum_exp(rows) + log_ref;
}

Matrix plan_matrix(const Matrix& c, double beta, std::span<const double> f,
                   std::span<const double> g, double log_ref) {
  check_plan_shapes(c, f, g);
  Matrix plan(c.rows(), c.cols());
  const long m = static_cast<long>(c.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) plan_row(c.row(i), beta, f[i], g, log_ref, plan.row(i));
  return plan;
}

PlanStats plan_stats(const Matrix& c, double beta, std::span<const double> f,
                     std::span<const double> g, double log_ref) {
  return reduce_plan(c, plan_matrix(c, beta, f, g, log_ref));
}

}  // namespace parallel

int thread_count() {
#ifdef ASINK_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace asink::kernels
