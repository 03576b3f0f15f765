#include "asink/core.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace asink {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_same_size(rows * cols, data_.size(), "Matrix");
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

void Problem::validate() const {
  if (p.empty() || q.empty()) throw std::invalid_argument("Problem: empty marginal");
  require_same_size(cost.rows(), p.size(), "Problem cost rows");
  require_same_size(cost.cols(), q.size(), "Problem cost cols");
  auto check_simplex = [](const Vector& w, const char* name) {
    for (double x : w) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument(std::string("Problem: non-positive entry in ") + name);
      }
    }
    if (std::abs(sum(w) - 1.0) > 1e-12) {
      throw std::invalid_argument(std::string("Problem: ") + name + " does not sum to 1");
    }
  };
  check_simplex(p, "p");
  check_simplex(q, "q");
  for (double c : cost.values()) {
    if (!std::isfinite(c)) throw std::invalid_argument("Problem: non-finite cost entry");
  }
}

Vector Plan::row_sums() const {
  Vector r(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) r[i] = sum(matrix.row(i));
  return r;
}

Vector Plan::col_sums() const {
  std::vector<CompensatedSum> acc(matrix.cols());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    auto row = matrix.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) acc[j].add(row[j]);
  }
  Vector c(matrix.cols());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = acc[j].value();
  return c;
}

double Plan::total_mass() const { return sum(matrix.values()); }

double sum(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s.add(v);
  return s.value();
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "l1_distance");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(std::abs(a[i] - b[i]));
  return s.value();
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double inner(const Matrix& a, const Matrix& b) {
  require_same_size(a.size(), b.size(), "inner");
  CompensatedSum s;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < av.size(); ++k) s.add(av[k] * bv[k]);
  return s.value();
}

double kl_divergence(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "kl_divergence");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(b[i] > 0.0)) throw std::invalid_argument("kl_divergence: nonpositive entry in b");
    if (a[i] < 0.0) throw std::invalid_argument("kl_divergence: negative entry in a");
    if (a[i] > 0.0) s.add(a[i] * std::log(a[i] / b[i]));
    s.add(b[i] - a[i]);
  }
  return std::max(0.0, s.value());
}

double kl_divergence(const Matrix& a, const Matrix& b) {
  require_same_size(a.rows(), b.rows(), "kl_divergence rows");
  require_same_size(a.cols(), b.cols(), "kl_divergence cols");
  return kl_divergence(a.values(), b.values());
}

double osc_norm(const Matrix& c) {
  if (c.empty()) throw std::invalid_argument("osc_norm: empty matrix");
  auto [lo, hi] = std::minmax_element(c.values().begin(), c.values().end());
  return *hi - *lo;
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double m = *std::max_element(x.begin(), x.end());
  if (std::isinf(m)) return m;
  CompensatedSum s;
  for (double v : x) s.add(std::exp(v - m));
  return m + std::log(s.value());
}

Matrix uniform_reference(std::size_t m, std::size_t n) {
  return Matrix(m, n, 1.0 / static_cast<double>(m * n));
}

Plan plan_from_scalings(const LogScalings& s, const Problem& prob, const Matrix& pi_ref) {
  const std::size_t m = prob.rows();
  const std::size_t n = prob.cols();
  require_same_size(s.u.size(), m, "plan_from_scalings u");
  require_same_size(s.v.size(), n, "plan_from_scalings v");
  require_same_size(pi_ref.rows(), m, "plan_from_scalings pi_ref rows");
  require_same_size(pi_ref.cols(), n, "plan_from_scalings pi_ref cols");
  Plan plan{Matrix(m, n)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double e = std::exp(s.beta * (s.u[i] + s.v[j] - prob.cost(i, j))) * pi_ref(i, j);
      if (!std::isfinite(e)) throw NumericError("plan_from_scalings: divergent scalings");
      plan.matrix(i, j) = e;
    }
  }
  return plan;
}

Plan plan_from_scalings(const LogScalings& s, const Problem& prob) {
  return plan_from_scalings(s, prob, uniform_reference(prob.rows(), prob.cols()));
}

}  // namespace asink
