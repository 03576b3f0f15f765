// Dense numeric primitives and the domain types shared by every solver:
// cost matrices, simplex vectors, transport plans and their log-domain
// scalings.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace asink {

using Vector = std::vector<double>;

/// Row-major dense matrix with value semantics.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// An OT instance: cost of moving a unit of mass from source i to target j,
/// plus two strictly positive probability vectors.
struct Problem {
  Matrix cost;
  Vector p;
  Vector q;
  std::string label;

  std::size_t rows() const { return p.size(); }
  std::size_t cols() const { return q.size(); }

  /// Throws std::invalid_argument on shape mismatch, a non-positive weight,
  /// a marginal not summing to one within 1e-12, or a non-finite cost.
  void validate() const;

  friend bool operator==(const Problem&, const Problem&) = default;
};

struct Plan {
  Matrix matrix;

  Vector row_sums() const;
  Vector col_sums() const;
  double total_mass() const;
};

/// Potentials (u, v) at inverse temperature beta. The induced plan is
/// exp(beta (u_i + v_j - c_ij)) * pi_ref_ij.
struct LogScalings {
  Vector u;
  Vector v;
  double beta = 1.0;
};

/// Thrown when an iteration produces a non-finite scaling or plan entry.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, long iteration = -1)
      : std::runtime_error(what), iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double sum(std::span<const double> x);
double l1_distance(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> x);
/// Frobenius inner product.
double inner(const Matrix& a, const Matrix& b);

/// KL(a|b) = sum a log(a/b) - a + b with 0 log 0 = 0.
double kl_divergence(std::span<const double> a, std::span<const double> b);
double kl_divergence(const Matrix& a, const Matrix& b);

/// max entry minus min entry.
double osc_norm(const Matrix& c);

/// log sum exp(x), shifted by the max. Returns -inf when every entry is -inf.
double log_sum_exp(std::span<const double> x);

/// (mn)^-1 everywhere.
Matrix uniform_reference(std::size_t m, std::size_t n);

Plan plan_from_scalings(const LogScalings& s, const Problem& prob, const Matrix& pi_ref);
Plan plan_from_scalings(const LogScalings& s, const Problem& prob);

}  // namespace asink
