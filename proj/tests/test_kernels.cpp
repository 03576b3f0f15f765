#include <doctest.h>

#include <cmath>

#include "asink/kernels.hpp"
#include "asink/problems.hpp"

using namespace asink;

namespace {

Problem instance() {
  GeneratorSpec g;
  g.family = Family::random;
  g.m = 37;
  g.n = 23;
  g.seed = 5;
  return generate(g);
}

Vector ramp(std::size_t k, double scale) {
  Vector v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = scale * std::sin(static_cast<double>(i) + 0.3);
  return v;
}

}  // namespace

TEST_CASE("row log-sum-exp against a long double reference") {
  const Problem prob = instance();
  const Vector pot = ramp(prob.cols(), 3.0);
  for (double beta : {0.5, 10.0, 400.0}) {
    Vector out(prob.rows());
    kernels::serial::row_logsumexp(prob.cost, beta, pot, -1.5, out);
    for (std::size_t i = 0; i < prob.rows(); ++i) {
      long double mx = -1e300L;
      for (std::size_t j = 0; j < prob.cols(); ++j) {
        mx = std::max(mx, static_cast<long double>(pot[j]) - beta * prob.cost(i, j));
      }
      long double s = 0.0L;
      for (std::size_t j = 0; j < prob.cols(); ++j) {
        s += std::exp(static_cast<long double>(pot[j]) - beta * prob.cost(i, j) - mx);
      }
      const double expected = static_cast<double>(mx + std::log(s)) - 1.5;
      CHECK(out[i] == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("serial and parallel kernels are bit-identical") {
  const Problem prob = instance();
  const Vector f = ramp(prob.rows(), 2.0);
  const Vector g = ramp(prob.cols(), -1.0);
  Vector a(prob.rows()), b(prob.rows());
  kernels::serial::row_logsumexp(prob.cost, 7.0, g, 0.25, a);
  kernels::parallel::row_logsumexp(prob.cost, 7.0, g, 0.25, b);
  CHECK(a == b);
  CHECK(kernels::serial::total_logsumexp(prob.cost, 7.0, f, g, 0.1) ==
        kernels::parallel::total_logsumexp(prob.cost, 7.0, f, g, 0.1));
  const auto sp = kernels::serial::plan_stats(prob.cost, 7.0, f, g, 0.1);
  const auto pp = kernels::parallel::plan_stats(prob.cost, 7.0, f, g, 0.1);
  CHECK(sp.row_sums == pp.row_sums);
  CHECK(sp.col_sums == pp.col_sums);
  CHECK(sp.cost_inner == pp.cost_inner);
  CHECK(sp.mass == pp.mass);
  CHECK(kernels::serial::plan_matrix(prob.cost, 7.0, f, g, 0.1) ==
        kernels::parallel::plan_matrix(prob.cost, 7.0, f, g, 0.1));
  CHECK(kernels::thread_count() >= 1);
}

TEST_CASE("plan statistics agree with the explicit plan") {
  const Problem prob = instance();
  const Vector f = ramp(prob.rows(), 0.5);
  const Vector g = ramp(prob.cols(), 0.7);
  const Matrix plan = kernels::plan_matrix(prob.cost, 3.0, f, g, -2.0);
  const auto st = kernels::plan_stats(prob.cost, 3.0, f, g, -2.0);
  const Plan p{plan};
  const Vector rows = p.row_sums();
  const Vector cols = p.col_sums();
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(st.row_sums[i] == doctest::Approx(rows[i]));
  for (std::size_t j = 0; j < cols.size(); ++j) CHECK(st.col_sums[j] == doctest::Approx(cols[j]));
  CHECK(st.cost_inner == doctest::Approx(inner(prob.cost, plan)));
  CHECK(st.mass == doctest::Approx(p.total_mass()));
  CHECK(std::log(st.mass) ==
        doctest::Approx(kernels::total_logsumexp(prob.cost, 3.0, f, g, -2.0)).epsilon(1e-13));
}

TEST_CASE("kernel shape checks") {
  const Problem prob = instance();
  Vector out(prob.rows());
  CHECK_THROWS_AS(kernels::row_logsumexp(prob.cost, 1.0, Vector(3), 0.0, out),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernels::plan_matrix(prob.cost, 1.0, Vector(2), Vector(prob.cols()), 0.0),
                  std::invalid_argument);
}
