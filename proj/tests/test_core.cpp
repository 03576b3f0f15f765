#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "asink/core.hpp"

using namespace asink;

TEST_CASE("kl divergence of two Bernoulli vectors") {
  const Vector a{0.2, 0.8};
  const Vector b{0.5, 0.5};
  const double expected = 0.2 * std::log(0.2 / 0.5) + 0.8 * std::log(0.8 / 0.5);
  CHECK(kl_divergence(a, b) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(kl_divergence(a, b) == doctest::Approx(0.192745).epsilon(1e-6));
}

TEST_CASE("kl divergence is generalized to unnormalized vectors") {
  const Vector a{0.0, 2.0};
  const Vector b{1.0, 1.0};
  // 0 log 0 = 0, plus the mass terms -a + b.
  CHECK(kl_divergence(a, b) == doctest::Approx(2.0 * std::log(2.0) - 2.0 + 2.0));
  CHECK(kl_divergence(b, b) == 0.0);
  CHECK_THROWS_AS(kl_divergence(b, a), std::invalid_argument);
  CHECK_THROWS_AS(kl_divergence(Vector{-1.0, 1.0}, b), std::invalid_argument);
}

TEST_CASE("log_sum_exp") {
  const Vector x{-1.0, 0.0, 1.0};
  CHECK(log_sum_exp(x) == doctest::Approx(std::log(std::exp(-1.0) + 1.0 + std::exp(1.0))));
  CHECK(log_sum_exp(x) == doctest::Approx(1.407606).epsilon(1e-6));
  CHECK(log_sum_exp(Vector{1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(log_sum_exp(Vector{ninf, ninf}) == ninf);
  CHECK(log_sum_exp(Vector{ninf, 0.0}) == 0.0);
}

TEST_CASE("compensated sum keeps small terms") {
  CompensatedSum s;
  for (double x : {1.0, 1e100, 1.0, -1e100}) s.add(x);
  CHECK(s.value() == 2.0);
}

TEST_CASE("oscillation norm and basic reductions") {
  Matrix c(2, 2, std::vector<double>{-1.0, 2.0, 0.5, 3.0});
  CHECK(osc_norm(c) == 4.0);
  CHECK(inner(c, c) == doctest::Approx(1.0 + 4.0 + 0.25 + 9.0));
  CHECK(l1_distance(Vector{1, 2}, Vector{0, 4}) == 3.0);
  CHECK(max_abs(Vector{-3, 2}) == 3.0);
  CHECK(sum(Vector{0.25, 0.5}) == 0.75);
  CHECK(c.transposed()(0, 1) == 0.5);
}

TEST_CASE("problem validation") {
  Problem ok{Matrix(1, 2), {1.0}, {0.5, 0.5}, ""};
  CHECK_NOTHROW(ok.validate());
  Problem bad = ok;
  bad.q = {0.5, 0.6};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.q = {1.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.cost = Matrix(2, 2);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.cost(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("plan from scalings follows the Gibbs form") {
  Problem prob{Matrix(2, 3, std::vector<double>{0.0, 1.0, 2.0, 1.0, 0.5, 0.0}),
               {0.4, 0.6},
               {0.2, 0.3, 0.5},
               ""};
  const LogScalings s{{0.1, -0.2}, {0.3, 0.0, -0.1}, 2.0};
  const Plan plan = plan_from_scalings(s, prob);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double expected = std::exp(2.0 * (s.u[i] + s.v[j] - prob.cost(i, j))) / 6.0;
      CHECK(plan.matrix(i, j) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
  CHECK(plan.total_mass() == doctest::Approx(sum(plan.row_sums())));
  const Plan same = plan_from_scalings(s, prob, uniform_reference(2, 3));
  CHECK(same.matrix == plan.matrix);

  const LogScalings huge{{800.0, 0.0}, {0.0, 0.0, 0.0}, 1.0};
  CHECK_THROWS_AS(plan_from_scalings(huge, prob), NumericError);
}

TEST_CASE("kl and oscillation examples") {
  const Vector p{0.1, 0.2, 0.7};
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(kl_divergence(Vector{1.0, 0.0}, Vector{0.5, 0.5}) == doctest::Approx(std::log(2.0)));
  CHECK(osc_norm(Matrix(3, 4, 2.5)) == 0.0);
  CHECK(osc_norm(Matrix(2, 2, std::vector<double>{0.0, 1.0, 1.0, 0.0})) == 1.0);
  CHECK(log_sum_exp(Vector{0.0}) == 0.0);
}

TEST_CASE("oscillation of a seeded Gaussian matrix matches a scan") {
  // Box-Muller on a plain linear congruential stream, independent of the library RNG.
  Matrix c(100, 100);
  std::uint64_t state = 12345;
  auto next = [&state] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>((state >> 11) + 1) * 0x1.0p-53;
  };
  for (double& x : c.values()) x = std::sqrt(-2.0 * std::log(next())) * std::cos(6.283185307179586 * next());
  double lo = c(0, 0), hi = c(0, 0);
  for (std::size_t i = 0; i < 100; ++i) {
    for (std::size_t j = 0; j < 100; ++j) {
      lo = std::min(lo, c(i, j));
      hi = std::max(hi, c(i, j));
    }
  }
  CHECK(osc_norm(c) == hi - lo);
}

TEST_CASE("plans from trivial scalings") {
  Problem flat{Matrix(2, 3), {0.5, 0.5}, {0.2, 0.3, 0.5}, ""};
  const Plan u = plan_from_scalings(LogScalings{{0.0, 0.0}, {0.0, 0.0, 0.0}, 17.0}, flat);
  for (double x : u.matrix.values()) CHECK(x == doctest::Approx(1.0 / 6.0));
  Problem one{Matrix(1, 1, 0.3), {1.0}, {1.0}, ""};
  // One Sinkhorn step from a = b = 1: a = 1 / K, then b = 1 / (K a) = 1.
  const double beta = 2.0;
  const LogScalings s{{std::log(1.0 / std::exp(-beta * 0.3)) / beta}, {0.0}, beta};
  CHECK(plan_from_scalings(s, one).matrix(0, 0) == doctest::Approx(1.0));
}
