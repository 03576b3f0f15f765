#include <doctest.h>

#include <cmath>
#include <limits>

#include "asink/problems.hpp"
#include "asink/reference.hpp"
#include "asink/regpath.hpp"
#include "asink/rounding.hpp"
#include "asink/solvers.hpp"

using namespace asink;

namespace {

Problem instance(Family f, std::size_t m, std::size_t n, std::uint64_t seed) {
  GeneratorSpec g;
  g.family = f;
  g.m = m;
  g.n = n;
  g.seed = seed;
  return generate(g);
}

SolveOptions precise() {
  SolveOptions o;
  o.high_accuracy = true;
  o.tolerance = 1e-12;
  return o;
}

double max_diff(const Matrix& a, const Matrix& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("alpha = 0 is balanced entropic OT") {
  const Problem prob = instance(Family::random, 8, 6, 1);
  const RegPathPoint pt = solve_point(prob, 0.0, 20.0, std::nullopt, precise());
  CHECK(pt.converged);
  CHECK(pt.u[0] == 0.0);
  const RunResult sk = run(SolverConfig(Variant::standard, Schedule::constant(20.0), 5000), prob);
  CHECK(max_diff(pt.plan.matrix, sk.plan.matrix) <= 1e-12);
  CHECK(schrodinger_residual(pt.scalings(), prob, 20.0) <= 1e-10);
}

TEST_CASE("alpha = inf relaxes the first marginal completely") {
  const Problem prob = instance(Family::random, 5, 7, 2);
  const double beta = 3.0;
  const RegPathPoint pt = solve_point(prob, kInf, beta, std::nullopt, SolveOptions{});
  // Each column spreads q_j over rows in proportion to exp(-beta c_ij).
  for (std::size_t j = 0; j < 7; ++j) {
    double z = 0;
    for (std::size_t i = 0; i < 5; ++i) z += std::exp(-beta * prob.cost(i, j));
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(pt.plan.matrix(i, j) ==
            doctest::Approx(prob.q[j] * std::exp(-beta * prob.cost(i, j)) / z).epsilon(1e-13));
    }
  }
}

TEST_CASE("relaxed points satisfy their optimality relations") {
  const Problem prob = instance(Family::geometric, 20, 15, 3);
  for (double alpha : {0.05, 1.0, 30.0}) {
    for (double beta : {5.0, 100.0}) {
      CAPTURE(alpha);
      CAPTURE(beta);
      const RegPathPoint pt = solve_point(prob, alpha, beta, std::nullopt, precise());
      CHECK(pt.converged);
      const Vector rows = pt.plan.row_sums();
      const Vector cols = pt.plan.col_sums();
      for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i] == doctest::Approx(prob.p[i] * std::exp(-alpha * pt.u[i])).epsilon(1e-9));
      CHECK(l1_distance(cols, prob.q) <= 1e-12);
      CHECK(max_diff(plan_from_scalings(pt.scalings(), prob).matrix, pt.plan.matrix) <= 1e-14);
      // sum p e^{-alpha u} = 1 is part of the dual optimality system.
      CHECK(sum(rows) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(l1_distance(rows, prob.p) <= lemma4_bound(alpha, beta, prob.p, prob.cost));
    }
  }
}

TEST_CASE("symmetric points satisfy their optimality relations") {
  const Problem prob = instance(Family::random, 12, 9, 4);
  for (double alpha : {0.1, 2.0}) {
    const RegPathPoint pt = solve_point_symmetric(prob, alpha, 10.0, std::nullopt, precise());
    CHECK(pt.converged);
    CHECK(pt.plan.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const Vector rows = pt.plan.row_sums();
    const Vector cols = pt.plan.col_sums();
    for (std::size_t i = 0; i < rows.size(); ++i)
      CHECK(rows[i] == doctest::Approx(prob.p[i] * std::exp(-alpha * pt.u[i])).epsilon(1e-9));
    for (std::size_t j = 0; j < cols.size(); ++j)
      CHECK(cols[j] == doctest::Approx(prob.q[j] * std::exp(-alpha * pt.v[j])).epsilon(1e-9));
    Matrix gibbs = plan_from_scalings(pt.scalings(), prob).matrix;
    for (double& x : gibbs.values()) x *= std::exp(-pt.log_norm);
    CHECK(max_diff(gibbs, pt.plan.matrix) <= 1e-14);
  }
}

TEST_CASE("warm starts and sweep limits") {
  const Problem prob = instance(Family::random, 15, 15, 5);
  SolveOptions few;
  few.sweeps = 3;
  const RegPathPoint cold = solve_point(prob, 0.5, 10.0, std::nullopt, few);
  CHECK(cold.sweeps == 3);
  const RegPathPoint ref = solve_point(prob, 0.5, 10.0, std::nullopt, precise());
  const RegPathPoint warm = solve_point(prob, 0.5, 10.0, ref.scalings(), few);
  CHECK(warm.residual < cold.residual);
  CHECK(warm.residual <= 1e-10);
  LogScalings bad{{0.0}, {0.0}, 1.0};
  CHECK_THROWS_AS(solve_point(prob, 0.5, 10.0, bad, few), std::invalid_argument);
  CHECK_THROWS_AS(solve_point(prob, -1.0, 10.0, std::nullopt, few), std::invalid_argument);
  CHECK_THROWS_AS(solve_point(prob, 1.0, 0.0, std::nullopt, few), std::invalid_argument);
}

TEST_CASE("path on a constant schedule is balanced entropic OT everywhere") {
  const Problem prob = instance(Family::random, 6, 6, 6);
  const std::vector<long> ts{1, 5, 20};
  PathOptions po;
  po.high_accuracy = true;
  const auto pts = path(prob, Schedule::constant(7.0), ts, po);
  REQUIRE(pts.size() == 3);
  for (const auto& pt : pts) {
    CHECK(pt.alpha == 0.0);
    CHECK(max_diff(pt.plan.matrix, pts.front().plan.matrix) <= 1e-11);
  }
  const std::vector<long> bad{3, 3};
  CHECK_THROWS_AS(path(prob, Schedule::constant(7.0), bad), std::invalid_argument);
}

TEST_CASE("symmetric path uses twice the schedule increment") {
  const Problem prob = instance(Family::random, 6, 5, 7);
  const Schedule s = Schedule::polynomial(3.0, 0.5);
  const std::vector<long> ts{4};
  PathOptions po;
  po.symmetric = true;
  const auto pts = path(prob, s, ts, po);
  CHECK(pts[0].alpha == doctest::Approx(2.0 * s.alpha(4)));
  CHECK(pts[0].beta == s.beta(4));
}

TEST_CASE("suboptimality of regularization path points is within the bound") {
  const Problem prob = instance(Family::random, 25, 20, 8);
  const double ot = exact_ot(prob).value;
  for (double beta : {3.0, 30.0, 300.0}) {
    for (double alpha : {0.01, 0.3, 5.0}) {
      const RegPathPoint pt = solve_point(prob, alpha, beta, std::nullopt, precise());
      const double subopt = inner(prob.cost, round_to_polytope(pt.plan, prob.p, prob.q).plan.matrix) - ot;
      CAPTURE(alpha);
      CAPTURE(beta);
      CHECK(subopt <= theorem2_bound(alpha, beta, prob.p, prob.cost));
      CHECK(subopt >= -1e-12);
    }
  }
}

TEST_CASE("bound formulas") {
  const Vector p{0.25, 0.75};
  const Matrix c(2, 3, std::vector<double>{0.0, 1.0, 2.0, 0.5, 0.5, 0.5});
  const double inner_term = 4.0 * std::log(4.0) / 10.0 + 2.0;
  CHECK(lemma4_bound(2.0, 10.0, p, c) == doctest::Approx(2.0 * (20.0 / 12.0) * inner_term));
  CHECK(theorem2_bound(2.0, 10.0, p, c) ==
        doctest::Approx(std::log(6.0) / 10.0 + 8.0 * (20.0 / 12.0) * inner_term));
  CHECK(lemma4_bound(0.0, 10.0, p, c) == 0.0);
  CHECK(theorem2_bound(0.0, 10.0, p, c) == doctest::Approx(std::log(6.0) / 10.0));
  CHECK(lemma4_bound(kInf, 10.0, p, c) == doctest::Approx(20.0 * inner_term));
  CHECK(online_gap_bound(0.5, 4.0, 2, 3) == doctest::Approx(std::sqrt(std::log(6.0) / 4.0)));
}

TEST_CASE("debiased marginal") {
  const Vector p{0.2, 0.3, 0.5};
  CHECK(debiased_marginal(p, Vector{1.0, -2.0, 3.0}, 0.0) == p);
  const Vector same = debiased_marginal(p, Vector{4.0, 4.0, 4.0}, 0.7);
  for (std::size_t i = 0; i < 3; ++i) CHECK(same[i] == doctest::Approx(p[i]).epsilon(1e-15));
  const Vector w = debiased_marginal(p, Vector{0.0, std::log(2.0), 0.0}, 1.0);
  CHECK(w[1] == doctest::Approx(0.6 / 1.3));
  CHECK_THROWS_AS(debiased_marginal(p, Vector{1e308, 0.0, 0.0}, 10.0), NumericError);
}

TEST_CASE("2x2 relaxed point against a long direct iteration") {
  const Problem prob{Matrix(2, 2, std::vector<double>{0.0, 1.0, 1.0, 0.0}), {0.5, 0.5}, {0.5, 0.5}, ""};
  const Problem asym{prob.cost, {0.3, 0.7}, {0.6, 0.4}, ""};
  for (const Problem* pr : {&prob, &asym}) {
    // a = (p / K b)^(beta / (alpha + beta)), b = q / K^T a with alpha = beta = 1.
    double k[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) k[i][j] = std::exp(-pr->cost(i, j)) / 4.0;
    double a[2] = {1, 1}, b[2] = {1, 1};
    for (int it = 0; it < 100000; ++it) {
      for (int i = 0; i < 2; ++i) a[i] = std::sqrt(pr->p[i] / (k[i][0] * b[0] + k[i][1] * b[1]));
      for (int j = 0; j < 2; ++j) b[j] = pr->q[j] / (k[0][j] * a[0] + k[1][j] * a[1]);
    }
    const RegPathPoint pt = solve_point(*pr, 1.0, 1.0, std::nullopt, precise());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(pt.plan.matrix(i, j) == doctest::Approx(a[i] * k[i][j] * b[j]).epsilon(1e-12));
  }
}

TEST_CASE("symmetric points on symmetric data") {
  const std::size_t n = 6;
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) = std::abs(double(i) - double(j)) / 5.0;
  const Problem prob{c, Vector(n, 1.0 / n), Vector(n, 1.0 / n), ""};
  const RegPathPoint pt = solve_point_symmetric(prob, 0.4, 8.0, std::nullopt, precise());
  for (std::size_t i = 0; i < n; ++i) CHECK(pt.u[i] == doctest::Approx(pt.v[i]).epsilon(1e-10));
  const Problem rnd = instance(Family::random, 7, 5, 9);
  const RegPathPoint bal = solve_point_symmetric(rnd, 0.0, 8.0, std::nullopt, precise());
  const RegPathPoint eot = solve_point(rnd, 0.0, 8.0, std::nullopt, precise());
  CHECK(max_diff(bal.plan.matrix, eot.plan.matrix) <= 1e-12);
}

TEST_CASE("symmetric point on a geometric instance") {
  const Problem prob = instance(Family::geometric, 30, 30, 0);
  const RegPathPoint pt = solve_point_symmetric(prob, 0.1, 50.0, std::nullopt, precise());
  CHECK(pt.converged);
  const Vector rows = pt.plan.row_sums();
  const Vector cols = pt.plan.col_sums();
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(rows[i] == doctest::Approx(prob.p[i] * std::exp(-0.1 * pt.u[i])).epsilon(1e-9));
    CHECK(cols[i] == doctest::Approx(prob.q[i] * std::exp(-0.1 * pt.v[i])).epsilon(1e-9));
  }
}

TEST_CASE("bound examples") {
  const std::size_t m = 4;
  const Vector p(m, 0.25);
  const Matrix c(m, 3, std::vector<double>{0, 1, 2, 1, 0, 1, 2, 1, 0, 0.5, 0.5, 0.5});
  CHECK(lemma4_bound(0.3, 7.0, p, c) ==
        doctest::Approx(2.0 * 0.3 * 7.0 / 7.3 * (4.0 * std::log(4.0) / 7.0 + 2.0)));
  const double eps = 0.01;
  CHECK(theorem2_bound(0.0, std::log(12.0) / eps, p, c) == doctest::Approx(eps));
  const Schedule s = Schedule::polynomial(1.0, 0.5);
  const double b1 = theorem2_bound(s.alpha(100000), s.beta(100000), p, c);
  const double b2 = theorem2_bound(s.alpha(10000000), s.beta(10000000), p, c);
  CHECK(b1 / b2 == doctest::Approx(10.0).epsilon(0.02));
}
