#include <random>

#include "doctest.h"

#include "gradspec/problem.hpp"
#include "support.hpp"

using namespace gradspec;
using testing::rel_close;
using testing::vec;

TEST_CASE("hessian_apply examples") {
  const auto id = QuadraticProblem::diagonal(Vector::Ones(3), Vector::Zero(3));
  CHECK(hessian_apply(id, vec({1, 2, 3})) == vec({1, 2, 3}));

  const auto d = QuadraticProblem::diagonal(vec({1, 2}), Vector::Zero(2));
  CHECK(hessian_apply(d, vec({1, 1})) == vec({1, 2}));

  DenseMatrix a(2, 2);
  a << 2, 1, 1, 2;
  const auto dense = QuadraticProblem::dense(a, Vector::Zero(2));
  CHECK(hessian_apply(dense, vec({1, 0})) == vec({2, 1}));
}

TEST_CASE("hessian_apply rejects a dimension mismatch") {
  const auto d = QuadraticProblem::diagonal(vec({1, 2}), Vector::Zero(2));
  try {
    hessian_apply(d, vec({1, 2, 3}));
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::dimension_mismatch);
  }
}

TEST_CASE("gradient examples") {
  const auto id = QuadraticProblem::diagonal(Vector::Ones(2), Vector::Zero(2));
  CHECK(gradient(id, vec({1, 2})) == vec({1, 2}));

  const auto d = QuadraticProblem::diagonal(vec({1, 2}), vec({1, 1}));
  CHECK(gradient(d, vec({1, 1})) == vec({0, 1}));

  DenseMatrix a(2, 2);
  a << 4, 1, 1, 3;
  const Vector b = vec({1, 2});
  const auto dense = QuadraticProblem::dense(a, b);
  const Vector xs = a.ldlt().solve(b);
  CHECK(gradient(dense, xs).norm() <= 1e-14);
}

TEST_CASE("diagonal representation must be positive definite") {
  CHECK_THROWS_AS(QuadraticProblem::diagonal(vec({1, 0}), Vector::Zero(2)), Error);
  CHECK_THROWS_AS(QuadraticProblem::diagonal(vec({1, -2}), Vector::Zero(2)), Error);
}

TEST_CASE("project_box examples") {
  const BoxBounds unit = BoxBounds::uniform(2, 0.0, 1.0);
  CHECK(project_box(unit, vec({0.5, 0.5})) == vec({0.5, 0.5}));
  CHECK(project_box(unit, vec({-1, 2})) == vec({0, 1}));
  const BoxBounds free = BoxBounds::unbounded(1);
  CHECK(project_box(free, vec({7})) == vec({7}));
}

TEST_CASE("bounds must be ordered") {
  CHECK_THROWS_AS(BoxBounds(vec({1}), vec({0})), Error);
}

namespace {

QuadraticProblem random_sparse(std::mt19937_64 &rng, int n) {
  std::vector<Eigen::Triplet<double>> t;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0 + u(rng));
    if (i + 1 < n) {
      const double v = u(rng);
      t.emplace_back(i, i + 1, v);
      t.emplace_back(i + 1, i, v);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return QuadraticProblem::sparse(a, Vector::Zero(n));
}

QuadraticProblem random_dense(std::mt19937_64 &rng, int n) {
  const DenseMatrix m = DenseMatrix::Random(n, n);
  (void)rng;
  return QuadraticProblem::dense(m.transpose() * m + n * DenseMatrix::Identity(n, n),
                                 Vector::Zero(n));
}

}  // namespace

TEST_CASE("hessian products are linear and symmetric") {
  std::mt19937_64 rng(7);
  const int n = 12;
  const std::vector<QuadraticProblem> problems = {
      QuadraticProblem::diagonal(testing::random_vector(rng, n, 1.0, 10.0), Vector::Zero(n)),
      random_dense(rng, n), random_sparse(rng, n)};
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (const auto &p : problems) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector u = testing::random_vector(rng, n), v = testing::random_vector(rng, n);
      const double a = coef(rng), b = coef(rng);
      const Vector lhs = p.apply(Vector(a * u + b * v));
      const Vector rhs = a * p.apply(u) + b * p.apply(v);
      CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
      CHECK(rel_close(u.dot(p.apply(v)), v.dot(p.apply(u)), 1e-12));
    }
  }
}

TEST_CASE("projection is idempotent and nonexpansive") {
  std::mt19937_64 rng(11);
  const int n = 8;
  Vector lo = testing::random_vector(rng, n, -2.0, 0.0);
  Vector hi = testing::random_vector(rng, n, 0.0, 2.0);
  lo[0] = -kInf;
  hi[1] = kInf;
  const BoxBounds box(lo, hi);
  for (int trial = 0; trial < 10000; ++trial) {
    const Vector x = testing::random_vector(rng, n, -5.0, 5.0);
    const Vector y = testing::random_vector(rng, n, -5.0, 5.0);
    const Vector px = project_box(box, x);
    CHECK(project_box(box, px) == px);
    CHECK(box.contains(px));
    CHECK((px - project_box(box, y)).norm() <= (x - y).norm() * (1.0 + 1e-12));
  }
}

TEST_CASE("quadratic objective along a gradient step") {
  std::mt19937_64 rng(3);
  const int n = 10;
  const auto p = QuadraticProblem::diagonal(testing::random_vector(rng, n, 1.0, 50.0),
                                            testing::random_vector(rng, n, -10.0, 10.0));
  std::uniform_real_distribution<double> step(0.0, 0.1);
  for (int trial = 0; trial < 10000; ++trial) {
    const Vector x = testing::random_vector(rng, n, -3.0, 3.0);
    const Vector g = p.gradient(x);
    const double a = step(rng);
    const double expected = p.value(x) - a * g.squaredNorm() + 0.5 * a * a * g.dot(p.apply(g));
    CHECK(rel_close(p.value(x - a * g), expected, 1e-10));
  }
}

TEST_CASE("oracle counters count each call") {
  auto p = std::make_shared<const QuadraticProblem>(
      QuadraticProblem::diagonal(vec({1, 2}), vec({1, 1})));
  ObjectiveOracle o = ObjectiveOracle::quadratic(p);
  CHECK(o.eval_count() == 0);
  CHECK(o.grad_count() == 0);
  o.eval_f(vec({1, 1}));
  o.eval_f(vec({0, 1}));
  o.eval_grad(vec({1, 1}));
  CHECK(o.eval_count() == 2);
  CHECK(o.grad_count() == 1);
  CHECK(o.eval_grad(vec({1, 1})) == vec({0, 1}));
}
