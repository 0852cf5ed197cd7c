#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "gradspec/generators.hpp"
#include "support.hpp"

using namespace gradspec;
using testing::rel_close;

namespace {

const SpectrumFamily kFamilies[] = {SpectrumFamily::TP1,  SpectrumFamily::SET1,
                                    SpectrumFamily::SET2, SpectrumFamily::SET3,
                                    SpectrumFamily::SET4, SpectrumFamily::SET5};

}  // namespace

TEST_CASE("TP1 endpoints and interior") {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto p = gen_diag_problem({SpectrumFamily::TP1, 5, 5.0, seed});
    const Vector &v = p.diagonal_values();
    CHECK(v[0] == 1.0);
    CHECK(v[4] == 5.0);
    for (int i = 1; i < 4; ++i) {
      CHECK(v[i] > 1.0);
      CHECK(v[i] < 5.0);
    }
    CHECK(p.b().isZero(0.0));
  }
}

TEST_CASE("SET1 endpoints and interior") {
  const auto p = gen_diag_problem({SpectrumFamily::SET1, 1000, 1e5, 7});
  const Vector &v = p.diagonal_values();
  CHECK(v[0] == 1.0);
  CHECK(v[999] == 1e5);
  for (int i = 1; i < 999; ++i) {
    CHECK(v[i] > 1.0);
    CHECK(v[i] < 1e5);
  }
  CHECK(p.b().maxCoeff() < 10.0);
  CHECK(p.b().minCoeff() > -10.0);
}

TEST_CASE("spectra respect their per-index intervals") {
  for (auto fam : kFamilies)
    for (double kappa : {1e4, 1e6})
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const SpectrumSpec spec{fam, 1000, kappa, seed};
        const Vector v = gen_diag_problem(spec).diagonal_values();
        CHECK(v[0] == 1.0);
        CHECK(v[999] == kappa);
        for (int i = 2; i < 1000; ++i) {
          const EigenInterval iv = eigen_interval(spec, i);
          CHECK(v[i - 1] > iv.lo);
          CHECK(v[i - 1] < iv.hi);
        }
      }
}

TEST_CASE("SET2 interval layout") {
  const SpectrumSpec spec{SpectrumFamily::SET2, 1000, 1e4, 1};
  CHECK(eigen_interval(spec, 2).lo == 1.0);
  CHECK(eigen_interval(spec, 200).hi == 100.0);
  CHECK(eigen_interval(spec, 201).lo == 5e3);
  CHECK(eigen_interval(spec, 999).hi == 1e4);
}

TEST_CASE("generators are deterministic in the seed") {
  for (auto fam : kFamilies) {
    const SpectrumSpec spec{fam, 300, 1e4, 42};
    const auto a = sample_spectrum(spec), b = sample_spectrum(spec);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.b == b.b);
    for (int i = 0; i < 3; ++i) CHECK(a.w[i] == b.w[i]);
    const auto c = sample_spectrum({fam, 300, 1e4, 43});
    CHECK(a.eigenvalues != c.eigenvalues);
  }
}

TEST_CASE("rotated problem: orthogonal Q and exact spectrum") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SpectrumSpec spec{SpectrumFamily::SET3, 150, 1e3, seed};
    const auto sample = sample_spectrum(spec);
    for (const auto &w : sample.w) CHECK(std::abs(w.norm() - 1.0) <= 1e-14);
    const DenseMatrix q = sample.q_matrix();
    CHECK((q.transpose() * q - DenseMatrix::Identity(150, 150)).cwiseAbs().maxCoeff() <= 1e-12);

    const QuadraticProblem p = gen_rotated_problem(spec);
    const DenseMatrix a = p.to_dense();
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a);
    Vector expected = sample.eigenvalues;
    std::sort(expected.data(), expected.data() + expected.size());
    for (Eigen::Index i = 0; i < 150; ++i)
      CHECK(rel_close(es.eigenvalues()[i], expected[i], 1e-8));

    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector v = testing::random_vector(rng, 150);
      const Vector ref = sample.apply_q(sample.eigenvalues.cwiseProduct(sample.apply_qt(v)));
      CHECK((p.apply(v) - ref).norm() <= 1e-10 * v.norm() * sample.eigenvalues.maxCoeff());
      CHECK((sample.apply_q(v) - q * v).norm() <= 1e-12 * v.norm());
    }
  }
}

TEST_CASE("eigenbasis problem is the rotated problem in Q coordinates") {
  const auto sample = sample_spectrum({SpectrumFamily::SET5, 100, 1e4, 5});
  const QuadraticProblem dense = rotated_dense(sample);
  const QuadraticProblem eig = rotated_in_eigenbasis(sample);
  CHECK(eig.is_diagonal());
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = testing::random_vector(rng, 100);
    CHECK(rel_close(dense.value(x), eig.value(sample.apply_qt(x)), 1e-10));
  }
}

TEST_CASE("Laplacian spectrum matches the closed form") {
  for (int N : {2, 3, 4, 5, 6}) {
    const auto lp = gen_laplace3d({LaplaceVariant::A, N});
    const DenseMatrix a = lp.problem.to_dense();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a);
    CHECK(rel_close(es.eigenvalues().minCoeff(), laplace_lambda_min(N), 1e-10));
    CHECK(rel_close(es.eigenvalues().maxCoeff(), laplace_lambda_max(N), 1e-10));
    const double h = M_PI / (2.0 * (N + 1));
    CHECK(rel_close(laplace_lambda_min(N), 12.0 * std::pow(std::sin(h), 2), 1e-14));
    CHECK(rel_close(laplace_lambda_max(N), 12.0 * std::pow(std::sin(N * h), 2), 1e-14));
  }
}

TEST_CASE("Laplacian condition number at N = 100") {
  const double logk = std::log10(laplace_lambda_max(100) / laplace_lambda_min(100));
  CHECK(logk >= 3.55);
  CHECK(logk <= 3.67);
}

TEST_CASE("Laplacian stencil structure") {
  for (auto variant : {LaplaceVariant::A, LaplaceVariant::B}) {
    const int N = 5;
    const auto lp = gen_laplace3d({variant, N});
    const auto &h = std::get<SparseHessian>(lp.problem.hessian()).matrix;
    CHECK(h.rows() == N * N * N);
    const DenseMatrix a = lp.problem.to_dense();
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      int nnz = 0;
      for (Eigen::Index c = 0; c < a.cols(); ++c)
        if (a(r, c) != 0.0) ++nnz;
      CHECK(nnz <= 7);
      CHECK(a(r, r) == 6.0);
      const double sum = a.row(r).sum();
      CHECK(sum >= 0.0);
      CHECK(sum <= 6.0);
      CHECK(sum == std::round(sum));
    }
    // Corner node (1,1,1) touches three boundary faces.
    CHECK(a.row(0).sum() == 3.0);
    CHECK(lp.problem.b().isApprox(a * lp.x_star));
  }
}

TEST_CASE("Laplacian solution and grid convention") {
  const int N = 4;
  const auto lp = gen_laplace3d({LaplaceVariant::B, N});
  const double hgrid = 1.0 / (N + 1);
  auto node = [&](int i, int j, int k) { return (i - 1) + N * ((j - 1) + N * (k - 1)); };
  const double x = 2 * hgrid, y = 3 * hgrid, z = 1 * hgrid;
  const double gauss =
      std::exp(-50.0 * ((x - 0.4) * (x - 0.4) + (y - 0.7) * (y - 0.7) + (z - 0.5) * (z - 0.5)));
  const double expected = gauss * x * (x - 1) * y * (y - 1) * z * (z - 1);
  CHECK(rel_close(lp.x_star[node(2, 3, 1)], expected, 1e-14));
}

TEST_CASE("generator arguments are validated") {
  CHECK_THROWS_AS((SpectrumSpec{SpectrumFamily::SET1, 2, 10.0, 1}.validate()), Error);
  CHECK_THROWS_AS((SpectrumSpec{SpectrumFamily::SET1, 10, 1.0, 1}.validate()), Error);
  CHECK_THROWS_AS(gen_laplace3d({LaplaceVariant::A, 1}), Error);
  CHECK(parse_spectrum_family("set3") == SpectrumFamily::SET3);
  CHECK_THROWS_AS(parse_spectrum_family("SET9"), Error);
}

TEST_CASE("open-interval uniform draws") {
  Rng rng(123);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform_open(2.0, 3.0);
    CHECK(u > 2.0);
    CHECK(u < 3.0);
  }
}
