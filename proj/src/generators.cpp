#include "gradspec/generators.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace gradspec {

double Rng::uniform_open(double lo, double hi) {
  // 53 random bits shifted by half an ulp: u lies strictly inside (0, 1).
  const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  double v = lo + (hi - lo) * u;
  if (v <= lo) v = std::nextafter(lo, hi);
  if (v >= hi) v = std::nextafter(hi, lo);
  return v;
}

std::string_view to_string(SpectrumFamily f) noexcept {
  switch (f) {
    case SpectrumFamily::TP1: return "TP1";
    case SpectrumFamily::SET1: return "SET1";
    case SpectrumFamily::SET2: return "SET2";
    case SpectrumFamily::SET3: return "SET3";
    case SpectrumFamily::SET4: return "SET4";
    case SpectrumFamily::SET5: return "SET5";
  }
  return "?";
}

SpectrumFamily parse_spectrum_family(std::string_view name) {
  for (auto f : {SpectrumFamily::TP1, SpectrumFamily::SET1, SpectrumFamily::SET2,
                 SpectrumFamily::SET3, SpectrumFamily::SET4, SpectrumFamily::SET5}) {
    std::string upper(name);
    for (auto &c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (to_string(f) == upper) return f;
  }
  throw Error(ErrorKind::invalid_argument,
              "unknown spectrum family '" + std::string(name) + "'");
}

void SpectrumSpec::validate() const {
  if (n < 3) throw Error(ErrorKind::invalid_argument, "spectrum: n must be >= 3");
  if (!(kappa > 1.0) || !std::isfinite(kappa))
    throw Error(ErrorKind::invalid_argument, "spectrum: kappa must exceed 1");
  const bool banded = family != SpectrumFamily::TP1 && family != SpectrumFamily::SET1;
  if (banded && kappa / 2.0 <= 100.0)
    throw Error(ErrorKind::invalid_argument,
                "spectrum: banded families need kappa / 2 > 100");
}

EigenInterval eigen_interval(const SpectrumSpec &spec, int i) {
  const int n = spec.n;
  const double k = spec.kappa;
  if (i == 1) return {1.0, 1.0};
  if (i == n) return {k, k};
  const EigenInterval low{1.0, 100.0};
  const EigenInterval top{k / 2.0, k};
  switch (spec.family) {
    case SpectrumFamily::TP1:
    case SpectrumFamily::SET1:
      return {1.0, k};
    case SpectrumFamily::SET2:
      return i <= n / 5 ? low : top;
    case SpectrumFamily::SET3:
      return i <= n / 2 ? low : top;
    case SpectrumFamily::SET4:
      return i <= 4 * n / 5 ? low : top;
    case SpectrumFamily::SET5:
      if (i <= n / 5) return low;
      if (i <= 4 * n / 5) return {100.0, k / 2.0};
      return top;
  }
  return {1.0, k};
}

Vector SpectrumSample::apply_q(const Vector &v) const {
  // Q v = H3 (H2 (H1 v)), H = I - 2 w w'.
  Vector out = v;
  for (const auto &wi : w) out -= (2.0 * wi.dot(out)) * wi;
  return out;
}

Vector SpectrumSample::apply_qt(const Vector &v) const {
  Vector out = v;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out -= (2.0 * it->dot(out)) * *it;
  return out;
}

DenseMatrix SpectrumSample::q_matrix() const {
  const auto n = eigenvalues.size();
  DenseMatrix q = DenseMatrix::Identity(n, n);
  for (Eigen::Index j = 0; j < n; ++j) q.col(j) = apply_q(q.col(j));
  return q;
}

SpectrumSample sample_spectrum(const SpectrumSpec &spec) {
  spec.validate();
  Rng rng(spec.seed);
  SpectrumSample out;
  const int n = spec.n;
  out.eigenvalues.resize(n);
  for (int i = 1; i <= n; ++i) {
    const auto iv = eigen_interval(spec, i);
    out.eigenvalues[i - 1] = (i == 1 || i == n) ? iv.lo : rng.uniform_open(iv.lo, iv.hi);
  }
  out.b = Vector::Zero(n);
  if (spec.family != SpectrumFamily::TP1)
    for (int i = 0; i < n; ++i) out.b[i] = rng.uniform_open(-10.0, 10.0);
  for (auto &wi : out.w) {
    wi.resize(n);
    for (int i = 0; i < n; ++i) wi[i] = rng.uniform_open(-1.0, 1.0);
    wi.normalize();
  }
  return out;
}

QuadraticProblem gen_diag_problem(const SpectrumSpec &spec) {
  auto sample = sample_spectrum(spec);
  return QuadraticProblem::diagonal(std::move(sample.eigenvalues), std::move(sample.b));
}

QuadraticProblem rotated_dense(const SpectrumSample &sample) {
  // Q V Q' built by applying the reflectors to V from both sides.
  DenseMatrix a = sample.eigenvalues.asDiagonal();
  for (auto it = sample.w.begin(); it != sample.w.end(); ++it) {
    const Vector &wi = *it;
    // a <- H a H with H symmetric.
    const Vector aw = a * wi;
    const double waw = wi.dot(aw);
    a -= 2.0 * (wi * aw.transpose() + aw * wi.transpose());
    a += (4.0 * waw) * (wi * wi.transpose());
  }
  a = 0.5 * (a + a.transpose()).eval();
  return QuadraticProblem::dense(std::move(a), sample.b);
}

QuadraticProblem gen_rotated_problem(const SpectrumSpec &spec) {
  return rotated_dense(sample_spectrum(spec));
}

QuadraticProblem rotated_in_eigenbasis(const SpectrumSample &sample) {
  return QuadraticProblem::diagonal(sample.eigenvalues, sample.apply_qt(sample.b));
}

Vector ones_start(Eigen::Index n) { return Vector::Ones(n); }

double laplace_lambda_min(int N) {
  const double t = std::sin(std::numbers::pi / (2.0 * (N + 1)));
  return 12.0 * t * t;
}

double laplace_lambda_max(int N) {
  const double t = std::sin(N * std::numbers::pi / (2.0 * (N + 1)));
  return 12.0 * t * t;
}

LaplaceProblem gen_laplace3d(const LaplaceSpec &spec) {
  if (spec.N < 2) throw Error(ErrorKind::invalid_argument, "laplace3d: N must be >= 2");
  const int N = spec.N;
  const Eigen::Index n = spec.n();
  auto index = [N](int i, int j, int k) {
    return static_cast<Eigen::Index>(i) +
           N * (static_cast<Eigen::Index>(j) + static_cast<Eigen::Index>(N) * k);
  };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(7 * n));
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const auto row = index(i, j, k);
        triplets.emplace_back(row, row, 6.0);
        if (i > 0) triplets.emplace_back(row, index(i - 1, j, k), -1.0);
        if (i + 1 < N) triplets.emplace_back(row, index(i + 1, j, k), -1.0);
        if (j > 0) triplets.emplace_back(row, index(i, j - 1, k), -1.0);
        if (j + 1 < N) triplets.emplace_back(row, index(i, j + 1, k), -1.0);
        if (k > 0) triplets.emplace_back(row, index(i, j, k - 1), -1.0);
        if (k + 1 < N) triplets.emplace_back(row, index(i, j, k + 1), -1.0);
      }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());

  const double h = 1.0 / (N + 1);
  const double sigma = spec.sigma();
  const auto c = spec.center();
  Vector x_star(n);
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const double x = (i + 1) * h, y = (j + 1) * h, z = (k + 1) * h;
        const double r2 = (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) +
                          (z - c[2]) * (z - c[2]);
        x_star[index(i, j, k)] =
            std::exp(-sigma * r2) * x * (x - 1.0) * y * (y - 1.0) * z * (z - 1.0);
      }
  Vector b = a * x_star;
  return {QuadraticProblem::sparse(std::move(a), std::move(b)), std::move(x_star)};
}

}  // namespace gradspec
