#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

#include "gradspec/problem.hpp"

namespace gradspec {

/// Seeded stream used by every generator: std::mt19937_64, whose output
/// sequence is fixed by the standard, plus an explicit open-interval
/// transform so draws do not depend on the library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (lo, hi).
  double uniform_open(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

enum class SpectrumFamily { TP1, SET1, SET2, SET3, SET4, SET5 };

std::string_view to_string(SpectrumFamily f) noexcept;
SpectrumFamily parse_spectrum_family(std::string_view name);

struct SpectrumSpec {
  SpectrumFamily family = SpectrumFamily::TP1;
  int n = 1000;
  double kappa = 1e4;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Open interval that eigenvalue index i (1-based) is drawn from; the
/// endpoints i = 1 and i = n are pinned to 1 and kappa.
struct EigenInterval {
  double lo;
  double hi;
};
EigenInterval eigen_interval(const SpectrumSpec &spec, int i);

/// Everything drawn for one seed: spectrum, linear term and the three
/// Householder vectors of Q = (I - 2 w3 w3')(I - 2 w2 w2')(I - 2 w1 w1').
struct SpectrumSample {
  Vector eigenvalues;
  Vector b;  // zero for TP1, uniform in (-10, 10) otherwise
  std::array<Vector, 3> w;

  /// Q v and Q' v in O(n).
  Vector apply_q(const Vector &v) const;
  Vector apply_qt(const Vector &v) const;
  /// Q as a dense matrix.
  DenseMatrix q_matrix() const;
};

SpectrumSample sample_spectrum(const SpectrumSpec &spec);

/// A = diag(eigenvalues), b as sampled.
QuadraticProblem gen_diag_problem(const SpectrumSpec &spec);

/// A = Q V Q' as a dense matrix, b as sampled.
QuadraticProblem gen_rotated_problem(const SpectrumSpec &spec);
QuadraticProblem rotated_dense(const SpectrumSample &sample);

/// The rotated problem written in its eigenbasis: A = V, b' = Q' b. A
/// gradient iteration started from Q' x1 produces the iterates Q' x_k of
/// the dense run.
QuadraticProblem rotated_in_eigenbasis(const SpectrumSample &sample);

/// Starting point (1, ..., 1).
Vector ones_start(Eigen::Index n);

enum class LaplaceVariant { A, B };

struct LaplaceSpec {
  LaplaceVariant variant = LaplaceVariant::A;
  int N = 60;

  double sigma() const { return variant == LaplaceVariant::A ? 20.0 : 50.0; }
  std::array<double, 3> center() const {
    return variant == LaplaceVariant::A ? std::array<double, 3>{0.5, 0.5, 0.5}
                                        : std::array<double, 3>{0.4, 0.7, 0.5};
  }
  Eigen::Index n() const { return Eigen::Index(N) * N * N; }
};

struct LaplaceProblem {
  QuadraticProblem problem;
  Vector x_star;
};

/// Unscaled 7-point Laplacian on the N^3 interior grid (Dirichlet), with
/// b = A x_star for a Gaussian bump times x(x-1)y(y-1)z(z-1).
LaplaceProblem gen_laplace3d(const LaplaceSpec &spec);

/// Closed-form extreme eigenvalues of the N^3 7-point Laplacian.
double laplace_lambda_min(int N);
double laplace_lambda_max(int N);

}  // namespace gradspec
