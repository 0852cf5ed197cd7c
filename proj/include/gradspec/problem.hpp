#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gradspec/error.hpp"

namespace gradspec {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Hessian held as its eigenvalues; A = diag(values).
struct DiagonalHessian {
  Vector values;
};

struct DenseHessian {
  DenseMatrix matrix;
};

/// Compressed-row symmetric matrix (both triangles stored).
struct SparseHessian {
  SparseMatrix matrix;
};

using Hessian = std::variant<DiagonalHessian, DenseHessian, SparseHessian>;

/// f(x) = 1/2 x'Ax - b'x with A symmetric positive definite.
///
/// Immutable after construction. The constructor validates shapes and, for
/// the diagonal representation, strict positivity of the stored eigenvalues.
class QuadraticProblem {
 public:
  QuadraticProblem(Hessian hessian, Vector b);

  static QuadraticProblem diagonal(Vector eigenvalues, Vector b);
  static QuadraticProblem dense(DenseMatrix a, Vector b);
  static QuadraticProblem sparse(SparseMatrix a, Vector b);

  Eigen::Index dim() const noexcept { return b_.size(); }
  const Vector &b() const noexcept { return b_; }
  const Hessian &hessian() const noexcept { return hessian_; }

  bool is_diagonal() const noexcept {
    return std::holds_alternative<DiagonalHessian>(hessian_);
  }
  /// Eigenvalues of a diagonal Hessian; throws for other representations.
  const Vector &diagonal_values() const;

  /// out = A v. `out` must not alias `v`.
  void apply(const Vector &v, Vector &out) const;
  Vector apply(const Vector &v) const;

  double value(const Vector &x) const;
  Vector gradient(const Vector &x) const;

  /// A as a dense matrix (for small-n oracles and eigensolves).
  DenseMatrix to_dense() const;

 private:
  void check_dim(const Vector &v, const char *what) const;

  Hessian hessian_;
  Vector b_;
};

/// Componentwise limits l <= x <= u; +-inf marks a free side.
class BoxBounds {
 public:
  BoxBounds(Vector lower, Vector upper);

  static BoxBounds unbounded(Eigen::Index n);
  static BoxBounds uniform(Eigen::Index n, double lower, double upper);

  Eigen::Index dim() const noexcept { return lower_.size(); }
  const Vector &lower() const noexcept { return lower_; }
  const Vector &upper() const noexcept { return upper_; }

  Vector project(const Vector &x) const;
  bool contains(const Vector &x) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// max(l, min(u, x)) componentwise.
Vector project_box(const BoxBounds &bounds, const Vector &x);

/// Returns A v.
Vector hessian_apply(const QuadraticProblem &p, const Vector &v);

/// Returns A x - b.
Vector gradient(const QuadraticProblem &p, const Vector &x);

/// Smooth objective with evaluation counters. Each solver run owns its own
/// instance; the counters are the only mutable state.
class ObjectiveOracle {
 public:
  using ValueFn = std::function<double(const Vector &)>;
  using GradientFn = std::function<Vector(const Vector &)>;

  ObjectiveOracle(Eigen::Index dim, ValueFn f, GradientFn g);

  /// Oracle over a shared quadratic problem.
  static ObjectiveOracle quadratic(std::shared_ptr<const QuadraticProblem> p);

  Eigen::Index dim() const noexcept { return dim_; }

  double eval_f(const Vector &x);
  Vector eval_grad(const Vector &x);

  std::int64_t eval_count() const noexcept { return eval_count_; }
  std::int64_t grad_count() const noexcept { return grad_count_; }

 private:
  Eigen::Index dim_;
  ValueFn f_;
  GradientFn g_;
  std::int64_t eval_count_ = 0;
  std::int64_t grad_count_ = 0;
};

}  // namespace gradspec
