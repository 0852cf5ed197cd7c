#include "gradspec/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace gradspec {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::cold_memory: return "cold_memory";
    case ErrorKind::undefined: return "undefined";
    case ErrorKind::diverged: return "diverged";
    case ErrorKind::line_search_failure: return "line_search_failure";
    case ErrorKind::parse_error: return "parse_error";
  }
  return "unknown";
}

namespace {

[[noreturn]] void throw_mismatch(const char *what, Eigen::Index expected,
                                 Eigen::Index got) {
  std::ostringstream os;
  os << what << ": expected length " << expected << ", got " << got;
  throw Error(ErrorKind::dimension_mismatch, os.str());
}

Eigen::Index hessian_rows(const Hessian &h) {
  return std::visit(
      [](const auto &m) -> Eigen::Index {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiagonalHessian>)
          return m.values.size();
        else
          return m.matrix.rows();
      },
      h);
}

}  // namespace

QuadraticProblem::QuadraticProblem(Hessian hessian, Vector b)
    : hessian_(std::move(hessian)), b_(std::move(b)) {
  const Eigen::Index n = hessian_rows(hessian_);
  if (n <= 0)
    throw Error(ErrorKind::invalid_argument, "quadratic problem: empty Hessian");
  if (b_.size() != n) throw_mismatch("quadratic problem b", n, b_.size());

  if (const auto *d = std::get_if<DiagonalHessian>(&hessian_)) {
    if (!(d->values.array() > 0.0).all() || !d->values.allFinite())
      throw Error(ErrorKind::invalid_argument,
                  "diagonal Hessian must have strictly positive entries");
  } else if (const auto *m = std::get_if<DenseHessian>(&hessian_)) {
    if (m->matrix.cols() != n)
      throw Error(ErrorKind::invalid_argument, "dense Hessian must be square");
  } else if (const auto *s = std::get_if<SparseHessian>(&hessian_)) {
    if (s->matrix.cols() != n)
      throw Error(ErrorKind::invalid_argument, "sparse Hessian must be square");
  }
}

QuadraticProblem QuadraticProblem::diagonal(Vector eigenvalues, Vector b) {
  return QuadraticProblem(DiagonalHessian{std::move(eigenvalues)}, std::move(b));
}

QuadraticProblem QuadraticProblem::dense(DenseMatrix a, Vector b) {
  return QuadraticProblem(DenseHessian{std::move(a)}, std::move(b));
}

QuadraticProblem QuadraticProblem::sparse(SparseMatrix a, Vector b) {
  a.makeCompressed();
  return QuadraticProblem(SparseHessian{std::move(a)}, std::move(b));
}

const Vector &QuadraticProblem::diagonal_values() const {
  const auto *d = std::get_if<DiagonalHessian>(&hessian_);
  if (!d)
    throw Error(ErrorKind::invalid_argument,
                "operation requires a diagonal Hessian");
  return d->values;
}

void QuadraticProblem::check_dim(const Vector &v, const char *what) const {
  if (v.size() != dim()) throw_mismatch(what, dim(), v.size());
}

void QuadraticProblem::apply(const Vector &v, Vector &out) const {
  check_dim(v, "hessian_apply");
  std::visit(
      [&](const auto &m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiagonalHessian>)
          out = m.values.cwiseProduct(v);
        else
          out.noalias() = m.matrix * v;
      },
      hessian_);
}

Vector QuadraticProblem::apply(const Vector &v) const {
  Vector out(dim());
  apply(v, out);
  return out;
}

double QuadraticProblem::value(const Vector &x) const {
  check_dim(x, "value");
  return 0.5 * x.dot(apply(x)) - b_.dot(x);
}

Vector QuadraticProblem::gradient(const Vector &x) const {
  check_dim(x, "gradient");
  Vector g = apply(x);
  g -= b_;
  return g;
}

DenseMatrix QuadraticProblem::to_dense() const {
  return std::visit(
      [](const auto &m) -> DenseMatrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiagonalHessian>)
          return m.values.asDiagonal();
        else if constexpr (std::is_same_v<T, DenseHessian>)
          return m.matrix;
        else
          return DenseMatrix(m.matrix);
      },
      hessian_);
}

BoxBounds::BoxBounds(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size())
    throw_mismatch("box bounds", lower_.size(), upper_.size());
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) ||
        !(lower_[i] <= upper_[i])) {
      std::ostringstream os;
      os << "box bounds: l[" << i << "] = " << lower_[i] << " exceeds u[" << i
         << "] = " << upper_[i];
      throw Error(ErrorKind::invalid_argument, os.str());
    }
  }
}

BoxBounds BoxBounds::unbounded(Eigen::Index n) {
  return BoxBounds(Vector::Constant(n, -kInf), Vector::Constant(n, kInf));
}

BoxBounds BoxBounds::uniform(Eigen::Index n, double lower, double upper) {
  return BoxBounds(Vector::Constant(n, lower), Vector::Constant(n, upper));
}

Vector BoxBounds::project(const Vector &x) const {
  if (x.size() != dim()) throw_mismatch("project_box", dim(), x.size());
  return x.cwiseMin(upper_).cwiseMax(lower_);
}

bool BoxBounds::contains(const Vector &x) const {
  return x.size() == dim() && (x.array() >= lower_.array()).all() &&
         (x.array() <= upper_.array()).all();
}

Vector project_box(const BoxBounds &bounds, const Vector &x) {
  return bounds.project(x);
}

Vector hessian_apply(const QuadraticProblem &p, const Vector &v) {
  return p.apply(v);
}

Vector gradient(const QuadraticProblem &p, const Vector &x) {
  return p.gradient(x);
}

ObjectiveOracle::ObjectiveOracle(Eigen::Index dim, ValueFn f, GradientFn g)
    : dim_(dim), f_(std::move(f)), g_(std::move(g)) {
  if (dim_ <= 0 || !f_ || !g_)
    throw Error(ErrorKind::invalid_argument, "objective oracle: bad arguments");
}

ObjectiveOracle ObjectiveOracle::quadratic(
    std::shared_ptr<const QuadraticProblem> p) {
  const auto n = p->dim();
  return ObjectiveOracle(
      n, [p](const Vector &x) { return p->value(x); },
      [p](const Vector &x) { return p->gradient(x); });
}

double ObjectiveOracle::eval_f(const Vector &x) {
  if (x.size() != dim_) throw_mismatch("eval_f", dim_, x.size());
  ++eval_count_;
  return f_(x);
}

Vector ObjectiveOracle::eval_grad(const Vector &x) {
  if (x.size() != dim_) throw_mismatch("eval_grad", dim_, x.size());
  ++grad_count_;
  return g_(x);
}

}  // namespace gradspec
