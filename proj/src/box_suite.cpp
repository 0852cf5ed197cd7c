#include "gradspec/box_suite.hpp"

#include <cmath>
#include <memory>

#include "gradspec/generators.hpp"

namespace gradspec {

ObjectiveOracle rosenbrock_oracle(Eigen::Index n) {
  auto f = [](const Vector &x) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double c = 1.0 - x[i];
      sum += 100.0 * a * a + c * c;
    }
    return sum;
  };
  auto g = [](const Vector &x) {
    Vector out = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      out[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
      out[i + 1] += 200.0 * a;
    }
    return out;
  };
  return ObjectiveOracle(n, f, g);
}

namespace {

Vector trig_residuals(const Vector &x) {
  const auto n = x.size();
  const double base = static_cast<double>(n) - x.array().cos().sum();
  Vector r(n);
  for (Eigen::Index i = 0; i < n; ++i)
    r[i] = base + static_cast<double>(i + 1) * (1.0 - std::cos(x[i])) - std::sin(x[i]);
  return r;
}

}  // namespace

ObjectiveOracle trigonometric_oracle(Eigen::Index n) {
  auto f = [](const Vector &x) { return trig_residuals(x).squaredNorm(); };
  auto g = [](const Vector &x) {
    const Vector r = trig_residuals(x);
    const double rsum = r.sum();
    Vector out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double sj = std::sin(x[j]);
      out[j] = 2.0 * sj * rsum +
               2.0 * r[j] * (static_cast<double>(j + 1) * sj - std::cos(x[j]));
    }
    return out;
  };
  return ObjectiveOracle(n, f, g);
}

namespace {

std::function<ObjectiveOracle()> quadratic_factory(QuadraticProblem p) {
  auto shared = std::make_shared<const QuadraticProblem>(std::move(p));
  return [shared] { return ObjectiveOracle::quadratic(shared); };
}

BoxProblem rotated_qp(std::string name, std::string description, SpectrumFamily family,
                      double kappa, std::uint64_t seed,
                      const std::function<BoxBounds(const Vector &)> &bounds_from_solution) {
  constexpr int n = 200;
  const SpectrumSpec spec{family, n, kappa, seed};
  const SpectrumSample sample = sample_spectrum(spec);
  // Unconstrained minimizer Q V^-1 Q' b.
  const Vector x_star =
      sample.apply_q(sample.apply_qt(sample.b).cwiseQuotient(sample.eigenvalues));
  return {std::move(name), std::move(description), seed,
          quadratic_factory(rotated_dense(sample)), bounds_from_solution(x_star),
          Vector::Ones(n)};
}

}  // namespace

std::vector<BoxProblem> synthetic_box_suite() {
  std::vector<BoxProblem> suite;

  suite.push_back(rotated_qp(
      "qp_set1_interior", "rotated SET1 QP, box of half-width 1 around the minimizer",
      SpectrumFamily::SET1, 1e3, 101, [](const Vector &xs) {
        return BoxBounds(xs.array() - 1.0, xs.array() + 1.0);
      }));
  suite.push_back(rotated_qp("qp_set2_boundary", "rotated SET2 QP in [-0.5, 0.5]^n",
                             SpectrumFamily::SET2, 1e3, 102, [](const Vector &xs) {
                               return BoxBounds::uniform(xs.size(), -0.5, 0.5);
                             }));
  suite.push_back(rotated_qp(
      "qp_set3_mixed", "rotated SET3 QP, even coordinates nonnegative, odd free",
      SpectrumFamily::SET3, 1e3, 103, [](const Vector &xs) {
        Vector lo(xs.size());
        for (Eigen::Index i = 0; i < xs.size(); ++i) lo[i] = i % 2 == 0 ? 0.0 : -kInf;
        return BoxBounds(lo, Vector::Constant(xs.size(), kInf));
      }));
  suite.push_back(rotated_qp("qp_set4_nonneg", "rotated SET4 QP with x >= 0",
                             SpectrumFamily::SET4, 1e3, 104, [](const Vector &xs) {
                               return BoxBounds(Vector::Zero(xs.size()),
                                                Vector::Constant(xs.size(), kInf));
                             }));
  suite.push_back(rotated_qp("qp_set5_box", "rotated SET5 QP in [-1, 2]^n",
                             SpectrumFamily::SET5, 1e4, 105, [](const Vector &xs) {
                               return BoxBounds::uniform(xs.size(), -1.0, 2.0);
                             }));
  {
    constexpr int n = 500;
    auto p = gen_diag_problem({SpectrumFamily::TP1, n, 500.0, 106});
    suite.push_back({"qp_tp1_shifted", "diagonal TP1 QP (b = 0) in [0.5, 2]^n", 106,
                     quadratic_factory(std::move(p)), BoxBounds::uniform(n, 0.5, 2.0),
                     Vector::Ones(n)});
  }
  {
    constexpr int n = 100;
    Vector x1(n);
    for (int i = 0; i < n; ++i) x1[i] = i % 2 == 0 ? -1.2 : 1.0;
    suite.push_back({"rosenbrock_100", "generalized Rosenbrock in [-2, 2]^n", 0,
                     [] { return rosenbrock_oracle(n); }, BoxBounds::uniform(n, -2.0, 2.0),
                     x1});
    suite.push_back({"rosenbrock_100_capped", "generalized Rosenbrock in [-2, 0.5]^n", 0,
                     [] { return rosenbrock_oracle(n); }, BoxBounds::uniform(n, -2.0, 0.5),
                     x1});
  }
  suite.push_back({"trig_100", "trigonometric function in [-1, 1]^n", 0,
                   [] { return trigonometric_oracle(100); },
                   BoxBounds::uniform(100, -1.0, 1.0), Vector::Constant(100, 0.01)});
  suite.push_back({"trig_200_shifted", "trigonometric function in [0.1, 1]^n", 0,
                   [] { return trigonometric_oracle(200); },
                   BoxBounds::uniform(200, 0.1, 1.0), Vector::Constant(200, 0.5)});
  {
    auto lap = gen_laplace3d({LaplaceVariant::A, 10});
    const auto n = lap.problem.dim();
    suite.push_back({"laplace_a_obstacle", "Laplace1(a), N = 10, with x >= 0", 0,
                     quadratic_factory(std::move(lap.problem)),
                     BoxBounds(Vector::Zero(n), Vector::Constant(n, kInf)),
                     Vector::Zero(n)});
  }
  {
    auto lap = gen_laplace3d({LaplaceVariant::B, 12});
    const auto n = lap.problem.dim();
    suite.push_back({"laplace_b_box", "Laplace1(b), N = 12, in [-0.005, 0.005]^n", 0,
                     quadratic_factory(std::move(lap.problem)),
                     BoxBounds::uniform(n, -0.005, 0.005), Vector::Zero(n)});
  }
  return suite;
}

BoxProblem find_box_problem(const std::string &name) {
  for (auto &p : synthetic_box_suite())
    if (p.name == name) return p;
  throw Error(ErrorKind::invalid_argument, "unknown suite problem '" + name + "'");
}

}  // namespace gradspec
