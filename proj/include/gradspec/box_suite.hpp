#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gradspec/problem.hpp"

namespace gradspec {

/// Generalized Rosenbrock: sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
ObjectiveOracle rosenbrock_oracle(Eigen::Index n);

/// Trigonometric sum of squares:
/// f_i = n - sum_j cos x_j + i (1 - cos x_i) - sin x_i, f = sum_i f_i^2.
ObjectiveOracle trigonometric_oracle(Eigen::Index n);

/// One entry of the synthetic bound-constrained suite. make_oracle returns
/// a fresh oracle with zeroed counters on every call.
struct BoxProblem {
  std::string name;
  std::string description;
  std::uint64_t seed = 0;
  std::function<ObjectiveOracle()> make_oracle;
  BoxBounds bounds;
  Vector x1;
};

/// The twelve-problem synthetic suite: convex box QPs from the spectrum
/// generators with interior, boundary and mixed solutions, generalized
/// Rosenbrock, trigonometric problems and bound-constrained Laplacians.
std::vector<BoxProblem> synthetic_box_suite();

/// Look up a suite problem by name; throws invalid_argument if absent.
BoxProblem find_box_problem(const std::string &name);

}  // namespace gradspec
