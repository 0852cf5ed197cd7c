#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "gradspec/problem.hpp"

namespace gradspec {

/// A problem ready to run: operator, starting point and optional bounds.
struct ProblemInstance {
  std::string name;
  std::shared_ptr<const QuadraticProblem> problem;
  Vector x1;
  std::optional<BoxBounds> bounds;
  std::optional<Vector> x_star;
  double lambda_min = 0.0;  // 0 when unknown
  double lambda_max = 0.0;
};

/// Builds a problem from its JSON description.
///
///   {"kind": "diag",  "eigenvalues": [...]}
///   {"kind": "diag",  "family": "TP1"|"SET1".."SET5", "n": .., "kappa": .., "seed": ..}
///   {"kind": "dense", "matrix": [[...], ...]}
///   {"kind": "dense", "family": "SET1", "n": .., "kappa": .., "seed": ..,
///                     "basis": "dense"|"eigen"}
///   {"kind": "sparse", "n": .., "entries": [[i, j, v], ...]}
///   {"kind": "laplace3d", "variant": "A"|"B", "N": ..}
///
/// Optional keys: "b" (array, or {"kind": "random", "seed": s,
/// "range": [lo, hi]}), "x0" (array, "ones" or "zeros"), "bounds"
/// ({"lower": number|array|null, "upper": number|array|null}; null means
/// unbounded). `seed_override` replaces the generator seed of parametric
/// problems. Throws ErrorKind::parse_error with the offending key.
ProblemInstance load_problem(const nlohmann::json &j,
                             std::optional<std::uint64_t> seed_override = {});

ProblemInstance load_problem_file(const std::string &path,
                                  std::optional<std::uint64_t> seed_override = {});

/// Explicit description of an instance (eigenvalues, matrix or sparse
/// entries written out), loadable by load_problem.
nlohmann::json to_json(const ProblemInstance &inst);

/// Parametric description of a generated spectrum problem.
nlohmann::json spectrum_problem_json(const std::string &family, int n, double kappa,
                                     std::uint64_t seed, const std::string &basis);

}  // namespace gradspec
