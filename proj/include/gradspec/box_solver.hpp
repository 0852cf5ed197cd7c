#pragma once

#include <deque>
#include <string_view>

#include "gradspec/problem.hpp"
#include "gradspec/qp_engine.hpp"

namespace gradspec {

enum class BoxVariant { A1, A1_BB1, A1_BB2, SPG };

std::string_view to_string(BoxVariant v) noexcept;
BoxVariant parse_box_variant(std::string_view name);

struct BoxRunConfig {
  double alpha_min = 1e-30;
  double alpha_max = 1e30;
  int h = 10;
  int s = 4;
  int M = 8;
  double sigma = 1e-4;
  double eps_pg = 1e-6;
  int max_iter = 50000;
  BoxVariant variant = BoxVariant::A1;
  /// Use bar-alpha_{k-1} instead of bar-alpha_k in the short phase.
  bool retarded_bar = false;
  bool retain_gradients = false;

  // SPG baseline parameters (its published defaults).
  int spg_M = 10;
  double spg_gamma = 1e-4;
  double spg_sigma1 = 0.1;
  double spg_sigma2 = 0.9;

  void validate() const;
};

/// Reference values of the adaptive nonmonotone line search.
///
/// f_best is the best value seen, f_c the largest value since the last
/// improvement, f_r the reference value the unit step is tested against and
/// L the number of iterations without improvement. recent holds the last M
/// objective values (current iterate included).
struct LineSearchState {
  double f_r = 0.0;
  double f_best = 0.0;
  double f_c = 0.0;
  int L = 0;
  int M = 8;
  double sigma = 1e-4;
  std::deque<double> recent;

  /// State at the first iterate: f_r = f_best = f_c = f1, L = 0.
  static LineSearchState initial(double f1, int M, double sigma);

  double f_max() const;
};

/// Returns the state after accepting an iterate with value f_new.
LineSearchState update_reference(LineSearchState ls, double f_new);

/// d = P(x - alpha g) - x.
Vector direction(const Vector &x, const Vector &g, double alpha,
                 const BoxBounds &bounds);

struct SearchResult {
  double lambda = 1.0;
  double f_new = 0.0;
  bool accepted_unit = true;
  int backtracks = 0;
  Vector x_new;
};

inline constexpr double kBacktrackFactor = 0.5;
inline constexpr int kMaxBacktracks = 50;

/// Unit step if f(x + d) <= f_r + sigma g'd; otherwise halves lambda until
/// f(x + lambda d) <= min(f_max, f_r) + sigma lambda g'd. Throws
/// invalid_argument when g'd >= 0 and line_search_failure after 50
/// backtracks. With bounds given, trial points are clamped to the box so
/// rounding in x + lambda d never leaves it.
SearchResult nonmonotone_search(ObjectiveOracle &oracle, const Vector &x,
                                const Vector &d, const Vector &g,
                                const LineSearchState &ls,
                                const BoxBounds *bounds = nullptr);

/// |P(x - g) - x|_inf.
double projected_gradient_norm(const Vector &x, const Vector &g,
                               const BoxBounds &bounds);

/// Gradient projection with the new stepsize and adaptive nonmonotone line
/// search (variants A1, A1-BB1, A1-BB2). An infeasible x1 is projected
/// first. The trace's gnorm column holds |P(x - g) - x|_inf. Dispatches to
/// solve_spg when cfg.variant is SPG.
RunTrace solve_box(ObjectiveOracle &oracle, const BoxBounds &bounds,
                   const Vector &x1, const BoxRunConfig &cfg);

/// Spectral projected gradient baseline: safeguarded BB1 stepsize,
/// projection arc direction and nonmonotone Armijo search over the last
/// spg_M values with safeguarded quadratic interpolation.
RunTrace solve_spg(ObjectiveOracle &oracle, const BoxBounds &bounds,
                   const Vector &x1, const BoxRunConfig &cfg);

/// Re-checks the acceptance inequality of every recorded line search;
/// returns the index of the first violating iteration or -1.
int first_unsound_step(const RunTrace &trace, double rel_tol = 1e-12);

}  // namespace gradspec
