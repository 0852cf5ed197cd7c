#pragma once

#include <optional>

#include "gradspec/problem.hpp"

namespace gradspec {

/// Pair of quasi-Newton stepsizes; an empty member means its denominator
/// was exactly zero.
struct BBPair {
  std::optional<double> bb1;
  std::optional<double> bb2;
};

/// Rolling memory of the last iterates feeding every stepsize rule.
///
/// After reset(x1, g1) and j-1 calls to advance(), the memory describes
/// iterate k = j:
///   g_cur = g_k, g_prev = g_{k-1}, s_prev = x_k - x_{k-1},
///   y_prev = g_k - g_{k-1}, ybar_prev = y_prev masked where s_prev is zero,
///   alpha_prev = alpha_{k-1}, alpha_prev2 = alpha_{k-2},
///   gnorm_cur = |g_k|, gnorm_prev = |g_{k-1}|, gnorm_prev2 = |g_{k-2}|,
///   bbbar_prev = modified BB pair at index k-1 (built from s_{k-2}).
/// The memory is cold until two iterates exist.
class StepsizeMemory {
 public:
  void reset(const Vector &x1, const Vector &g1);
  /// Moves to the next iterate reached with stepsize `alpha_used`.
  void advance(const Vector &x_next, const Vector &g_next, double alpha_used);

  int iterates() const noexcept { return count_; }
  bool warm() const noexcept { return count_ >= 2; }

  const Vector &x_cur() const noexcept { return x_cur_; }
  const Vector &g_cur() const noexcept { return g_cur_; }
  const Vector &g_prev() const;
  const Vector &s_prev() const;
  const Vector &y_prev() const;
  const Vector &ybar_prev() const;
  double alpha_prev() const;
  double alpha_prev2() const;
  double gnorm_cur() const noexcept { return gnorm_cur_; }
  double gnorm_prev() const;
  double gnorm_prev2() const;
  const BBPair &bbbar_prev() const;

  /// Quadratic track only: alpha^SD_{k-1} and bar-alpha_{k-1} when the
  /// engine has computed them.
  std::optional<double> sd_prev;
  std::optional<double> baralpha_prev;

 private:
  void require(int iterates, const char *what) const;

  int count_ = 0;
  Vector x_cur_, g_cur_, g_prev_, s_prev_, y_prev_, ybar_prev_;
  double alpha_prev_ = 0.0;
  double alpha_prev2_ = 0.0;
  double gnorm_cur_ = 0.0;
  double gnorm_prev_ = 0.0;
  double gnorm_prev2_ = 0.0;
  BBPair bbbar_prev_;
};

/// Exact line search stepsize g'g / g'Ag.
double sd_stepsize(const Vector &g, const QuadraticProblem &p);

/// s's/s'y and s'y/y'y.
BBPair bb_stepsizes(const Vector &s, const Vector &y);
BBPair bb_stepsizes(const StepsizeMemory &mem);

/// |g| / |Ag|.
double aopt_stepsize(const Vector &g, const QuadraticProblem &p);

/// Two-step stepsize from two consecutive exact line search stepsizes and
/// the matching gradient norms.
double yuan_stepsize(double sd_prev, double sd_cur, double gnorm_prev,
                     double gnorm_cur);

/// d'd / d'Ad with d = g_prev/|g_prev| - g_cur/|g_cur|. Throws
/// ErrorKind::degenerate when d vanishes.
double bar_alpha_direct(const Vector &g_prev, const Vector &g_cur,
                        const QuadraticProblem &p);

/// Same as bar_alpha_direct but with d = g_prev/|g_prev| + g_cur/|g_cur|.
double hat_alpha_direct(const Vector &g_prev, const Vector &g_cur,
                        const QuadraticProblem &p);

/// bar_alpha_direct with the Hessian products supplied by the caller, so a
/// running iteration does not pay for an extra product. `hat` selects
/// the hat variant (sum instead of difference).
double bar_alpha_from_products(const Vector &g_prev, const Vector &ag_prev,
                               const Vector &g_cur, const Vector &ag_cur,
                               bool hat = false);

/// |s| / |y|, or |s| / |ybar| when `use_modified_y`.
double p_stepsize(const StepsizeMemory &mem, bool use_modified_y);

/// ybar_i = 0 where s_i == 0, else y_i.
Vector modified_y(const Vector &s, const Vector &y);

/// s's/s'ybar and s'ybar/ybar'ybar.
BBPair bar_bb_stepsizes(const Vector &s, const Vector &ybar);

/// Retarded new stepsize bar-alpha_{k-1} written purely in terms of
/// gradient norms, the modified BB stepsizes and alpha_{k-2}, so it needs
/// no Hessian. Needs three iterates in memory. The value is returned raw:
/// it can be negative for non-quadratic data and the caller branches on
/// its sign. Throws ErrorKind::undefined on a zero denominator.
double bar_alpha_general(const StepsizeMemory &mem);

/// Scalar form of bar_alpha_general.
double bar_alpha_general(double gnorm_km2, double gnorm_km1, double alpha_km2,
                         double bb1bar_km1, double bb2bar_km1,
                         double bb1bar_k);

}  // namespace gradspec
