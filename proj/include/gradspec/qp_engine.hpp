#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gradspec/problem.hpp"

namespace gradspec {

enum class Method {
  SD,
  BB1,
  BB2,
  DY,
  SDC,
  ABBMIN2,
  AOPT,
  AOPT_RETARD,
  NEWS0,  // AOPT long steps, min{AOPT, bar-alpha_k} short steps
  NEWS,   // same with the retarded bar-alpha_{k-1}
  NEWS2,  // retarded AOPT everywhere
  NEWS3,  // BB1 long steps
  NEWS4,  // BB2 long steps
};

std::string_view to_string(Method m) noexcept;
/// Case-insensitive; accepts "news", "abbmin2", "aopt-retard", ...
Method parse_method(std::string_view name);

bool uses_cycle(Method m) noexcept;

struct StrategySpec {
  Method method = Method::NEWS;
  int h = 10;
  int s = 30;
  double tau = 0.9;  // ABBMIN2 ratio threshold
  int abb_window = 5;

  /// Throws ErrorKind::invalid_argument when (h, s, tau, window) are out of
  /// range for the method.
  void validate() const;
};

/// Which rule produced the stepsize of an iteration.
enum class Branch {
  long_step,
  short_step,
  fallback,         // short rule unavailable, long rule used instead
  bb2_fallback,     // box solver: new stepsize nonpositive, modified BB2 used
  curvature_reset,  // box solver: s'y <= 0, stepsize 1/|g|
};

std::string_view to_string(Branch b) noexcept;
Branch parse_branch(std::string_view name);

enum class Termination { gradient_tol, iter_cap };

std::string_view to_string(Termination t) noexcept;

struct IterationRecord {
  int k = 0;
  double f = 0.0;
  double gnorm = 0.0;
  double alpha = 0.0;
  Branch branch = Branch::long_step;
};

/// Line-search bookkeeping of one box-solver iteration, enough to re-check
/// the acceptance inequality after the fact.
struct LineSearchRecord {
  double f_ref = 0.0;   // f_r at the time of the search
  double f_max = 0.0;   // max of the recent window
  double gtd = 0.0;     // g'd
  double lambda = 1.0;  // accepted step length
  double f_new = 0.0;
  double sigma = 0.0;
  bool accepted_unit = true;
  int backtracks = 0;
};

struct RunTrace {
  std::vector<IterationRecord> records;  // one per step taken
  std::vector<LineSearchRecord> line_search;  // box solver only
  /// Box solver: (k, bar-alpha_k) for every value computed in a short phase.
  std::vector<std::pair<int, double>> bar_alpha_log;
  /// g_1 .. g_{iterations+1}; filled only when retention was requested.
  std::vector<Vector> gradients;
  Termination termination = Termination::iter_cap;
  int iterations = 0;
  double gnorm1 = 0.0;
  double final_gnorm = 0.0;
  double final_f = 0.0;
  Vector x_final;
  std::int64_t func_evals = 0;
  std::int64_t grad_evals = 0;
  double cpu_seconds = 0.0;

  double final_gnorm_ratio() const {
    return gnorm1 > 0.0 ? final_gnorm / gnorm1 : 0.0;
  }
};

struct RunOptions {
  double eps = 1e-6;
  int max_iter = 20000;
  bool retain_gradients = false;
};

/// Gradient iteration x_{k+1} = x_k - alpha_k g_k on a quadratic, stopping
/// when |g_k| <= eps |g_1| or after max_iter steps. Iterations are numbered
/// from k = 1; cycle phases are mod(k, h + s).
RunTrace run(const QuadraticProblem &p, const Vector &x1, const StrategySpec &spec,
             const RunOptions &opts);

RunTrace run(const QuadraticProblem &p, const Vector &x1, const StrategySpec &spec,
             double eps, int max_iter);

/// Gradient components along the eigenvectors: column k-1 holds g_k.
/// Needs a diagonal problem and a trace with retained gradients.
DenseMatrix eigencomponents(const RunTrace &trace, const QuadraticProblem &p);

struct StepsizeDiagnostic {
  int k = 0;
  double bar_alpha = 0.0;
  double hat_alpha = 0.0;
};

/// (k, bar-alpha_k, hat-alpha_k) for k >= 2 from the retained gradients.
/// Entries whose direction degenerates are reported as NaN.
std::vector<StepsizeDiagnostic> stepsize_history_diagnostic(const RunTrace &trace,
                                                            const QuadraticProblem &p);

/// CSV with header k,f,gnorm,alpha,branch.
void write_trace_csv(std::ostream &os, const RunTrace &trace);

/// {iterations, termination, final_gnorm_ratio, func_evals, grad_evals,
///  cpu_seconds}.
nlohmann::json trace_summary(const RunTrace &trace);

}  // namespace gradspec
