#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "gradspec/box_solver.hpp"
#include "gradspec/qp_engine.hpp"

namespace gradspec {

enum class PlanKind { quadratic, box };

/// One problem family of a plan. Spectrum families (TP1, SET1..SET5) use
/// n, kappas and seeds; LAPLACE_A / LAPLACE_B use grid sizes; box plans
/// name suite problems.
struct PlanProblem {
  std::string family;
  int n = 1000;
  std::vector<double> kappas;
  std::vector<std::uint64_t> seeds;
  std::vector<int> grid_sizes;  // Laplace N values
  std::string basis = "eigen";  // "eigen" or "dense" for SET families
};

struct ExperimentPlan {
  std::string name;
  PlanKind kind = PlanKind::quadratic;
  std::vector<PlanProblem> problems;
  std::vector<StrategySpec> strategies;  // quadratic plans
  std::vector<BoxRunConfig> box_configs;  // box plans
  std::vector<double> tolerances;
  int iter_cap = 20000;
  std::string output_dir;
  bool pool_kappa = false;  // summary averages over kappa as well as seeds

  /// Throws ErrorKind::parse_error naming the offending field.
  void validate() const;
};

/// Parses the JSON plan schema (see README). Errors carry the JSON path.
ExperimentPlan parse_plan(const nlohmann::json &j);
ExperimentPlan load_plan_file(const std::string &path);

struct ResultRow {
  std::string family;
  double kappa = 0.0;
  double eps = 0.0;
  std::string method;
  int h = 0;
  int s = 0;
  std::uint64_t seed = 0;
  int iters = 0;
  std::int64_t func_evals = 0;
  std::string termination;

  bool solved() const { return termination == "gradient_tol"; }
};

bool key_less(const ResultRow &a, const ResultRow &b);

/// Runs every (problem, kappa, seed, strategy, tolerance) cell on a pool of
/// `threads` workers. Rows come back sorted by key; a failed run becomes an
/// iter_cap row.
std::vector<ResultRow> run_plan(const ExperimentPlan &plan, int threads = 1);

/// Iteration counts for several tolerances from a single run to the
/// tightest one. Entry i matches tolerances[i].
std::vector<std::pair<int, Termination>> iterations_per_tolerance(
    const RunTrace &trace, const std::vector<double> &tolerances);

struct SummaryRow {
  std::string family;
  std::string kappa;  // "pooled" when averaged over kappa
  double eps = 0.0;
  std::string method;
  int h = 0;
  int s = 0;
  int runs = 0;
  int solved = 0;
  double mean_iters = 0.0;
  double mean_func_evals = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow> &rows, bool pool_kappa);

inline constexpr const char *kResultHeader =
    "family,kappa,eps,method,h,s,seed,iters,func_evals,termination";
inline constexpr const char *kSummaryHeader =
    "family,kappa,eps,method,h,s,runs,solved,mean_iters,mean_func_evals";

void write_results_csv(std::ostream &os, const std::vector<ResultRow> &rows);
void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows);
/// Throws ErrorKind::parse_error on a bad header or row.
std::vector<ResultRow> read_results_csv(std::istream &is);
std::vector<ResultRow> read_results_file(const std::string &path);

/// Writes results.csv and summary.csv under dir (created if needed).
void write_plan_outputs(const std::string &dir, const std::vector<ResultRow> &rows,
                        bool pool_kappa);

}  // namespace gradspec
