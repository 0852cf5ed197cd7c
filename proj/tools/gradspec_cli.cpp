#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gradspec/bench.hpp"
#include "gradspec/box_solver.hpp"
#include "gradspec/box_suite.hpp"
#include "gradspec/problem_io.hpp"
#include "gradspec/profile.hpp"
#include "gradspec/qp_engine.hpp"

using namespace gradspec;

namespace {

struct Options {
  std::string problem;
  std::string strategy = "news";
  int h = 10;
  int s = 30;
  double eps = 1e-6;
  std::optional<std::uint64_t> seed;
  int max_iter = 20000;
  std::string out;
  int threads = 1;
  bool retain_gradients = false;
  std::string metric = "iterations";
  std::vector<std::string> inputs;
  std::string plan;
};

// Writes to --out, or stdout when it is empty or "-".
template <class F>
void emit(const std::string &out, F &&write) {
  if (out.empty() || out == "-") {
    write(std::cout);
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorKind::invalid_argument, "cannot write " + out);
  write(f);
}

bool is_suite(const std::string &problem) { return problem.rfind("suite:", 0) == 0; }

int cmd_gen(const Options &o) {
  const ProblemInstance inst = load_problem_file(o.problem, o.seed);
  emit(o.out, [&](std::ostream &os) { os << to_json(inst).dump() << '\n'; });
  return 0;
}

int cmd_solve(const Options &o) {
  if (is_suite(o.problem)) {
    const BoxProblem bp = find_box_problem(o.problem.substr(6));
    BoxRunConfig cfg;
    cfg.variant = parse_box_variant(o.strategy);
    cfg.eps_pg = o.eps;
    cfg.max_iter = o.max_iter;
    cfg.retain_gradients = o.retain_gradients;
    cfg.validate();
    ObjectiveOracle oracle = bp.make_oracle();
    const RunTrace trace = solve_box(oracle, bp.bounds, bp.x1, cfg);
    emit(o.out, [&](std::ostream &os) { write_trace_csv(os, trace); });
    std::cerr << trace_summary(trace).dump() << '\n';
    return 0;
  }
  const ProblemInstance inst = load_problem_file(o.problem, o.seed);
  RunTrace trace;
  if (inst.bounds) {
    BoxRunConfig cfg;
    cfg.variant = parse_box_variant(o.strategy);
    cfg.eps_pg = o.eps;
    cfg.max_iter = o.max_iter;
    cfg.retain_gradients = o.retain_gradients;
    cfg.validate();
    ObjectiveOracle oracle = ObjectiveOracle::quadratic(inst.problem);
    trace = solve_box(oracle, *inst.bounds, inst.x1, cfg);
  } else {
    StrategySpec spec;
    spec.method = parse_method(o.strategy);
    spec.h = o.h;
    spec.s = o.s;
    spec.validate();
    trace = run(*inst.problem, inst.x1, spec,
                RunOptions{o.eps, o.max_iter, o.retain_gradients});
  }
  emit(o.out, [&](std::ostream &os) { write_trace_csv(os, trace); });
  std::cerr << trace_summary(trace).dump() << '\n';
  return 0;
}

int cmd_bench(const Options &o) {
  const ExperimentPlan plan = load_plan_file(o.plan);
  const auto rows = run_plan(plan, o.threads);
  const std::string dir = o.out.empty() ? plan.output_dir : o.out;
  write_plan_outputs(dir, rows, plan.pool_kappa);
  std::cerr << plan.name << ": " << rows.size() << " rows written to " << dir << '\n';
  return 0;
}

int cmd_profile(const Options &o) {
  const ProfileMetric metric = parse_profile_metric(o.metric);
  std::vector<ResultRow> rows;
  for (const auto &path : o.inputs) {
    auto part = read_results_file(path);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const ProfileData data = performance_profile(profile_entries(rows, metric), metric);
  emit(o.out, [&](std::ostream &os) { write_profile_csv(os, data); });
  return 0;
}

int cmd_diag(const Options &o) {
  const ProblemInstance inst = load_problem_file(o.problem, o.seed);
  if (!inst.problem->is_diagonal())
    throw Error(ErrorKind::invalid_argument, "diag needs a diagonal problem");
  StrategySpec spec;
  spec.method = parse_method(o.strategy);
  spec.h = o.h;
  spec.s = o.s;
  spec.validate();
  const RunTrace trace =
      run(*inst.problem, inst.x1, spec, RunOptions{o.eps, o.max_iter, true});
  const auto hist = stepsize_history_diagnostic(trace, *inst.problem);
  const Vector &ev = inst.problem->diagonal_values();
  const double l1 = ev.minCoeff(), ln = ev.maxCoeff();
  emit(o.out, [&](std::ostream &os) {
    os << "k,alpha,bar_alpha,hat_alpha,inv_lambda_1,inv_lambda_n\n";
    os.precision(17);
    for (const auto &d : hist) {
      const auto idx = static_cast<std::size_t>(d.k - 1);
      const double alpha = idx < trace.records.size() ? trace.records[idx].alpha : 0.0;
      os << d.k << ',' << alpha << ',' << d.bar_alpha << ',' << d.hat_alpha << ','
         << 1.0 / l1 << ',' << 1.0 / ln << '\n';
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"gradient methods with spectral stepsizes"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  Options o;

  auto add_problem = [&](CLI::App *c, bool required) {
    auto *opt = c->add_option("--problem", o.problem, "problem JSON file or suite:<name>");
    if (required) opt->required();
    c->add_option("--seed", o.seed, "override the generator seed");
  };
  auto add_run = [&](CLI::App *c) {
    c->add_option("--strategy", o.strategy, "method name or box variant");
    c->add_option("--h", o.h, "long phase length");
    c->add_option("--s", o.s, "short phase length");
    c->add_option("--eps", o.eps, "relative gradient tolerance (box: |P(x-g)-x|_inf)");
    c->add_option("--max-iter", o.max_iter, "iteration cap");
    c->add_flag("--retain-gradients", o.retain_gradients, "keep every gradient");
  };

  auto *gen = app.add_subcommand("gen", "emit an explicit problem JSON");
  add_problem(gen, true);
  gen->add_option("--out", o.out, "output file");

  auto *solve = app.add_subcommand("solve", "run one method, write the trace CSV");
  add_problem(solve, true);
  add_run(solve);
  solve->add_option("--out", o.out, "trace CSV");

  auto *bench = app.add_subcommand("bench", "run an experiment plan");
  bench->add_option("plan", o.plan, "plan JSON")->required();
  bench->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--out", o.out, "output directory (default: the plan's)");

  auto *profile = app.add_subcommand("profile", "performance profiles from result CSVs");
  profile->add_option("inputs", o.inputs, "result CSV files")->required();
  profile->add_option("--metric", o.metric, "iterations or func_evals");
  profile->add_option("--out", o.out, "profile CSV");

  auto *diag = app.add_subcommand("diag", "stepsize history series");
  add_problem(diag, true);
  add_run(diag);
  diag->add_option("--out", o.out, "series CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*solve) return cmd_solve(o);
    if (*bench) return cmd_bench(o);
    if (*profile) return cmd_profile(o);
    if (*diag) return cmd_diag(o);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::invalid_argument:
      case ErrorKind::parse_error:
        return 1;
      default:
        return 2;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
