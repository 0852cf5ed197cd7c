#include "gradspec/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "gradspec/box_suite.hpp"
#include "gradspec/generators.hpp"

namespace gradspec {

using nlohmann::json;

namespace {

[[noreturn]] void plan_error(const std::string &path, const std::string &msg) {
  throw Error(ErrorKind::parse_error, "plan" + path + ": " + msg);
}

bool is_laplace(const std::string &family) {
  return family == "LAPLACE_A" || family == "LAPLACE_B";
}

std::vector<std::uint64_t> parse_seeds(const json &j, const std::string &path) {
  std::vector<std::uint64_t> seeds;
  if (j.is_array()) {
    for (const auto &s : j) {
      if (!s.is_number_unsigned()) plan_error(path, "seeds must be nonnegative integers");
      seeds.push_back(s.get<std::uint64_t>());
    }
  } else if (j.is_object()) {
    const auto from = j.value("from", std::uint64_t{1});
    const auto count = j.value("count", 0);
    if (count <= 0) plan_error(path + ".count", "must be positive");
    for (int i = 0; i < count; ++i) seeds.push_back(from + static_cast<std::uint64_t>(i));
  } else {
    plan_error(path, "expected an array or {\"from\": .., \"count\": ..}");
  }
  return seeds;
}

template <class T>
std::vector<T> scalar_or_list(const json &j, const std::string &path) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const auto &v : j) {
      if (!v.is_number()) plan_error(path, "expected numbers");
      out.push_back(v.get<T>());
    }
  } else if (j.is_number()) {
    out.push_back(j.get<T>());
  } else {
    plan_error(path, "expected a number or a list of numbers");
  }
  return out;
}

PlanProblem parse_problem(const json &j, PlanKind kind, const std::string &path) {
  PlanProblem p;
  if (kind == PlanKind::box) {
    if (j.is_string()) {
      p.family = j.get<std::string>();
    } else if (j.is_object() && j.contains("name")) {
      p.family = j.at("name").get<std::string>();
    } else {
      plan_error(path, "box problems are suite names or {\"name\": ..}");
    }
    return p;
  }
  if (!j.is_object()) plan_error(path, "expected an object");
  if (!j.contains("family")) plan_error(path + ".family", "missing");
  p.family = j.at("family").get<std::string>();
  for (auto &c : p.family) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (is_laplace(p.family)) {
    if (!j.contains("N")) plan_error(path + ".N", "missing");
    p.grid_sizes = scalar_or_list<int>(j.at("N"), path + ".N");
    p.seeds = {0};
    return p;
  }
  try {
    parse_spectrum_family(p.family);
  } catch (const Error &) {
    plan_error(path + ".family", "unknown family '" + p.family + "'");
  }
  p.n = j.value("n", 1000);
  if (!j.contains("kappa")) plan_error(path + ".kappa", "missing");
  p.kappas = scalar_or_list<double>(j.at("kappa"), path + ".kappa");
  if (!j.contains("seeds")) plan_error(path + ".seeds", "missing");
  p.seeds = parse_seeds(j.at("seeds"), path + ".seeds");
  p.basis = j.value("basis", "eigen");
  if (p.basis != "eigen" && p.basis != "dense")
    plan_error(path + ".basis", "expected \"eigen\" or \"dense\"");
  return p;
}

void parse_strategy(const json &j, std::vector<StrategySpec> &out, const std::string &path) {
  if (!j.is_object() || !j.contains("method")) plan_error(path + ".method", "missing");
  StrategySpec base;
  try {
    base.method = parse_method(j.at("method").get<std::string>());
  } catch (const Error &e) {
    plan_error(path + ".method", e.what());
  }
  base.tau = j.value("tau", base.tau);
  base.abb_window = j.value("window", base.abb_window);
  std::vector<std::pair<int, int>> pairs;
  if (j.contains("hs")) {
    for (const auto &hs : j.at("hs")) {
      if (!hs.is_array() || hs.size() != 2) plan_error(path + ".hs", "expected [[h, s], ...]");
      pairs.emplace_back(hs[0].get<int>(), hs[1].get<int>());
    }
  } else if (j.contains("h") || j.contains("s")) {
    pairs.emplace_back(j.value("h", base.h), j.value("s", base.s));
  } else {
    pairs.emplace_back(base.h, base.s);
  }
  for (auto [h, s] : pairs) {
    StrategySpec spec = base;
    spec.h = h;
    spec.s = s;
    try {
      spec.validate();
    } catch (const Error &e) {
      plan_error(path, e.what());
    }
    out.push_back(spec);
  }
}

BoxRunConfig parse_box_config(const json &j, const std::string &path) {
  if (!j.is_object() || !j.contains("variant")) plan_error(path + ".variant", "missing");
  BoxRunConfig cfg;
  try {
    cfg.variant = parse_box_variant(j.at("variant").get<std::string>());
  } catch (const Error &e) {
    plan_error(path + ".variant", e.what());
  }
  cfg.h = j.value("h", cfg.h);
  cfg.s = j.value("s", cfg.s);
  cfg.M = j.value("M", cfg.M);
  cfg.sigma = j.value("sigma", cfg.sigma);
  cfg.retarded_bar = j.value("retarded_bar", cfg.retarded_bar);
  try {
    cfg.validate();
  } catch (const Error &e) {
    plan_error(path, e.what());
  }
  return cfg;
}

int reported_h(const StrategySpec &s) { return uses_cycle(s.method) ? s.h : 0; }
int reported_s(const StrategySpec &s) { return uses_cycle(s.method) ? s.s : 0; }

// A generated quadratic instance shared by all strategies run on it.
struct Instance {
  std::string family;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  std::shared_ptr<const QuadraticProblem> problem;
  Vector x1;
};

Instance make_instance(const PlanProblem &pp, double kappa_or_n, std::uint64_t seed) {
  Instance inst;
  inst.seed = seed;
  if (is_laplace(pp.family)) {
    const int N = static_cast<int>(kappa_or_n);
    const LaplaceSpec spec{pp.family == "LAPLACE_A" ? LaplaceVariant::A : LaplaceVariant::B, N};
    auto lap = gen_laplace3d(spec);
    inst.family = pp.family + "_" + std::to_string(N);
    inst.kappa = laplace_lambda_max(N) / laplace_lambda_min(N);
    inst.x1 = Vector::Zero(lap.problem.dim());
    inst.problem = std::make_shared<QuadraticProblem>(std::move(lap.problem));
    return inst;
  }
  const SpectrumSpec spec{parse_spectrum_family(pp.family), pp.n, kappa_or_n, seed};
  spec.validate();
  inst.family = pp.family;
  inst.kappa = kappa_or_n;
  const SpectrumSample sample = sample_spectrum(spec);
  const auto n = static_cast<Eigen::Index>(pp.n);
  if (spec.family == SpectrumFamily::TP1) {
    inst.problem = std::make_shared<QuadraticProblem>(
        QuadraticProblem::diagonal(sample.eigenvalues, sample.b));
    inst.x1 = Vector::Ones(n);
  } else if (pp.basis == "eigen") {
    inst.problem = std::make_shared<QuadraticProblem>(rotated_in_eigenbasis(sample));
    inst.x1 = sample.apply_qt(Vector::Ones(n));
  } else {
    inst.problem = std::make_shared<QuadraticProblem>(rotated_dense(sample));
    inst.x1 = Vector::Ones(n);
  }
  return inst;
}

template <class Job>
void run_pool(std::size_t count, int threads, Job job) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  if (workers == 1 || count <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(worker);
}

std::vector<ResultRow> run_quadratic_plan(const ExperimentPlan &plan, int threads) {
  struct Cell {
    const PlanProblem *pp;
    double kappa_or_n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto &pp : plan.problems) {
    if (is_laplace(pp.family)) {
      for (int N : pp.grid_sizes) cells.push_back({&pp, static_cast<double>(N), 0});
    } else {
      for (double kappa : pp.kappas)
        for (auto seed : pp.seeds) cells.push_back({&pp, kappa, seed});
    }
  }
  std::vector<Instance> instances(cells.size());
  run_pool(cells.size(), threads, [&](std::size_t i) {
    instances[i] = make_instance(*cells[i].pp, cells[i].kappa_or_n, cells[i].seed);
  });

  const double tightest = *std::min_element(plan.tolerances.begin(), plan.tolerances.end());
  const std::size_t nstrat = plan.strategies.size();
  std::vector<std::vector<ResultRow>> out(instances.size() * nstrat);
  run_pool(out.size(), threads, [&](std::size_t job) {
    const Instance &inst = instances[job / nstrat];
    const StrategySpec &spec = plan.strategies[job % nstrat];
    std::vector<std::pair<int, Termination>> counts;
    try {
      const RunTrace trace = run(*inst.problem, inst.x1, spec, tightest, plan.iter_cap);
      counts = iterations_per_tolerance(trace, plan.tolerances);
    } catch (const Error &) {
      counts.assign(plan.tolerances.size(), {plan.iter_cap, Termination::iter_cap});
    }
    auto &rows = out[job];
    for (std::size_t t = 0; t < plan.tolerances.size(); ++t) {
      ResultRow r;
      r.family = inst.family;
      r.kappa = inst.kappa;
      r.eps = plan.tolerances[t];
      r.method = std::string(to_string(spec.method));
      r.h = reported_h(spec);
      r.s = reported_s(spec);
      r.seed = inst.seed;
      r.iters = counts[t].first;
      // Two products at the start, one per iteration.
      r.func_evals = counts[t].first + 2;
      r.termination = std::string(to_string(counts[t].second));
      rows.push_back(std::move(r));
    }
  });
  std::vector<ResultRow> rows;
  for (auto &v : out) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

std::vector<ResultRow> run_box_plan(const ExperimentPlan &plan, int threads) {
  std::vector<BoxProblem> problems;
  for (const auto &pp : plan.problems) {
    if (pp.family == "all" || pp.family == "suite:all") {
      for (auto &p : synthetic_box_suite()) problems.push_back(std::move(p));
    } else {
      std::string name = pp.family;
      if (name.rfind("suite:", 0) == 0) name = name.substr(6);
      problems.push_back(find_box_problem(name));
    }
  }
  struct Job {
    std::size_t problem;
    std::size_t config;
    std::size_t tol;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (std::size_t c = 0; c < plan.box_configs.size(); ++c)
      for (std::size_t t = 0; t < plan.tolerances.size(); ++t) jobs.push_back({p, c, t});
  std::vector<ResultRow> rows(jobs.size());
  run_pool(jobs.size(), threads, [&](std::size_t i) {
    const BoxProblem &bp = problems[jobs[i].problem];
    BoxRunConfig cfg = plan.box_configs[jobs[i].config];
    cfg.eps_pg = plan.tolerances[jobs[i].tol];
    cfg.max_iter = plan.iter_cap;
    ResultRow &r = rows[i];
    r.family = bp.name;
    r.kappa = 0.0;
    r.eps = cfg.eps_pg;
    r.method = std::string(to_string(cfg.variant));
    r.h = cfg.variant == BoxVariant::SPG ? 0 : cfg.h;
    r.s = cfg.variant == BoxVariant::SPG ? 0 : cfg.s;
    r.seed = bp.seed;
    ObjectiveOracle oracle = bp.make_oracle();
    try {
      const RunTrace trace = solve_box(oracle, bp.bounds, bp.x1, cfg);
      r.iters = trace.iterations;
      r.func_evals = trace.func_evals;
      r.termination = std::string(to_string(trace.termination));
    } catch (const Error &) {
      r.iters = plan.iter_cap;
      r.func_evals = oracle.eval_count();
      r.termination = std::string(to_string(Termination::iter_cap));
    }
  });
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_mean(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string &s, const std::string &where) {
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception &) {
      throw Error(ErrorKind::parse_error, where + ": bad number '" + s + "'");
    }
  } else {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw Error(ErrorKind::parse_error, where + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (problems.empty()) plan_error(".problems", "must not be empty");
  if (kind == PlanKind::quadratic && strategies.empty())
    plan_error(".strategies", "must not be empty");
  if (kind == PlanKind::box && box_configs.empty())
    plan_error(".strategies", "must not be empty");
  if (tolerances.empty()) plan_error(".tolerances", "must not be empty");
  for (double t : tolerances)
    if (!(t > 0.0) || !std::isfinite(t)) plan_error(".tolerances", "must be positive");
  if (iter_cap < 1) plan_error(".iter_cap", "must be positive");
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const auto &p = problems[i];
    const std::string path = ".problems[" + std::to_string(i) + "]";
    if (kind == PlanKind::box) continue;
    if (is_laplace(p.family)) {
      if (p.grid_sizes.empty()) plan_error(path + ".N", "must not be empty");
      for (int N : p.grid_sizes)
        if (N < 2) plan_error(path + ".N", "must be at least 2");
      continue;
    }
    if (p.kappas.empty()) plan_error(path + ".kappa", "must not be empty");
    if (p.seeds.empty()) plan_error(path + ".seeds", "must not be empty");
    for (double kappa : p.kappas) {
      try {
        SpectrumSpec{parse_spectrum_family(p.family), p.n, kappa, 1}.validate();
      } catch (const Error &e) {
        plan_error(path, e.what());
      }
    }
  }
}

ExperimentPlan parse_plan(const json &j) {
  if (!j.is_object()) plan_error("", "expected a JSON object");
  ExperimentPlan plan;
  try {
    plan.name = j.value("name", "plan");
    const std::string kind = j.value("kind", "quadratic");
    if (kind == "quadratic") plan.kind = PlanKind::quadratic;
    else if (kind == "box") plan.kind = PlanKind::box;
    else plan_error(".kind", "expected \"quadratic\" or \"box\"");

    if (!j.contains("problems") || !j.at("problems").is_array())
      plan_error(".problems", "missing or not an array");
    const auto &probs = j.at("problems");
    for (std::size_t i = 0; i < probs.size(); ++i)
      plan.problems.push_back(
          parse_problem(probs[i], plan.kind, ".problems[" + std::to_string(i) + "]"));

    if (!j.contains("strategies") || !j.at("strategies").is_array())
      plan_error(".strategies", "missing or not an array");
    const auto &strats = j.at("strategies");
    for (std::size_t i = 0; i < strats.size(); ++i) {
      const std::string path = ".strategies[" + std::to_string(i) + "]";
      if (plan.kind == PlanKind::quadratic)
        parse_strategy(strats[i], plan.strategies, path);
      else
        plan.box_configs.push_back(parse_box_config(strats[i], path));
    }

    if (!j.contains("tolerances")) plan_error(".tolerances", "missing");
    plan.tolerances = scalar_or_list<double>(j.at("tolerances"), ".tolerances");
    plan.iter_cap = j.value("iter_cap", plan.kind == PlanKind::box ? 50000 : 20000);
    plan.output_dir = j.value("output_dir", "results/" + plan.name);
    plan.pool_kappa = j.value("pool_kappa", false);
  } catch (const json::exception &e) {
    plan_error("", e.what());
  }
  plan.validate();
  return plan;
}

ExperimentPlan load_plan_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open plan file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::parse_error, path + ": " + e.what());
  }
  try {
    return parse_plan(j);
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

bool key_less(const ResultRow &a, const ResultRow &b) {
  return std::tie(a.family, a.kappa, a.eps, a.method, a.h, a.s, a.seed) <
         std::tie(b.family, b.kappa, b.eps, b.method, b.h, b.s, b.seed);
}

std::vector<std::pair<int, Termination>> iterations_per_tolerance(
    const RunTrace &trace, const std::vector<double> &tolerances) {
  std::vector<std::pair<int, Termination>> out;
  for (double eps : tolerances) {
    const double target = eps * trace.gnorm1;
    std::optional<int> hit;
    for (const auto &r : trace.records) {
      if (r.gnorm <= target) {
        hit = r.k - 1;
        break;
      }
    }
    if (!hit && trace.final_gnorm <= target) hit = trace.iterations;
    if (hit)
      out.emplace_back(*hit, Termination::gradient_tol);
    else
      out.emplace_back(trace.iterations, Termination::iter_cap);
  }
  return out;
}

std::vector<ResultRow> run_plan(const ExperimentPlan &plan, int threads) {
  plan.validate();
  auto rows = plan.kind == PlanKind::quadratic ? run_quadratic_plan(plan, threads)
                                               : run_box_plan(plan, threads);
  std::stable_sort(rows.begin(), rows.end(), key_less);
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow> &rows, bool pool_kappa) {
  using Key = std::tuple<std::string, std::string, double, std::string, int, int>;
  struct Acc {
    int runs = 0, solved = 0;
    double iters = 0.0, fevals = 0.0;
  };
  std::map<Key, Acc> groups;
  for (const auto &r : rows) {
    const std::string kappa = pool_kappa ? "pooled" : format_short(r.kappa);
    auto &a = groups[{r.family, kappa, r.eps, r.method, r.h, r.s}];
    ++a.runs;
    a.solved += r.solved() ? 1 : 0;
    a.iters += r.iters;
    a.fevals += static_cast<double>(r.func_evals);
  }
  std::vector<SummaryRow> out;
  for (const auto &[key, a] : groups) {
    SummaryRow s;
    std::tie(s.family, s.kappa, s.eps, s.method, s.h, s.s) = key;
    s.runs = a.runs;
    s.solved = a.solved;
    s.mean_iters = a.iters / a.runs;
    s.mean_func_evals = a.fevals / a.runs;
    out.push_back(std::move(s));
  }
  return out;
}

void write_results_csv(std::ostream &os, const std::vector<ResultRow> &rows) {
  os << kResultHeader << '\n';
  for (const auto &r : rows)
    os << r.family << ',' << format_double(r.kappa) << ',' << format_double(r.eps) << ','
       << r.method << ',' << r.h << ',' << r.s << ',' << r.seed << ',' << r.iters << ','
       << r.func_evals << ',' << r.termination << '\n';
}

void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows) {
  os << kSummaryHeader << '\n';
  for (const auto &r : rows)
    os << r.family << ',' << r.kappa << ',' << format_short(r.eps) << ',' << r.method << ','
       << r.h << ',' << r.s << ',' << r.runs << ',' << r.solved << ','
       << format_mean(r.mean_iters) << ',' << format_mean(r.mean_func_evals) << '\n';
}

std::vector<ResultRow> read_results_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::parse_error, "results: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultHeader)
    throw Error(ErrorKind::parse_error, "results: unexpected header '" + line + "'");
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    const std::string where = "results line " + std::to_string(lineno);
    if (f.size() != 10) throw Error(ErrorKind::parse_error, where + ": expected 10 fields");
    ResultRow r;
    r.family = f[0];
    r.kappa = parse_number<double>(f[1], where);
    r.eps = parse_number<double>(f[2], where);
    r.method = f[3];
    r.h = parse_number<int>(f[4], where);
    r.s = parse_number<int>(f[5], where);
    r.seed = parse_number<std::uint64_t>(f[6], where);
    r.iters = parse_number<int>(f[7], where);
    r.func_evals = parse_number<std::int64_t>(f[8], where);
    r.termination = f[9];
    if (r.termination != "gradient_tol" && r.termination != "iter_cap")
      throw Error(ErrorKind::parse_error, where + ": unknown termination '" + f[9] + "'");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_results_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open results file " + path);
  try {
    return read_results_csv(in);
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_plan_outputs(const std::string &dir, const std::vector<ResultRow> &rows,
                        bool pool_kappa) {
  std::filesystem::create_directories(dir);
  std::ofstream raw(std::filesystem::path(dir) / "results.csv");
  write_results_csv(raw, rows);
  std::ofstream summary(std::filesystem::path(dir) / "summary.csv");
  write_summary_csv(summary, summarize(rows, pool_kappa));
}

}  // namespace gradspec
