#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "gradspec/bench.hpp"
#include "gradspec/generators.hpp"
#include "gradspec/problem_io.hpp"
#include "gradspec/profile.hpp"

using namespace gradspec;
using nlohmann::json;

namespace {

json small_plan() {
  return json::parse(R"({
    "name": "small",
    "problems": [
      {"family": "SET1", "n": 100, "kappa": [1e3, 1e4], "seeds": {"from": 1, "count": 3}},
      {"family": "TP1", "n": 100, "kappa": 100, "seeds": [4, 5]}
    ],
    "strategies": [
      {"method": "NEWS", "hs": [[10, 30], [4, 6]]},
      {"method": "DY"},
      {"method": "SDC", "h": 8, "s": 6}
    ],
    "tolerances": [1e-6, 1e-9],
    "iter_cap": 5000
  })");
}

ErrorKind parse_kind(const json &j) {
  try {
    parse_plan(j);
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::invalid_argument;
}

ProfileEntry entry(const std::string &p, const std::string &s, double m, bool ok = true) {
  return {p, s, m, ok};
}

}  // namespace

TEST_CASE("plan parsing") {
  const ExperimentPlan plan = parse_plan(small_plan());
  CHECK(plan.name == "small");
  REQUIRE(plan.problems.size() == 2);
  CHECK(plan.problems[0].seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(plan.problems[0].kappas == std::vector<double>{1e3, 1e4});
  CHECK(plan.problems[1].kappas == std::vector<double>{100});
  REQUIRE(plan.strategies.size() == 4);
  CHECK(plan.strategies[0].h == 10);
  CHECK(plan.strategies[1].s == 6);
  CHECK(plan.strategies[3].method == Method::SDC);
  CHECK(plan.iter_cap == 5000);
}

TEST_CASE("plan validation errors") {
  json j = small_plan();
  j["strategies"] = json::array();
  CHECK(parse_kind(j) == ErrorKind::parse_error);

  j = small_plan();
  j["strategies"][0]["method"] = "warp";
  CHECK(parse_kind(j) == ErrorKind::parse_error);

  j = small_plan();
  j["problems"][0].erase("seeds");
  CHECK(parse_kind(j) == ErrorKind::parse_error);

  j = small_plan();
  j["tolerances"] = json::array({-1.0});
  CHECK(parse_kind(j) == ErrorKind::parse_error);

  j = small_plan();
  j["problems"] = json::array();
  CHECK(parse_kind(j) == ErrorKind::parse_error);

  try {
    j = small_plan();
    j["problems"][1]["family"] = "SET9";
    parse_plan(j);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find(".problems[1].family") != std::string::npos);
  }
}

TEST_CASE("run_plan row layout") {
  const ExperimentPlan plan = parse_plan(small_plan());
  const auto rows = run_plan(plan, 1);
  // (2 kappas x 3 seeds + 2 seeds) x 4 strategies x 2 tolerances
  CHECK(rows.size() == 8 * 4 * 2);
  CHECK(std::is_sorted(rows.begin(), rows.end(), key_less));
  for (const auto &r : rows) {
    if (r.method == "DY") {
      CHECK(r.h == 0);
      CHECK(r.s == 0);
    }
    CHECK(r.solved());
    CHECK(r.func_evals == r.iters + 2);
  }
}

TEST_CASE("run_plan is independent of the thread count") {
  const ExperimentPlan plan = parse_plan(small_plan());
  const auto a = run_plan(plan, 1), b = run_plan(plan, 8);
  std::ostringstream sa, sb;
  write_results_csv(sa, a);
  write_results_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("identical strategies give identical rows") {
  json j = small_plan();
  j["strategies"] = json::array({json{{"method", "NEWS2"}, {"h", 10}, {"s", 100}},
                                 json{{"method", "NEWS2"}, {"h", 10}, {"s", 100}}});
  const auto rows = run_plan(parse_plan(j), 2);
  REQUIRE(rows.size() % 2 == 0);
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    CHECK(rows[i].iters == rows[i + 1].iters);
    CHECK(rows[i].func_evals == rows[i + 1].func_evals);
    CHECK(rows[i].seed == rows[i + 1].seed);
  }
}

TEST_CASE("one run serves every tolerance") {
  const auto p = gen_diag_problem({SpectrumFamily::SET3, 200, 1e4, 2});
  StrategySpec spec;
  spec.method = Method::NEWS;
  const std::vector<double> tols = {1e-3, 1e-6, 1e-9, 1e-12};
  const RunTrace full = run(p, Vector::Ones(200), spec, 1e-12, 20000);
  const auto counts = iterations_per_tolerance(full, tols);
  for (std::size_t i = 0; i < tols.size(); ++i) {
    const RunTrace single = run(p, Vector::Ones(200), spec, tols[i], 20000);
    CHECK(counts[i].first == single.iterations);
    CHECK(counts[i].second == single.termination);
  }
  const RunTrace capped = run(p, Vector::Ones(200), spec, 1e-12, 10);
  const auto c = iterations_per_tolerance(capped, {1e-12});
  CHECK(c[0].second == Termination::iter_cap);
  CHECK(c[0].first == 10);
}

TEST_CASE("Laplace rows carry the grid size and condition number") {
  const json j = json::parse(R"({
    "problems": [{"family": "LAPLACE_A", "N": [4, 5]}],
    "strategies": [{"method": "DY"}],
    "tolerances": [1e-6]
  })");
  const auto rows = run_plan(parse_plan(j), 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].family == "LAPLACE_A_4");
  CHECK(rows[0].kappa == doctest::Approx(laplace_lambda_max(4) / laplace_lambda_min(4)));
  CHECK(rows[1].family == "LAPLACE_A_5");
}

TEST_CASE("summaries average over seeds, and over kappa when pooled") {
  std::vector<ResultRow> rows;
  for (double kappa : {1e4, 1e5})
    for (std::uint64_t seed = 1; seed <= 2; ++seed)
      rows.push_back({"SET1", kappa, 1e-6, "NEWS", 10, 30, seed,
                      static_cast<int>(kappa == 1e4 ? 10 * seed : 100 * seed),
                      static_cast<std::int64_t>(seed), "gradient_tol"});
  rows.back().termination = "iter_cap";
  const auto per = summarize(rows, false);
  REQUIRE(per.size() == 2);
  CHECK(per[0].mean_iters == doctest::Approx(15.0));
  CHECK(per[1].mean_iters == doctest::Approx(150.0));
  CHECK(per[1].solved == 1);
  const auto pooled = summarize(rows, true);
  REQUIRE(pooled.size() == 1);
  CHECK(pooled[0].kappa == "pooled");
  CHECK(pooled[0].runs == 4);
  CHECK(pooled[0].mean_iters == doctest::Approx(82.5));

  std::ostringstream os;
  write_summary_csv(os, pooled);
  CHECK(os.str().rfind(std::string(kSummaryHeader) + "\n", 0) == 0);
  CHECK(os.str().find("82.5") != std::string::npos);
}

TEST_CASE("result CSV round trip") {
  const auto rows = run_plan(parse_plan(small_plan()), 1);
  std::stringstream ss;
  write_results_csv(ss, rows);
  const auto back = read_results_csv(ss);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].family == rows[i].family);
    CHECK(back[i].kappa == rows[i].kappa);
    CHECK(back[i].eps == rows[i].eps);
    CHECK(back[i].iters == rows[i].iters);
    CHECK(back[i].termination == rows[i].termination);
  }
  std::istringstream bad("family,kappa\nSET1,1\n");
  CHECK_THROWS_AS(read_results_csv(bad), Error);
  std::istringstream short_row(std::string(kResultHeader) + "\nSET1,1,1e-6\n");
  CHECK_THROWS_AS(read_results_csv(short_row), Error);
}

TEST_CASE("plan outputs land in the directory") {
  const auto dir = std::filesystem::temp_directory_path() / "gradspec_test_outputs";
  std::filesystem::remove_all(dir);
  const auto rows = run_plan(parse_plan(small_plan()), 1);
  write_plan_outputs(dir.string(), rows, false);
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "summary.csv"));
  CHECK(read_results_file((dir / "results.csv").string()).size() == rows.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("profile: hand example with two solvers") {
  const auto data = performance_profile(
      {entry("p1", "A", 10), entry("p1", "B", 20), entry("p2", "A", 30), entry("p2", "B", 15)},
      ProfileMetric::iterations);
  CHECK(data.problem_count == 2);
  CHECK(data.curve("A").rho(1.0) == 0.5);
  CHECK(data.curve("B").rho(1.0) == 0.5);
  CHECK(data.curve("A").rho(2.0) == 1.0);
  CHECK(data.curve("B").rho(2.0) == 1.0);
  CHECK(data.curve("A").rho(0.99) == 0.0);
}

TEST_CASE("profile: single solver and unsolved entries") {
  const auto one = performance_profile({entry("p1", "A", 5), entry("p2", "A", 7)},
                                       ProfileMetric::iterations);
  for (double tau : {1.0, 1.5, 100.0}) CHECK(one.curve("A").rho(tau) == 1.0);

  const auto partial = performance_profile(
      {entry("p1", "A", 5), entry("p1", "B", 6), entry("p2", "A", 7, false), entry("p2", "B", 9),
       entry("p3", "A", 3), entry("p3", "B", 3)},
      ProfileMetric::iterations);
  CHECK(partial.curve("A").terminal() == doctest::Approx(2.0 / 3.0));
  CHECK(partial.curve("A").rho(1e9) == doctest::Approx(2.0 / 3.0));
  CHECK(partial.curve("B").terminal() == 1.0);
  // Ties at the best value count for every tied solver.
  CHECK(partial.curve("A").rho(1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(partial.curve("B").rho(1.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("profile curves are nondecreasing and bounded") {
  std::vector<ProfileEntry> entries;
  for (int p = 0; p < 40; ++p)
    for (int s = 0; s < 4; ++s)
      entries.push_back(entry("p" + std::to_string(p), "s" + std::to_string(s),
                              1 + (p * 7 + s * 13) % 23, (p + s) % 9 != 0));
  const auto data = performance_profile(entries, ProfileMetric::func_evals);
  for (const auto &c : data.curves) {
    double last = 0.0, last_tau = 0.0;
    for (const auto &[tau, rho] : c.breakpoints) {
      CHECK(tau >= 1.0);
      CHECK(tau > last_tau);
      CHECK(rho >= last);
      CHECK(rho <= 1.0);
      last = rho;
      last_tau = tau;
    }
  }
}

TEST_CASE("profile entries from result rows") {
  std::vector<ResultRow> rows = {
      {"SET1", 1e4, 1e-6, "NEWS", 10, 30, 1, 40, 42, "gradient_tol"},
      {"SET1", 1e4, 1e-6, "DY", 0, 0, 1, 80, 82, "iter_cap"},
  };
  const auto entries = profile_entries(rows, ProfileMetric::func_evals);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].problem == entries[1].problem);
  CHECK(entries[0].solver == "NEWS_h10_s30");
  CHECK(entries[1].solver == "DY");
  CHECK(entries[0].metric == 42.0);
  CHECK_FALSE(entries[1].solved);
  CHECK_THROWS_AS(profile_entries(rows, ProfileMetric::cpu_time), Error);

  std::ostringstream os;
  write_profile_csv(os, performance_profile(entries, ProfileMetric::func_evals));
  CHECK(os.str() == "solver,tau,rho\nNEWS_h10_s30,1,1\n");
}

TEST_CASE("problem JSON descriptions") {
  const auto inst = load_problem(json::parse(R"({"kind": "diag", "eigenvalues": [1, 2, 3],
                                                "b": [1, 1, 1], "x0": "zeros"})"));
  CHECK(inst.problem->dim() == 3);
  CHECK(inst.x1.isZero(0.0));
  CHECK(inst.lambda_max == 3.0);

  const auto gen = load_problem(spectrum_problem_json("SET2", 50, 1e3, 4, "dense"));
  CHECK_FALSE(gen.problem->is_diagonal());
  const auto reseeded = load_problem(spectrum_problem_json("SET2", 50, 1e3, 4, "eigen"), 9);
  CHECK(reseeded.problem->diagonal_values() ==
        gen_diag_problem({SpectrumFamily::SET2, 50, 1e3, 9}).diagonal_values());

  const auto round = load_problem(to_json(inst));
  CHECK(round.problem->diagonal_values() == inst.problem->diagonal_values());
  CHECK(round.problem->b() == inst.problem->b());

  const auto boxed = load_problem(json::parse(R"({"kind": "dense", "matrix": [[2, 0], [0, 3]],
                                                 "bounds": {"lower": 0, "upper": null}})"));
  REQUIRE(boxed.bounds.has_value());
  CHECK(boxed.bounds->lower()[1] == 0.0);
  CHECK(boxed.bounds->upper()[0] == kInf);

  const auto sparse = load_problem(json::parse(R"({"kind": "sparse", "n": 2,
      "entries": [[0, 0, 2], [1, 1, 4], [0, 1, 1], [1, 0, 1]], "b": {"kind": "random", "seed": 3,
      "range": [-1, 1]}})"));
  CHECK(sparse.problem->dim() == 2);
  CHECK(sparse.problem->b().cwiseAbs().maxCoeff() < 1.0);

  try {
    load_problem(json::parse(R"({"kind": "diag", "eigenvalues": [1, "x"]})"));
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::parse_error);
    CHECK(std::string(e.what()).find("eigenvalues") != std::string::npos);
  }
  CHECK_THROWS_AS(load_problem(json::parse(R"({"kind": "torus"})")), Error);
}
