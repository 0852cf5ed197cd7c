#include "gradspec/problem_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "gradspec/generators.hpp"

namespace gradspec {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &where, const std::string &msg) {
  throw Error(ErrorKind::parse_error, "problem." + where + ": " + msg);
}

const json &require(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) fail(key, "missing");
  return j.at(key);
}

Vector vector_from(const json &j, const std::string &where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(where, "entry " + std::to_string(i) + " is not a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_to(const Vector &v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector bound_from(const json &j, Eigen::Index n, double infinite, const std::string &where) {
  if (j.is_null()) return Vector::Constant(n, infinite);
  if (j.is_number()) return Vector::Constant(n, j.get<double>());
  Vector v(n);
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
    fail(where, "expected null, a number or an array of length " + std::to_string(n));
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = j[static_cast<std::size_t>(i)].is_null() ? infinite
                                                      : j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json bound_to(const Vector &v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(std::isinf(v[i]) ? json(nullptr) : json(v[i]));
  return out;
}

Vector b_from(const json &j, Eigen::Index n) {
  if (j.is_array()) {
    Vector b = vector_from(j, "b");
    if (b.size() != n) fail("b", "length does not match the Hessian");
    return b;
  }
  if (j.is_object() && j.value("kind", "") == "random") {
    const auto seed = j.value("seed", std::uint64_t{1});
    double lo = -10.0, hi = 10.0;
    if (j.contains("range")) {
      const auto &r = j.at("range");
      if (!r.is_array() || r.size() != 2) fail("b.range", "expected [lo, hi]");
      lo = r[0].get<double>();
      hi = r[1].get<double>();
    }
    Rng rng(seed);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = rng.uniform_open(lo, hi);
    return b;
  }
  fail("b", "expected an array or {\"kind\": \"random\", ...}");
}

Vector x0_from(const json &j, Eigen::Index n, const Vector &fallback) {
  if (j.is_null()) return fallback;
  if (j.is_string()) {
    if (j == "ones") return Vector::Ones(n);
    if (j == "zeros") return Vector::Zero(n);
    fail("x0", "expected \"ones\", \"zeros\" or an array");
  }
  Vector x = vector_from(j, "x0");
  if (x.size() != n) fail("x0", "length does not match the Hessian");
  return x;
}

SpectrumSpec spectrum_from(const json &j, std::optional<std::uint64_t> seed_override) {
  SpectrumSpec spec;
  try {
    spec.family = parse_spectrum_family(require(j, "family").get<std::string>());
    spec.n = require(j, "n").get<int>();
    spec.kappa = j.value("kappa", static_cast<double>(spec.n));
    spec.seed = seed_override.value_or(j.value("seed", std::uint64_t{1}));
    spec.validate();
  } catch (const json::exception &e) {
    fail("family", e.what());
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::parse_error) throw;
    fail("family", e.what());
  }
  return spec;
}

}  // namespace

json spectrum_problem_json(const std::string &family, int n, double kappa,
                           std::uint64_t seed, const std::string &basis) {
  const bool tp1 = parse_spectrum_family(family) == SpectrumFamily::TP1;
  json j = {{"family", family}, {"n", n}, {"kappa", kappa}, {"seed", seed}};
  if (tp1) {
    j["kind"] = "diag";
  } else {
    j["kind"] = "dense";
    j["basis"] = basis;
  }
  return j;
}

ProblemInstance load_problem(const json &j, std::optional<std::uint64_t> seed_override) {
  if (!j.is_object()) fail("", "expected a JSON object");
  const std::string kind = require(j, "kind").is_string()
                               ? j.at("kind").get<std::string>()
                               : (fail("kind", "expected a string"), std::string());
  ProblemInstance inst;
  inst.name = j.value("name", kind);
  std::optional<Vector> b_given;
  Vector default_x1;

  try {
    if ((kind == "diag" || kind == "dense") && j.contains("family")) {
      const SpectrumSpec spec = spectrum_from(j, seed_override);
      const SpectrumSample sample = sample_spectrum(spec);
      const auto n = static_cast<Eigen::Index>(spec.n);
      inst.name = j.value("name", std::string(to_string(spec.family)));
      inst.lambda_min = sample.eigenvalues.minCoeff();
      inst.lambda_max = sample.eigenvalues.maxCoeff();
      Vector b = j.contains("b") ? b_from(j.at("b"), n) : sample.b;
      const std::string basis = j.value("basis", kind == "diag" ? "eigen" : "dense");
      if (kind == "diag" && spec.family == SpectrumFamily::TP1) {
        inst.problem = std::make_shared<QuadraticProblem>(
            QuadraticProblem::diagonal(sample.eigenvalues, std::move(b)));
        default_x1 = Vector::Ones(n);
      } else if (kind == "diag" || basis == "eigen") {
        // Eigenbasis of the rotated problem: b' = Q'b, x1' = Q'x1.
        inst.problem = std::make_shared<QuadraticProblem>(
            QuadraticProblem::diagonal(sample.eigenvalues, sample.apply_qt(b)));
        default_x1 = sample.apply_qt(Vector::Ones(n));
        if (j.contains("x0"))
          default_x1 = sample.apply_qt(x0_from(j.at("x0"), n, Vector::Ones(n)));
        inst.x1 = default_x1;
        if (j.contains("bounds"))
          fail("bounds", "bounds are not supported in the eigenbasis");
        return inst;
      } else if (basis == "dense") {
        SpectrumSample with_b = sample;
        with_b.b = std::move(b);
        inst.problem = std::make_shared<QuadraticProblem>(rotated_dense(with_b));
        default_x1 = Vector::Ones(n);
      } else {
        fail("basis", "expected \"dense\" or \"eigen\"");
      }
    } else if (kind == "diag") {
      Vector ev = vector_from(require(j, "eigenvalues"), "eigenvalues");
      const auto n = ev.size();
      inst.lambda_min = ev.minCoeff();
      inst.lambda_max = ev.maxCoeff();
      Vector b = j.contains("b") ? b_from(j.at("b"), n) : Vector::Zero(n);
      inst.problem = std::make_shared<QuadraticProblem>(
          QuadraticProblem::diagonal(std::move(ev), std::move(b)));
      default_x1 = Vector::Ones(n);
    } else if (kind == "dense") {
      const auto &m = require(j, "matrix");
      if (!m.is_array() || m.empty()) fail("matrix", "expected a nonempty array of rows");
      const auto n = static_cast<Eigen::Index>(m.size());
      DenseMatrix a(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        Vector row = vector_from(m[static_cast<std::size_t>(r)], "matrix");
        if (row.size() != n) fail("matrix", "row " + std::to_string(r) + " has wrong length");
        a.row(r) = row.transpose();
      }
      if (!a.isApprox(a.transpose(), 1e-12)) fail("matrix", "matrix is not symmetric");
      Vector b = j.contains("b") ? b_from(j.at("b"), n) : Vector::Zero(n);
      inst.problem = std::make_shared<QuadraticProblem>(
          QuadraticProblem::dense(std::move(a), std::move(b)));
      default_x1 = Vector::Ones(n);
    } else if (kind == "sparse") {
      const auto n = static_cast<Eigen::Index>(require(j, "n").get<long long>());
      const auto &entries = require(j, "entries");
      if (!entries.is_array()) fail("entries", "expected [[i, j, v], ...]");
      std::vector<Eigen::Triplet<double>> t;
      for (const auto &e : entries) {
        if (!e.is_array() || e.size() != 3) fail("entries", "expected [i, j, v]");
        const auto r = e[0].get<Eigen::Index>();
        const auto c = e[1].get<Eigen::Index>();
        if (r < 0 || c < 0 || r >= n || c >= n) fail("entries", "index out of range");
        t.emplace_back(r, c, e[2].get<double>());
      }
      SparseMatrix a(n, n);
      a.setFromTriplets(t.begin(), t.end());
      if (!DenseMatrix(a).isApprox(DenseMatrix(a.transpose()), 1e-12) && n <= 2000)
        fail("entries", "matrix is not symmetric");
      Vector b = j.contains("b") ? b_from(j.at("b"), n) : Vector::Zero(n);
      inst.problem = std::make_shared<QuadraticProblem>(
          QuadraticProblem::sparse(std::move(a), std::move(b)));
      default_x1 = Vector::Ones(n);
    } else if (kind == "laplace3d") {
      LaplaceSpec spec;
      const std::string v = j.value("variant", "A");
      if (v == "A" || v == "a") spec.variant = LaplaceVariant::A;
      else if (v == "B" || v == "b") spec.variant = LaplaceVariant::B;
      else fail("variant", "expected \"A\" or \"B\"");
      spec.N = require(j, "N").get<int>();
      auto lap = gen_laplace3d(spec);
      inst.name = j.value("name", std::string("laplace1") + (spec.variant == LaplaceVariant::A ? "a" : "b"));
      inst.lambda_min = laplace_lambda_min(spec.N);
      inst.lambda_max = laplace_lambda_max(spec.N);
      const auto n = lap.problem.dim();
      if (j.contains("b")) {
        inst.problem = std::make_shared<QuadraticProblem>(
            QuadraticProblem(lap.problem.hessian(), b_from(j.at("b"), n)));
      } else {
        inst.problem = std::make_shared<QuadraticProblem>(std::move(lap.problem));
        inst.x_star = std::move(lap.x_star);
      }
      default_x1 = Vector::Zero(n);
    } else {
      fail("kind", "unknown kind '" + kind + "'");
    }
  } catch (const json::exception &e) {
    fail(kind, e.what());
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::parse_error) throw;
    fail(kind, e.what());
  }

  const auto n = inst.problem->dim();
  inst.x1 = j.contains("x0") ? x0_from(j.at("x0"), n, default_x1) : default_x1;
  if (j.contains("bounds")) {
    const auto &bj = j.at("bounds");
    if (!bj.is_object()) fail("bounds", "expected {\"lower\": .., \"upper\": ..}");
    try {
      inst.bounds = BoxBounds(bound_from(bj.value("lower", json(nullptr)), n, -kInf, "bounds.lower"),
                              bound_from(bj.value("upper", json(nullptr)), n, kInf, "bounds.upper"));
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::parse_error) throw;
      fail("bounds", e.what());
    }
  }
  return inst;
}

ProblemInstance load_problem_file(const std::string &path,
                                  std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open problem file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::parse_error, path + ": " + e.what());
  }
  return load_problem(j, seed_override);
}

json to_json(const ProblemInstance &inst) {
  const QuadraticProblem &p = *inst.problem;
  json j;
  j["name"] = inst.name;
  std::visit(
      [&](const auto &h) {
        using T = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<T, DiagonalHessian>) {
          j["kind"] = "diag";
          j["eigenvalues"] = vector_to(h.values);
        } else if constexpr (std::is_same_v<T, DenseHessian>) {
          j["kind"] = "dense";
          json rows = json::array();
          for (Eigen::Index r = 0; r < h.matrix.rows(); ++r)
            rows.push_back(vector_to(h.matrix.row(r).transpose()));
          j["matrix"] = std::move(rows);
        } else {
          j["kind"] = "sparse";
          j["n"] = h.matrix.rows();
          json entries = json::array();
          for (Eigen::Index r = 0; r < h.matrix.outerSize(); ++r)
            for (SparseMatrix::InnerIterator it(h.matrix, r); it; ++it)
              entries.push_back({it.row(), it.col(), it.value()});
          j["entries"] = std::move(entries);
        }
      },
      p.hessian());
  j["b"] = vector_to(p.b());
  j["x0"] = vector_to(inst.x1);
  if (inst.bounds)
    j["bounds"] = {{"lower", bound_to(inst.bounds->lower())},
                   {"upper", bound_to(inst.bounds->upper())}};
  return j;
}

}  // namespace gradspec
