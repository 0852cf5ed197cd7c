#include "gradspec/qp_engine.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "gradspec/stepsize.hpp"

namespace gradspec {

namespace {

struct MethodName {
  Method method;
  std::string_view name;
};

constexpr std::array<MethodName, 13> kMethodNames{{
    {Method::SD, "SD"},
    {Method::BB1, "BB1"},
    {Method::BB2, "BB2"},
    {Method::DY, "DY"},
    {Method::SDC, "SDC"},
    {Method::ABBMIN2, "ABBMIN2"},
    {Method::AOPT, "AOPT"},
    {Method::AOPT_RETARD, "AOPT_RETARD"},
    {Method::NEWS0, "NEWS0"},
    {Method::NEWS, "NEWS"},
    {Method::NEWS2, "NEWS2"},
    {Method::NEWS3, "NEWS3"},
    {Method::NEWS4, "NEWS4"},
}};

std::string normalize_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '-' || c == ' ') c = '_';
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

bool is_news_family(Method m) {
  return m == Method::NEWS0 || m == Method::NEWS || m == Method::NEWS2 ||
         m == Method::NEWS3 || m == Method::NEWS4;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  for (const auto &[method, name] : kMethodNames)
    if (method == m) return name;
  return "?";
}

Method parse_method(std::string_view name) {
  std::string key = normalize_name(name);
  if (key == "ABB_MIN2" || key == "ABBMIN") key = "ABBMIN2";
  if (key == "AOPTR") key = "AOPT_RETARD";
  for (const auto &[method, n] : kMethodNames)
    if (n == key) return method;
  throw Error(ErrorKind::invalid_argument,
              "unknown strategy '" + std::string(name) + "'");
}

bool uses_cycle(Method m) noexcept { return m == Method::SDC || is_news_family(m); }

void StrategySpec::validate() const {
  if (uses_cycle(method) && (h < 2 || s < 1)) {
    std::ostringstream os;
    os << to_string(method) << ": need h >= 2 and s >= 1, got (" << h << ", "
       << s << ")";
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  if (method == Method::ABBMIN2 && (!(tau > 0.0 && tau < 1.0) || abb_window < 1))
    throw Error(ErrorKind::invalid_argument,
                "ABBMIN2: need tau in (0,1) and window >= 1");
}

std::string_view to_string(Branch b) noexcept {
  switch (b) {
    case Branch::long_step: return "long";
    case Branch::short_step: return "short";
    case Branch::fallback: return "fallback";
    case Branch::bb2_fallback: return "bb2";
    case Branch::curvature_reset: return "reset";
  }
  return "?";
}

Branch parse_branch(std::string_view name) {
  for (Branch b : {Branch::long_step, Branch::short_step, Branch::fallback,
                   Branch::bb2_fallback, Branch::curvature_reset})
    if (to_string(b) == name) return b;
  throw Error(ErrorKind::parse_error, "unknown branch '" + std::string(name) + "'");
}

std::string_view to_string(Termination t) noexcept {
  return t == Termination::gradient_tol ? "gradient_tol" : "iter_cap";
}

namespace {

/// Per-iteration scalars of the quadratic track.
struct QuadScalars {
  double sd = 0.0;
  double aopt = 0.0;
  double gnorm = 0.0;
};

class StepRule {
 public:
  explicit StepRule(const StrategySpec &spec) : spec_(spec) {}

  struct Choice {
    double alpha;
    Branch branch;
  };

  // cur: scalars at k; prev: scalars at k-1 (absent at k = 1);
  // bar_cur: bar-alpha_k; bar_prev: bar-alpha_{k-1}; bb: BB pair at k.
  Choice choose(int k, const QuadScalars &cur, const std::optional<QuadScalars> &prev,
                std::optional<double> bar_cur, std::optional<double> bar_prev,
                const BBPair &bb) {
    const int cycle = spec_.h + spec_.s;
    const bool long_phase = (k % cycle) < spec_.h;
    auto phased = [&](double long_alpha, std::optional<double> bar) -> Choice {
      if (long_phase) return {long_alpha, Branch::long_step};
      if (!bar || !(*bar > 0.0) || !std::isfinite(*bar))
        return {long_alpha, Branch::fallback};
      return {std::min(long_alpha, *bar), Branch::short_step};
    };

    switch (spec_.method) {
      case Method::SD:
        return {cur.sd, Branch::long_step};
      case Method::AOPT:
        return {cur.aopt, Branch::long_step};
      case Method::AOPT_RETARD:
        return {prev ? prev->aopt : cur.aopt, Branch::long_step};
      case Method::BB1:
      case Method::BB2: {
        const auto &v = spec_.method == Method::BB1 ? bb.bb1 : bb.bb2;
        if (k == 1 || !v || !(*v > 0.0)) return {cur.sd, Branch::fallback};
        return {*v, Branch::long_step};
      }
      case Method::DY:
        if (k % 4 < 2 || !prev) return {cur.sd, Branch::long_step};
        return {yuan_stepsize(prev->sd, cur.sd, prev->gnorm, cur.gnorm),
                Branch::short_step};
      case Method::SDC: {
        const int phase = k % cycle;
        if (phase < spec_.h) return {cur.sd, Branch::long_step};
        if (phase == spec_.h) {
          frozen_yuan_.reset();
          if (prev)
            frozen_yuan_ = yuan_stepsize(prev->sd, cur.sd, prev->gnorm, cur.gnorm);
        }
        if (!frozen_yuan_) return {cur.sd, Branch::fallback};
        return {*frozen_yuan_, Branch::short_step};
      }
      case Method::ABBMIN2: {
        if (k == 1 || !bb.bb1 || !bb.bb2 || !(*bb.bb1 > 0.0) || !(*bb.bb2 > 0.0))
          return {cur.sd, Branch::fallback};
        bb2_window_.push_back(*bb.bb2);
        while (static_cast<int>(bb2_window_.size()) > spec_.abb_window)
          bb2_window_.pop_front();
        if (*bb.bb2 / *bb.bb1 < spec_.tau)
          return {*std::min_element(bb2_window_.begin(), bb2_window_.end()),
                  Branch::short_step};
        return {*bb.bb1, Branch::long_step};
      }
      case Method::NEWS0:
        return phased(cur.aopt, bar_cur);
      case Method::NEWS:
        return phased(cur.aopt, bar_prev);
      case Method::NEWS2:
        return phased(prev ? prev->aopt : cur.aopt, bar_prev);
      case Method::NEWS3:
      case Method::NEWS4: {
        const auto &v = spec_.method == Method::NEWS3 ? bb.bb1 : bb.bb2;
        const double long_alpha = (k == 1 || !v || !(*v > 0.0)) ? cur.aopt : *v;
        return phased(long_alpha, bar_prev);
      }
    }
    throw Error(ErrorKind::invalid_argument, "unhandled method");
  }

 private:
  StrategySpec spec_;
  std::optional<double> frozen_yuan_;
  std::deque<double> bb2_window_;
};

std::optional<double> try_bar_alpha(const Vector &g_prev, const Vector &ag_prev,
                                    const Vector &g_cur, const Vector &ag_cur) {
  try {
    return bar_alpha_from_products(g_prev, ag_prev, g_cur, ag_cur);
  } catch (const Error &) {
    return std::nullopt;
  }
}

}  // namespace

RunTrace run(const QuadraticProblem &p, const Vector &x1, const StrategySpec &spec,
             const RunOptions &opts) {
  spec.validate();
  if (!(opts.eps > 0.0 && opts.eps < 1.0))
    throw Error(ErrorKind::invalid_argument, "run: eps must lie in (0, 1)");
  if (x1.size() != p.dim())
    throw Error(ErrorKind::dimension_mismatch, "run: starting point has wrong length");
  if (!x1.allFinite())
    throw Error(ErrorKind::invalid_argument, "run: starting point is not finite");

  const auto t0 = std::chrono::steady_clock::now();
  RunTrace trace;
  const Vector &b = p.b();

  Vector x = x1;
  Vector ag = p.apply(x);
  Vector g = ag - b;
  p.apply(g, ag);
  std::int64_t products = 2;

  trace.gnorm1 = g.norm();
  const double target = opts.eps * trace.gnorm1;

  StepsizeMemory mem;
  mem.reset(x, g);
  StepRule rule(spec);
  Vector g_prev, ag_prev;
  std::optional<QuadScalars> prev;
  std::optional<double> bar_prev;

  auto objective = [&](const Vector &xv, const Vector &gv) {
    // f = 1/2 x'Ax - b'x with Ax = g + b.
    return 0.5 * xv.dot(gv) - 0.5 * b.dot(xv);
  };

  int k = 1;
  for (;; ++k) {
    const double gnorm = mem.gnorm_cur();
    if (opts.retain_gradients) trace.gradients.push_back(g);
    const double f = objective(x, g);
    if (!std::isfinite(f) || !std::isfinite(gnorm))
      throw Error(ErrorKind::diverged, "run: nonfinite objective at k = " +
                                           std::to_string(k));
    if (gnorm <= target) {
      trace.termination = Termination::gradient_tol;
      trace.final_f = f;
      trace.final_gnorm = gnorm;
      break;
    }
    if (k > opts.max_iter) {
      trace.termination = Termination::iter_cap;
      trace.final_f = f;
      trace.final_gnorm = gnorm;
      break;
    }

    QuadScalars cur;
    cur.gnorm = gnorm;
    cur.sd = gnorm * gnorm / g.dot(ag);
    cur.aopt = gnorm / ag.norm();
    mem.sd_prev = prev ? std::optional<double>(prev->sd) : std::nullopt;

    std::optional<double> bar_cur;
    BBPair bb;
    if (k >= 2) {
      bar_cur = try_bar_alpha(g_prev, ag_prev, g, ag);
      bb = bb_stepsizes(mem);
    }

    const auto choice = rule.choose(k, cur, prev, bar_cur, bar_prev, bb);
    if (!(choice.alpha > 0.0) || !std::isfinite(choice.alpha))
      throw Error(ErrorKind::diverged, "run: invalid stepsize at k = " +
                                           std::to_string(k));
    trace.records.push_back({k, f, gnorm, choice.alpha, choice.branch});

    g_prev = g;
    ag_prev = ag;
    x.noalias() -= choice.alpha * g;
    g.noalias() -= choice.alpha * ag;
    p.apply(g, ag);
    ++products;
    mem.advance(x, g, choice.alpha);
    mem.baralpha_prev = bar_cur;

    prev = cur;
    bar_prev = bar_cur;
  }

  trace.iterations = k - 1;
  trace.x_final = x;
  trace.func_evals = products;
  trace.grad_evals = products;
  trace.cpu_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

RunTrace run(const QuadraticProblem &p, const Vector &x1, const StrategySpec &spec,
             double eps, int max_iter) {
  RunOptions opts;
  opts.eps = eps;
  opts.max_iter = max_iter;
  return run(p, x1, spec, opts);
}

DenseMatrix eigencomponents(const RunTrace &trace, const QuadraticProblem &p) {
  if (!p.is_diagonal())
    throw Error(ErrorKind::invalid_argument,
                "eigencomponents: problem Hessian is not diagonal");
  if (trace.gradients.empty())
    throw Error(ErrorKind::invalid_argument,
                "eigencomponents: trace did not retain gradients");
  DenseMatrix mu(p.dim(), static_cast<Eigen::Index>(trace.gradients.size()));
  for (std::size_t j = 0; j < trace.gradients.size(); ++j)
    mu.col(static_cast<Eigen::Index>(j)) = trace.gradients[j];
  return mu;
}

std::vector<StepsizeDiagnostic> stepsize_history_diagnostic(const RunTrace &trace,
                                                            const QuadraticProblem &p) {
  std::vector<StepsizeDiagnostic> out;
  if (trace.gradients.size() < 2) return out;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Vector ag_prev = p.apply(trace.gradients[0]);
  for (std::size_t j = 1; j < trace.gradients.size(); ++j) {
    const Vector ag_cur = p.apply(trace.gradients[j]);
    StepsizeDiagnostic d;
    d.k = static_cast<int>(j) + 1;
    try {
      d.bar_alpha = bar_alpha_from_products(trace.gradients[j - 1], ag_prev,
                                            trace.gradients[j], ag_cur);
    } catch (const Error &) {
      d.bar_alpha = nan;
    }
    try {
      d.hat_alpha = bar_alpha_from_products(trace.gradients[j - 1], ag_prev,
                                            trace.gradients[j], ag_cur, true);
    } catch (const Error &) {
      d.hat_alpha = nan;
    }
    out.push_back(d);
    ag_prev = ag_cur;
  }
  return out;
}

void write_trace_csv(std::ostream &os, const RunTrace &trace) {
  os << "k,f,gnorm,alpha,branch\n";
  const auto old_precision = os.precision(17);
  for (const auto &r : trace.records)
    os << r.k << ',' << r.f << ',' << r.gnorm << ',' << r.alpha << ','
       << to_string(r.branch) << '\n';
  os.precision(old_precision);
}

nlohmann::json trace_summary(const RunTrace &trace) {
  return {
      {"iterations", trace.iterations},
      {"termination", std::string(to_string(trace.termination))},
      {"final_gnorm_ratio", trace.final_gnorm_ratio()},
      {"func_evals", trace.func_evals},
      {"grad_evals", trace.grad_evals},
      {"cpu_seconds", trace.cpu_seconds},
  };
}

}  // namespace gradspec
