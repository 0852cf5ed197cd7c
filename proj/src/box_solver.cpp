#include "gradspec/box_solver.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include "gradspec/stepsize.hpp"

namespace gradspec {

std::string_view to_string(BoxVariant v) noexcept {
  switch (v) {
    case BoxVariant::A1: return "A1";
    case BoxVariant::A1_BB1: return "A1_BB1";
    case BoxVariant::A1_BB2: return "A1_BB2";
    case BoxVariant::SPG: return "SPG";
  }
  return "?";
}

BoxVariant parse_box_variant(std::string_view name) {
  std::string key;
  for (char c : name)
    key.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (auto v : {BoxVariant::A1, BoxVariant::A1_BB1, BoxVariant::A1_BB2, BoxVariant::SPG})
    if (to_string(v) == key) return v;
  throw Error(ErrorKind::invalid_argument, "unknown box variant '" + std::string(name) + "'");
}

void BoxRunConfig::validate() const {
  if (!(alpha_min > 0.0 && alpha_min < alpha_max))
    throw Error(ErrorKind::invalid_argument, "box config: need 0 < alpha_min < alpha_max");
  if (h < 1 || s < 1 || M < 1 || spg_M < 1)
    throw Error(ErrorKind::invalid_argument, "box config: h, s, M must be positive");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw Error(ErrorKind::invalid_argument, "box config: sigma must lie in (0, 1)");
  if (!(eps_pg > 0.0) || max_iter < 0)
    throw Error(ErrorKind::invalid_argument, "box config: bad stopping parameters");
}

LineSearchState LineSearchState::initial(double f1, int M, double sigma) {
  LineSearchState ls;
  ls.f_r = ls.f_best = ls.f_c = f1;
  ls.L = 0;
  ls.M = M;
  ls.sigma = sigma;
  ls.recent.assign(1, f1);
  return ls;
}

double LineSearchState::f_max() const {
  return *std::max_element(recent.begin(), recent.end());
}

LineSearchState update_reference(LineSearchState ls, double f_new) {
  if (f_new < ls.f_best) {
    ls.f_best = f_new;
    ls.f_c = f_new;
    ls.L = 0;
  } else {
    ls.f_c = std::max(ls.f_c, f_new);
    ++ls.L;
    if (ls.L == ls.M) {
      ls.f_r = ls.f_c;
      ls.f_c = f_new;
      ls.L = 0;
    }
  }
  ls.recent.push_back(f_new);
  while (static_cast<int>(ls.recent.size()) > ls.M) ls.recent.pop_front();
  return ls;
}

Vector direction(const Vector &x, const Vector &g, double alpha,
                 const BoxBounds &bounds) {
  return bounds.project(x - alpha * g) - x;
}

double projected_gradient_norm(const Vector &x, const Vector &g,
                               const BoxBounds &bounds) {
  return (bounds.project(x - g) - x).lpNorm<Eigen::Infinity>();
}

SearchResult nonmonotone_search(ObjectiveOracle &oracle, const Vector &x,
                                const Vector &d, const Vector &g,
                                const LineSearchState &ls,
                                const BoxBounds *bounds) {
  auto trial = [&](double lambda) {
    Vector xt = x + lambda * d;
    return bounds ? bounds->project(xt) : xt;
  };
  const double gtd = g.dot(d);
  if (!(gtd < 0.0))
    throw Error(ErrorKind::invalid_argument,
                "nonmonotone_search: d is not a descent direction (g'd >= 0)");

  SearchResult r;
  r.x_new = trial(1.0);
  r.f_new = oracle.eval_f(r.x_new);
  if (r.f_new <= ls.f_r + ls.sigma * gtd) return r;

  r.accepted_unit = false;
  const double f_ref = std::min(ls.f_max(), ls.f_r);
  double lambda = 1.0;
  for (int i = 1; i <= kMaxBacktracks; ++i) {
    lambda *= kBacktrackFactor;
    r.x_new = trial(lambda);
    r.f_new = oracle.eval_f(r.x_new);
    if (r.f_new <= f_ref + ls.sigma * lambda * gtd) {
      r.lambda = lambda;
      r.backtracks = i;
      return r;
    }
  }
  throw Error(ErrorKind::line_search_failure,
              "nonmonotone_search: no acceptable step after 50 backtracks");
}

namespace {

double clamp_alpha(double a, const BoxRunConfig &cfg) {
  return std::max(cfg.alpha_min, std::min(a, cfg.alpha_max));
}

struct BoxStart {
  Vector x;
  double f;
  Vector g;
};

BoxStart start(ObjectiveOracle &oracle, const BoxBounds &bounds, const Vector &x1) {
  if (x1.size() != bounds.dim() || x1.size() != oracle.dim())
    throw Error(ErrorKind::dimension_mismatch, "box solver: starting point has wrong length");
  BoxStart s{bounds.project(x1), 0.0, {}};
  s.f = oracle.eval_f(s.x);
  if (!std::isfinite(s.f))
    throw Error(ErrorKind::diverged, "box solver: nonfinite objective at x1");
  s.g = oracle.eval_grad(s.x);
  return s;
}

void finish(RunTrace &trace, ObjectiveOracle &oracle, const Vector &x, double f,
            double pg, int k,
            std::chrono::steady_clock::time_point t0) {
  trace.iterations = k - 1;
  trace.final_f = f;
  trace.final_gnorm = pg;
  trace.x_final = x;
  trace.func_evals = oracle.eval_count();
  trace.grad_evals = oracle.grad_count();
  trace.cpu_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunTrace solve_box(ObjectiveOracle &oracle, const BoxBounds &bounds,
                   const Vector &x1, const BoxRunConfig &cfg) {
  if (cfg.variant == BoxVariant::SPG) return solve_spg(oracle, bounds, x1, cfg);
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto [x, f, g] = start(oracle, bounds, x1);

  RunTrace trace;
  LineSearchState ls = LineSearchState::initial(f, cfg.M, cfg.sigma);
  StepsizeMemory mem;
  mem.reset(x, g);

  const double g1 = g.norm();
  double alpha = g1 > 0.0 ? clamp_alpha(1.0 / g1, cfg) : 1.0;
  Branch branch = Branch::long_step;
  std::optional<double> last_bar;
  const int cycle = cfg.h + cfg.s;

  int k = 1;
  double pg = 0.0;
  for (;; ++k) {
    pg = projected_gradient_norm(x, g, bounds);
    if (k == 1) trace.gnorm1 = pg;
    if (cfg.retain_gradients) trace.gradients.push_back(g);
    if (pg <= cfg.eps_pg) {
      trace.termination = Termination::gradient_tol;
      break;
    }
    if (k > cfg.max_iter) {
      trace.termination = Termination::iter_cap;
      break;
    }

    // Lines 3-5: direction, line search, update.
    const Vector d = direction(x, g, alpha, bounds);
    const double gtd = g.dot(d);
    if (!(gtd < 0.0))
      throw Error(ErrorKind::line_search_failure,
                  "solve_box: projected direction is not a descent direction at k = " +
                      std::to_string(k));
    const LineSearchState before = ls;
    SearchResult sr = nonmonotone_search(oracle, x, d, g, ls, &bounds);
    trace.records.push_back({k, f, pg, alpha, branch});
    trace.line_search.push_back({before.f_r, before.f_max(), gtd, sr.lambda, sr.f_new,
                                 before.sigma, sr.accepted_unit, sr.backtracks});

    Vector g_new = oracle.eval_grad(sr.x_new);
    if (!g_new.allFinite())
      throw Error(ErrorKind::diverged, "solve_box: nonfinite gradient");
    ls = update_reference(std::move(ls), sr.f_new);
    mem.advance(sr.x_new, g_new, alpha);

    // Lines 6-19: next stepsize.
    const Vector &sv = mem.s_prev();
    const double sty = sv.dot(mem.y_prev());
    if (sty > 0.0 && sv.squaredNorm() > 0.0) {
      const BBPair bbbar = bar_bb_stepsizes(sv, mem.ybar_prev());
      double long_next = 0.0;
      switch (cfg.variant) {
        case BoxVariant::A1: long_next = p_stepsize(mem, true); break;
        case BoxVariant::A1_BB1: long_next = bbbar.bb1.value_or(cfg.alpha_max); break;
        case BoxVariant::A1_BB2: long_next = bbbar.bb2.value_or(cfg.alpha_max); break;
        case BoxVariant::SPG: break;
      }

      std::optional<double> bar_now;
      const bool short_phase = (k % cycle) >= cfg.h;
      if (short_phase || cfg.retarded_bar) {
        try {
          bar_now = bar_alpha_general(mem);
        } catch (const Error &) {
          bar_now.reset();
        }
      }

      double trial;
      if (short_phase) {
        const std::optional<double> bar = cfg.retarded_bar ? last_bar : bar_now;
        if (bar_now) trace.bar_alpha_log.emplace_back(k, *bar_now);
        if (bar && std::isfinite(*bar) && *bar > 0.0) {
          trial = std::min(*bar, long_next);
          branch = Branch::short_step;
        } else {
          trial = bbbar.bb2.value_or(long_next);
          branch = Branch::bb2_fallback;
        }
      } else {
        trial = long_next;
        branch = Branch::long_step;
      }
      if (cfg.retarded_bar) last_bar = bar_now;
      alpha = clamp_alpha(trial, cfg);
    } else {
      const double gn = g_new.norm();
      alpha = gn > 0.0 ? 1.0 / gn : cfg.alpha_max;
      branch = Branch::curvature_reset;
      if (cfg.retarded_bar) last_bar.reset();
    }

    x = std::move(sr.x_new);
    f = sr.f_new;
    g = std::move(g_new);
  }

  finish(trace, oracle, x, f, pg, k, t0);
  return trace;
}

RunTrace solve_spg(ObjectiveOracle &oracle, const BoxBounds &bounds,
                   const Vector &x1, const BoxRunConfig &cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto [x, f, g] = start(oracle, bounds, x1);

  RunTrace trace;
  std::deque<double> recent{f};
  double pg = projected_gradient_norm(x, g, bounds);
  double alpha = pg > 0.0 ? clamp_alpha(1.0 / pg, cfg) : 1.0;
  Branch branch = Branch::long_step;

  int k = 1;
  for (;; ++k) {
    if (k > 1) pg = projected_gradient_norm(x, g, bounds);
    if (k == 1) trace.gnorm1 = pg;
    if (cfg.retain_gradients) trace.gradients.push_back(g);
    if (pg <= cfg.eps_pg) {
      trace.termination = Termination::gradient_tol;
      break;
    }
    if (k > cfg.max_iter) {
      trace.termination = Termination::iter_cap;
      break;
    }

    const Vector d = direction(x, g, alpha, bounds);
    const double gtd = g.dot(d);
    if (!(gtd < 0.0))
      throw Error(ErrorKind::line_search_failure,
                  "solve_spg: projected direction is not a descent direction");
    const double f_max = *std::max_element(recent.begin(), recent.end());

    double lambda = 1.0;
    Vector x_new = bounds.project(x + d);
    double f_new = oracle.eval_f(x_new);
    int backtracks = 0;
    while (!(f_new <= f_max + cfg.spg_gamma * lambda * gtd)) {
      if (++backtracks > kMaxBacktracks)
        throw Error(ErrorKind::line_search_failure,
                    "solve_spg: no acceptable step after 50 backtracks");
      const double denom = f_new - f - lambda * gtd;
      const double lambda_q = denom > 0.0 ? -0.5 * lambda * lambda * gtd / denom : -1.0;
      if (lambda_q >= cfg.spg_sigma1 * lambda && lambda_q <= cfg.spg_sigma2 * lambda)
        lambda = lambda_q;
      else
        lambda *= 0.5;
      x_new = bounds.project(x + lambda * d);
      f_new = oracle.eval_f(x_new);
    }

    trace.records.push_back({k, f, pg, alpha, branch});
    trace.line_search.push_back({f_max, f_max, gtd, lambda, f_new, cfg.spg_gamma,
                                 backtracks == 0, backtracks});

    Vector g_new = oracle.eval_grad(x_new);
    if (!g_new.allFinite())
      throw Error(ErrorKind::diverged, "solve_spg: nonfinite gradient");
    const Vector sv = x_new - x;
    const Vector yv = g_new - g;
    const double sty = sv.dot(yv);
    if (sty <= 0.0) {
      alpha = cfg.alpha_max;
      branch = Branch::curvature_reset;
    } else {
      alpha = clamp_alpha(sv.squaredNorm() / sty, cfg);
      branch = Branch::long_step;
    }

    recent.push_back(f_new);
    while (static_cast<int>(recent.size()) > cfg.spg_M) recent.pop_front();
    x = std::move(x_new);
    f = f_new;
    g = std::move(g_new);
  }

  finish(trace, oracle, x, f, pg, k, t0);
  return trace;
}

int first_unsound_step(const RunTrace &trace, double rel_tol) {
  for (std::size_t i = 0; i < trace.line_search.size(); ++i) {
    const auto &r = trace.line_search[i];
    const double bound =
        r.accepted_unit ? r.f_ref + r.sigma * r.gtd
                        : std::min(r.f_max, r.f_ref) + r.sigma * r.lambda * r.gtd;
    const double slack = rel_tol * std::max(1.0, std::abs(bound));
    if (!(r.f_new <= bound + slack)) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace gradspec
