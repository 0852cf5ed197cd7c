#include "gradspec/profile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>

namespace gradspec {

std::string_view to_string(ProfileMetric m) noexcept {
  switch (m) {
    case ProfileMetric::iterations: return "iterations";
    case ProfileMetric::func_evals: return "func_evals";
    case ProfileMetric::cpu_time: return "cpu_time";
  }
  return "?";
}

ProfileMetric parse_profile_metric(std::string_view name) {
  std::string s;
  for (char c : name)
    s.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "iterations" || s == "iters") return ProfileMetric::iterations;
  if (s == "func_evals" || s == "fevals") return ProfileMetric::func_evals;
  if (s == "cpu_time" || s == "time") return ProfileMetric::cpu_time;
  throw Error(ErrorKind::invalid_argument, "unknown profile metric '" + std::string(name) + "'");
}

double ProfileCurve::rho(double tau) const {
  double value = 0.0;
  for (const auto &[t, r] : breakpoints) {
    if (t > tau) break;
    value = r;
  }
  return value;
}

const ProfileCurve &ProfileData::curve(const std::string &solver) const {
  for (const auto &c : curves)
    if (c.solver == solver) return c;
  throw Error(ErrorKind::invalid_argument, "no profile for solver '" + solver + "'");
}

ProfileData performance_profile(const std::vector<ProfileEntry> &entries,
                                ProfileMetric metric) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::set<std::string> problems, solvers;
  std::map<std::pair<std::string, std::string>, double> value;
  for (const auto &e : entries) {
    if (e.solved && !(e.metric > 0.0))
      throw Error(ErrorKind::invalid_argument,
                  "profile: metric must be positive for " + e.problem + "/" + e.solver);
    problems.insert(e.problem);
    solvers.insert(e.solver);
    value[{e.problem, e.solver}] = e.solved ? e.metric : inf;
  }
  std::map<std::string, double> best;
  for (const auto &p : problems) {
    double m = inf;
    for (const auto &s : solvers) {
      auto it = value.find({p, s});
      if (it != value.end()) m = std::min(m, it->second);
    }
    best[p] = m;
  }

  ProfileData data;
  data.metric = metric;
  data.problem_count = problems.size();
  const double total = static_cast<double>(problems.size());
  for (const auto &s : solvers) {
    std::vector<double> ratios;
    for (const auto &p : problems) {
      auto it = value.find({p, s});
      if (it == value.end() || !std::isfinite(it->second) || !std::isfinite(best[p])) continue;
      ratios.push_back(it->second / best[p]);
    }
    std::sort(ratios.begin(), ratios.end());
    ProfileCurve c;
    c.solver = s;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      if (i + 1 < ratios.size() && ratios[i + 1] == ratios[i]) continue;
      c.breakpoints.emplace_back(ratios[i], static_cast<double>(i + 1) / total);
    }
    data.curves.push_back(std::move(c));
  }
  return data;
}

std::vector<ProfileEntry> profile_entries(const std::vector<ResultRow> &rows,
                                          ProfileMetric metric) {
  if (metric == ProfileMetric::cpu_time)
    throw Error(ErrorKind::invalid_argument,
                "profile: cpu_time is not recorded in result files");
  std::vector<ProfileEntry> out;
  char buf[128];
  for (const auto &r : rows) {
    ProfileEntry e;
    std::snprintf(buf, sizeof buf, "/%.17g/%.17g/%llu", r.kappa, r.eps,
                  static_cast<unsigned long long>(r.seed));
    e.problem = r.family + buf;
    e.solver = r.method;
    if (r.h != 0 || r.s != 0)
      e.solver += "_h" + std::to_string(r.h) + "_s" + std::to_string(r.s);
    e.metric = metric == ProfileMetric::iterations ? static_cast<double>(r.iters)
                                                    : static_cast<double>(r.func_evals);
    // A run solved at its first iterate has ratio 1 against anything.
    if (e.metric <= 0.0) e.metric = 1.0;
    e.solved = r.solved();
    out.push_back(std::move(e));
  }
  return out;
}

void write_profile_csv(std::ostream &os, const ProfileData &data) {
  os << "solver,tau,rho\n";
  char buf[96];
  for (const auto &c : data.curves)
    for (const auto &[tau, rho] : c.breakpoints) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", tau, rho);
      os << c.solver << ',' << buf << '\n';
    }
}

}  // namespace gradspec
