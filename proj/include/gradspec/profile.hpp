#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gradspec/bench.hpp"

namespace gradspec {

enum class ProfileMetric { iterations, func_evals, cpu_time };

std::string_view to_string(ProfileMetric m) noexcept;
ProfileMetric parse_profile_metric(std::string_view name);

/// Metric of one solver on one problem; unsolved entries count as r = inf.
struct ProfileEntry {
  std::string problem;
  std::string solver;
  double metric = 0.0;
  bool solved = true;
};

struct ProfileCurve {
  std::string solver;
  /// (tau, rho(tau)) at every tau where rho jumps, ascending.
  std::vector<std::pair<double, double>> breakpoints;

  /// Fraction of problems with r <= tau.
  double rho(double tau) const;
  double terminal() const { return breakpoints.empty() ? 0.0 : breakpoints.back().second; }
};

struct ProfileData {
  ProfileMetric metric = ProfileMetric::iterations;
  std::size_t problem_count = 0;
  std::vector<ProfileCurve> curves;  // sorted by solver name

  const ProfileCurve &curve(const std::string &solver) const;
};

/// r_{p,s} = metric_{p,s} / min_s metric_{p,s} over solvers that solved p;
/// rho_s(tau) = |{p : r_{p,s} <= tau}| / |P|.
ProfileData performance_profile(const std::vector<ProfileEntry> &entries,
                                ProfileMetric metric);

/// Entries from result rows: problem = family/kappa/eps/seed, solver =
/// method, suffixed _h<h>_s<s> when nonzero. cpu_time is not in the CSV schema and
/// throws invalid_argument.
std::vector<ProfileEntry> profile_entries(const std::vector<ResultRow> &rows,
                                          ProfileMetric metric);

/// CSV with header solver,tau,rho; one line per breakpoint.
void write_profile_csv(std::ostream &os, const ProfileData &data);

}  // namespace gradspec
