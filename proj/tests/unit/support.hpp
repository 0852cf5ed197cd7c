#pragma once

#include <cmath>
#include <random>

#include "gradspec/problem.hpp"

namespace testing {

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

inline gradspec::Vector random_vector(std::mt19937_64 &rng, Eigen::Index n, double lo = -1.0,
                                      double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  gradspec::Vector v(n);
  for (auto &x : v) x = u(rng);
  return v;
}

inline gradspec::Vector vec(std::initializer_list<double> xs) {
  gradspec::Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace testing
