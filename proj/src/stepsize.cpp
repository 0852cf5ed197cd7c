#include "gradspec/stepsize.hpp"

#include <cmath>
#include <sstream>

namespace gradspec {

namespace {

void check_same_size(const Vector &a, const Vector &b, const char *what) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << what << ": length " << a.size() << " vs " << b.size();
    throw Error(ErrorKind::dimension_mismatch, os.str());
  }
}

double rayleigh_inverse(const Vector &d, const Vector &ad, const char *what) {
  const double dd = d.squaredNorm();
  if (dd == 0.0)
    throw Error(ErrorKind::degenerate, std::string(what) + ": degenerate direction");
  const double dad = d.dot(ad);
  if (dad == 0.0)
    throw Error(ErrorKind::undefined, std::string(what) + ": d'Ad vanished");
  return dd / dad;
}

double nonzero_norm(const Vector &g, const char *what) {
  const double n = g.norm();
  if (n == 0.0)
    throw Error(ErrorKind::degenerate,
                std::string(what) + ": zero gradient (converged/degenerate)");
  return n;
}

}  // namespace

// StepsizeMemory ------------------------------------------------------------

void StepsizeMemory::reset(const Vector &x1, const Vector &g1) {
  check_same_size(x1, g1, "StepsizeMemory::reset");
  count_ = 1;
  x_cur_ = x1;
  g_cur_ = g1;
  gnorm_cur_ = g1.norm();
  g_prev_.resize(0);
  s_prev_.resize(0);
  y_prev_.resize(0);
  ybar_prev_.resize(0);
  alpha_prev_ = alpha_prev2_ = 0.0;
  gnorm_prev_ = gnorm_prev2_ = 0.0;
  bbbar_prev_ = {};
  sd_prev.reset();
  baralpha_prev.reset();
}

void StepsizeMemory::advance(const Vector &x_next, const Vector &g_next,
                             double alpha_used) {
  if (count_ == 0)
    throw Error(ErrorKind::cold_memory, "StepsizeMemory::advance before reset");
  check_same_size(x_next, x_cur_, "StepsizeMemory::advance x");
  check_same_size(g_next, g_cur_, "StepsizeMemory::advance g");

  if (count_ >= 2) bbbar_prev_ = bar_bb_stepsizes(s_prev_, ybar_prev_);

  s_prev_ = x_next - x_cur_;
  y_prev_ = g_next - g_cur_;
  ybar_prev_ = modified_y(s_prev_, y_prev_);
  g_prev_.swap(g_cur_);
  g_cur_ = g_next;
  x_cur_ = x_next;

  gnorm_prev2_ = gnorm_prev_;
  gnorm_prev_ = gnorm_cur_;
  gnorm_cur_ = g_cur_.norm();
  alpha_prev2_ = alpha_prev_;
  alpha_prev_ = alpha_used;
  ++count_;
}

void StepsizeMemory::require(int iterates, const char *what) const {
  if (count_ < iterates) {
    std::ostringstream os;
    os << "StepsizeMemory::" << what << " needs " << iterates
       << " iterates, memory holds " << count_;
    throw Error(ErrorKind::cold_memory, os.str());
  }
}

const Vector &StepsizeMemory::g_prev() const { require(2, "g_prev"); return g_prev_; }
const Vector &StepsizeMemory::s_prev() const { require(2, "s_prev"); return s_prev_; }
const Vector &StepsizeMemory::y_prev() const { require(2, "y_prev"); return y_prev_; }
const Vector &StepsizeMemory::ybar_prev() const { require(2, "ybar_prev"); return ybar_prev_; }
double StepsizeMemory::alpha_prev() const { require(2, "alpha_prev"); return alpha_prev_; }
double StepsizeMemory::alpha_prev2() const { require(3, "alpha_prev2"); return alpha_prev2_; }
double StepsizeMemory::gnorm_prev() const { require(2, "gnorm_prev"); return gnorm_prev_; }
double StepsizeMemory::gnorm_prev2() const { require(3, "gnorm_prev2"); return gnorm_prev2_; }
const BBPair &StepsizeMemory::bbbar_prev() const { require(3, "bbbar_prev"); return bbbar_prev_; }

// Formulas -------------------------------------------------------------------

double sd_stepsize(const Vector &g, const QuadraticProblem &p) {
  nonzero_norm(g, "sd_stepsize");
  const Vector ag = p.apply(g);
  return g.squaredNorm() / g.dot(ag);
}

BBPair bb_stepsizes(const Vector &s, const Vector &y) {
  check_same_size(s, y, "bb_stepsizes");
  const double sty = s.dot(y);
  const double yty = y.squaredNorm();
  BBPair out;
  if (sty != 0.0) out.bb1 = s.squaredNorm() / sty;
  if (yty != 0.0) out.bb2 = sty / yty;
  return out;
}

BBPair bb_stepsizes(const StepsizeMemory &mem) {
  return bb_stepsizes(mem.s_prev(), mem.y_prev());
}

double aopt_stepsize(const Vector &g, const QuadraticProblem &p) {
  const double gn = nonzero_norm(g, "aopt_stepsize");
  return gn / p.apply(g).norm();
}

double yuan_stepsize(double sd_prev, double sd_cur, double gnorm_prev,
                     double gnorm_cur) {
  if (!(sd_prev > 0.0) || !(sd_cur > 0.0) || !(gnorm_prev > 0.0) ||
      !(gnorm_cur > 0.0))
    throw Error(ErrorKind::invalid_argument,
                "yuan_stepsize: all inputs must be strictly positive");
  const double inv_prev = 1.0 / sd_prev;
  const double inv_cur = 1.0 / sd_cur;
  const double diff = inv_prev - inv_cur;
  const double ratio = gnorm_cur / (sd_prev * gnorm_prev);
  return 2.0 / (std::sqrt(diff * diff + 4.0 * ratio * ratio) + inv_prev + inv_cur);
}

double bar_alpha_from_products(const Vector &g_prev, const Vector &ag_prev,
                               const Vector &g_cur, const Vector &ag_cur,
                               bool hat) {
  check_same_size(g_prev, g_cur, "bar_alpha");
  check_same_size(ag_prev, ag_cur, "bar_alpha");
  const char *name = hat ? "hat_alpha" : "bar_alpha";
  const double np = nonzero_norm(g_prev, name);
  const double nc = nonzero_norm(g_cur, name);
  const double sign = hat ? 1.0 : -1.0;
  const Vector d = g_prev / np + sign * (g_cur / nc);
  const Vector ad = ag_prev / np + sign * (ag_cur / nc);
  return rayleigh_inverse(d, ad, name);
}

double bar_alpha_direct(const Vector &g_prev, const Vector &g_cur,
                        const QuadraticProblem &p) {
  return bar_alpha_from_products(g_prev, p.apply(g_prev), g_cur, p.apply(g_cur));
}

double hat_alpha_direct(const Vector &g_prev, const Vector &g_cur,
                        const QuadraticProblem &p) {
  return bar_alpha_from_products(g_prev, p.apply(g_prev), g_cur, p.apply(g_cur),
                                 true);
}

double p_stepsize(const StepsizeMemory &mem, bool use_modified_y) {
  const Vector &y = use_modified_y ? mem.ybar_prev() : mem.y_prev();
  const double yn = y.norm();
  if (yn == 0.0)
    throw Error(ErrorKind::undefined, "p_stepsize: zero y");
  return mem.s_prev().norm() / yn;
}

Vector modified_y(const Vector &s, const Vector &y) {
  check_same_size(s, y, "modified_y");
  return (s.array() == 0.0).select(0.0, y);
}

BBPair bar_bb_stepsizes(const Vector &s, const Vector &ybar) {
  return bb_stepsizes(s, ybar);
}

double bar_alpha_general(double gnorm_km2, double gnorm_km1, double alpha_km2,
                         double bb1bar_km1, double bb2bar_km1,
                         double bb1bar_k) {
  if (gnorm_km1 == 0.0 || bb1bar_km1 == 0.0 || bb2bar_km1 == 0.0 ||
      bb1bar_k == 0.0)
    throw Error(ErrorKind::undefined, "bar_alpha_general: zero denominator");
  const double r = gnorm_km2 / gnorm_km1;
  const double num = 2.0 - 2.0 * r * (bb1bar_km1 - alpha_km2) / bb1bar_km1;
  const double den = 1.0 / bb1bar_km1 + 1.0 / bb1bar_k -
                     2.0 * r * (bb2bar_km1 - alpha_km2) / (bb1bar_km1 * bb2bar_km1);
  if (den == 0.0)
    throw Error(ErrorKind::undefined, "bar_alpha_general: zero denominator");
  return num / den;
}

double bar_alpha_general(const StepsizeMemory &mem) {
  if (mem.iterates() < 3)
    throw Error(ErrorKind::cold_memory,
                "bar_alpha_general needs three iterates in memory");
  const BBPair &older = mem.bbbar_prev();
  const BBPair cur = bar_bb_stepsizes(mem.s_prev(), mem.ybar_prev());
  if (!older.bb1 || !older.bb2 || !cur.bb1)
    throw Error(ErrorKind::undefined,
                "bar_alpha_general: modified BB stepsize undefined");
  return bar_alpha_general(mem.gnorm_prev2(), mem.gnorm_prev(), mem.alpha_prev2(),
                           *older.bb1, *older.bb2, *cur.bb1);
}

}  // namespace gradspec
