#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>

#include "med/dist.hpp"

namespace med {

/// Minimum KL divergence D_min(F, mu) and the maximizing dual variable.
/// Both are +inf when the mean constraint admits only the point mass at 0.
struct DminResult {
  double value = 0.0;
  double nu_star = 0.0;
};

struct SolverParams {
  int r = 50;         ///< Newton/bisection iteration budget; the only stopping rule.
  double nu0 = 0.0;   ///< Warm start, used when it falls strictly inside the bracket.
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// The dual objective and its derivatives.  F must be supported in [-1, 0];
// points with zero mass never contribute.
//
//   h(nu)   =  sum f_i log(1 - (x_i - mu) nu)
//   h'(nu)  = -sum f_i (x_i - mu) / (1 - (x_i - mu) nu)
//   h''(nu) = -sum f_i (x_i - mu)^2 / (1 - (x_i - mu) nu)^2

namespace detail {

/// h without the domain check: a non-positive log argument at a point with
/// mass yields -inf.
inline double h_or_neg_inf(const FiniteDistribution& F, double mu, double nu) {
  const auto pts = F.points();
  const auto pr = F.probs();
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pr[i] == 0.0) continue;
    const double arg = 1.0 - (pts[i] - mu) * nu;
    if (!(arg > 0.0)) return -kInfinity;
    total += pr[i] * std::log(arg);
  }
  return total;
}

struct Derivatives {
  double first = 0.0;
  double second = 0.0;
  bool in_domain = true;
};

inline Derivatives derivatives(const FiniteDistribution& F, double mu, double nu) {
  const auto pts = F.points();
  const auto pr = F.probs();
  Derivatives d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pr[i] == 0.0) continue;
    const double dx = pts[i] - mu;
    const double arg = 1.0 - dx * nu;
    if (!(arg > 0.0)) return {0.0, 0.0, false};
    d.first -= pr[i] * dx / arg;
    d.second -= pr[i] * dx * dx / (arg * arg);
  }
  return d;
}

inline void throw_domain(const char* fn, double x, double mu, double nu) {
  std::ostringstream msg;
  msg.precision(17);
  msg << fn << ": log argument 1 - (x - mu) nu <= 0 at x=" << x << ", mu=" << mu
      << ", nu=" << nu;
  throw std::domain_error(msg.str());
}

}  // namespace detail

inline double h(const FiniteDistribution& F, double mu, double nu) {
  const auto pts = F.points();
  const auto pr = F.probs();
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pr[i] == 0.0) continue;
    const double arg = 1.0 - (pts[i] - mu) * nu;
    if (!(arg > 0.0)) detail::throw_domain("h", pts[i], mu, nu);
    total += pr[i] * std::log(arg);
  }
  return total;
}

inline double h_prime(const FiniteDistribution& F, double mu, double nu) {
  const auto pts = F.points();
  const auto pr = F.probs();
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pr[i] == 0.0) continue;
    const double dx = pts[i] - mu;
    const double arg = 1.0 - dx * nu;
    if (!(arg > 0.0)) detail::throw_domain("h_prime", pts[i], mu, nu);
    total -= pr[i] * dx / arg;
  }
  return total;
}

inline double h_double_prime(const FiniteDistribution& F, double mu, double nu) {
  const auto pts = F.points();
  const auto pr = F.probs();
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pr[i] == 0.0) continue;
    const double dx = pts[i] - mu;
    const double arg = 1.0 - dx * nu;
    if (!(arg > 0.0)) detail::throw_domain("h_double_prime", pts[i], mu, nu);
    total -= pr[i] * dx * dx / (arg * arg);
  }
  return total;
}

/// Lower end of the dual bracket, (mu - E(F)) / (-mu (1 + mu)).
inline double dual_lower_bound(double mean_f, double mu) {
  return (mu - mean_f) / (-mu * (1.0 + mu));
}

/// E_F[mu / X], +inf when F puts mass on 0.
inline double expected_mu_over_x(const FiniteDistribution& F, double mu) {
  const auto pts = F.points();
  const auto pr = F.probs();
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pr[i] == 0.0) continue;
    if (pts[i] == 0.0) return kInfinity;
    total += pr[i] * mu / pts[i];
  }
  return total;
}

/// D_min(F, mu) for F on [-1, 0] and the constraint E(G) >= mu.
///
/// Trivial cases: mu <= E(F) gives (0, 0); mu > 0, or mu = 0 with F not the
/// point mass at 0, gives (+inf, +inf).  Otherwise, when F has no mass at 0
/// and E_F[mu/X] <= 1 the maximum sits at the endpoint nu = -1/mu and is
/// returned exactly.  The remaining case maximizes the concave h over
/// [nu_lo, -1/mu] with r safeguarded Newton steps, falling back to bisection
/// whenever a step leaves the open bracket.
inline DminResult dmin(const FiniteDistribution& F, double mu, SolverParams params = {}) {
  if (params.r < 1) throw std::invalid_argument("dmin: iteration budget r must be >= 1");
  if (!(params.nu0 >= 0.0)) throw std::invalid_argument("dmin: nu0 must be >= 0");
  if (F.points().front() < -1.0 || F.points().back() > 0.0) {
    throw std::invalid_argument("dmin: F must be supported in [-1, 0]");
  }

  const double mean_f = mean(F);
  if (mu <= mean_f) return {0.0, 0.0};
  if (mu >= 0.0) return {kInfinity, kInfinity};

  const double nu_top = -1.0 / mu;
  if (F.mass_at(0.0) == 0.0 && expected_mu_over_x(F, mu) <= 1.0) {
    // h(-1/mu) = sum f_i log(x_i / mu); this form keeps full precision for
    // support points just below 0, where 1 - (x - mu) nu cancels.
    const auto pts = F.points();
    const auto pr = F.probs();
    double value = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pr[i] != 0.0) value += pr[i] * std::log(pts[i] / mu);
    }
    return {value < 0.0 ? 0.0 : value, nu_top};
  }

  double lo = dual_lower_bound(mean_f, mu);
  double hi = nu_top;
  double nu = lo;
  if (params.nu0 > lo && params.nu0 < hi) nu = params.nu0;

  for (int t = 0; t < params.r; ++t) {
    const auto d = detail::derivatives(F, mu, nu);
    // Outside the log domain h' is -inf in the limit, so nu is an upper bound.
    if (d.in_domain && d.first > 0.0) {
      lo = nu;
    } else {
      hi = nu;
    }
    double next = (d.in_domain && d.second != 0.0) ? nu - d.first / d.second
                                                   : lo - 1.0;  // forces bisection
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    nu = next;
  }

  DminResult best{detail::h_or_neg_inf(F, mu, lo), lo};
  for (double cand : {hi, nu}) {
    const double v = detail::h_or_neg_inf(F, mu, cand);
    if (v > best.value) best = {v, cand};
  }
  if (best.value < 0.0) best.value = 0.0;
  return best;
}

}  // namespace med
