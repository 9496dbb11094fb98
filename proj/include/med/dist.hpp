#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "med/rng.hpp"

namespace med {

/// Probability mass function on finitely many points inside [lo, hi].
/// Points are strictly increasing and the masses sum to one.
class FiniteDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  FiniteDistribution(std::vector<double> points, std::vector<double> probs, double lo, double hi)
      : points_(std::move(points)), probs_(std::move(probs)) {
    validate(lo, hi);
  }

  static FiniteDistribution point_mass(double x) { return FiniteDistribution({x}, {1.0}, x, x); }

  std::span<const double> points() const { return points_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return points_.size(); }

  /// Mass at exactly x (zero if x is not a support point).
  double mass_at(double x) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i] == x) return probs_[i];
    }
    return 0.0;
  }

 private:
  struct Trusted {};
  FiniteDistribution(Trusted, std::vector<double> points, std::vector<double> probs)
      : points_(std::move(points)), probs_(std::move(probs)) {}

  friend class EmpiricalState;

  void validate(double lo, double hi) const {
    if (points_.empty()) throw std::invalid_argument("FiniteDistribution: empty support");
    if (points_.size() != probs_.size()) {
      throw std::invalid_argument("FiniteDistribution: points and probs differ in length");
    }
    if (!(lo <= hi)) throw std::invalid_argument("FiniteDistribution: bounds require lo <= hi");
    double total = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i]) || points_[i] < lo || points_[i] > hi) {
        std::ostringstream msg;
        msg << "FiniteDistribution: point " << points_[i] << " outside [" << lo << ", " << hi
            << "]";
        throw std::invalid_argument(msg.str());
      }
      if (i > 0 && !(points_[i] > points_[i - 1])) {
        throw std::invalid_argument("FiniteDistribution: points must be strictly increasing");
      }
      if (!(probs_[i] >= 0.0)) {
        throw std::invalid_argument("FiniteDistribution: probabilities must be non-negative");
      }
      total += probs_[i];
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "FiniteDistribution: probabilities sum to " << total;
      throw std::invalid_argument(msg.str());
    }
  }

  std::vector<double> points_;
  std::vector<double> probs_;
};

inline double mean(const FiniteDistribution& d) {
  double m = 0.0;
  const auto pts = d.points();
  const auto pr = d.probs();
  for (std::size_t i = 0; i < pts.size(); ++i) m += pts[i] * pr[i];
  return m;
}

inline double variance(const FiniteDistribution& d) {
  const double m = mean(d);
  double v = 0.0;
  const auto pts = d.points();
  const auto pr = d.probs();
  for (std::size_t i = 0; i < pts.size(); ++i) v += pr[i] * (pts[i] - m) * (pts[i] - m);
  return v;
}

/// Inverse-CDF draw over the cumulative masses in support order.
inline double sample(const FiniteDistribution& d, RandomStream& rng) {
  const double u = rng.uniform();
  const auto pts = d.points();
  const auto pr = d.probs();
  double cum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cum += pr[i];
    if (u < cum) return pts[i];
  }
  // u landed in the rounding slack above the last cumulative sum.
  for (std::size_t i = pts.size(); i-- > 0;) {
    if (pr[i] > 0.0) return pts[i];
  }
  return pts.back();
}

struct Bernoulli {
  double p;
};
struct Discrete {
  FiniteDistribution dist;
};
struct Beta {
  double alpha;
  double beta;
};

/// One arm's reward law.  Bernoulli arms pay 0 or 1 and beta arms live on
/// [0, 1], so both require [0, 1] inside the declared bounds.
class ArmModel {
 public:
  using Kind = std::variant<Bernoulli, Discrete, Beta>;

  ArmModel(Kind kind, double lo, double hi) : kind_(std::move(kind)), lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw std::invalid_argument("ArmModel: bounds require a < b");
    std::visit([this](const auto& k) { check(k); }, kind_);
  }

  static ArmModel bernoulli(double p, double lo = 0.0, double hi = 1.0) {
    return ArmModel(Bernoulli{p}, lo, hi);
  }
  static ArmModel beta(double alpha, double beta, double lo = 0.0, double hi = 1.0) {
    return ArmModel(Beta{alpha, beta}, lo, hi);
  }
  static ArmModel discrete(std::vector<double> points, std::vector<double> probs, double lo = 0.0,
                           double hi = 1.0) {
    return ArmModel(Discrete{FiniteDistribution(std::move(points), std::move(probs), lo, hi)}, lo,
                    hi);
  }

  const Kind& kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool is_finite_support() const { return !std::holds_alternative<Beta>(kind_); }

 private:
  void check(const Bernoulli& b) const {
    if (!(b.p >= 0.0 && b.p <= 1.0)) throw std::invalid_argument("bernoulli: p must be in [0, 1]");
    require_unit_interval("bernoulli");
  }
  void check(const Beta& b) const {
    if (!(b.alpha > 0.0) || !(b.beta > 0.0)) {
      throw std::invalid_argument("beta: alpha and beta must be > 0");
    }
    require_unit_interval("beta");
  }
  void check(const Discrete& d) const {
    const auto pts = d.dist.points();
    if (pts.front() < lo_ || pts.back() > hi_) {
      throw std::invalid_argument("discrete: support outside declared bounds");
    }
  }
  void require_unit_interval(const char* what) const {
    if (lo_ > 0.0 || hi_ < 1.0) {
      throw std::invalid_argument(std::string(what) + ": bounds must contain [0, 1]");
    }
  }

  Kind kind_;
  double lo_;
  double hi_;
};

inline double arm_mean(const ArmModel& m) {
  struct Visitor {
    double operator()(const Bernoulli& b) const { return b.p; }
    double operator()(const Discrete& d) const { return mean(d.dist); }
    double operator()(const Beta& b) const { return b.alpha / (b.alpha + b.beta); }
  };
  return std::visit(Visitor{}, m.kind());
}

inline double sample(const ArmModel& m, RandomStream& rng) {
  struct Visitor {
    RandomStream& rng;
    double operator()(const Bernoulli& b) const { return rng.uniform() < b.p ? 1.0 : 0.0; }
    double operator()(const Discrete& d) const { return sample(d.dist, rng); }
    double operator()(const Beta& b) const { return beta_variate(b.alpha, b.beta, rng); }
  };
  return std::visit(Visitor{rng}, m.kind());
}

/// Affine map of [a, b] onto [-1, 0]: b goes to 0 and a to -1.
inline double shift_reward(double x, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("shift_reward: requires a < b");
  if (!(x >= a && x <= b)) {
    std::ostringstream msg;
    msg << "shift_reward: reward " << x << " outside [" << a << ", " << b << "]";
    throw std::domain_error(msg.str());
  }
  return (x - b) / (b - a);
}

/// Shifts every support point of d from [a, b] onto [-1, 0].
/// Points that round to the same shifted value are merged.
inline FiniteDistribution shift_distribution(const FiniteDistribution& d, double a, double b) {
  std::vector<double> pts;
  std::vector<double> pr;
  pts.reserve(d.size());
  pr.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = shift_reward(d.points()[i], a, b);
    if (!pts.empty() && x <= pts.back()) {
      pr.back() += d.probs()[i];
    } else {
      pts.push_back(x);
      pr.push_back(d.probs()[i]);
    }
  }
  return FiniteDistribution(std::move(pts), std::move(pr), -1.0, 0.0);
}

/// Running record of one arm's shifted rewards.  Counts are keyed by the
/// exact floating-point value; no binning.
class EmpiricalState {
 public:
  void record(double shifted_reward) {
    if (!(shifted_reward >= -1.0 && shifted_reward <= 0.0)) {
      throw std::domain_error("EmpiricalState::record: reward outside [-1, 0]");
    }
    ++counts_[shifted_reward];
    ++pulls_;
    sum_ += shifted_reward;
  }

  std::uint64_t pulls() const { return pulls_; }
  double sum() const { return sum_; }
  std::size_t support_size() const { return counts_.size(); }
  const std::map<double, std::uint64_t>& counts() const { return counts_; }

  double mean() const {
    if (pulls_ == 0) throw std::logic_error("EmpiricalState::mean: no pulls recorded");
    return sum_ / static_cast<double>(pulls_);
  }

  FiniteDistribution to_distribution() const {
    if (pulls_ == 0) throw std::logic_error("EmpiricalState::to_distribution: no pulls recorded");
    std::vector<double> pts;
    std::vector<double> pr;
    pts.reserve(counts_.size());
    pr.reserve(counts_.size());
    const double n = static_cast<double>(pulls_);
    for (const auto& [x, c] : counts_) {
      pts.push_back(x);
      pr.push_back(static_cast<double>(c) / n);
    }
    return FiniteDistribution(FiniteDistribution::Trusted{}, std::move(pts), std::move(pr));
  }

 private:
  std::map<double, std::uint64_t> counts_;
  std::uint64_t pulls_ = 0;
  double sum_ = 0.0;
};

}  // namespace med
