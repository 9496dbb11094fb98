#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "med/dist.hpp"
#include "med/dmin.hpp"
#include "med/rng.hpp"

namespace med {

/// w_j = exp(-T'_j D_j).  An infinite divergence gives weight 0; a current
/// best arm (D_j = 0) gives weight exactly 1.
inline std::vector<double> med_weights(std::span<const std::uint64_t> pulls,
                                       std::span<const double> divergences) {
  if (pulls.size() != divergences.size()) {
    throw std::invalid_argument("med_weights: pulls and divergences differ in length");
  }
  std::vector<double> w(pulls.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = std::exp(-static_cast<double>(pulls[j]) * divergences[j]);
  }
  return w;
}

inline std::vector<double> normalize(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> p(weights.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = weights[j] / total;
  return p;
}

/// Inverse-CDF draw of an index with probability w_j / sum(w), one uniform.
inline std::size_t med_select(std::span<const double> weights, RandomStream& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::logic_error("med_select: negative or NaN weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::logic_error("med_select: all weights are zero");
  const double target = rng.uniform() * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) last_positive = j;
    cum += weights[j];
    if (target < cum) return j;
  }
  return last_positive;
}

// Index policies on rewards normalized to [0, 1].  n is the number of plays
// so far and pulls the arm's play count before this round.

inline double ucb1_index(double mean01, std::uint64_t pulls, std::uint64_t n) {
  return mean01 + std::sqrt(2.0 * std::log(static_cast<double>(n)) / static_cast<double>(pulls));
}

inline double ucb_tuned_index(double mean01, double mean_sq01, std::uint64_t pulls,
                              std::uint64_t n) {
  const double s = static_cast<double>(pulls);
  const double log_n = std::log(static_cast<double>(n));
  const double sample_var = std::max(0.0, mean_sq01 - mean01 * mean01);
  const double v = sample_var + std::sqrt(2.0 * log_n / s);
  return mean01 + std::sqrt(log_n / s * std::min(0.25, v));
}

/// tau(r) = ceil((1 + alpha)^r)
inline std::uint64_t ucb2_tau(double alpha, std::uint64_t epoch) {
  return static_cast<std::uint64_t>(std::ceil(std::pow(1.0 + alpha, static_cast<double>(epoch))));
}

/// sqrt((1 + alpha) ln(e n / tau) / (2 tau)); the log is floored at 0 once
/// tau exceeds e n.
inline double ucb2_bonus(double alpha, std::uint64_t n, std::uint64_t tau) {
  const double t = static_cast<double>(tau);
  const double log_term =
      std::max(0.0, std::log(std::numbers::e * static_cast<double>(n) / t));
  return std::sqrt((1.0 + alpha) * log_term / (2.0 * t));
}

struct PolicyConfig {
  enum class Kind { med, med_ideal, ucb1, ucb_tuned, ucb2, uniform_random };
  /// Where m_i is anchored after an exact solve.  best_mean re-anchors on
  /// the current best empirical mean; arm_mean follows the literal
  /// pseudocode (m_i := the arm's own mean, no re-anchoring when linear).
  enum class Anchor { best_mean, arm_mean };

  Kind kind = Kind::med;
  std::string label;
  int r = 2;
  double d = 0.01;
  double alpha = 0.001;
  Anchor anchor = Anchor::best_mean;

  static PolicyConfig med(int r = 2, double d = 0.01) {
    return {Kind::med, "", r, d, 0.001, Anchor::best_mean};
  }
  static PolicyConfig med_ideal(int r = 50) {
    return {Kind::med_ideal, "", r, 0.0, 0.001, Anchor::best_mean};
  }
  static PolicyConfig ucb1() { return {Kind::ucb1, "", 2, 0.0, 0.001, Anchor::best_mean}; }
  static PolicyConfig ucb_tuned() {
    return {Kind::ucb_tuned, "", 2, 0.0, 0.001, Anchor::best_mean};
  }
  static PolicyConfig ucb2(double alpha = 0.001) {
    return {Kind::ucb2, "", 2, 0.0, alpha, Anchor::best_mean};
  }
  static PolicyConfig uniform_random() {
    return {Kind::uniform_random, "", 2, 0.0, 0.001, Anchor::best_mean};
  }
};

inline std::string default_label(const PolicyConfig& c) {
  auto num = [](double x) {
    std::string s = std::to_string(x);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  switch (c.kind) {
    case PolicyConfig::Kind::med:
      return "med(r=" + std::to_string(c.r) + ",d=" + num(c.d) +
             (c.anchor == PolicyConfig::Anchor::arm_mean ? ",anchor=arm" : "") + ")";
    case PolicyConfig::Kind::med_ideal:
      return "med-ideal(r=" + std::to_string(c.r) + ")";
    case PolicyConfig::Kind::ucb1:
      return "ucb1";
    case PolicyConfig::Kind::ucb_tuned:
      return "ucb-tuned";
    case PolicyConfig::Kind::ucb2:
      return "ucb2(alpha=" + num(c.alpha) + ")";
    case PolicyConfig::Kind::uniform_random:
      return "uniform-random";
  }
  return "unknown";
}

inline std::string label_of(const PolicyConfig& c) {
  return c.label.empty() ? default_label(c) : c.label;
}

/// Select / observe interface shared by all policies.  Rewards arrive on the
/// environment's scale [lo, hi] and are shifted to [-1, 0] on entry.  The
/// episode driver pulls every arm once before the first select().
class Policy {
 public:
  Policy(std::size_t num_arms, double lo, double hi)
      : arms_(num_arms), lo_(lo), hi_(hi) {
    if (num_arms < 1) throw std::invalid_argument("Policy: needs at least one arm");
  }
  virtual ~Policy() = default;
  Policy(const Policy&) = delete;
  Policy& operator=(const Policy&) = delete;

  /// Chooses the arm for round n = total_pulls() + 1.
  virtual std::size_t select(RandomStream& rng) = 0;

  void observe(std::size_t arm, double reward) {
    if (arm >= arms_.size()) throw std::out_of_range("Policy::observe: arm index out of range");
    const double shifted = shift_reward(reward, lo_, hi_);
    arms_[arm].record(shifted);
    ++total_pulls_;
    last_arm_ = arm;
    has_last_ = true;
    on_observe(arm, shifted);
  }

  std::size_t num_arms() const { return arms_.size(); }
  std::uint64_t total_pulls() const { return total_pulls_; }
  std::uint64_t round() const { return total_pulls_ + 1; }
  const std::vector<EmpiricalState>& arms() const { return arms_; }

  std::vector<std::uint64_t> pulls() const {
    std::vector<std::uint64_t> t(arms_.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = arms_[j].pulls();
    return t;
  }

 protected:
  virtual void on_observe(std::size_t /*arm*/, double /*shifted*/) {}

  void require_initialized() const {
    for (const auto& a : arms_) {
      if (a.pulls() == 0) throw std::logic_error("select() before every arm was pulled once");
    }
  }

  /// Shifted reward mapped back to [0, 1].
  static double unit(double shifted) { return shifted + 1.0; }

  std::vector<EmpiricalState> arms_;
  double lo_;
  double hi_;
  std::uint64_t total_pulls_ = 0;
  std::size_t last_arm_ = 0;
  bool has_last_ = false;
};

/// Per-arm cache of the practical MED policy.
struct MedArmCache {
  double D_hat = 0.0;
  double nu = 0.0;
  double m = 0.0;
};

/// Counters for comparing cached divergences against fresh exact solves.
struct ShadowStats {
  std::uint64_t pairs = 0;
  std::uint64_t within = 0;
  double max_abs_error = 0.0;
};

/// Minimum Empirical Divergence.  Each round every arm's D_hat_i is either
/// moved linearly along its dual slope nu_i (arm not played last round and
/// the best mean drifted less than d since the anchor m_i) or re-solved with
/// r warm-started iterations.  d = 0 disables the linear branch, which is
/// the ideal policy when r is large.
class MedPolicy final : public Policy {
 public:
  static constexpr double kShadowTolerance = 0.02;
  static constexpr int kShadowBudget = 50;

  MedPolicy(std::size_t num_arms, double lo, double hi, int r, double d,
            PolicyConfig::Anchor anchor = PolicyConfig::Anchor::best_mean,
            bool shadow_check = false)
      : Policy(num_arms, lo, hi),
        r_(r),
        d_(d),
        anchor_(anchor),
        shadow_check_(shadow_check),
        cache_(num_arms),
        weights_(num_arms, 1.0),
        probs_(num_arms, 1.0 / static_cast<double>(num_arms)) {
    if (r < 1) throw std::invalid_argument("MedPolicy: r must be >= 1");
    if (!(d >= 0.0)) throw std::invalid_argument("MedPolicy: d must be >= 0");
  }

  std::size_t select(RandomStream& rng) override {
    require_initialized();
    const double mu_star = best_mean();

    if (!initialized_) {
      for (std::size_t i = 0; i < arms_.size(); ++i) {
        const auto res = solve(i, mu_star, 0.0);
        cache_[i] = {res.value, res.nu_star, mu_star};
      }
      initialized_ = true;
    }

    for (std::size_t i = 0; i < arms_.size(); ++i) {
      auto& c = cache_[i];
      const bool played_last = has_last_ && last_arm_ == i;
      if (arms_[i].mean() >= mu_star) {
        // A current best arm: G = F_hat_i is feasible, D = 0 exactly.
        c = {0.0, 0.0, mu_star};
      } else if (!played_last && std::isfinite(c.D_hat) && std::abs(mu_star - c.m) < d_) {
        c.D_hat = std::max(0.0, c.D_hat + c.nu * (mu_star - c.m));
        if (anchor_ == PolicyConfig::Anchor::best_mean) c.m = mu_star;
      } else {
        const auto res = solve(i, mu_star, c.nu);
        c.D_hat = res.value;
        c.nu = res.nu_star;
        c.m = anchor_ == PolicyConfig::Anchor::best_mean ? mu_star : arms_[i].mean();
      }
    }

    if (shadow_check_) record_shadow(mu_star);

    std::vector<double> divergences(arms_.size());
    for (std::size_t i = 0; i < arms_.size(); ++i) divergences[i] = cache_[i].D_hat;
    const auto t = pulls();
    weights_ = med_weights(t, divergences);
    probs_ = normalize(weights_);
    return med_select(weights_, rng);
  }

  double best_mean() const {
    double best = -kInfinity;
    for (const auto& a : arms_) best = std::max(best, a.mean());
    return best;
  }

  const std::vector<MedArmCache>& cache() const { return cache_; }
  const std::vector<double>& last_weights() const { return weights_; }
  const std::vector<double>& last_probabilities() const { return probs_; }
  const ShadowStats& shadow_stats() const { return shadow_; }
  int budget() const { return r_; }
  double drift_threshold() const { return d_; }

 private:
  DminResult solve(std::size_t i, double mu_star, double nu0) const {
    if (arms_[i].mean() >= mu_star) return {0.0, 0.0};
    const double nu_start = std::isfinite(nu0) ? nu0 : 0.0;
    return dmin(arms_[i].to_distribution(), mu_star, {r_, nu_start});
  }

  void record_shadow(double mu_star) {
    for (std::size_t i = 0; i < arms_.size(); ++i) {
      double exact = 0.0;
      if (arms_[i].mean() < mu_star) {
        exact = dmin(arms_[i].to_distribution(), mu_star, {kShadowBudget, 0.0}).value;
      }
      const double cached = cache_[i].D_hat;
      double err;
      if (std::isinf(exact) || std::isinf(cached)) {
        err = (exact == cached) ? 0.0 : kInfinity;
      } else {
        err = std::abs(cached - exact);
      }
      ++shadow_.pairs;
      if (err <= kShadowTolerance) ++shadow_.within;
      shadow_.max_abs_error = std::max(shadow_.max_abs_error, err);
    }
  }

  int r_;
  double d_;
  PolicyConfig::Anchor anchor_;
  bool shadow_check_;
  bool initialized_ = false;
  std::vector<MedArmCache> cache_;
  std::vector<double> weights_;
  std::vector<double> probs_;
  ShadowStats shadow_;
};

class Ucb1Policy final : public Policy {
 public:
  using Policy::Policy;

  std::size_t select(RandomStream& /*rng*/) override {
    require_initialized();
    std::size_t best = 0;
    double best_index = -kInfinity;
    for (std::size_t j = 0; j < arms_.size(); ++j) {
      const double idx =
          ucb1_index(unit(arms_[j].mean()), arms_[j].pulls(), total_pulls_);
      if (idx > best_index) {
        best_index = idx;
        best = j;
      }
    }
    return best;
  }
};

class UcbTunedPolicy final : public Policy {
 public:
  UcbTunedPolicy(std::size_t num_arms, double lo, double hi)
      : Policy(num_arms, lo, hi), sum_sq_(num_arms, 0.0) {}

  std::size_t select(RandomStream& /*rng*/) override {
    require_initialized();
    std::size_t best = 0;
    double best_index = -kInfinity;
    for (std::size_t j = 0; j < arms_.size(); ++j) {
      const double s = static_cast<double>(arms_[j].pulls());
      const double idx =
          ucb_tuned_index(unit(arms_[j].mean()), sum_sq_[j] / s, arms_[j].pulls(),
                          total_pulls_);
      if (idx > best_index) {
        best_index = idx;
        best = j;
      }
    }
    return best;
  }

 private:
  void on_observe(std::size_t arm, double shifted) override {
    const double x = unit(shifted);
    sum_sq_[arm] += x * x;
  }

  std::vector<double> sum_sq_;
};

/// UCB2: the arm with the largest mean + a(n, r_j) is played for an epoch of
/// tau(r_j + 1) - tau(r_j) rounds; zero-length epochs only advance r_j.
class Ucb2Policy final : public Policy {
 public:
  Ucb2Policy(std::size_t num_arms, double lo, double hi, double alpha)
      : Policy(num_arms, lo, hi), alpha_(alpha), epochs_(num_arms, 0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ucb2: alpha must be in (0, 1)");
  }

  std::size_t select(RandomStream& /*rng*/) override {
    require_initialized();
    if (remaining_ > 0) {
      --remaining_;
      return current_;
    }
    const std::uint64_t n = total_pulls_;
    for (;;) {
      std::size_t best = 0;
      double best_index = -kInfinity;
      for (std::size_t j = 0; j < arms_.size(); ++j) {
        const double idx = unit(arms_[j].mean()) + ucb2_bonus(alpha_, n, ucb2_tau(alpha_, epochs_[j]));
        if (idx > best_index) {
          best_index = idx;
          best = j;
        }
      }
      const std::uint64_t len =
          ucb2_tau(alpha_, epochs_[best] + 1) - ucb2_tau(alpha_, epochs_[best]);
      ++epochs_[best];
      if (len > 0) {
        current_ = best;
        remaining_ = len - 1;
        return best;
      }
    }
  }

  const std::vector<std::uint64_t>& epochs() const { return epochs_; }

 private:
  double alpha_;
  std::vector<std::uint64_t> epochs_;
  std::size_t current_ = 0;
  std::uint64_t remaining_ = 0;
};

class UniformRandomPolicy final : public Policy {
 public:
  using Policy::Policy;

  std::size_t select(RandomStream& rng) override {
    const auto k = static_cast<double>(arms_.size());
    const auto j = static_cast<std::size_t>(rng.uniform() * k);
    return std::min(j, arms_.size() - 1);
  }
};

inline std::unique_ptr<Policy> make_policy(const PolicyConfig& c, std::size_t num_arms, double lo,
                                           double hi, bool shadow_check = false) {
  switch (c.kind) {
    case PolicyConfig::Kind::med:
      return std::make_unique<MedPolicy>(num_arms, lo, hi, c.r, c.d, c.anchor, shadow_check);
    case PolicyConfig::Kind::med_ideal:
      return std::make_unique<MedPolicy>(num_arms, lo, hi, c.r, 0.0,
                                         PolicyConfig::Anchor::best_mean, shadow_check);
    case PolicyConfig::Kind::ucb1:
      return std::make_unique<Ucb1Policy>(num_arms, lo, hi);
    case PolicyConfig::Kind::ucb_tuned:
      return std::make_unique<UcbTunedPolicy>(num_arms, lo, hi);
    case PolicyConfig::Kind::ucb2:
      return std::make_unique<Ucb2Policy>(num_arms, lo, hi, c.alpha);
    case PolicyConfig::Kind::uniform_random:
      return std::make_unique<UniformRandomPolicy>(num_arms, lo, hi);
  }
  throw std::invalid_argument("make_policy: unknown policy kind");
}

}  // namespace med
