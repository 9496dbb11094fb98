#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "med/dist.hpp"
#include "med/dmin.hpp"
#include "med/policy.hpp"
#include "med/rng.hpp"

namespace med {

/// K arms sharing one reward interval [lo, hi].
class Environment {
 public:
  Environment(std::vector<ArmModel> arms, double lo, double hi)
      : arms_(std::move(arms)), lo_(lo), hi_(hi) {
    if (arms_.size() < 2) throw std::invalid_argument("Environment: needs K >= 2 arms");
    if (!(lo < hi)) throw std::invalid_argument("Environment: bounds require a < b");
    for (const auto& a : arms_) {
      if (a.lo() != lo_ || a.hi() != hi_) {
        throw std::invalid_argument("Environment: every arm must share the declared bounds");
      }
      const double m = arm_mean(a);
      if (m < lo || m > hi) throw std::invalid_argument("Environment: arm mean outside bounds");
      means_.push_back(m);
    }
    mu_star_ = *std::max_element(means_.begin(), means_.end());
    for (std::size_t j = 0; j < means_.size(); ++j) {
      if (means_[j] == mu_star_) optimal_.push_back(j);
    }
  }

  std::size_t num_arms() const { return arms_.size(); }
  const std::vector<ArmModel>& arms() const { return arms_; }
  const std::vector<double>& means() const { return means_; }
  double mu_star() const { return mu_star_; }
  const std::vector<std::size_t>& optimal_arms() const { return optimal_; }
  bool is_optimal(std::size_t j) const { return means_[j] == mu_star_; }
  double gap(std::size_t j) const { return mu_star_ - means_[j]; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::vector<ArmModel> arms_;
  double lo_;
  double hi_;
  std::vector<double> means_;
  double mu_star_ = 0.0;
  std::vector<std::size_t> optimal_;
};

/// sum over suboptimal arms of (mu* - mu_i) T_i, with the true means.
inline double regret(const Environment& env, std::span<const std::uint64_t> counts) {
  if (counts.size() != env.num_arms()) {
    throw std::invalid_argument("regret: counts length differs from K");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (!env.is_optimal(j)) total += env.gap(j) * static_cast<double>(counts[j]);
  }
  return total;
}

/// Beta(alpha, beta) as `atoms` equiprobable atoms at the quantile midpoints
/// (k + 1/2) / atoms.  Coincident atoms are merged.
inline FiniteDistribution discretize_beta(double alpha, double beta, std::size_t atoms) {
  if (atoms < 1) throw std::invalid_argument("discretize_beta: atoms must be >= 1");
  std::vector<double> pts;
  std::vector<double> pr;
  const double w = 1.0 / static_cast<double>(atoms);
  for (std::size_t k = 0; k < atoms; ++k) {
    const double q = (static_cast<double>(k) + 0.5) * w;
    const double x = boost::math::ibeta_inv(alpha, beta, q);
    if (!pts.empty() && x <= pts.back()) {
      pr.back() += w;
    } else {
      pts.push_back(x);
      pr.push_back(w);
    }
  }
  double total = 0.0;
  for (double p : pr) total += p;
  for (double& p : pr) p /= total;
  return FiniteDistribution(std::move(pts), std::move(pr), 0.0, 1.0);
}

/// Arm law on [-1, 0] as seen by the divergence solver.
inline FiniteDistribution shifted_law(const ArmModel& arm, std::size_t beta_atoms) {
  struct Visitor {
    const ArmModel& arm;
    std::size_t atoms;
    FiniteDistribution operator()(const Bernoulli& b) const {
      std::vector<double> pts;
      std::vector<double> pr;
      if (b.p < 1.0) {
        pts.push_back(shift_reward(0.0, arm.lo(), arm.hi()));
        pr.push_back(1.0 - b.p);
      }
      if (b.p > 0.0) {
        pts.push_back(shift_reward(1.0, arm.lo(), arm.hi()));
        pr.push_back(b.p);
      }
      return FiniteDistribution(std::move(pts), std::move(pr), -1.0, 0.0);
    }
    FiniteDistribution operator()(const Discrete& d) const {
      return shift_distribution(d.dist, arm.lo(), arm.hi());
    }
    FiniteDistribution operator()(const Beta& b) const {
      return shift_distribution(discretize_beta(b.alpha, b.beta, atoms), arm.lo(), arm.hi());
    }
  };
  return std::visit(Visitor{arm, beta_atoms}, arm.kind());
}

/// Coefficient of ln n in the asymptotic lower bound
/// sum_{i suboptimal} (mu* - mu_i) / D_min(F_i, mu*).
struct BoundModel {
  static constexpr std::size_t kDefaultBetaAtoms = 10000;
  static constexpr int kSolverBudget = 100;

  double coefficient = 0.0;
  std::vector<double> divergences;  ///< D_min(F_i, mu*) per arm; 0 for optimal arms.
  bool approximated = false;        ///< true when any suboptimal arm was discretized.

  static BoundModel build(const Environment& env,
                          std::size_t beta_atoms = kDefaultBetaAtoms) {
    BoundModel b;
    b.divergences.assign(env.num_arms(), 0.0);
    const double mu_shifted = shift_reward(env.mu_star(), env.lo(), env.hi());
    for (std::size_t i = 0; i < env.num_arms(); ++i) {
      if (env.is_optimal(i)) continue;
      const auto law = shifted_law(env.arms()[i], beta_atoms);
      if (!env.arms()[i].is_finite_support()) b.approximated = true;
      const double dv = dmin(law, mu_shifted, {kSolverBudget, 0.0}).value;
      if (!(dv > 0.0)) {
        throw std::invalid_argument("dmin_bound: D_min = 0 for suboptimal arm " +
                                    std::to_string(i));
      }
      b.divergences[i] = dv;
      if (std::isfinite(dv)) b.coefficient += env.gap(i) / dv;
    }
    return b;
  }

  double at(std::uint64_t n) const { return coefficient * std::log(static_cast<double>(n)); }
};

inline double dmin_bound(const Environment& env, std::uint64_t n,
                         std::size_t beta_atoms = BoundModel::kDefaultBetaAtoms) {
  return BoundModel::build(env, beta_atoms).at(n);
}

/// {10, 20, 50, 100, 200, 500, ...} below horizon, then horizon itself.
inline std::vector<std::uint64_t> log_checkpoints(std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t decade = 10; decade < horizon; decade *= 10) {
    for (std::uint64_t mult : {1, 2, 5}) {
      const std::uint64_t n = decade * mult;
      if (n < horizon) out.push_back(n);
    }
    if (decade > horizon / 10) break;
  }
  out.push_back(horizon);
  return out;
}

struct RunMetrics {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> regret;
  std::vector<std::vector<std::uint64_t>> pulls;  ///< T_j(n) per checkpoint.
  std::vector<double> best_fraction;             ///< optimal-arm pulls / n, in [0, 1].
  ShadowStats shadow;

  friend bool operator==(const RunMetrics& a, const RunMetrics& b) {
    return a.checkpoints == b.checkpoints && a.regret == b.regret && a.pulls == b.pulls &&
           a.best_fraction == b.best_fraction && a.shadow.pairs == b.shadow.pairs &&
           a.shadow.within == b.shadow.within;
  }
};

/// Called after every round with (round n, chosen arm, policy after update).
using RoundObserver = std::function<void(std::uint64_t, std::size_t, const Policy&)>;

struct EpisodeOptions {
  std::vector<std::uint64_t> checkpoints;  ///< empty: log_checkpoints(horizon)
  bool shadow_check = false;
  RoundObserver observer;
  /// Invoked right after select() in every policy round, before the reward
  /// is observed, so per-round selection state can be inspected.
  std::function<void(std::uint64_t, std::size_t, const Policy&)> on_select;
};

/// One episode: rounds 1..K pull arms 0..K-1 in order, then the policy
/// chooses through `horizon`.
inline RunMetrics run_episode(const Environment& env, const PolicyConfig& policy_config,
                              std::uint64_t horizon, const SeedSpec& seed,
                              const EpisodeOptions& options = {}) {
  const std::size_t k = env.num_arms();
  if (horizon < k) throw std::invalid_argument("run_episode: horizon must be >= K");

  auto checkpoints = options.checkpoints.empty() ? log_checkpoints(horizon) : options.checkpoints;
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      std::adjacent_find(checkpoints.begin(), checkpoints.end()) != checkpoints.end() ||
      checkpoints.front() < 1 || checkpoints.back() > horizon) {
    throw std::invalid_argument(
        "run_episode: checkpoints must be strictly increasing within [1, horizon]");
  }

  auto env_rng = derive_stream(seed, StreamLane::environment);
  auto policy_rng = derive_stream(seed, StreamLane::policy);
  auto policy = make_policy(policy_config, k, env.lo(), env.hi(), options.shadow_check);

  RunMetrics out;
  out.checkpoints = checkpoints;
  std::vector<std::uint64_t> counts(k, 0);
  std::size_t next_cp = 0;

  for (std::uint64_t n = 1; n <= horizon; ++n) {
    std::size_t arm;
    if (n <= k) {
      arm = static_cast<std::size_t>(n - 1);
    } else {
      arm = policy->select(policy_rng);
      if (arm >= k) throw std::logic_error("policy selected an arm index outside [0, K)");
      if (options.on_select) options.on_select(n, arm, *policy);
    }
    policy->observe(arm, sample(env.arms()[arm], env_rng));
    ++counts[arm];
    if (options.observer) options.observer(n, arm, *policy);

    if (next_cp < checkpoints.size() && checkpoints[next_cp] == n) {
      out.regret.push_back(regret(env, counts));
      out.pulls.push_back(counts);
      std::uint64_t best = 0;
      for (std::size_t j : env.optimal_arms()) best += counts[j];
      out.best_fraction.push_back(static_cast<double>(best) / static_cast<double>(n));
      ++next_cp;
    }
  }
  if (const auto* med = dynamic_cast<const MedPolicy*>(policy.get())) {
    out.shadow = med->shadow_stats();
  }
  return out;
}

/// Per-checkpoint mean and standard error (sample stddev / sqrt(runs); 0 for
/// a single run) across runs.
struct AggregateCurve {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> regret_mean;
  std::vector<double> regret_stderr;
  std::vector<double> best_mean;
  std::vector<double> best_stderr;
  std::vector<double> bound;
  ShadowStats shadow;
  std::size_t runs = 0;
};

namespace detail {

inline std::pair<double, double> mean_stderr(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  double m = 0.0;
  for (double x : xs) m += x;
  m /= n;
  if (xs.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace detail

inline AggregateCurve aggregate(std::span<const RunMetrics> runs, const BoundModel& bound) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  AggregateCurve c;
  c.checkpoints = runs.front().checkpoints;
  c.runs = runs.size();
  for (const auto& r : runs) {
    if (r.checkpoints != c.checkpoints) {
      throw std::invalid_argument("aggregate: runs have mismatched checkpoint grids");
    }
    c.shadow.pairs += r.shadow.pairs;
    c.shadow.within += r.shadow.within;
    c.shadow.max_abs_error = std::max(c.shadow.max_abs_error, r.shadow.max_abs_error);
  }
  std::vector<double> reg(runs.size());
  std::vector<double> best(runs.size());
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      reg[r] = runs[r].regret[i];
      best[r] = runs[r].best_fraction[i];
    }
    const auto [rm, rs] = detail::mean_stderr(reg);
    const auto [bm, bs] = detail::mean_stderr(best);
    c.regret_mean.push_back(rm);
    c.regret_stderr.push_back(rs);
    c.best_mean.push_back(bm);
    c.best_stderr.push_back(bs);
    c.bound.push_back(bound.at(c.checkpoints[i]));
  }
  return c;
}

inline AggregateCurve aggregate(std::span<const RunMetrics> runs, const Environment& env) {
  return aggregate(runs, BoundModel::build(env));
}

/// Runs `runs` episodes with seeds (master_seed, 0..runs-1, policy_index) on
/// up to `workers` threads.  Results are stored by run index, so the output
/// does not depend on the worker count.
inline std::vector<RunMetrics> run_replicated(const Environment& env,
                                              const PolicyConfig& policy_config,
                                              std::uint64_t horizon, std::size_t runs,
                                              std::uint64_t master_seed,
                                              std::uint64_t policy_index, std::size_t workers,
                                              const EpisodeOptions& options = {}) {
  std::vector<RunMetrics> out(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs) return;
      try {
        out[i] = run_episode(env, policy_config, horizon, {master_seed, i, policy_index}, options);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(std::runtime_error(
              "run " + std::to_string(i) + ", policy " + std::to_string(policy_index) + ": " +
              e.what()));
        }
        next.store(runs);
        return;
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, runs));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace med
