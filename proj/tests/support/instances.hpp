#pragma once

// Random finite distributions on [-1, 0] for property tests.

#include <algorithm>
#include <cstddef>
#include <random>
#include <set>
#include <vector>

#include "med/dist.hpp"

namespace med::testing {

struct Instance {
  FiniteDistribution F;
  double mu;
};

/// Support of 2..12 points in [-1, 0]; about half the draws include 0.
inline FiniteDistribution random_distribution(std::mt19937_64& gen, std::size_t min_size = 2,
                                              std::size_t max_size = 12) {
  std::uniform_int_distribution<std::size_t> size_dist(min_size, max_size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t m = size_dist(gen);
  std::set<double> pts;
  if (unit(gen) < 0.5) pts.insert(0.0);
  while (pts.size() < m) pts.insert(-unit(gen));
  std::vector<double> p(pts.begin(), pts.end());
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& x : w) {
    x = 0.05 + unit(gen);
    total += x;
  }
  for (auto& x : w) x /= total;
  return FiniteDistribution(std::move(p), std::move(w), -1.0, 0.0);
}

/// mu = E(F) + u (0 - E(F)) with u uniform on [lo_frac, hi_frac].
inline Instance random_instance(std::mt19937_64& gen, double lo_frac = 0.02,
                                double hi_frac = 0.98) {
  std::uniform_real_distribution<double> frac(lo_frac, hi_frac);
  for (;;) {
    auto F = random_distribution(gen);
    const double e = mean(F);
    if (e > -1e-3) continue;  // keeps -1/mu bounded
    const double mu = e + frac(gen) * (0.0 - e);
    if (mu > e && mu < 0.0) return {std::move(F), mu};
  }
}

}  // namespace med::testing
