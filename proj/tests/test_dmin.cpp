#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "med/dmin.hpp"
#include "support/dmin_oracle.hpp"
#include "support/instances.hpp"

namespace {

using med::dmin;
using med::FiniteDistribution;
using med::testing::dmin_oracle;

constexpr double kLn2 = std::numbers::ln2;

FiniteDistribution F(std::vector<double> pts, std::vector<double> pr) {
  return FiniteDistribution(std::move(pts), std::move(pr), -1.0, 0.0);
}

// Shifted arms of the bundled presets.
const FiniteDistribution& dist1_inferior() {
  static const auto d = F({-1.0, 0.0}, {0.55, 0.45});
  return d;
}
const FiniteDistribution& dist2_inferior() {
  static const auto d = F({-0.8, -0.4}, {0.5, 0.5});
  return d;
}
const FiniteDistribution& dist3_inferior() {
  static const auto d = [] {
    std::vector<double> pts, pr;
    for (int i = 0; i <= 10; ++i) {
      pts.push_back(i / 10.0 - 1.0);
      pr.push_back(1.0 / 11.0);
    }
    return F(pts, pr);
  }();
  return d;
}

TEST(DualObjective, ValueExamples) {
  EXPECT_EQ(med::h(dist1_inferior(), -0.45, 0.0), 0.0);
  EXPECT_NEAR(med::h(dist2_inferior(), -0.4, 2.5), 0.5 * kLn2, 1e-15);
  EXPECT_DOUBLE_EQ(med::h(dist1_inferior(), -0.45, 1.0),
                   0.55 * std::log(1 + 0.55) + 0.45 * std::log(1 - 0.45));
}

TEST(DualObjective, DerivativesAtZero) {
  const auto& d = dist3_inferior();
  const double mu = -0.3;
  EXPECT_NEAR(med::h_prime(d, mu, 0.0), mu - med::mean(d), 1e-15);
  const double shift = med::mean(d) - mu;
  EXPECT_NEAR(med::h_double_prime(d, mu, 0.0), -(med::variance(d) + shift * shift), 1e-15);
}

TEST(DualObjective, DomainErrors) {
  // x = 0 carries mass and nu = -1/mu zeroes its log argument.
  EXPECT_THROW(med::h(dist1_inferior(), -0.45, 1.0 / 0.45), std::domain_error);
  EXPECT_THROW(med::h_prime(dist1_inferior(), -0.45, 5.0), std::domain_error);
  EXPECT_THROW(med::h_double_prime(dist1_inferior(), -0.45, 5.0), std::domain_error);
  // Zero-mass points are skipped.
  const auto skip = F({-0.8, 0.0}, {1.0, 0.0});
  EXPECT_NO_THROW(med::h(skip, -0.5, 2.0));
}

TEST(DualObjective, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 gen(101);
  constexpr double eps = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const auto inst = med::testing::random_instance(gen);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    const double nu = frac(gen) * (-1.0 / inst.mu);
    const double fd1 =
        (med::h(inst.F, inst.mu, nu + eps) - med::h(inst.F, inst.mu, nu - eps)) / (2 * eps);
    const double d1 = med::h_prime(inst.F, inst.mu, nu);
    EXPECT_LE(std::abs(fd1 - d1), 1e-4 * std::max(1.0, std::abs(d1))) << i;
    const double fd2 = (med::h_prime(inst.F, inst.mu, nu + eps) -
                        med::h_prime(inst.F, inst.mu, nu - eps)) / (2 * eps);
    const double d2 = med::h_double_prime(inst.F, inst.mu, nu);
    EXPECT_LE(std::abs(fd2 - d2), 1e-4 * std::max(1.0, std::abs(d2))) << i;
  }
}

TEST(Dmin, BernoulliPair) {
  const auto res = dmin(dist1_inferior(), -0.45);
  // Binary KL between means 0.45 and 0.55: 0.1 ln(11/9).
  EXPECT_NEAR(res.value, 0.1 * std::log(11.0 / 9.0), 1e-15);
  EXPECT_NEAR(0.1 / res.value, 4.983, 0.0005);
}

TEST(Dmin, ClosedFormBranch) {
  const auto res = dmin(dist2_inferior(), -0.4);
  EXPECT_EQ(res.nu_star, 2.5);
  EXPECT_NEAR(res.value, 0.5 * kLn2, 1e-15);
  EXPECT_NEAR(res.value, med::h(dist2_inferior(), -0.4, 2.5), 1e-15);
  EXPECT_NEAR(res.value, dmin_oracle(dist2_inferior().points(), dist2_inferior().probs(), -0.4).value,
              1e-9);
}

TEST(Dmin, TrivialCases) {
  const auto d = F({-0.8, -0.4}, {0.5, 0.5});  // E = -0.6
  auto res = dmin(d, -0.7);
  EXPECT_EQ(res.value, 0.0);
  EXPECT_EQ(res.nu_star, 0.0);
  res = dmin(d, med::mean(d));
  EXPECT_EQ(res.value, 0.0);
  EXPECT_EQ(res.nu_star, 0.0);

  res = dmin(d, 0.0);
  EXPECT_TRUE(std::isinf(res.value));
  EXPECT_TRUE(std::isinf(res.nu_star));
  EXPECT_TRUE(std::isinf(dmin(d, 0.1).value));

  const auto zero = F({0.0}, {1.0});
  EXPECT_EQ(dmin(zero, 0.0).value, 0.0);
}

TEST(Dmin, RejectsBadParameters) {
  EXPECT_THROW(dmin(dist2_inferior(), -0.4, {0, 0.0}), std::invalid_argument);
  EXPECT_THROW(dmin(dist2_inferior(), -0.4, {5, -1.0}), std::invalid_argument);
  const auto outside = FiniteDistribution({0.5, 1.0}, {0.5, 0.5}, 0.0, 1.0);
  EXPECT_THROW(dmin(outside, -0.4), std::invalid_argument);
}

// Frozen from an independent 1e-7 grid (numpy) refined by a 40-digit root
// solve of h' = 0: value 0.5 ln(4/3) at nu* = 5/3.
TEST(Dmin, InteriorNewtonBranch) {
  const auto d = F({-1.0, -0.2}, {0.5, 0.5});
  EXPECT_GT(med::expected_mu_over_x(d, -0.4), 1.0);
  const auto res = dmin(d, -0.4);
  EXPECT_NEAR(res.value, 0.14384103622589044, 1e-14);
  EXPECT_NEAR(res.nu_star, 5.0 / 3.0, 1e-10);
  EXPECT_NEAR(res.value, 0.5 * std::log(4.0 / 3.0), 1e-14);
}

// Same provenance: the uniform 11-point arm at the best mean 0.56.
TEST(Dmin, UniformGridAgainstSkewedLeader) {
  const auto res = dmin(dist3_inferior(), -0.44);
  EXPECT_NEAR(res.value, 0.018072032136189868, 1e-13);
  EXPECT_NEAR(res.nu_star, 0.60482761546311042, 1e-9);
}

TEST(Dmin, OracleSelfCheckAgainstFullGrid) {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 10; ++i) {
    const auto inst = med::testing::random_instance(gen, 0.1, 0.6);
    const auto windowed = dmin_oracle(inst.F.points(), inst.F.probs(), inst.mu, 1e-5);
    const auto full = med::testing::dmin_full_grid(inst.F.points(), inst.F.probs(), inst.mu, 1e-5);
    EXPECT_GE(windowed.value, full.value) << i;
    EXPECT_NEAR(windowed.value, full.value, 1e-15) << i;
  }
}

TEST(Dmin, AgreesWithGridOracle) {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 50; ++i) {
    const auto inst = med::testing::random_instance(gen);
    const auto res = dmin(inst.F, inst.mu, {50, 0.0});
    const auto ref = dmin_oracle(inst.F.points(), inst.F.probs(), inst.mu, 1e-7);
    EXPECT_NEAR(res.value, ref.value, 1e-6) << i;
    // The dual value at any nu bounds D_min from below.
    EXPECT_GE(res.value, ref.value - 1e-12) << i;
  }
}

TEST(Dmin, BracketAndConcavity) {
  std::mt19937_64 gen(33);
  std::uniform_real_distribution<double> frac(0.001, 0.999);
  for (int i = 0; i < 100; ++i) {
    const auto inst = med::testing::random_instance(gen);
    const auto res = dmin(inst.F, inst.mu);
    const double lo = med::dual_lower_bound(med::mean(inst.F), inst.mu);
    const double hi = -1.0 / inst.mu;
    EXPECT_GE(res.nu_star, lo * (1 - 1e-12)) << i;
    EXPECT_LE(res.nu_star, hi) << i;
    for (int k = 0; k < 20; ++k) {
      EXPECT_LT(med::h_double_prime(inst.F, inst.mu, frac(gen) * hi), 0.0);
    }
  }
}

TEST(Dmin, MonotoneInMuWithGapBound) {
  std::mt19937_64 gen(44);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int i = 0; i < 100; ++i) {
    const auto F0 = med::testing::random_distribution(gen);
    const double e = med::mean(F0);
    if (e > -1e-2) continue;
    double m1 = e + u(gen) * (-e);
    double m2 = e + u(gen) * (-e);
    if (m1 == m2) continue;
    if (m1 > m2) std::swap(m1, m2);
    const double d1 = dmin(F0, m1).value;
    const double d2 = dmin(F0, m2).value;
    EXPECT_LE(d1, d2) << i;
    EXPECT_GE(d2 - d1, (m2 - m1) * (m2 - m1) / (-2.0 * m1 * (1.0 + m2)) - 1e-9) << i;
  }
}

TEST(Dmin, DerivativeInMuEqualsDualOptimum) {
  std::mt19937_64 gen(55);
  constexpr double eps = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const auto inst = med::testing::random_instance(gen, 0.05, 0.95);
    const auto res = dmin(inst.F, inst.mu);
    const double fd =
        (dmin(inst.F, inst.mu + eps).value - dmin(inst.F, inst.mu - eps).value) / (2 * eps);
    EXPECT_LE(std::abs(fd - res.nu_star), 1e-3 * res.nu_star) << i;
  }
}

TEST(Dmin, TwoPointSupportIsBinaryKl) {
  std::mt19937_64 gen(66);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double q = u(gen);  // mass at -1; mean is -q
    const double mu = -q + u(gen) * q;
    const auto d = F({-1.0, 0.0}, {q, 1.0 - q});
    const double expected = q * std::log(q / -mu) + (1 - q) * std::log((1 - q) / (1 + mu));
    EXPECT_NEAR(dmin(d, mu, {50, 0.0}).value, expected, 1e-12) << "q=" << q << " mu=" << mu;
  }
}

// Any G on [-1, 0] with mean >= mu, including support points outside
// supp(F) and 0, has KL(F||G) >= D_min.  Random G put mass on supp(F), 0
// and two extra points.
TEST(Dmin, ExtraSupportNeverBeatsOptimum) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto inst = med::testing::random_instance(gen);
    const double target = dmin(inst.F, inst.mu).value;
    std::vector<double> pts(inst.F.points().begin(), inst.F.points().end());
    std::vector<double> f(inst.F.probs().begin(), inst.F.probs().end());
    // Append 0 (if absent) and two extra points where F has no mass.
    if (pts.back() != 0.0) {
      pts.push_back(0.0);
      f.push_back(0.0);
    }
    pts.push_back(-unit(gen));
    f.push_back(0.0);
    pts.push_back(-unit(gen));
    f.push_back(0.0);

    double best = med::kInfinity;
    for (int trial = 0; trial < 20000; ++trial) {
      std::vector<double> g(pts.size());
      double tot = 0;
      for (auto& x : g) {
        x = -std::log(unit(gen) + 1e-300);
        tot += x;
      }
      double m = 0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] /= tot;
        m += g[k] * pts[k];
      }
      if (m < inst.mu) continue;
      const double v = med::testing::kl(f, g);
      EXPECT_GE(v, target - 1e-12);
      best = std::min(best, v);
    }
    if (std::isfinite(best)) {
      EXPECT_GE(best, target - 1e-12);
    }
  }
}

TEST(Dmin, WarmStartDoesNotChangeConvergedAnswer) {
  std::mt19937_64 gen(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto inst = med::testing::random_instance(gen);
    const double cold = dmin(inst.F, inst.mu, {50, 0.0}).value;
    const double warm = dmin(inst.F, inst.mu, {50, u(gen) * (-1.0 / inst.mu)}).value;
    EXPECT_NEAR(cold, warm, 1e-12);
  }
}

TEST(Dmin, SmallBudgetIsStillALowerBound) {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 100; ++i) {
    const auto inst = med::testing::random_instance(gen);
    const double exact = dmin(inst.F, inst.mu, {50, 0.0}).value;
    for (int r : {1, 2, 3}) {
      const double approx = dmin(inst.F, inst.mu, {r, 0.0}).value;
      EXPECT_LE(approx, exact + 1e-13);
      EXPECT_GE(approx, 0.0);
    }
  }
}

TEST(Dmin, PointMassAtMuIsGuarded) {
  // E(F) < mu is violated, so the trivial branch answers; a near-degenerate
  // case still terminates with a finite value.
  const auto near = F({-0.5000001, -0.4999999}, {0.5, 0.5});
  const auto res = dmin(near, -0.49999995);
  EXPECT_TRUE(std::isfinite(res.value));
  EXPECT_GE(res.value, 0.0);
}

}  // namespace
