#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace med {

/// Identifies one reproducible random stream: the experiment seed, the
/// replication index and the policy index.  Equal specs give equal streams.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t run_index = 0;
  std::uint64_t policy_index = 0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Sub-streams of one SeedSpec.  The environment and the policy draw from
/// separate lanes so a policy's consumption never shifts the reward sequence.
enum class StreamLane : std::uint32_t { environment = 0, policy = 1, auxiliary = 2 };

namespace detail {

// Philox4x32-10 block function (Salmon et al., Random123).
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

}  // namespace detail

/// Counter-based generator.  The master seed is the Philox key; run index,
/// policy index and lane occupy the upper counter words, so every stream
/// owns a disjoint slice of the counter space and derivation needs no
/// sequential splitting.
///
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t key, std::uint32_t run_word, std::uint32_t policy_word)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        run_word_(run_word),
        policy_word_(policy_word) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform real in (0, 1); used where a logarithm of the draw is taken.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  std::uint64_t blocks_consumed() const { return block_; }

 private:
  void refill() {
    const auto out = detail::philox4x32_10(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), run_word_,
         policy_word_},
        key_);
    ++block_;
    // buffer_[1] is handed out first.
    buffer_[1] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[0] = (std::uint64_t{out[3]} << 32) | out[2];
    buffered_ = 2;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t run_word_;
  std::uint32_t policy_word_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// Pure function of (spec, lane).  Run indices must fit in 32 bits and policy
/// indices in 24 bits.
inline RandomStream derive_stream(const SeedSpec& spec,
                                  StreamLane lane = StreamLane::environment) {
  if (spec.run_index > std::numeric_limits<std::uint32_t>::max()) {
    throw std::out_of_range("derive_stream: run_index exceeds 2^32 - 1");
  }
  if (spec.policy_index >= (std::uint64_t{1} << 24)) {
    throw std::out_of_range("derive_stream: policy_index exceeds 2^24 - 1");
  }
  const auto policy_word =
      static_cast<std::uint32_t>((spec.policy_index << 8) | static_cast<std::uint32_t>(lane));
  return RandomStream(spec.master_seed, static_cast<std::uint32_t>(spec.run_index), policy_word);
}

/// Standard normal via the Marsaglia polar method.
inline double standard_normal(RandomStream& rng) {
  double u, v, s;
  do {
    u = 2.0 * rng.uniform() - 1.0;
    v = 2.0 * rng.uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

/// log of a Gamma(shape, 1) variate.  Marsaglia-Tsang for shape >= 1; for
/// shape < 1 the boost G(a) = G(a + 1) U^(1/a) is applied in log space so
/// tiny shapes do not underflow to zero.
inline double log_gamma_variate(double shape, RandomStream& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("log_gamma_variate: shape must be > 0");
  if (shape < 1.0) {
    return log_gamma_variate(shape + 1.0, rng) + std::log(rng.uniform_open()) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

/// Exact Beta(alpha, beta) draw via the gamma-ratio construction.
inline double beta_variate(double alpha, double beta, RandomStream& rng) {
  const double la = log_gamma_variate(alpha, rng);
  const double lb = log_gamma_variate(beta, rng);
  // X = Ga / (Ga + Gb) = 1 / (1 + exp(lb - la))
  return 1.0 / (1.0 + std::exp(lb - la));
}

}  // namespace med
