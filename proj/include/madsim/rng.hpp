#pragma once

#include <cstdint>
#include <random>

namespace madsim {

// splitmix64 finalizer. Bijective over 64-bit values.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Decorrelated per-run seed from a master seed and a run index.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master + 0x9E3779B97F4A7C15ull) ^ (index + 0x2545F4914F6CDD1Dull));
}

// Minimal splitmix64 stream; used where replies must be identical across
// platforms and standard-library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Unbiased integer in [0, n) by rejection sampling. The standard
// uniform_int_distribution is implementation-defined, so it cannot appear in
// any draw that influences logged output.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n);

// Standard normal CDF built from an erf power series over basic arithmetic
// only, so results are bit-identical across libm implementations. Absolute
// error below 1e-8; arguments beyond |z| = 6 clamp to 0 or 1.
double normal_cdf(double z);

// Session length for a synthetic debate: max(2, round(X)) for X ~ N(mean,
// variance), sampled by inverting the discretized CDF at a uniform unit draw.
int sample_debate_length(double mean, double variance, double unit);

}  // namespace madsim
