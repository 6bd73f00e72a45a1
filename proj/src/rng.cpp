#include "madsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace madsim {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bounded: n must be positive");
  // Reject the low remainder zone so every value in [0, n) is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

namespace {

// erf via its Maclaurin series. Converges quickly for the |x| <= 4.25 range
// reachable after the caller's clamp; uses only +,-,*,/ so every platform
// produces the same bits.
double erf_series(double x) {
  const double kTwoOverSqrtPi = 1.1283791670955126;
  double term = x;
  double sum = x;
  const double x2 = x * x;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (sum + add == sum) break;
  }
  return kTwoOverSqrtPi * sum;
}

}  // namespace

double normal_cdf(double z) {
  if (z > 6.0) return 1.0;
  if (z < -6.0) return 0.0;
  const double kInvSqrt2 = 0.7071067811865476;
  return 0.5 * (1.0 + erf_series(z * kInvSqrt2));
}

int sample_debate_length(double mean, double variance, double unit) {
  if (!(variance > 0.0)) throw std::invalid_argument("sample_debate_length: variance must be positive");
  if (!(unit >= 0.0 && unit < 1.0)) throw std::invalid_argument("sample_debate_length: unit outside [0,1)");
  const double sigma = std::sqrt(variance);
  // P(L <= k) = P(X < k + 0.5) for k > 2, with all mass below 2.5 on L = 2.
  const int hard_cap =
      std::max(3, static_cast<int>(std::ceil(mean + 12.0 * sigma)) + 2);
  for (int k = 2; k < hard_cap; ++k) {
    if (unit < normal_cdf((k + 0.5 - mean) / sigma)) return k;
  }
  return hard_cap;
}

}  // namespace madsim
