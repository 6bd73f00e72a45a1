#include "madsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace madsim::stats {

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 500;

  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double front =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("student_t_cdf: dof must be positive");
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0))
    throw std::invalid_argument("student_t_two_sided_p: dof must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

GroupStats group_stats(ToxicityLevel label, std::span<const int> values) {
  if (values.size() < 2)
    throw std::invalid_argument("group statistics need at least 2 observations");
  double sum = 0.0;
  for (const int v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const int v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  return {label, values.size(), mean, ss / static_cast<double>(values.size() - 1)};
}

GroupStats group_stats(ToxicityLevel label, std::span<const DebateRecord> records) {
  std::vector<int> values;
  values.reserve(records.size());
  for (const auto& r : records) {
    if (!r.outcome.t_conv)
      throw std::invalid_argument("group statistics need converged records only");
    values.push_back(*r.outcome.t_conv);
  }
  return group_stats(label, values);
}

double pct_increase(const GroupStats& control, const GroupStats& treatment) {
  if (control.mean == 0.0)
    throw std::invalid_argument("pct_increase: control mean must be nonzero");
  return 100.0 * (treatment.mean - control.mean) / control.mean;
}

WelchResult welch_test(const GroupStats& a, const GroupStats& b) {
  if (a.n < 2 || b.n < 2)
    throw std::invalid_argument("welch_test: both groups need n >= 2");
  const double va = a.variance / static_cast<double>(a.n);
  const double vb = b.variance / static_cast<double>(b.n);
  const double se2 = va + vb;
  if (se2 == 0.0)
    throw std::invalid_argument("welch_test: both variances are zero");
  WelchResult r;
  r.t = (b.mean - a.mean) / std::sqrt(se2);
  r.dof = se2 * se2 /
          (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  r.p = student_t_two_sided_p(r.t, r.dof);
  return r;
}

std::vector<std::pair<int, std::uint64_t>> histogram(std::span<const DebateRecord> records) {
  std::vector<int> values;
  values.reserve(records.size());
  for (const auto& r : records) {
    if (!r.outcome.t_conv)
      throw std::invalid_argument("histogram needs converged records only");
    values.push_back(*r.outcome.t_conv);
  }
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<std::pair<int, std::uint64_t>> bins;
  bins.reserve(static_cast<std::size_t>(*hi - *lo) + 1);
  for (int v = *lo; v <= *hi; ++v) bins.emplace_back(v, 0);
  for (const int v : values) ++bins[static_cast<std::size_t>(v - *lo)].second;
  return bins;
}

}  // namespace madsim::stats
