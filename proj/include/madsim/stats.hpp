#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "madsim/types.hpp"

namespace madsim::stats {

// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1], via the
// standard continued fraction with the symmetry split. Relative error below
// 1e-10 over the parameter ranges used here.
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double dof);

// Two-sided tail probability of |T| >= |t| for Student's t with `dof`
// degrees of freedom; computed directly from the incomplete beta so small
// tails lose no precision to cancellation.
double student_t_two_sided_p(double t, double dof);

struct GroupStats {
  ToxicityLevel label = ToxicityLevel::No;
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1 denominator)
};

GroupStats group_stats(ToxicityLevel label, std::span<const int> values);

// Convergence-time statistics over converged records. Every record must carry
// a t_conv; pass the valid partition only.
GroupStats group_stats(ToxicityLevel label, std::span<const DebateRecord> records);

// Relative change of the treatment mean against the control mean, percent.
double pct_increase(const GroupStats& control, const GroupStats& treatment);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;
};

// Welch's unequal-variance two-sample t-test of b against a (positive t means
// b's mean is larger), with Welch-Satterthwaite degrees of freedom and a
// two-sided p-value.
WelchResult welch_test(const GroupStats& a, const GroupStats& b);

// (t_conv, count) pairs covering every integer between the observed min and
// max, zero-count bins included.
std::vector<std::pair<int, std::uint64_t>> histogram(std::span<const DebateRecord> records);

}  // namespace madsim::stats
