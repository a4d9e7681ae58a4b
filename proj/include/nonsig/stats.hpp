#pragma once

// Small statistics toolkit for the Monte Carlo experiments: Wilson score
// intervals for binomial proportions and the two-sample Kolmogorov-Smirnov
// test with the asymptotic p-value.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nonsig {

struct WilsonInterval {
  double estimate = 0.0;
  double low = 0.0;
  double high = 1.0;
};

// 95% score interval by default (z = 1.959963985...).
inline WilsonInterval wilson_interval(long successes, long trials,
                                      double z = 1.9599639845400545) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval needs trials > 0");
  if (successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_interval needs 0 <= successes <= trials");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w;
  w.estimate = p;
  w.low = std::max(0.0, center - half);
  w.high = std::min(1.0, center + half);
  return w;
}

struct KsResult {
  double statistic = 0.0;  // sup |F1 - F2|
  double p_value = 1.0;    // asymptotic two-sided
};

// Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2), the Kolmogorov tail.
inline double kolmogorov_tail(double t) {
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty())
    throw std::invalid_argument("ks_two_sample needs non-empty samples");
  std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  double ne = std::sqrt(na * nb / (na + nb));
  // Small-sample continuity correction as in the classical asymptotic test.
  r.p_value = kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

}  // namespace nonsig
