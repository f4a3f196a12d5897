// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef WIGNER_GAPS_STATS_HPP_
#define WIGNER_GAPS_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "wigner_gaps/core.hpp"

namespace wgap {

class Ecdf {
 public:
  explicit Ecdf(std::vector<double> sample) : sorted_(std::move(sample)) {
    if (sorted_.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t n() const { return sorted_.size(); }
  const std::vector<double> &sorted() const { return sorted_; }

  double operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(n());
  }

  // Merging ECDFs is the sorted union of their samples.
  Ecdf merged(const Ecdf &other) const {
    std::vector<double> all;
    all.reserve(n() + other.n());
    std::merge(sorted_.begin(), sorted_.end(), other.sorted_.begin(), other.sorted_.end(),
               std::back_inserter(all));
    return Ecdf(std::move(all));
  }

 private:
  std::vector<double> sorted_;
};

// Exact two-sample sup |F_a - F_b|: both step functions are evaluated right
// after every breakpoint of the merged sample.
inline double kolmogorov_distance(const Ecdf &a, const Ecdf &b) {
  const auto &x = a.sorted();
  const auto &y = b.sorted();
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) v = x[i]; else v = y[j];
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// sup |F_n - F| for a continuous CDF F, checking both sides of each jump.
template <class Cdf>
double kolmogorov_distance_to(const Ecdf &a, Cdf &&cdf) {
  const auto &x = a.sorted();
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/delta) / (2n)), capped at 1.
inline double dkw_bound(std::size_t n, double delta) {
  if (n < 1 || !(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "need n >= 1 and 0 < delta < 1");
  }
  return std::min(1.0, std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n))));
}

// Two-sample analogue: DKW at the effective size n_a n_b / (n_a + n_b).
inline double pooled_dkw_bound(std::size_t na, std::size_t nb, double delta) {
  if (na < 1 || nb < 1 || !(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "need sizes >= 1 and 0 < delta < 1");
  }
  const double a = static_cast<double>(na);
  const double b = static_cast<double>(nb);
  return std::min(1.0, std::sqrt(std::log(2.0 / delta) * (a + b) / (2.0 * a * b)));
}

// Limit law of the rescaled smallest bulk gap: 1 - e^{-x^3} (complex class)
// or 1 - e^{-x^2} (real class).
inline double min_gap_limit_cdf(double x, SymmetryClass cls) {
  if (x <= 0.0) return 0.0;
  const double e = cls == SymmetryClass::ComplexHermitian ? x * x * x : x * x;
  return -std::expm1(-e);
}

inline double min_gap_limit_median(SymmetryClass cls) {
  const double l = std::log(2.0);
  return cls == SymmetryClass::ComplexHermitian ? std::cbrt(l) : std::sqrt(l);
}

struct RatePoint {
  double N = 0.0;
  double dK = 0.0;
};

struct RateFit {
  std::vector<RatePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares of log dK on log N.
inline RateFit rate_fit(std::vector<RatePoint> points) {
  if (points.size() < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 points");
  std::sort(points.begin(), points.end(),
            [](const RatePoint &a, const RatePoint &b) { return a.N < b.N; });
  for (const auto &p : points) {
    if (!(p.dK > 0.0) || !(p.N > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "N and dK must be positive");
    }
  }
  if (points.front().N == points.back().N) {
    throw Error(ErrorKind::DegenerateFit, "all N are equal");
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto &p : points) {
    mx += std::log(p.N);
    my += std::log(p.dK);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto &p : points) {
    const double dx = std::log(p.N) - mx;
    const double dy = std::log(p.dK) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.points = std::move(points);
  return fit;
}

// Type-7 empirical quantile.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_and_se(std::span<const double> v) {
  MeanSe r;
  if (v.empty()) return r;
  const double n = static_cast<double>(v.size());
  CompensatedSum s;
  for (double x : v) s.add(x);
  r.mean = s.value() / n;
  if (v.size() < 2) return r;
  CompensatedSum ss;
  for (double x : v) ss.add((x - r.mean) * (x - r.mean));
  r.se = std::sqrt(ss.value() / (n - 1.0) / n);
  return r;
}

// Exact two-sided binomial sign test p-value for `positives` out of `trials`
// under p = 1/2.
inline double sign_test_p_value(int positives, int trials) {
  if (trials <= 0) return 1.0;
  const int k = std::min(positives, trials - positives);
  double tail = 0.0;
  for (int i = 0; i <= k; ++i) {
    tail += std::exp(std::lgamma(trials + 1.0) - std::lgamma(i + 1.0) -
                     std::lgamma(trials - i + 1.0) - trials * std::log(2.0));
  }
  return std::min(1.0, 2.0 * tail);
}

}  // namespace wgap

#endif  // WIGNER_GAPS_STATS_HPP_
