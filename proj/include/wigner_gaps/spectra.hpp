// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef WIGNER_GAPS_SPECTRA_HPP_
#define WIGNER_GAPS_SPECTRA_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wigner_gaps/core.hpp"
#include "wigner_gaps/types.hpp"

namespace wgap {

inline Spectrum eigenvalues(const WignerDraw &h) {
  Spectrum s;
  s.N = h.N;
  s.ensemble_id = h.law_id;
  s.seed = h.seed;
  Eigen::VectorXd values;
  if (h.is_complex()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.as_complex(),
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::EigensolveFailure, "Hermitian eigensolve failed");
    }
    values = solver.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.re, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::EigensolveFailure, "symmetric eigensolve failed");
    }
    values = solver.eigenvalues();
  }
  s.values.assign(values.data(), values.data() + values.size());
  std::sort(s.values.begin(), s.values.end());
  return s;
}

// Integral of the semicircle density up to x.
inline double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  const double pi = std::numbers::pi;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * pi) + std::asin(0.5 * x) / pi;
}

// Inverse of semicircle_cdf on [0, 1]; safeguarded Newton inside a bisection
// bracket.
inline double semicircle_quantile(double q) {
  if (q <= 0.0) return -2.0;
  if (q >= 1.0) return 2.0;
  if (q == 0.5) return 0.0;
  double lo = -2.0;
  double hi = 2.0;
  double x = 2.0 * std::sin(std::numbers::pi * (q - 0.5));  // arcsine-law guess
  for (int iter = 0; iter < 200; ++iter) {
    const double f = semicircle_cdf(x) - q;
    if (f == 0.0) return x;
    if (f > 0.0) hi = x; else lo = x;
    const double rho = semicircle_density(x);
    double next = rho > 0.0 ? x - f / rho : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x)) || hi - lo < 1e-15) {
      return next;
    }
    x = next;
  }
  return x;
}

// Typical location gamma_k: the k/N quantile of the semicircle law.
inline double typical_location(int k, int N) {
  if (k < 1 || k > N) throw Error(ErrorKind::InvalidArgument, "k out of [1, N]");
  if (2 * k == N) return 0.0;
  return semicircle_quantile(static_cast<double>(k) / N);
}

struct RigidityReport {
  double max_bulk_residual = 0.0;
  // profile[k-1] = |lambda_k - gamma_k| N^{2/3} min(k, N+1-k)^{1/3}
  std::vector<double> profile;
};

inline RigidityReport rigidity_report(const Spectrum &s, double alpha = 0.1) {
  RigidityReport r;
  const int N = s.N;
  r.profile.resize(static_cast<std::size_t>(N));
  const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
  for (int k = 1; k <= N; ++k) {
    const double k_hat = std::min(k, N + 1 - k);
    const double v = std::abs(s(k) - typical_location(k, N)) * n23 * std::cbrt(k_hat);
    r.profile[static_cast<std::size_t>(k - 1)] = v;
    if (k >= alpha * N && k <= (1.0 - alpha) * N) {
      r.max_bulk_residual = std::max(r.max_bulk_residual, v);
    }
  }
  return r;
}

struct GapRecord {
  int k = 0;  // 1-based: gap lambda_{k+1} - lambda_k
  double raw_gap = 0.0;
  double scaled_gap = 0.0;
};

// Bulk index window [ceil(alpha N), min(floor((1-alpha) N), N-1)].
struct BulkWindow {
  int first = 1;
  int last = 0;
  int width() const { return std::max(0, last - first + 1); }
};

inline BulkWindow bulk_window(int N, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1/2)");
  }
  // Small slack so alpha*N landing on an integer is not pushed up by rounding.
  BulkWindow w;
  w.first = std::max(1, static_cast<int>(std::ceil(alpha * N - 1e-9)));
  w.last = std::min(N - 1, static_cast<int>(std::floor((1.0 - alpha) * N + 1e-9)));
  return w;
}

inline std::vector<GapRecord> bulk_gaps(const Spectrum &s, double alpha) {
  const auto w = bulk_window(s.N, alpha);
  std::vector<GapRecord> out;
  out.reserve(static_cast<std::size_t>(w.width()));
  for (int k = w.first; k <= w.last; ++k) {
    const double g = s(k + 1) - s(k);
    out.push_back({k, g, s.N * g});
  }
  return out;
}

// Single gap at 1-based index k, scaled by N.
inline GapRecord gap_at(const Spectrum &s, int k) {
  if (k < 1 || k >= s.N) throw Error(ErrorKind::InvalidArgument, "gap index out of range");
  const double g = s(k + 1) - s(k);
  return {k, g, s.N * g};
}

// Smallest bulk gap scaled by N^exponent; ties go to the smallest k.
inline GapRecord min_bulk_gap(const Spectrum &s, double alpha, double exponent) {
  const auto w = bulk_window(s.N, alpha);
  if (w.width() == 0) throw Error(ErrorKind::InvalidArgument, "empty bulk window");
  GapRecord best{w.first, s(w.first + 1) - s(w.first), 0.0};
  for (int k = w.first + 1; k <= w.last; ++k) {
    const double g = s(k + 1) - s(k);
    if (g < best.raw_gap) best = {k, g, 0.0};
  }
  best.scaled_gap = std::pow(static_cast<double>(s.N), exponent) * best.raw_gap;
  return best;
}

}  // namespace wgap

#endif  // WIGNER_GAPS_SPECTRA_HPP_
