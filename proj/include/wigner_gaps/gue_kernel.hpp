// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// GUE determinantal kernel for eigenvalues normalized to [-2, 2]
// (E|H_ij|^2 = 1/N), and the Poissonized small-gap prediction built on the
// two-point function.
//
// With c = sqrt(N/2) and oscillator wavefunctions psi_k,
//   K_N(x, y) = c * sum_{k<N} psi_k(c x) psi_k(c y),
// so that K_N(x, x) / N tends to the semicircle density.

#ifndef WIGNER_GAPS_GUE_KERNEL_HPP_
#define WIGNER_GAPS_GUE_KERNEL_HPP_

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "wigner_gaps/core.hpp"
#include "wigner_gaps/spectra.hpp"

namespace wgap {

namespace detail {

inline constexpr double kRescaleAbove = 1e150;
inline constexpr double kRescaleFactor = 1e-150;

// psi_0..psi_{n} at u, stored as mantissas times exp(log_scale).
struct HermiteValues {
  std::vector<double> psi;
  double log_scale = 0.0;

  double value(std::size_t k) const { return psi[k] * std::exp(log_scale); }
};

// Three-term recurrence
//   psi_{k+1}(u) = u sqrt(2/(k+1)) psi_k(u) - sqrt(k/(k+1)) psi_{k-1}(u),
// started from pi^{-1/4} with the Gaussian factor e^{-u^2/2} kept as a log
// scale so that large |u| does not underflow. Rescaling is global, so every
// stored entry shares one scale.
inline HermiteValues hermite_functions(double u, int n) {
  HermiteValues h;
  h.psi.resize(static_cast<std::size_t>(n) + 1);
  h.log_scale = -0.5 * u * u;
  h.psi[0] = std::pow(std::numbers::pi, -0.25);
  if (n >= 1) h.psi[1] = std::sqrt(2.0) * u * h.psi[0];
  for (int k = 1; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    h.psi[kk + 1] = u * std::sqrt(2.0 / (k + 1)) * h.psi[kk] -
                    std::sqrt(static_cast<double>(k) / (k + 1)) * h.psi[kk - 1];
    if (std::abs(h.psi[kk + 1]) > kRescaleAbove) {
      for (std::size_t j = 0; j <= kk + 1; ++j) h.psi[j] *= kRescaleFactor;
      h.log_scale -= std::log(kRescaleFactor);
    }
  }
  return h;
}

}  // namespace detail

inline constexpr double kChristoffelDarbouxCutoff = 1e-8;

inline double kernel(int N, double x, double y) {
  if (N < 1) throw Error(ErrorKind::InvalidN, "kernel needs N >= 1");
  const double c = std::sqrt(0.5 * N);
  const double a = c * x;
  const double b = c * y;
  const auto ha = detail::hermite_functions(a, N);
  const auto hb = detail::hermite_functions(b, N);
  const double scale = std::exp(ha.log_scale + hb.log_scale);
  const auto n = static_cast<std::size_t>(N);
  if (std::abs(x - y) > kChristoffelDarbouxCutoff * std::max(1.0, std::abs(x))) {
    const double num = ha.psi[n] * hb.psi[n - 1] - ha.psi[n - 1] * hb.psi[n];
    return c * c * num / (a - b) * scale;
  }
  CompensatedSum acc;
  for (std::size_t k = 0; k < n; ++k) acc.add(ha.psi[k] * hb.psi[k]);
  return c * acc.value() * scale;
}

// Direct N-term sum, no Christoffel-Darboux shortcut.
inline double kernel_direct_sum(int N, double x, double y) {
  const double c = std::sqrt(0.5 * N);
  const auto ha = detail::hermite_functions(c * x, N);
  const auto hb = detail::hermite_functions(c * y, N);
  CompensatedSum acc;
  for (std::size_t k = 0; k < static_cast<std::size_t>(N); ++k) acc.add(ha.psi[k] * hb.psi[k]);
  return c * acc.value() * std::exp(ha.log_scale + hb.log_scale);
}

inline double rho1(int N, double x) { return kernel(N, x, x); }

// det [[K(x,x), K(x,x+u)], [K(x+u,x), K(x+u,x+u)]], floored at 0.
inline double rho2(int N, double x, double u) {
  const double kxx = kernel(N, x, x);
  const double kyy = kernel(N, x + u, x + u);
  const double kxy = kernel(N, x, x + u);
  return std::max(0.0, kxx * kyy - kxy * kxy);
}

// Leading term N^4 (4 - x^2)^2 u^2 / (48 pi^2) of rho2(x, x+u) for small u.
inline double small_gap_leading_term(int N, double x, double u) {
  const double n2 = static_cast<double>(N) * N;
  const double w = 4.0 - x * x;
  return n2 * n2 * w * w * u * u / (48.0 * std::numbers::pi * std::numbers::pi);
}

struct SmallGapDomain {
  double c = 1.0;
  double delta = 0.1;
};

inline double small_gap_asymptotic(int N, double x, double u, SmallGapDomain dom = {}) {
  if (std::abs(x) > 2.0) {
    throw Error(ErrorKind::DomainViolation, "x outside [-2, 2]");
  }
  if (std::abs(u) >= dom.c * std::pow(static_cast<double>(N), -4.0 / 3.0 + dom.delta)) {
    throw Error(ErrorKind::DomainViolation, "u above c N^{-4/3+delta}");
  }
  return small_gap_leading_term(N, x, u);
}

// Semicircle positions of the bulk window edges gamma(alpha), gamma(1-alpha).
inline std::pair<double, double> bulk_edges(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1/2]");
  }
  return {semicircle_quantile(alpha), semicircle_quantile(1.0 - alpha)};
}

// Integral of (4 - x^2)^2 over the bulk window, in closed form.
inline double bulk_weight_integral(double alpha) {
  const auto [lo, hi] = bulk_edges(alpha);
  auto F = [](double x) {
    const double x3 = x * x * x;
    return 16.0 * x - 8.0 * x3 / 3.0 + x3 * x * x / 5.0;
  };
  return F(hi) - F(lo);
}

// Scaling constant c(alpha) for which c * N^{4/3} * (smallest bulk gap) is
// asymptotically distributed with CDF 1 - e^{-x^3}.
inline double poissonized_gap_constant(double alpha) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return std::cbrt(bulk_weight_integral(alpha) / (144.0 * pi2));
}

// Median of N^{4/3} * smallest bulk gap implied by the Poisson limit.
inline double predicted_min_gap_median(double alpha) {
  return std::cbrt(std::log(2.0)) / poissonized_gap_constant(alpha);
}

// Closed form of Lambda(s) = int_bulk int_0^s rho2_leading(x, x+u) du dx.
inline double expected_small_gap_count_closed_form(int N, double alpha, double s) {
  const double n2 = static_cast<double>(N) * N;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return n2 * n2 * s * s * s * bulk_weight_integral(alpha) / (144.0 * pi2);
}

// Lambda(s) by nested adaptive Gauss-Kronrod quadrature of the leading term.
inline double expected_small_gap_count(int N, double alpha, double s) {
  using boost::math::quadrature::gauss_kronrod;
  const auto [lo, hi] = bulk_edges(alpha);
  if (!(hi > lo) || s <= 0.0) return 0.0;
  double outer_error = 0.0;
  double outer_l1 = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(
      [&](double x) {
        double err = 0.0;
        double l1 = 0.0;
        const double inner = gauss_kronrod<double, 15>::integrate(
            [&](double u) { return small_gap_leading_term(N, x, u); }, 0.0, s, 10, 1e-13,
            &err, &l1);
        if (err > 1e-6 * std::max(l1, 1e-300)) {
          throw Error(ErrorKind::QuadratureFailure, "inner gap integral did not converge");
        }
        return inner;
      },
      lo, hi, 15, 1e-13, &outer_error, &outer_l1);
  if (outer_error > 1e-6 * std::max(outer_l1, 1e-300)) {
    throw Error(ErrorKind::QuadratureFailure, "outer gap integral did not converge");
  }
  return value;
}

}  // namespace wgap

#endif  // WIGNER_GAPS_GUE_KERNEL_HPP_
