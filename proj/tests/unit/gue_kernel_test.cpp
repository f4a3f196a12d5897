// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wigner_gaps/gue_kernel.hpp"
#include "wigner_gaps/spectra.hpp"

namespace wgap {
namespace {

using boost::math::quadrature::gauss_kronrod;

template <class F>
double integrate(F f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

TEST(Kernel, Symmetric) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng), y = u(rng);
    ASSERT_EQ(kernel(37, x, y), kernel(37, y, x));
  }
}

TEST(Kernel, TraceIsN) {
  EXPECT_NEAR(integrate([](double x) { return kernel(50, x, x); }, -3.0, 3.0), 50.0, 1e-6);
}

TEST(Kernel, ReproducingProperty) {
  const int N = 20;
  for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{0.3, -0.8}, std::pair{1.5, 1.2}}) {
    const double lhs =
        integrate([&](double t) { return kernel(N, x, t) * kernel(N, t, y); }, -4.0, 4.0);
    EXPECT_NEAR(lhs, kernel(N, x, y), 1e-6);
  }
}

TEST(Kernel, CenterDensity) {
  EXPECT_NEAR(kernel(200, 0.0, 0.0) / 200.0, 1.0 / std::numbers::pi, 0.02 / std::numbers::pi);
}

TEST(Kernel, ChristoffelDarbouxMatchesDirectSum) {
  for (int N : {1, 2, 10, 120}) {
    for (auto [x, y] : {std::pair{0.1, 0.7}, std::pair{-1.9, 1.3}, std::pair{0.5, 0.5 + 1e-6}}) {
      const double ref = kernel_direct_sum(N, x, y);
      EXPECT_NEAR(kernel(N, x, y), ref, 1e-9 * std::max(1.0, std::abs(ref)) * N);
    }
  }
}

TEST(Kernel, FarTailStaysFinite) {
  const double v = kernel(400, 5.0, 5.0);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1e-100);
  EXPECT_THROW(kernel(0, 0.0, 0.0), Error);
}

TEST(Rho1, ApproachesSemicircle) {
  const int N = 200;
  for (double x : {0.0, 0.5, -0.5, 1.0, -1.0}) {
    const double rho = semicircle_density(x);
    EXPECT_NEAR(rho1(N, x) / N, rho, 0.03 * rho) << "x=" << x;
  }
}

TEST(Rho2, VanishesOnDiagonal) {
  for (double x : {-1.0, 0.0, 0.4}) EXPECT_EQ(rho2(50, x, 0.0), 0.0);
}

TEST(Rho2, HadamardBound) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(-2.2, 2.2), uu(-0.5, 0.5);
  for (int i = 0; i < 300; ++i) {
    const double x = ux(rng), u = uu(rng);
    const double r2 = rho2(60, x, u);
    ASSERT_GE(r2, 0.0);
    ASSERT_LE(r2, rho1(60, x) * rho1(60, x + u) * (1.0 + 1e-12));
  }
}

TEST(Rho2, LeadingTermRatio) {
  const int N = 200;
  for (double u = 1e-4; u <= 5e-4 + 1e-12; u += 1e-4) {
    const double ratio = rho2(N, 0.0, u) / small_gap_leading_term(N, 0.0, u);
    EXPECT_GE(ratio, 0.8) << "u=" << u;
    EXPECT_LE(ratio, 1.2) << "u=" << u;
  }
}

TEST(Rho2, QuadraticSlope) {
  const int N = 200;
  std::vector<double> lx, ly;
  for (int i = 0; i < 10; ++i) {
    const double u = 1e-4 * std::pow(10.0, i / 9.0);
    lx.push_back(std::log(u));
    ly.push_back(std::log(rho2(N, 0.0, u)));
  }
  double mx = 0, my = 0;
  for (int i = 0; i < 10; ++i) {
    mx += lx[i] / 10;
    my += ly[i] / 10;
  }
  double sxx = 0, sxy = 0;
  for (int i = 0; i < 10; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double slope = sxy / sxx;
  EXPECT_GE(slope, 1.9);
  EXPECT_LE(slope, 2.1);
}

TEST(Rho2, EvenInUAtCenter) {
  for (double u : {1e-3, 0.01, 0.05, 0.2}) {
    const double a = rho2(100, 0.0, u), b = rho2(100, 0.0, -u);
    EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, a));
  }
}

TEST(SmallGap, CenterAndEdgeValues) {
  const int N = 100;
  const double u = 1e-4;
  const double n4 = std::pow(100.0, 4);
  EXPECT_NEAR(small_gap_asymptotic(N, 0.0, u), n4 * u * u / (3.0 * std::numbers::pi * std::numbers::pi),
              1e-12);
  EXPECT_EQ(small_gap_asymptotic(N, 2.0, u), 0.0);
  EXPECT_EQ(small_gap_asymptotic(N, -2.0, u), 0.0);
}

TEST(SmallGap, DomainViolations) {
  EXPECT_THROW(small_gap_asymptotic(100, 2.5, 1e-4), Error);
  EXPECT_THROW(small_gap_asymptotic(100, 0.0, 0.1), Error);
  try {
    small_gap_asymptotic(100, 0.0, 0.1);
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainViolation);
  }
}

TEST(SmallGapCount, ClosedFormMatchesQuadrature) {
  for (double alpha : {0.05, 0.1, 0.25, 0.4}) {
    for (int N : {50, 150}) {
      const double s = 0.7 * std::pow(static_cast<double>(N), -4.0 / 3.0);
      const double cf = expected_small_gap_count_closed_form(N, alpha, s);
      const double q = expected_small_gap_count(N, alpha, s);
      EXPECT_NEAR(q, cf, 1e-8 * std::max(1.0, cf));
    }
  }
}

TEST(SmallGapCount, ShrinkingWindow) {
  const double s = std::pow(150.0, -4.0 / 3.0);
  double prev = expected_small_gap_count(150, 0.1, s);
  for (double alpha : {0.2, 0.3, 0.4, 0.45, 0.49}) {
    const double v = expected_small_gap_count(150, alpha, s);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_EQ(expected_small_gap_count(150, 0.5, s), 0.0);
  EXPECT_THROW(expected_small_gap_count(150, 0.0, s), Error);
}

TEST(SmallGapCount, ConstantFromCubicScaling) {
  // Lambda(x N^{-4/3}) = (c x)^3 independently of N.
  for (double alpha : {0.1, 0.3}) {
    const double c = poissonized_gap_constant(alpha);
    for (int N : {64, 512}) {
      const double lam = expected_small_gap_count(N, alpha, 1.3 * std::pow(double(N), -4.0 / 3.0));
      EXPECT_NEAR(lam, std::pow(c * 1.3, 3), 1e-9);
    }
    EXPECT_NEAR(std::pow(c * predicted_min_gap_median(alpha), 3), std::log(2.0), 1e-12);
  }
}

}  // namespace
}  // namespace wgap
