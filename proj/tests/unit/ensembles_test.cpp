// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "wigner_gaps/ensembles.hpp"
#include "wigner_gaps/law_io.hpp"
#include "wigner_gaps/spectra.hpp"
#include "wigner_gaps/stats.hpp"

namespace wgap {
namespace {

// Plain mean and variance of a weighted point set, computed independently of
// the library.
std::pair<double, double> weighted_mean_var(const std::vector<double> &x,
                                            const std::vector<double> &w) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m += w[i] * x[i];
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * (x[i] - m) * (x[i] - m);
  return {m, v};
}

struct Running {
  double n = 0, sum = 0, sum2 = 0;
  void add(double x) { n += 1; sum += x; sum2 += x * x; }
  double mean() const { return sum / n; }
  double se() const { return std::sqrt((sum2 / n - mean() * mean()) / (n - 1)); }
};

TEST(AtomicLaw, RejectsBadWeightsAndOrder) {
  EXPECT_THROW(AtomicLaw({0.0, 1.0}, {0.5, 0.4}), Error);
  EXPECT_THROW(AtomicLaw({0.0, 1.0}, {1.0, 0.0}), Error);
  EXPECT_THROW(AtomicLaw({1.0, 0.0}, {0.5, 0.5}), Error);
  EXPECT_THROW(AtomicLaw({0.0, 0.0}, {0.5, 0.5}), Error);
  EXPECT_NO_THROW(AtomicLaw({-1.0, 1.0}, {0.5, 0.5 + 5e-13}));
}

TEST(EntryLaw, GaussianDivisibleTimeRange) {
  const auto base = EntryLaw::rademacher().atomic_part();
  EXPECT_THROW(EntryLaw::gaussian_divisible(base, 1.0), Error);
  EXPECT_THROW(EntryLaw::gaussian_divisible(base, -0.1), Error);
  const auto g = EntryLaw::gaussian_divisible(base, 0.5);
  EXPECT_NEAR(g.mean(), 0.0, 1e-15);
  EXPECT_NEAR(g.variance(), 1.0, 1e-14);
  EXPECT_TRUE(g.is_standardized());
}

TEST(PSupport, RademacherTwoAtoms) {
  const auto r = validate_psupport(EntryLaw::rademacher(), {2, 1.5, 0.0, 0.4, 1.0});
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.violations.empty());
  ASSERT_EQ(r.cluster_starts.size(), 2u);
}

TEST(PSupport, RademacherCannotSupportThreeAtoms) {
  const auto r = validate_psupport(EntryLaw::rademacher(), {3, 1.5, 0.0, 0.3, 1.0});
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.violations.empty());
}

TEST(PSupport, SixEquispacedAtoms) {
  const auto law = EntryLaw::atomic(equispaced_law(6, -2.0, 2.0));
  EXPECT_TRUE(validate_psupport(law, {6, 0.7, 0.0, 0.1, 2.0}).ok);
  EXPECT_FALSE(validate_psupport(law, {6, 0.8, 0.0, 0.1, 2.0}).ok);
  EXPECT_FALSE(validate_psupport(law, {6, 0.7, 0.0, 0.1, 1.9}).ok);
}

TEST(PSupport, PerturbingAnAtomIntoAnotherBallFlipsThePredicate) {
  std::vector<double> x = {-2.0, -1.2, -0.4, 0.4, 1.2, 2.0};
  const std::vector<double> w(6, 1.0 / 6.0);
  const PSupportParams params{6, 0.7, 0.0, 0.1, 2.0};
  EXPECT_TRUE(validate_psupport(EntryLaw::atomic(x, w), params).ok);
  x[3] = -0.4 + 0.5;  // inside the c-ball of its left neighbour
  const auto r = validate_psupport(EntryLaw::atomic(x, w), params);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.violations.empty());
}

TEST(PSupport, ClusterMassAndParameterChecks) {
  const auto law = EntryLaw::atomic({-1.0, -0.95, 1.0}, {0.25, 0.25, 0.5});
  // Point masses alone are too light; a cluster of width 0.1 collects 0.5.
  EXPECT_FALSE(validate_psupport(law, {2, 1.5, 0.0, 0.3, 1.0}).ok);
  EXPECT_TRUE(validate_psupport(law, {2, 1.5, 0.1, 0.3, 1.0}).ok);
  const auto bad = validate_psupport(law, {2, 0.1, 0.2, 0.9, 1.0});
  EXPECT_FALSE(bad.ok);
  EXPECT_GE(bad.violations.size(), 2u);  // c <= c_hat and kappa > 1/p
  EXPECT_FALSE(validate_psupport(EntryLaw::standard_gaussian(), {1, 1.0, 0.0, 0.5, 1.0}).ok);
}

TEST(Standardize, TwoPointLaw) {
  const auto s = standardize(AtomicLaw({0.0, 1.0}, {0.5, 0.5}));
  EXPECT_DOUBLE_EQ(s.points()[0], -1.0);
  EXPECT_DOUBLE_EQ(s.points()[1], 1.0);
  EXPECT_EQ(s.weights(), (std::vector<double>{0.5, 0.5}));
}

TEST(Standardize, RademacherIsFixed) {
  EXPECT_EQ(standardize(EntryLaw::rademacher()), EntryLaw::rademacher());
}

TEST(Standardize, ThreePointLaw) {
  const std::vector<double> x = {0.0, 1.0, 3.0};
  const std::vector<double> w(3, 1.0 / 3.0);
  const auto [m, v] = weighted_mean_var(x, w);
  EXPECT_NEAR(m, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(v, 14.0 / 9.0, 1e-15);
  const auto s = standardize(AtomicLaw(x, w));
  const auto [m2, v2] = weighted_mean_var(s.points(), s.weights());
  EXPECT_NEAR(m2, 0.0, 1e-15);
  EXPECT_NEAR(v2, 1.0, 1e-14);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(s.points()[i], (x[i] - m) / std::sqrt(v), 1e-15);
  }
}

TEST(Standardize, PointMassHasZeroVariance) {
  try {
    standardize(AtomicLaw({2.0}, {1.0}));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroVariance);
  }
}

TEST(SampleWigner, RejectsSmallNAndUnstandardizedLaws) {
  EXPECT_THROW(sample_wigner(EntryLaw::rademacher(), 1, SymmetryClass::RealSymmetric, 1), Error);
  try {
    sample_wigner(EntryLaw::atomic({0.0, 1.0}, {0.5, 0.5}), 4, SymmetryClass::RealSymmetric, 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidLaw);
  }
}

TEST(SampleWigner, SmallestMatrixIsExactlySelfAdjoint) {
  const EntryLaw laws[] = {EntryLaw::rademacher(), EntryLaw::standard_gaussian(),
                           EntryLaw::gaussian_divisible(EntryLaw::rademacher().atomic_part(), 0.3)};
  for (const auto &law : laws) {
    for (auto cls : {SymmetryClass::RealSymmetric, SymmetryClass::ComplexHermitian}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto h = sample_wigner(law, 2, cls, seed);
        EXPECT_TRUE(h.is_exactly_self_adjoint());
        const Eigen::MatrixXcd c = h.as_complex();
        EXPECT_TRUE((c - c.adjoint()).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST(SampleWigner, RademacherOffDiagonalMoments) {
  const int N = 100;
  Running first, second;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto h = sample_wigner(EntryLaw::rademacher(), N, SymmetryClass::RealSymmetric, s);
    first.add(h.re(0, 1));
    second.add(h.re(0, 1) * h.re(0, 1));
  }
  EXPECT_LE(std::abs(first.mean()), 4.0 * first.se());
  // Rademacher squares are exactly 1/N.
  EXPECT_NEAR(second.mean(), 1.0 / N, 1e-12);
}

TEST(SampleWigner, GaussianEntryVariancesBothClasses) {
  const int N = 8;
  Running off_real, diag_real, re_c, im_c, diag_c;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const auto r = sample_wigner(EntryLaw::standard_gaussian(), N, SymmetryClass::RealSymmetric, s);
    off_real.add(r.re(2, 5) * r.re(2, 5));
    diag_real.add(r.re(3, 3) * r.re(3, 3));
    const auto c = sample_wigner(EntryLaw::standard_gaussian(), N, SymmetryClass::ComplexHermitian, s);
    re_c.add(c.re(1, 4) * c.re(1, 4));
    im_c.add(c.im(1, 4) * c.im(1, 4));
    diag_c.add(c.re(0, 0) * c.re(0, 0));
  }
  EXPECT_NEAR(off_real.mean(), 1.0 / N, 4.0 * off_real.se());
  EXPECT_NEAR(diag_real.mean(), 1.0 / N, 4.0 * diag_real.se());
  EXPECT_NEAR(re_c.mean(), 0.5 / N, 4.0 * re_c.se());
  EXPECT_NEAR(im_c.mean(), 0.5 / N, 4.0 * im_c.se());
  EXPECT_NEAR(diag_c.mean(), 1.0 / N, 4.0 * diag_c.se());
}

TEST(SampleWigner, RowSecondMomentSumsToOne) {
  const int N = 20;
  Running row;
  const auto law = EntryLaw::atomic(standardize(equispaced_law(6, -2.0, 2.0)));
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto h = sample_wigner(law, N, SymmetryClass::RealSymmetric, s);
    row.add(h.re.row(7).squaredNorm());
  }
  EXPECT_NEAR(row.mean(), 1.0, 5.0 * row.se());
}

TEST(SampleWigner, FixedSeedIsDeterministic) {
  for (auto cls : {SymmetryClass::RealSymmetric, SymmetryClass::ComplexHermitian}) {
    const auto a = sample_wigner(EntryLaw::rademacher(), 30, cls, 77);
    const auto b = sample_wigner(EntryLaw::rademacher(), 30, cls, 77);
    EXPECT_TRUE(a.re == b.re);
    EXPECT_TRUE(a.im == b.im);
    const auto c = sample_wigner(EntryLaw::rademacher(), 30, cls, 78);
    EXPECT_FALSE(a.re == c.re);
  }
  const auto g1 = sample_gaussian_invariant(30, SymmetryClass::ComplexHermitian, 5);
  const auto g2 = sample_gaussian_invariant(30, SymmetryClass::ComplexHermitian, 5);
  EXPECT_TRUE(g1.re == g2.re && g1.im == g2.im);
}

TEST(GaussianInvariant, SpectrumConcentratesOnSemicircleSupport) {
  const int N = 400;
  std::size_t inside = 0, total = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto sp = eigenvalues(sample_gaussian_invariant(N, SymmetryClass::RealSymmetric, s));
    for (double l : sp.values) inside += std::abs(l) <= 2.1 ? 1 : 0;
    total += sp.values.size();
  }
  EXPECT_GE(static_cast<double>(inside) / total, 0.999);
}

TEST(GaussianInvariant, TraceOfSquareForTwoByTwo) {
  // E Tr H^2 = sum of entry variances = 2 * (2/N) + 2 * (1/N) = 3 at N = 2.
  Running tr;
  for (std::uint64_t s = 0; s < 100000; ++s) {
    const auto h = sample_gaussian_invariant(2, SymmetryClass::RealSymmetric, s);
    tr.add(h.re.squaredNorm());
  }
  EXPECT_NEAR(tr.mean(), 3.0, 4.0 * tr.se());
}

TEST(GaussianInvariant, ComplexEntryVariances) {
  const int N = 6;
  Running off, diag;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const auto h = sample_gaussian_invariant(N, SymmetryClass::ComplexHermitian, s);
    off.add(h.re(0, 3) * h.re(0, 3) + h.im(0, 3) * h.im(0, 3));
    diag.add(h.re(2, 2) * h.re(2, 2));
    ASSERT_TRUE(h.is_exactly_self_adjoint());
  }
  EXPECT_NEAR(off.mean(), 1.0 / N, 4.0 * off.se());
  EXPECT_NEAR(diag.mean(), 1.0 / N, 4.0 * diag.se());
}

TEST(Tridiagonal, GueSpectrumMatchesSemicircle) {
  std::vector<double> pooled;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto sp = sample_gxe_spectrum_tridiagonal(200, 2, s);
    pooled.insert(pooled.end(), sp.values.begin(), sp.values.end());
  }
  const double d = kolmogorov_distance_to(Ecdf(pooled), [](double x) { return semicircle_cdf(x); });
  EXPECT_LE(d, 0.02);
}

TEST(Tridiagonal, TwoByTwoIsSorted) {
  double spread = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto sp = sample_gxe_spectrum_tridiagonal(2, 1, s);
    ASSERT_TRUE(sp.is_sorted());
    spread += sp(2) - sp(1);
  }
  EXPECT_GT(spread / 1000.0, 0.0);
}

TEST(Tridiagonal, MiddleGapAgreesWithDenseSampler) {
  const int N = 100;
  const int reps = 4000;
  std::vector<double> tri, dense;
  for (int r = 0; r < reps; ++r) {
    tri.push_back(gap_at(sample_gxe_spectrum_tridiagonal(N, 1, derive_seed(1, r)), N / 2).scaled_gap);
    dense.push_back(gap_at(eigenvalues(sample_gaussian_invariant(N, SymmetryClass::RealSymmetric,
                                                                 derive_seed(2, r))),
                           N / 2).scaled_gap);
  }
  EXPECT_LE(kolmogorov_distance(Ecdf(tri), Ecdf(dense)), 2.0 * pooled_dkw_bound(reps, reps, 0.05));
}

TEST(Tridiagonal, RejectsBadArguments) {
  EXPECT_THROW(sample_gxe_spectrum_tridiagonal(1, 1, 0), Error);
  EXPECT_THROW(sample_gxe_spectrum_tridiagonal(10, 3, 0), Error);
}

TEST(LawIo, RoundTrip) {
  const EntryLaw laws[] = {EntryLaw::rademacher(), EntryLaw::standard_gaussian(),
                           EntryLaw::gaussian_divisible(EntryLaw::rademacher().atomic_part(), 0.5)};
  for (const auto &law : laws) EXPECT_EQ(law_from_json(to_json(law)), law);
  EXPECT_THROW(law_from_json(Json::parse(R"({"type":"cauchy"})")), Error);
  EXPECT_THROW(law_from_json(Json::parse(R"({"type":"atomic","points":[0]})")), Error);
  EXPECT_THROW(law_from_json(Json::parse(R"({"type":"gde","base":{"type":"atomic","points":[-1,1],"weights":[0.5,0.5]},"t":1.5})")),
               Error);
}

TEST(Core, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000000u);
}

TEST(Core, CompensatedSumRecoversSmallTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-13, 1e-20);
}

TEST(Core, SemicircleDensity) {
  EXPECT_DOUBLE_EQ(semicircle_density(0.0), 1.0 / std::numbers::pi);
  EXPECT_EQ(semicircle_density(2.5), 0.0);
  EXPECT_EQ(semicircle_density(-2.0), 0.0);
}

}  // namespace
}  // namespace wgap
