// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Entry laws for Wigner matrices and the samplers built on them.
//
// Every law describes the distribution of sqrt(N) * H_ij. Laws handed to the
// matrix samplers must be standardized (mean 0, variance 1).

#ifndef WIGNER_GAPS_ENSEMBLES_HPP_
#define WIGNER_GAPS_ENSEMBLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wigner_gaps/core.hpp"
#include "wigner_gaps/types.hpp"

namespace wgap {

// Finitely supported law with strictly increasing atoms and positive weights.
class AtomicLaw {
 public:
  AtomicLaw() = default;

  AtomicLaw(std::vector<double> points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.empty() || points_.size() != weights_.size()) {
      throw Error(ErrorKind::InvalidLaw,
                  "atomic law needs matching, nonempty points and weights");
    }
    CompensatedSum total;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i]) || !std::isfinite(weights_[i])) {
        throw Error(ErrorKind::InvalidLaw, "non-finite atom or weight");
      }
      if (weights_[i] <= 0.0) {
        throw Error(ErrorKind::InvalidLaw, "weights must be strictly positive");
      }
      if (i > 0 && !(points_[i] > points_[i - 1])) {
        throw Error(ErrorKind::InvalidLaw, "points must be strictly increasing");
      }
      total.add(weights_[i]);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) {
      throw Error(ErrorKind::InvalidLaw, "weights must sum to 1");
    }
    cumulative_.resize(weights_.size());
    std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
  }

  const std::vector<double> &points() const { return points_; }
  const std::vector<double> &weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }

  // Raw moment of order k >= 0.
  double raw_moment(int k) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      acc.add(weights_[i] * std::pow(points_[i], k));
    }
    return acc.value();
  }

  double sample(Rng &rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return points_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

  bool operator==(const AtomicLaw &other) const {
    return points_ == other.points_ && weights_ == other.weights_;
  }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

struct StandardGaussianLaw {
  bool operator==(const StandardGaussianLaw &) const = default;
};

// e^{-t/2} X + (1 - e^{-t})^{1/2} G with X ~ base and G standard Gaussian,
// independent. `mix_time` is the Ornstein-Uhlenbeck time t.
struct GaussianDivisibleLaw {
  AtomicLaw base;
  double mix_time = 0.0;
  bool operator==(const GaussianDivisibleLaw &) const = default;
};

// Variance carried by the Gaussian part of a GDE at OU time t.
inline double gaussian_weight(double mix_time) { return -std::expm1(-mix_time); }

class EntryLaw {
 public:
  using Variant = std::variant<AtomicLaw, StandardGaussianLaw, GaussianDivisibleLaw>;

  static EntryLaw atomic(std::vector<double> points, std::vector<double> weights) {
    return EntryLaw(AtomicLaw(std::move(points), std::move(weights)));
  }
  static EntryLaw atomic(AtomicLaw law) { return EntryLaw(std::move(law)); }
  static EntryLaw standard_gaussian() { return EntryLaw(StandardGaussianLaw{}); }
  static EntryLaw gaussian_divisible(AtomicLaw base, double mix_time) {
    if (!(mix_time >= 0.0 && mix_time < 1.0)) {
      throw Error(ErrorKind::InvalidT, "GDE mix time must lie in [0, 1)");
    }
    return EntryLaw(GaussianDivisibleLaw{std::move(base), mix_time});
  }
  static EntryLaw rademacher() { return atomic({-1.0, 1.0}, {0.5, 0.5}); }

  const Variant &variant() const { return law_; }
  bool is_atomic() const { return std::holds_alternative<AtomicLaw>(law_); }
  bool is_gaussian() const { return std::holds_alternative<StandardGaussianLaw>(law_); }
  bool is_gaussian_divisible() const {
    return std::holds_alternative<GaussianDivisibleLaw>(law_);
  }

  // The atomic part: the law itself, or the base of a GDE.
  const AtomicLaw &atomic_part() const {
    if (const auto *a = std::get_if<AtomicLaw>(&law_)) return *a;
    if (const auto *g = std::get_if<GaussianDivisibleLaw>(&law_)) return g->base;
    throw Error(ErrorKind::InvalidLaw, "law has no atomic part");
  }

  double mean() const {
    if (is_gaussian()) return 0.0;
    const double m1 = atomic_part().raw_moment(1);
    if (const auto *g = std::get_if<GaussianDivisibleLaw>(&law_)) {
      return std::exp(-0.5 * g->mix_time) * m1;
    }
    return m1;
  }

  double variance() const {
    if (is_gaussian()) return 1.0;
    const auto &a = atomic_part();
    const double m1 = a.raw_moment(1);
    const double var_base = a.raw_moment(2) - m1 * m1;
    if (const auto *g = std::get_if<GaussianDivisibleLaw>(&law_)) {
      const double s = gaussian_weight(g->mix_time);
      return (1.0 - s) * var_base + s;
    }
    return var_base;
  }

  bool is_standardized(double tol = 1e-10) const {
    return std::abs(mean()) <= tol && std::abs(variance() - 1.0) <= tol;
  }

  double sample(Rng &rng) const {
    return std::visit(
        [&rng](const auto &law) -> double {
          using T = std::decay_t<decltype(law)>;
          if constexpr (std::is_same_v<T, AtomicLaw>) {
            return law.sample(rng);
          } else if constexpr (std::is_same_v<T, StandardGaussianLaw>) {
            return std::normal_distribution<double>(0.0, 1.0)(rng);
          } else {
            const double x = law.base.sample(rng);
            const double g = std::normal_distribution<double>(0.0, 1.0)(rng);
            return std::exp(-0.5 * law.mix_time) * x +
                   std::sqrt(gaussian_weight(law.mix_time)) * g;
          }
        },
        law_);
  }

  // Short human-readable identifier, used as law_id / ensemble_id.
  std::string id() const {
    std::ostringstream os;
    os.precision(6);
    if (is_gaussian()) {
      os << "gaussian";
    } else if (is_atomic()) {
      os << "atomic" << atomic_part().size();
    } else {
      const auto &g = std::get<GaussianDivisibleLaw>(law_);
      os << "gde(atomic" << g.base.size() << ",t=" << g.mix_time << ")";
    }
    return os.str();
  }

  bool operator==(const EntryLaw &other) const { return law_ == other.law_; }

 private:
  explicit EntryLaw(Variant law) : law_(std::move(law)) {}
  Variant law_;
};

// p-support parameters: p clusters [x_i, x_i + c_hat] of mass > kappa with
// pairwise separation > c and |x_i| <= A.
struct PSupportParams {
  int p = 1;
  double c = 1.0;
  double c_hat = 0.0;
  double kappa = 0.0;
  double A = 1.0;
};

struct PSupportReport {
  bool ok = false;
  std::vector<double> cluster_starts;  // a witness when ok
  std::vector<std::string> violations;
};

inline PSupportReport validate_psupport(const EntryLaw &law,
                                        const PSupportParams &params) {
  PSupportReport report;
  if (law.is_gaussian()) {
    report.violations.emplace_back("law has no atomic part");
    return report;
  }
  const auto &atoms = law.atomic_part();
  if (params.p < 1) report.violations.emplace_back("p must be >= 1");
  if (!(params.c > params.c_hat)) report.violations.emplace_back("need c > c_hat");
  if (params.c_hat < 0.0) report.violations.emplace_back("need c_hat >= 0");
  if (!(params.kappa > 0.0)) report.violations.emplace_back("need kappa > 0");
  if (params.p >= 1 && params.kappa > 1.0 / params.p) {
    report.violations.emplace_back("need kappa <= 1/p");
  }
  if (!(params.A > 0.0)) report.violations.emplace_back("need A > 0");
  if (!report.violations.empty()) return report;

  const auto &x = atoms.points();
  const auto &w = atoms.weights();
  const auto p = static_cast<std::size_t>(params.p);
  if (x.size() < p) {
    report.violations.emplace_back("fewer atoms than p");
    return report;
  }

  // A cluster window can always be slid right onto its first atom, so atom
  // positions are the only candidate starts.
  std::vector<double> heavy;
  std::size_t within_bound = 0;
  std::size_t heavy_any = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double mass = 0.0;
    for (std::size_t j = i; j < x.size() && x[j] <= x[i] + params.c_hat; ++j) {
      mass += w[j];
    }
    const bool in_bound = std::abs(x[i]) <= params.A;
    within_bound += in_bound ? 1 : 0;
    heavy_any += mass > params.kappa ? 1 : 0;
    if (in_bound && mass > params.kappa) heavy.push_back(x[i]);
  }
  // Leftmost-first greedy maximizes the number of starts with gaps > c.
  for (double start : heavy) {
    if (report.cluster_starts.empty() ||
        start - report.cluster_starts.back() > params.c) {
      report.cluster_starts.push_back(start);
    }
  }
  if (heavy_any < p) report.violations.emplace_back("cluster mass <= kappa");
  if (within_bound < p) report.violations.emplace_back("atoms outside [-A, A]");
  if (report.cluster_starts.size() < p && report.violations.empty()) {
    report.violations.emplace_back("separation <= c");
  }
  report.ok = report.cluster_starts.size() >= p;
  if (report.ok) {
    report.violations.clear();
    report.cluster_starts.resize(p);
  } else {
    report.cluster_starts.clear();
  }
  return report;
}

inline AtomicLaw standardize(const AtomicLaw &law) {
  const double m1 = law.raw_moment(1);
  CompensatedSum var;
  for (std::size_t i = 0; i < law.size(); ++i) {
    const double d = law.points()[i] - m1;
    var.add(law.weights()[i] * d * d);
  }
  const double v = var.value();
  if (!(v > 0.0)) throw Error(ErrorKind::ZeroVariance, "law has zero variance");
  const double scale = 1.0 / std::sqrt(v);
  std::vector<double> pts(law.size());
  for (std::size_t i = 0; i < law.size(); ++i) {
    pts[i] = (law.points()[i] - m1) * scale;
  }
  return AtomicLaw(std::move(pts), law.weights());
}

inline EntryLaw standardize(const EntryLaw &law) {
  if (law.is_gaussian()) return law;
  if (law.is_atomic()) return EntryLaw::atomic(standardize(law.atomic_part()));
  const auto &g = std::get<GaussianDivisibleLaw>(law.variant());
  return EntryLaw::gaussian_divisible(standardize(g.base), g.mix_time);
}

// n equally weighted atoms, equispaced on [lo, hi], not standardized.
inline AtomicLaw equispaced_law(int n, double lo, double hi) {
  std::vector<double> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return AtomicLaw(std::move(pts),
                   std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

namespace detail {

inline void require_n(int N) {
  if (N < 2) throw Error(ErrorKind::InvalidN, "N must be at least 2");
}

inline WignerDraw empty_draw(int N, SymmetryClass cls, std::uint64_t seed,
                             std::string law_id) {
  WignerDraw d;
  d.N = N;
  d.cls = cls;
  d.re = Eigen::MatrixXd::Zero(N, N);
  if (cls == SymmetryClass::ComplexHermitian) d.im = Eigen::MatrixXd::Zero(N, N);
  d.seed = seed;
  d.law_id = std::move(law_id);
  return d;
}

// Fills the upper triangle row by row through `diag` / `off` and mirrors it.
template <class DiagFn, class OffFn>
void fill_self_adjoint(WignerDraw &d, DiagFn diag, OffFn off) {
  const int N = d.N;
  for (int i = 0; i < N; ++i) {
    d.re(i, i) = diag();
    for (int j = i + 1; j < N; ++j) {
      const auto [re, im] = off();
      d.re(i, j) = re;
      d.re(j, i) = re;
      if (d.is_complex()) {
        d.im(i, j) = im;
        d.im(j, i) = -im;
      }
    }
  }
}

}  // namespace detail

// Wigner matrix with i.i.d. entries sqrt(N) H_ij ~ law (uniform profile
// E|H_ij|^2 = 1/N). Complex class: Re and Im drawn independently from the same
// law, each scaled by 1/sqrt(2N).
inline WignerDraw sample_wigner(const EntryLaw &law, int N, SymmetryClass cls,
                                std::uint64_t seed) {
  detail::require_n(N);
  if (!law.is_standardized()) {
    throw Error(ErrorKind::InvalidLaw, "entry law must be standardized");
  }
  Rng rng(seed);
  auto d = detail::empty_draw(N, cls, seed, law.id());
  const double s_diag = 1.0 / std::sqrt(static_cast<double>(N));
  if (cls == SymmetryClass::RealSymmetric) {
    detail::fill_self_adjoint(
        d, [&] { return law.sample(rng) * s_diag; },
        [&] { return std::pair{law.sample(rng) * s_diag, 0.0}; });
  } else {
    const double s_off = 1.0 / std::sqrt(2.0 * N);
    detail::fill_self_adjoint(
        d, [&] { return law.sample(rng) * s_diag; },
        [&] {
          const double re = law.sample(rng) * s_off;
          const double im = law.sample(rng) * s_off;
          return std::pair{re, im};
        });
  }
  return d;
}

// GOE (diagonal variance 2/N) or GUE (diagonal variance 1/N), both with
// E|H_ij|^2 = 1/N off the diagonal.
inline WignerDraw sample_gaussian_invariant(int N, SymmetryClass cls,
                                            std::uint64_t seed) {
  detail::require_n(N);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool real = cls == SymmetryClass::RealSymmetric;
  auto d = detail::empty_draw(N, cls, seed, real ? "goe" : "gue");
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
  if (real) {
    const double s_diag = std::sqrt(2.0) * inv_sqrt_n;
    detail::fill_self_adjoint(
        d, [&] { return normal(rng) * s_diag; },
        [&] { return std::pair{normal(rng) * inv_sqrt_n, 0.0}; });
  } else {
    const double s_off = 1.0 / std::sqrt(2.0 * N);
    detail::fill_self_adjoint(
        d, [&] { return normal(rng) * inv_sqrt_n; },
        [&] {
          const double re = normal(rng) * s_off;
          const double im = normal(rng) * s_off;
          return std::pair{re, im};
        });
  }
  return d;
}

// Eigenvalues of the Dumitriu-Edelman tridiagonal model, scaled to the same
// [-2, 2] normalization as sample_gaussian_invariant: diagonal N(0, 2),
// subdiagonal chi_{beta(N-i)}, all divided by sqrt(beta N).
inline Spectrum sample_gxe_spectrum_tridiagonal(int N, int beta,
                                                std::uint64_t seed) {
  detail::require_n(N);
  if (beta != 1 && beta != 2) {
    throw Error(ErrorKind::InvalidArgument, "beta must be 1 or 2");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0));
  const double scale = 1.0 / std::sqrt(static_cast<double>(beta) * N);
  Eigen::VectorXd diag(N);
  Eigen::VectorXd sub(N - 1);
  for (int i = 0; i < N; ++i) diag(i) = normal(rng) * scale;
  for (int i = 0; i < N - 1; ++i) {
    std::chi_squared_distribution<double> chi2(static_cast<double>(beta) * (N - 1 - i));
    sub(i) = std::sqrt(chi2(rng)) * scale;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::EigensolveFailure, "tridiagonal eigensolve failed");
  }
  Spectrum s;
  s.N = N;
  s.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + N);
  std::sort(s.values.begin(), s.values.end());
  s.ensemble_id = beta == 1 ? "goe" : "gue";
  s.seed = seed;
  return s;
}

}  // namespace wgap

#endif  // WIGNER_GAPS_ENSEMBLES_HPP_
