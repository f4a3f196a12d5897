// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Smoothed counting functions, resolvents and the local-law / Ward identity
// diagnostics used in Green function comparison.

#ifndef WIGNER_GAPS_OBSERVABLES_HPP_
#define WIGNER_GAPS_OBSERVABLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "wigner_gaps/core.hpp"
#include "wigner_gaps/ensembles.hpp"
#include "wigner_gaps/moment_match.hpp"
#include "wigner_gaps/parallel.hpp"
#include "wigner_gaps/spectra.hpp"
#include "wigner_gaps/types.hpp"

namespace wgap {

using Complex = std::complex<double>;

// eta_d = N^{-3/2+eps}, eta_0 = N^{-3/2+2eps}, Delta = N^{-3/2+3eps}.
struct SmoothingParams {
  double epsilon = 0.0;
  int N = 0;
  double eta_d = 0.0;
  double eta_0 = 0.0;
  double Delta = 0.0;

  static SmoothingParams make(double epsilon, int N) {
    if (!(epsilon > 0.0) || N < 1) {
      throw Error(ErrorKind::InvalidArgument, "need epsilon > 0 and N >= 1");
    }
    const double n = N;
    return {epsilon, N, std::pow(n, -1.5 + epsilon), std::pow(n, -1.5 + 2.0 * epsilon),
            std::pow(n, -1.5 + 3.0 * epsilon)};
  }

  // eta_d < eta_0 < Delta < 1/N; holds for eps < 1/6 once N is large.
  bool scales_ordered() const { return eta_d < eta_0 && eta_0 < Delta && Delta < 1.0 / N; }
};

// s(x) = 1 / (1 + e^x), evaluated without overflow.
inline double logistic(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

// Smooth approximation of 1{x <= E} on scale eta_d.
inline double f_E(double x, double E, double eta_d) { return logistic((x - E) / eta_d); }

// 0 below alpha - 2/3, 1 above alpha - 1/3, cubic smoothstep in between.
inline double q_alpha(double x, double alpha) {
  if (x <= alpha - 2.0 / 3.0) return 0.0;
  if (x >= alpha - 1.0 / 3.0) return 1.0;
  const double u = 3.0 * (x - alpha + 2.0 / 3.0);
  return u * u * (3.0 - 2.0 * u);
}

inline double tr_f(const Spectrum &s, double E, double eta_d) {
  CompensatedSum acc;
  for (double l : s.values) acc.add(f_E(l, E, eta_d));
  return acc.value();
}

// #{i : lambda_i <= E}.
inline int counting(const Spectrum &s, double E) {
  return static_cast<int>(std::upper_bound(s.values.begin(), s.values.end(), E) -
                          s.values.begin());
}

struct SandwichReport {
  bool counting_bounds = true;   // Tr f_{E-eta0} - r <= N(E) <= Tr f_{E+eta0} + r
  bool indicator_bounds = true;  // q_a(Tr f_{E-eta0}) <= 1{N(E) >= a} <= q_a(Tr f_{E+eta0})
  int first_bad_alpha = 0;
  double tr_minus = 0.0;
  double tr_plus = 0.0;
  int count = 0;
  bool ok() const { return counting_bounds && indicator_bounds; }
};

inline SandwichReport sandwich_report(const Spectrum &s, double E,
                                      const SmoothingParams &params) {
  SandwichReport r;
  r.tr_minus = tr_f(s, E - params.eta_0, params.eta_d);
  r.tr_plus = tr_f(s, E + params.eta_0, params.eta_d);
  r.count = counting(s, E);
  const double slack = std::exp(-std::pow(static_cast<double>(params.N), 0.5 * params.epsilon));
  r.counting_bounds = r.tr_minus - slack <= r.count && r.count <= r.tr_plus + slack;
  for (int a = 1; a <= s.N; ++a) {
    const double indicator = r.count >= a ? 1.0 : 0.0;
    if (!(q_alpha(r.tr_minus, a) <= indicator && indicator <= q_alpha(r.tr_plus, a))) {
      r.indicator_bounds = false;
      r.first_bad_alpha = a;
      break;
    }
  }
  return r;
}

inline bool sandwich_check(const Spectrum &s, double E, const SmoothingParams &params) {
  return sandwich_report(s, E, params).ok();
}

// Stieltjes transform of the semicircle law: the root of m^2 + z m + 1 = 0
// with Im m > 0.
inline Complex m_sc(Complex z) {
  const Complex w = std::sqrt(z * z - 4.0);
  const Complex r1 = 0.5 * (-z + w);
  const Complex r2 = 0.5 * (-z - w);
  // Take the larger root directly and the other as its reciprocal (product 1).
  const Complex big = std::abs(r1) >= std::abs(r2) ? r1 : r2;
  return big.imag() > 0.0 ? big : 1.0 / big;
}

// Typical size of the local law error at z.
inline double local_law_scale(Complex z, int N) {
  const double n_eta = N * z.imag();
  return std::sqrt(m_sc(z).imag() / n_eta) + 1.0 / n_eta;
}

struct ResolventSample {
  Complex z;
  Eigen::MatrixXcd G;
  std::uint64_t draw_seed = 0;
  std::string draw_id;
};

inline constexpr double kMinResolventEta = 1e-14;

// G = (H - z)^{-1} from one LU factorization.
inline ResolventSample resolvent(const WignerDraw &h, Complex z) {
  if (!(z.imag() >= kMinResolventEta)) {
    throw Error(ErrorKind::NearSingular, "Im z below 1e-14");
  }
  Eigen::MatrixXcd a = h.as_complex();
  a.diagonal().array() -= z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  ResolventSample out;
  out.z = z;
  out.G = lu.inverse();
  out.draw_seed = h.seed;
  out.draw_id = h.law_id;
  return out;
}

// max_{ij} |G_ij - delta_ij m_sc(z)|.
inline double local_law_stat(const ResolventSample &sample) {
  const Complex m = m_sc(sample.z);
  Eigen::MatrixXcd d = sample.G;
  d.diagonal().array() -= m;
  return d.cwiseAbs().maxCoeff();
}

inline double local_law_stat(const WignerDraw &h, Complex z) {
  if (std::abs(z.real()) > 10.0 || !(z.imag() > 0.0) || z.imag() > 10.0) {
    throw Error(ErrorKind::DomainViolation, "need |E| <= 10 and 0 < eta <= 10");
  }
  return local_law_stat(resolvent(h, z));
}

// Max over rows of the relative error in sum_j |G_ij|^2 = Im G_ii / eta.
inline double ward_check(const ResolventSample &sample) {
  const double eta = sample.z.imag();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sample.G.rows(); ++i) {
    const double lhs = sample.G.row(i).squaredNorm();
    const double rhs = sample.G(i, i).imag() / eta;
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return worst;
}

inline Complex normalized_trace_resolvent(const Spectrum &s, Complex z) {
  Complex acc = 0.0;
  for (double l : s.values) acc += 1.0 / (l - z);
  return acc / static_cast<double>(s.N);
}

struct TraceComparison {
  double estimate = 0.0;  // |E_v (1/N) Tr G - E_w (1/N) Tr G|
  double std_error = 0.0;  // delete-one-replica jackknife
  Complex mean_v = 0.0;
  Complex mean_w = 0.0;
  int reps = 0;
};

namespace detail {

inline TraceComparison jackknife_difference(std::span<const Complex> v,
                                            std::span<const Complex> w) {
  TraceComparison out;
  const auto n = v.size();
  out.reps = static_cast<int>(n);
  Complex sv = 0.0, sw = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sv += v[r];
    sw += w[r];
  }
  out.mean_v = sv / static_cast<double>(n);
  out.mean_w = sw / static_cast<double>(n);
  out.estimate = std::abs(out.mean_v - out.mean_w);
  if (n < 2) return out;
  std::vector<double> pseudo(n);
  double mean_pseudo = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const Complex dv = (sv - v[r]) / static_cast<double>(n - 1);
    const Complex dw = (sw - w[r]) / static_cast<double>(n - 1);
    pseudo[r] = std::abs(dv - dw);
    mean_pseudo += pseudo[r];
  }
  mean_pseudo /= static_cast<double>(n);
  double ss = 0.0;
  for (double p : pseudo) ss += (p - mean_pseudo) * (p - mean_pseudo);
  out.std_error = std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss);
  return out;
}

}  // namespace detail

// Mean normalized resolvent traces of two real symmetric Wigner ensembles.
// Replica r uses seeds derive_seed(seed, 2r) for v and derive_seed(seed, 2r+1)
// for w.
inline TraceComparison compare_traces(const EntryLaw &law_v, const EntryLaw &law_w, int N,
                                      Complex z, int reps, std::uint64_t seed,
                                      int workers = 1) {
  auto pairs = parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t r) {
    const auto sv = eigenvalues(
        sample_wigner(law_v, N, SymmetryClass::RealSymmetric, derive_seed(seed, 2 * r)));
    const auto sw = eigenvalues(
        sample_wigner(law_w, N, SymmetryClass::RealSymmetric, derive_seed(seed, 2 * r + 1)));
    return std::pair{normalized_trace_resolvent(sv, z), normalized_trace_resolvent(sw, z)};
  });
  std::vector<Complex> v, w;
  for (const auto &[a, b] : pairs) {
    v.push_back(a);
    w.push_back(b);
  }
  return detail::jackknife_difference(v, w);
}

struct ComparisonRow {
  int p = 0;
  TraceComparison comparison;
  double t_used = 0.0;
};

// For each p, compares Wigner matrices with entries ~ mu against the
// p-moment-matched Gaussian-divisible ensemble. The v-side draws are shared
// across p (same seeds), which pairs the rows.
inline std::vector<ComparisonRow> green_comparison(const AtomicLaw &mu,
                                                   std::span<const int> p_values, int N,
                                                   Complex z, int reps, std::uint64_t seed,
                                                   double t_requested = 0.5,
                                                   int workers = 1) {
  if (!(z.imag() >= 1.0 / N)) {
    throw Error(ErrorKind::DomainViolation, "green_comparison needs eta >= 1/N");
  }
  const EntryLaw law_v = EntryLaw::atomic(mu);
  std::vector<ComparisonRow> rows;
  for (int p : p_values) {
    const MatchResult match = build_matched_gde(mu, p, t_requested);
    ComparisonRow row;
    row.p = p;
    row.t_used = match.t_used;
    row.comparison = compare_traces(law_v, match.matched_law, N, z, reps, seed, workers);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wgap

#endif  // WIGNER_GAPS_OBSERVABLES_HPP_
