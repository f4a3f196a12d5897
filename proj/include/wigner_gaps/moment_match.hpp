// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Constructive p-moment matching of an atomic law by a Gaussian-divisible
// law: find shifted atoms nu such that (1-s)^{1/2} X + s^{1/2} G, X ~ nu,
// has the same first p moments as the source law.

#ifndef WIGNER_GAPS_MOMENT_MATCH_HPP_
#define WIGNER_GAPS_MOMENT_MATCH_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "wigner_gaps/core.hpp"
#include "wigner_gaps/ensembles.hpp"

namespace wgap {

// First p raw moments; m(k) is 1-based and m(0) == 1.
struct MomentVector {
  std::vector<double> values;

  MomentVector() = default;
  explicit MomentVector(std::vector<double> v) : values(std::move(v)) {}

  int p() const { return static_cast<int>(values.size()); }
  double operator()(int k) const {
    return k == 0 ? 1.0 : values[static_cast<std::size_t>(k - 1)];
  }
  double &operator()(int k) { return values[static_cast<std::size_t>(k - 1)]; }
};

inline double sup_distance(const MomentVector &a, const MomentVector &b) {
  const int p = std::min(a.p(), b.p());
  double d = 0.0;
  for (int k = 1; k <= p; ++k) d = std::max(d, std::abs(a(k) - b(k)));
  return d;
}

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double gaussian_moment(int k) {
  if (k % 2 != 0) return 0.0;
  double r = 1.0;
  for (int j = k - 1; j > 1; j -= 2) r *= j;
  return r;
}

}  // namespace detail

// Moments of (1-s)^{1/2} X + s^{1/2} G from those of X; s is the Gaussian
// variance weight, s = 1 - e^{-t} for OU time t.
inline MomentVector gde_moments(const MomentVector &base, double s, int p) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::InvalidT, "weight outside [0, 1]");
  MomentVector out(std::vector<double>(static_cast<std::size_t>(p)));
  for (int k = 1; k <= p; ++k) {
    CompensatedSum acc;
    for (int j = 0; j <= k; ++j) {
      const double gj = detail::gaussian_moment(j);
      if (gj == 0.0) continue;
      acc.add(detail::binomial(k, j) * std::pow(1.0 - s, 0.5 * (k - j)) *
              std::pow(s, 0.5 * j) * base(k - j) * gj);
    }
    out(k) = acc.value();
  }
  return out;
}

// The unique moment sequence of X for which gde_moments(result, s) == mu,
// solved order by order.
inline MomentVector target_moments(const MomentVector &mu, double s, int p) {
  if (!(s >= 0.0 && s < 1.0)) throw Error(ErrorKind::InvalidT, "weight must lie in [0, 1)");
  MomentVector x(std::vector<double>(static_cast<std::size_t>(p)));
  const MomentVector &xc = x;
  for (int k = 1; k <= p; ++k) {
    CompensatedSum acc;
    acc.add(mu(k));
    for (int j = 1; j <= k; ++j) {
      const double gj = detail::gaussian_moment(j);
      if (gj == 0.0) continue;
      acc.add(-detail::binomial(k, j) * std::pow(1.0 - s, 0.5 * (k - j)) *
              std::pow(s, 0.5 * j) * xc(k - j) * gj);
    }
    x(k) = acc.value() / std::pow(1.0 - s, 0.5 * k);
  }
  return x;
}

inline MomentVector moments(const AtomicLaw &law, int p) {
  MomentVector m(std::vector<double>(static_cast<std::size_t>(p)));
  for (int k = 1; k <= p; ++k) m(k) = law.raw_moment(k);
  return m;
}

inline MomentVector moments(const EntryLaw &law, int p) {
  if (p < 1) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  if (law.is_gaussian()) {
    MomentVector m(std::vector<double>(static_cast<std::size_t>(p)));
    for (int k = 1; k <= p; ++k) m(k) = detail::gaussian_moment(k);
    return m;
  }
  if (law.is_atomic()) return moments(law.atomic_part(), p);
  const auto &g = std::get<GaussianDivisibleLaw>(law.variant());
  return gde_moments(moments(g.base, p), gaussian_weight(g.mix_time), p);
}

inline double verify_match(const EntryLaw &a, const EntryLaw &b, int p) {
  return sup_distance(moments(a, p), moments(b, p));
}

// Indices (ascending) of the atoms that are moved during matching: all of
// them when the law has exactly p atoms, otherwise the p heaviest with ties
// going to the smaller position.
inline std::vector<std::size_t> designated_atoms(const AtomicLaw &law, int p) {
  if (p < 1 || law.size() < static_cast<std::size_t>(p)) {
    throw Error(ErrorKind::TooFewAtoms, "law has fewer than p atoms");
  }
  std::vector<std::size_t> idx(law.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return law.weights()[a] > law.weights()[b];
  });
  idx.resize(static_cast<std::size_t>(p));
  std::sort(idx.begin(), idx.end());
  return idx;
}

// d m_l / d delta_k = l w_k x_k^{l-1}, rows l = 1..p, columns the designated
// atoms in ascending order.
inline Eigen::MatrixXd jacobian(const AtomicLaw &law, int p) {
  const auto atoms = designated_atoms(law, p);
  Eigen::MatrixXd J(p, p);
  for (int col = 0; col < p; ++col) {
    const std::size_t a = atoms[static_cast<std::size_t>(col)];
    const double x = law.points()[a];
    const double w = law.weights()[a];
    double power = 1.0;
    for (int l = 1; l <= p; ++l) {
      J(l - 1, col) = l * w * power;
      power *= x;
    }
  }
  return J;
}

// p! prod w_k prod_{i<j} |x_i - x_j| over the designated atoms.
inline double jacobian_det_closed_form(const AtomicLaw &law, int p) {
  const auto atoms = designated_atoms(law, p);
  double r = 1.0;
  for (int l = 2; l <= p; ++l) r *= l;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    r *= law.weights()[atoms[i]];
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      r *= std::abs(law.points()[atoms[i]] - law.points()[atoms[j]]);
    }
  }
  return r;
}

struct MatchOutcome {
  AtomicLaw law;
  std::vector<double> shift;  // per designated atom, ascending position
  std::vector<std::size_t> atoms;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;  // sup-norm residual before each step
};

inline constexpr double kMaxJacobianCondition = 1e12;

namespace detail {

inline AtomicLaw shifted(const AtomicLaw &law, const std::vector<std::size_t> &atoms,
                         const Eigen::VectorXd &delta) {
  std::vector<double> pts = law.points();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    pts[atoms[i]] += delta(static_cast<Eigen::Index>(i));
  }
  return AtomicLaw(std::move(pts), law.weights());
}

inline Eigen::VectorXd moment_defect(const AtomicLaw &law, const MomentVector &target,
                                     int p) {
  Eigen::VectorXd f(p);
  for (int k = 1; k <= p; ++k) {
    CompensatedSum acc;
    acc.add(law.raw_moment(k));
    acc.add(-target(k));
    f(k - 1) = acc.value();
  }
  return f;
}

inline double min_separation(const AtomicLaw &law) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < law.size(); ++i) {
    c = std::min(c, law.points()[i] - law.points()[i - 1]);
  }
  return c;
}

}  // namespace detail

// Shifts the designated atoms (weights fixed) until the first p moments equal
// `target` in sup norm within `tol`. Damped Newton with the analytic Jacobian
// re-evaluated at every iterate; shifts are confined to |delta| < c/4 with c
// the minimal atom separation.
inline MatchOutcome match_measure(const AtomicLaw &law, const MomentVector &target,
                                  double tol, int max_iter) {
  const int p = target.p();
  MatchOutcome out;
  out.atoms = designated_atoms(law, p);
  const double shift_limit = 0.25 * detail::min_separation(law);

  Eigen::VectorXd delta = Eigen::VectorXd::Zero(p);
  AtomicLaw current = law;
  Eigen::VectorXd f = detail::moment_defect(current, target, p);

  while (true) {
    const double res = f.cwiseAbs().maxCoeff();
    out.residual_history.push_back(res);
    if (res <= tol) break;
    if (out.iterations >= max_iter) {
      throw Error(ErrorKind::NoConvergence, "Newton iteration limit reached");
    }
    const Eigen::MatrixXd J = jacobian(current, p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    if (!(sv(p - 1) > 0.0) || sv(0) / sv(p - 1) > kMaxJacobianCondition) {
      throw Error(ErrorKind::SingularJacobian, "moment Jacobian is ill-conditioned");
    }
    const Eigen::VectorXd step = svd.solve(f);

    const double f_norm = f.norm();
    double lambda = 1.0;
    bool accepted = false;
    bool blocked_by_ball = false;
    for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
      const Eigen::VectorXd trial = delta - lambda * step;
      if (trial.cwiseAbs().maxCoeff() >= shift_limit) {
        blocked_by_ball = true;
        continue;
      }
      AtomicLaw candidate = detail::shifted(law, out.atoms, trial);
      Eigen::VectorXd f_trial = detail::moment_defect(candidate, target, p);
      if (f_trial.norm() < f_norm) {
        delta = trial;
        current = std::move(candidate);
        f = std::move(f_trial);
        accepted = true;
        break;
      }
      blocked_by_ball = false;
    }
    if (!accepted) {
      if (blocked_by_ball) {
        throw Error(ErrorKind::SeparationViolated, "shift would merge atoms");
      }
      throw Error(ErrorKind::NoConvergence, "line search failed to reduce the residual");
    }
    ++out.iterations;
  }
  out.law = std::move(current);
  out.shift.assign(delta.data(), delta.data() + delta.size());
  out.residual = out.residual_history.back();
  return out;
}

struct MatchResult {
  EntryLaw matched_law = EntryLaw::standard_gaussian();
  std::vector<double> shift;
  std::vector<std::size_t> atoms;
  double t_requested = 0.0;
  double t_used = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int halvings = 0;
};

inline constexpr double kMatchTolerance = 1e-10;
inline constexpr double kMinMixTime = 1e-4;

// Gaussian-divisible law GDE(nu, t_used) whose first p moments equal those of
// `mu`. Starts at t_requested and halves t until the shift problem is solvable.
inline MatchResult build_matched_gde(const AtomicLaw &mu, int p, double t_requested,
                                     double tol = kMatchTolerance, int max_iter = 50) {
  if (!EntryLaw::atomic(mu).is_standardized()) {
    throw Error(ErrorKind::InvalidLaw, "source law must be standardized");
  }
  if (!(t_requested > 0.0 && t_requested < 1.0)) {
    throw Error(ErrorKind::InvalidT, "t_requested must lie in (0, 1)");
  }
  const MomentVector mu_m = moments(mu, p);
  MatchResult result;
  result.t_requested = t_requested;
  for (double t = t_requested; t >= kMinMixTime; t *= 0.5, ++result.halvings) {
    const MomentVector target = target_moments(mu_m, gaussian_weight(t), p);
    try {
      MatchOutcome m = match_measure(mu, target, tol, max_iter);
      result.matched_law = EntryLaw::gaussian_divisible(std::move(m.law), t);
      result.shift = std::move(m.shift);
      result.atoms = std::move(m.atoms);
      result.t_used = t;
      result.iterations = m.iterations;
      result.residual = verify_match(result.matched_law, EntryLaw::atomic(mu), p);
      if (result.residual <= tol) return result;
    } catch (const Error &e) {
      switch (e.kind()) {
        case ErrorKind::NoConvergence:
        case ErrorKind::SingularJacobian:
        case ErrorKind::SeparationViolated:
          break;
        default:
          throw;
      }
    }
  }
  throw Error(ErrorKind::NoAdmissibleT, "no mix time above the floor admits a match");
}

}  // namespace wgap

#endif  // WIGNER_GAPS_MOMENT_MATCH_HPP_
