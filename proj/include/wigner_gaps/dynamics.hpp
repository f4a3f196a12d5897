// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Matrix Ornstein-Uhlenbeck flow dH = dB / sqrt(N) - H dt / 2, as an exact
// marginal and as an Euler-Maruyama path, plus coupled pairs of paths for
// gap relaxation experiments.

#ifndef WIGNER_GAPS_DYNAMICS_HPP_
#define WIGNER_GAPS_DYNAMICS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "wigner_gaps/core.hpp"
#include "wigner_gaps/ensembles.hpp"
#include "wigner_gaps/spectra.hpp"
#include "wigner_gaps/types.hpp"

namespace wgap {

enum class FlowScheme { ExactMarginal, EulerMaruyama };

inline constexpr double kMaxEulerStep = 0.01;

struct FlowConfig {
  double t_end = 1.0;
  double dt = 0.002;
  FlowScheme scheme = FlowScheme::EulerMaruyama;

  void validate() const {
    if (!(t_end > 0.0) || !(dt > 0.0) || dt > t_end) {
      throw Error(ErrorKind::InvalidArgument, "need 0 < dt <= t_end");
    }
    if (scheme == FlowScheme::EulerMaruyama && dt > kMaxEulerStep) {
      throw Error(ErrorKind::StabilityViolation, "Euler-Maruyama step above 0.01");
    }
  }
};

// Self-adjoint Brownian increment before the 1/sqrt(N) scaling. Off-diagonal
// E|dW_ij|^2 = dt; diagonal variance 2 dt (real) or dt (complex).
struct NoiseIncrement {
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;  // empty for the real class
};

inline NoiseIncrement draw_noise(int N, SymmetryClass cls, double dt, Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  NoiseIncrement w;
  w.re.resize(N, N);
  const double sd = std::sqrt(dt);
  if (cls == SymmetryClass::RealSymmetric) {
    const double sd_diag = std::sqrt(2.0 * dt);
    for (int i = 0; i < N; ++i) {
      w.re(i, i) = normal(rng) * sd_diag;
      for (int j = i + 1; j < N; ++j) {
        const double v = normal(rng) * sd;
        w.re(i, j) = v;
        w.re(j, i) = v;
      }
    }
  } else {
    w.im.resize(N, N);
    const double sd_half = std::sqrt(0.5 * dt);
    for (int i = 0; i < N; ++i) {
      w.re(i, i) = normal(rng) * sd;
      w.im(i, i) = 0.0;
      for (int j = i + 1; j < N; ++j) {
        const double a = normal(rng) * sd_half;
        const double b = normal(rng) * sd_half;
        w.re(i, j) = a;
        w.re(j, i) = a;
        w.im(i, j) = b;
        w.im(j, i) = -b;
      }
    }
  }
  return w;
}

// H + dW / sqrt(N) - H dt / 2, evaluated on the upper triangle and mirrored.
inline WignerDraw ou_step(const WignerDraw &h, const NoiseIncrement &dw, double dt) {
  const int N = h.N;
  if (dw.re.rows() != N || dw.re.cols() != N ||
      (h.is_complex() && (dw.im.rows() != N || dw.im.cols() != N))) {
    throw Error(ErrorKind::ShapeMismatch, "noise increment shape does not match H");
  }
  const double decay = 1.0 - 0.5 * dt;
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  WignerDraw out = h;
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      const double re = decay * h.re(i, j) + scale * dw.re(i, j);
      out.re(i, j) = re;
      out.re(j, i) = re;
      if (h.is_complex()) {
        const double im = i == j ? 0.0 : decay * h.im(i, j) + scale * dw.im(i, j);
        out.im(i, j) = im;
        out.im(j, i) = -im;
      }
    }
  }
  return out;
}

// e^{-t/2} H0 + (1 - e^{-t})^{1/2} G with G an independent GOE/GUE draw.
inline WignerDraw ou_flow_exact(const WignerDraw &h0, double t, std::uint64_t seed) {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidT, "flow time must be >= 0");
  const WignerDraw g = sample_gaussian_invariant(h0.N, h0.cls, seed);
  const double a = std::exp(-0.5 * t);
  const double b = std::sqrt(-std::expm1(-t));
  WignerDraw out = h0;
  const int N = h0.N;
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      const double re = a * h0.re(i, j) + b * g.re(i, j);
      out.re(i, j) = re;
      out.re(j, i) = re;
      if (h0.is_complex()) {
        const double im = i == j ? 0.0 : a * h0.im(i, j) + b * g.im(i, j);
        out.im(i, j) = im;
        out.im(j, i) = -im;
      }
    }
  }
  out.seed = seed;
  return out;
}

inline WignerDraw ou_flow_euler(const WignerDraw &h0, const FlowConfig &cfg,
                                std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const auto steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  WignerDraw h = h0;
  for (long s = 0; s < steps; ++s) {
    h = ou_step(h, draw_noise(h.N, h.cls, cfg.dt, rng), cfg.dt);
  }
  h.seed = seed;
  return h;
}

inline WignerDraw ou_flow(const WignerDraw &h0, const FlowConfig &cfg,
                          std::uint64_t seed) {
  cfg.validate();
  return cfg.scheme == FlowScheme::ExactMarginal ? ou_flow_exact(h0, cfg.t_end, seed)
                                                 : ou_flow_euler(h0, cfg, seed);
}

// How the second path's Brownian increment is derived from the first.
//  - Entrywise: identical matrix increments. The difference of the two paths
//    then decays deterministically like e^{-t/2}.
//  - EigenbasisRotated: dW_b = U_b U_a^* dW_a U_a U_b^*, so both spectra are
//    driven by the same diagonal noise in their own eigenbases.
enum class CouplingKind { EigenbasisRotated, Entrywise };

struct CoupledState {
  WignerDraw a;
  WignerDraw b;
  double t = 0.0;
  std::uint64_t noise_seed = 0;
};

namespace detail {

inline bool bitwise_equal(const WignerDraw &x, const WignerDraw &y) {
  return x.re.size() == y.re.size() && x.re == y.re && x.im.size() == y.im.size() &&
         (x.im.size() == 0 || x.im == y.im);
}

inline NoiseIncrement rotate_noise(const NoiseIncrement &dw, const WignerDraw &a,
                                   const WignerDraw &b) {
  const int N = a.N;
  NoiseIncrement out;
  if (!a.is_complex()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a.re), eb(b.re);
    if (ea.info() != Eigen::Success || eb.info() != Eigen::Success) {
      throw Error(ErrorKind::EigensolveFailure, "eigensolve in noise rotation failed");
    }
    const Eigen::MatrixXd in_a = ea.eigenvectors().transpose() * dw.re * ea.eigenvectors();
    out.re = eb.eigenvectors() * in_a * eb.eigenvectors().transpose();
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j) {
        const double v = 0.5 * (out.re(i, j) + out.re(j, i));
        out.re(i, j) = v;
        out.re(j, i) = v;
      }
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(a.as_complex()), eb(b.as_complex());
  if (ea.info() != Eigen::Success || eb.info() != Eigen::Success) {
    throw Error(ErrorKind::EigensolveFailure, "eigensolve in noise rotation failed");
  }
  Eigen::MatrixXcd w(N, N);
  w.real() = dw.re;
  w.imag() = dw.im;
  const Eigen::MatrixXcd in_a = ea.eigenvectors().adjoint() * w * ea.eigenvectors();
  const Eigen::MatrixXcd rotated = eb.eigenvectors() * in_a * eb.eigenvectors().adjoint();
  out.re.resize(N, N);
  out.im.resize(N, N);
  for (int i = 0; i < N; ++i) {
    out.re(i, i) = rotated(i, i).real();
    out.im(i, i) = 0.0;
    for (int j = i + 1; j < N; ++j) {
      const std::complex<double> v = 0.5 * (rotated(i, j) + std::conj(rotated(j, i)));
      out.re(i, j) = v.real();
      out.re(j, i) = v.real();
      out.im(i, j) = v.imag();
      out.im(j, i) = -v.imag();
    }
  }
  return out;
}

}  // namespace detail

// Advances both matrices by one step with coupled increments.
inline void coupled_step(CoupledState &state, double dt, Rng &rng, CouplingKind kind) {
  if (state.a.N != state.b.N || state.a.cls != state.b.cls) {
    throw Error(ErrorKind::ShapeMismatch, "coupled matrices differ in N or class");
  }
  const NoiseIncrement dw = draw_noise(state.a.N, state.a.cls, dt, rng);
  if (kind == CouplingKind::Entrywise || detail::bitwise_equal(state.a, state.b)) {
    state.a = ou_step(state.a, dw, dt);
    state.b = ou_step(state.b, dw, dt);
  } else {
    const NoiseIncrement dw_b = detail::rotate_noise(dw, state.a, state.b);
    state.a = ou_step(state.a, dw, dt);
    state.b = ou_step(state.b, dw_b, dt);
  }
  state.t += dt;
}

struct GapCoupling {
  int k = 0;
  double gap_a = 0.0;
  double gap_b = 0.0;
  double abs_err = 0.0;
};

struct CouplingSnapshot {
  double t = 0.0;
  std::vector<GapCoupling> errors;  // bulk indices
  double max_scaled_error = 0.0;    // max_k N^2 t err_k
  double median_error = 0.0;
  // t below the pragmatic relaxation floor 10 (log N)^2 / N.
  bool below_time_floor = false;
};

inline double relaxation_time_floor(int N) {
  const double l = std::log(static_cast<double>(N));
  return 10.0 * l * l / N;
}

inline CouplingSnapshot snapshot_gaps(const CoupledState &state, double alpha) {
  const Spectrum sa = eigenvalues(state.a);
  const Spectrum sb = eigenvalues(state.b);
  const auto ga = bulk_gaps(sa, alpha);
  const auto gb = bulk_gaps(sb, alpha);
  CouplingSnapshot snap;
  snap.t = state.t;
  const int N = state.a.N;
  std::vector<double> errs;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    const double e = std::abs(ga[i].raw_gap - gb[i].raw_gap);
    snap.errors.push_back({ga[i].k, ga[i].raw_gap, gb[i].raw_gap, e});
    errs.push_back(e);
    snap.max_scaled_error =
        std::max(snap.max_scaled_error, static_cast<double>(N) * N * state.t * e);
  }
  snap.median_error = median_of(std::move(errs));
  snap.below_time_floor = state.t < relaxation_time_floor(N);
  return snap;
}

// Runs a coupled pair from (a0, b0) and records bulk gap errors at each
// checkpoint time (ascending); later checkpoints extend the same noise stream.
inline std::vector<CouplingSnapshot> coupled_relaxation_path(
    const WignerDraw &a0, const WignerDraw &b0, std::span<const double> checkpoints,
    double dt, double alpha, std::uint64_t noise_seed,
    CouplingKind kind = CouplingKind::EigenbasisRotated) {
  if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw Error(ErrorKind::InvalidArgument, "checkpoints must be nonempty and ascending");
  }
  FlowConfig{checkpoints.back(), dt, FlowScheme::EulerMaruyama}.validate();
  CoupledState state{a0, b0, 0.0, noise_seed};
  Rng rng(noise_seed);
  std::vector<CouplingSnapshot> out;
  long done = 0;
  for (double t : checkpoints) {
    const long target = std::llround(t / dt);
    for (; done < target; ++done) coupled_step(state, dt, rng, kind);
    state.t = t;
    out.push_back(snapshot_gaps(state, alpha));
  }
  return out;
}

// H_a from `law`, H_b from GOE/GUE, coupled with one shared noise stream.
// Streams: 0 -> H_a, 1 -> H_b, 2 -> noise.
inline CouplingSnapshot coupled_relaxation(
    const EntryLaw &law, int N, double t, double dt, double alpha, std::uint64_t seed,
    SymmetryClass cls = SymmetryClass::RealSymmetric,
    CouplingKind kind = CouplingKind::EigenbasisRotated) {
  const WignerDraw a0 = sample_wigner(law, N, cls, derive_seed(seed, 0));
  const WignerDraw b0 = sample_gaussian_invariant(N, cls, derive_seed(seed, 1));
  const double checkpoints[] = {t};
  return coupled_relaxation_path(a0, b0, checkpoints, dt, alpha, derive_seed(seed, 2),
                                 kind)
      .front();
}

}  // namespace wgap

#endif  // WIGNER_GAPS_DYNAMICS_HPP_
