// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef WIGNER_GAPS_TYPES_HPP_
#define WIGNER_GAPS_TYPES_HPP_

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "wigner_gaps/core.hpp"

namespace wgap {

// A sampled self-adjoint N x N matrix. The complex class keeps real and
// imaginary parts separately; `im` is empty for the real class.
struct WignerDraw {
  int N = 0;
  SymmetryClass cls = SymmetryClass::RealSymmetric;
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
  std::uint64_t seed = 0;
  std::string law_id;

  bool is_complex() const { return cls == SymmetryClass::ComplexHermitian; }

  Eigen::MatrixXcd as_complex() const {
    Eigen::MatrixXcd h(N, N);
    if (is_complex()) {
      h.real() = re;
      h.imag() = im;
    } else {
      h.real() = re;
      h.imag().setZero();
    }
    return h;
  }

  // Bitwise check of H = H^*, with a real diagonal.
  bool is_exactly_self_adjoint() const {
    for (int i = 0; i < N; ++i) {
      for (int j = i; j < N; ++j) {
        if (re(i, j) != re(j, i)) return false;
        if (is_complex()) {
          if (im(i, j) != -im(j, i)) return false;
          if (i == j && im(i, i) != 0.0) return false;
        }
      }
    }
    return true;
  }
};

// Eigenvalues sorted ascending.
struct Spectrum {
  int N = 0;
  std::vector<double> values;
  std::string ensemble_id;
  std::uint64_t seed = 0;

  // 1-based access, lambda_k for 1 <= k <= N.
  double operator()(int k) const { return values[static_cast<std::size_t>(k - 1)]; }

  bool is_sorted() const { return std::is_sorted(values.begin(), values.end()); }
};

}  // namespace wgap

#endif  // WIGNER_GAPS_TYPES_HPP_
