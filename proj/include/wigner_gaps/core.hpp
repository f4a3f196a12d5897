// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef WIGNER_GAPS_CORE_HPP_
#define WIGNER_GAPS_CORE_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>
#include <algorithm>

namespace wgap {

enum class ErrorKind {
  InvalidArgument,
  InvalidN,
  InvalidLaw,
  ZeroVariance,
  InvalidT,
  TooFewAtoms,
  NoConvergence,
  SingularJacobian,
  SeparationViolated,
  NoAdmissibleT,
  ShapeMismatch,
  StabilityViolation,
  EigensolveFailure,
  NearSingular,
  DomainViolation,
  QuadratureFailure,
  DegenerateFit,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidN: return "InvalidN";
    case ErrorKind::InvalidLaw: return "InvalidLaw";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::InvalidT: return "InvalidT";
    case ErrorKind::TooFewAtoms: return "TooFewAtoms";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::SeparationViolated: return "SeparationViolated";
    case ErrorKind::NoAdmissibleT: return "NoAdmissibleT";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::StabilityViolation: return "StabilityViolation";
    case ErrorKind::EigensolveFailure: return "EigensolveFailure";
    case ErrorKind::NearSingular: return "NearSingular";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

// All library failures are reported through this exception; `kind()` is the
// machine-readable part.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

enum class SymmetryClass { RealSymmetric, ComplexHermitian };

inline std::string_view to_string(SymmetryClass cls) {
  return cls == SymmetryClass::RealSymmetric ? "real" : "complex";
}

// Dyson index of the class: 1 for real symmetric, 2 for complex Hermitian.
inline int beta_of(SymmetryClass cls) {
  return cls == SymmetryClass::RealSymmetric ? 1 : 2;
}

using Rng = std::mt19937_64;

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based seed for stream `index` under `master`. For a fixed master the
// map index -> seed is injective, so replica seeds never collide.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(master) + index * 0xD1B54A32D192ED03ULL);
}

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double semicircle_density(double x) {
  const double r = 4.0 - x * x;
  return r > 0.0 ? std::sqrt(r) / (2.0 * std::numbers::pi) : 0.0;
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

}  // namespace wgap

#endif  // WIGNER_GAPS_CORE_HPP_
