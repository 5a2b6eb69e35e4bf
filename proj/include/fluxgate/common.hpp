// Copyright 2026 The fluxgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fluxgate {

/// Levels kept per transmon (qutrit truncation).
inline constexpr int kLevels = 3;
/// Dimension of the coupled two-transmon Hilbert space.
inline constexpr int kDim = kLevels * kLevels;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Complex = std::complex<double>;
using Matrix9d = Eigen::Matrix<double, kDim, kDim>;
using Matrix9cd = Eigen::Matrix<Complex, kDim, kDim>;
using Vector9d = Eigen::Matrix<double, kDim, 1>;
using Matrix8cd = Eigen::Matrix<Complex, 8, 8>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where the model is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Eigenvector label propagation could not resolve an assignment.
class TrackingError : public Error {
 public:
  using Error::Error;
};

/// Malformed command line or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The conditional-phase target cannot be reached below the amplitude cap.
class ConstraintUnreachable : public DomainError {
 public:
  ConstraintUnreachable(double achieved, double target)
      : DomainError("constraint unreachable: increase tau or k (max phase " +
                    std::to_string(achieved) + " rad at the amplitude cap, target " +
                    std::to_string(target) + " rad)"),
        achieved_(achieved),
        target_(target) {}

  double achieved() const noexcept { return achieved_; }
  double target() const noexcept { return target_; }

 private:
  double achieved_;
  double target_;
};

/// Bare product state |i,j> = |i>_1 (x) |j>_2, stored lexicographically.
struct BasisLabel {
  int i = 0;
  int j = 0;

  constexpr int index() const noexcept { return kLevels * i + j; }
  static constexpr BasisLabel from_index(int k) noexcept { return {k / kLevels, k % kLevels}; }
  std::string name() const { return std::to_string(i) + std::to_string(j); }

  friend constexpr bool operator==(BasisLabel, BasisLabel) = default;
};

}  // namespace fluxgate
