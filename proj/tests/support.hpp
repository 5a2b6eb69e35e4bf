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

// Test-side reference implementations. Nothing here calls into the library
// numerics, so the unit tests can compare against it.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fluxgate/device.hpp"

namespace fluxgate::testing {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGHz = 2.0 * kPi;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20260416);
  return engine;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

/// Random device with qubit 1 above qubit 2 by more than |alpha1|.
inline DeviceParams random_device() {
  DeviceParams p;
  p.omega2 = kGHz * uniform(4.5, 5.5);
  p.alpha1 = -kGHz * uniform(0.18, 0.36);
  p.alpha2 = -kGHz * uniform(0.18, 0.36);
  p.omega1 = p.omega2 - p.alpha1 + kGHz * uniform(0.15, 0.7);
  p.g = kGHz * uniform(0.005, 0.04);
  return p;
}

inline double oracle_level(double omega, double alpha, int level, double phi) {
  const double wq = (omega - alpha) * std::sqrt(std::cos(phi)) + alpha;
  return level * wq + 0.5 * alpha * level * (level - 1);
}

/// Two-qutrit RWA Hamiltonian assembled element by element.
inline Eigen::Matrix<double, 9, 9> oracle_hamiltonian(const DeviceParams& p, double phi) {
  Eigen::Matrix<double, 9, 9> h = Eigen::Matrix<double, 9, 9>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      h(3 * i + j, 3 * i + j) =
          oracle_level(p.omega1, p.alpha1, i, phi) + oracle_level(p.omega2, p.alpha2, j, 0.0);
    }
  }
  // a (x) a^dag : |i, j> -> sqrt(i) sqrt(j + 1) |i - 1, j + 1>
  for (int i = 1; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double c = p.g * std::sqrt(double(i)) * std::sqrt(double(j + 1));
      h(3 * (i - 1) + (j + 1), 3 * i + j) += c;
      h(3 * i + j, 3 * (i - 1) + (j + 1)) += c;
    }
  }
  return h;
}

/// Eigenvalues labeled by continuity from the bare states at zero flux,
/// following each label through `substeps` eigen-solves per interval.
inline std::vector<std::array<double, 9>> oracle_track(const DeviceParams& p,
                                                       const std::vector<double>& phis,
                                                       int substeps = 20) {
  std::vector<std::array<double, 9>> out;
  Eigen::Matrix<double, 9, 9> prev = Eigen::Matrix<double, 9, 9>::Identity();
  double phi_prev = 0.0;
  auto solve_at = [&](double phi, std::array<double, 9>& energies) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> s(oracle_hamiltonian(p, phi));
    Eigen::Matrix<double, 9, 9> next;
    std::array<bool, 9> used{};
    for (int label = 0; label < 9; ++label) {
      int best = -1;
      double best_overlap = -1.0;
      for (int n = 0; n < 9; ++n) {
        if (used[n]) continue;
        const double o = std::abs(prev.col(label).dot(s.eigenvectors().col(n)));
        if (o > best_overlap) {
          best_overlap = o;
          best = n;
        }
      }
      used[best] = true;
      Eigen::Matrix<double, 9, 1> v = s.eigenvectors().col(best);
      if (prev.col(label).dot(v) < 0.0) v = -v;
      next.col(label) = v;
      energies[label] = s.eigenvalues()(best);
    }
    prev = next;
  };
  std::array<double, 9> scratch{};
  solve_at(0.0, scratch);
  for (double phi : phis) {
    std::array<double, 9> energies{};
    for (int s = 1; s <= substeps; ++s) {
      solve_at(phi_prev + (phi - phi_prev) * s / substeps, energies);
    }
    phi_prev = phi;
    out.push_back(energies);
  }
  return out;
}

/// Fourth-order Runge-Kutta solution of i dU/dt = G(t) U for 2x2 G.
template <typename F>
Eigen::Matrix2cd oracle_rk4(F generator, double t0, double t1, int steps) {
  const std::complex<double> mi{0.0, -1.0};
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  const double h = (t1 - t0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const Eigen::Matrix2cd k1 = mi * generator(t) * u;
    const Eigen::Matrix2cd k2 = mi * generator(t + 0.5 * h) * (u + 0.5 * h * k1);
    const Eigen::Matrix2cd k3 = mi * generator(t + 0.5 * h) * (u + 0.5 * h * k2);
    const Eigen::Matrix2cd k4 = mi * generator(t + h) * (u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

/// Gaussian pulse with its window-end baseline removed, unit peak at the center.
inline double oracle_gaussian(double t, double sigma, double tau, double eps = 1e-3) {
  if (t < eps || t > tau - eps) return 0.0;
  const double c = 0.5 * tau;
  const double b = std::exp(-(eps - c) * (eps - c) / (2.0 * sigma * sigma));
  return (std::exp(-(t - c) * (t - c) / (2.0 * sigma * sigma)) - b) / (1.0 - b);
}

inline double oracle_gaussian_rate(double t, double sigma, double tau, double eps = 1e-3) {
  if (t < eps || t > tau - eps) return 0.0;
  const double c = 0.5 * tau;
  const double b = std::exp(-(eps - c) * (eps - c) / (2.0 * sigma * sigma));
  const double g = std::exp(-(t - c) * (t - c) / (2.0 * sigma * sigma));
  return -g * (t - c) / (sigma * sigma) / (1.0 - b);
}

}  // namespace fluxgate::testing
