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

// Simulation-free diagnostics of a flux trajectory.
//
//   N-norm      int (upsilon delta + kappa ddelta/dt^2) dt
//   residual D  lambda cos(phi) cot(phi) zeta'(phi) - 2 (upsilon/kappa) cos(phi)^(3/2)
//               + (1 + cos^2 phi) phidot^2 - sin(2 phi) phiddot
//   U_Ev        two-level propagator of the |1,1>, |2,0> pair in the frame of
//               the zero-flux bare Hamiltonian

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fluxgate/common.hpp"
#include "fluxgate/device.hpp"
#include "fluxgate/spectrum.hpp"
#include "fluxgate/trajectory.hpp"

namespace fluxgate {

enum class DeltaModel {
  decoupled,  ///< (w1 - a1)(1 - sqrt(cos phi)) of transmon 1
  coupled,    ///< delta_11 of the tracked spectrum
};

struct MetricConfig {
  double upsilon = 1.0;
  double kappa = 1.0;
  double lambda = 1.0;
  /// Spacing of the finite-difference stencil for phidot and phiddot; the grid
  /// spacing when unset. Must be a multiple of the grid spacing.
  std::optional<double> fd_step;
  DeltaModel delta = DeltaModel::decoupled;
  double singular_phi = 1e-6;

  void validate() const;
};

double n_norm(const Trajectory& trajectory, const TrackedSpectrum& spectrum,
              const MetricConfig& config = {});

struct ResidualCurve {
  std::vector<double> t;
  std::vector<double> d;  ///< NaN at masked samples
  std::vector<bool> masked;
  std::size_t masked_count = 0;
  /// Masked samples strictly between the first and last sample with phi above threshold.
  std::size_t masked_inside_support = 0;
  double l2 = 0.0;  ///< sqrt(int D^2 dt), masked samples contribute zero
  std::vector<std::string> warnings;
};

ResidualCurve el_residual(const Trajectory& trajectory, const TrackedSpectrum& spectrum,
                          const MetricConfig& config = {});

/// Residual D at a single point given phi and its time derivatives.
double residual_point(const TrackedSpectrum& spectrum, const MetricConfig& config, double phi,
                      double phidot, double phiddot);

struct InteractionPropagator {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();  ///< basis (|1,1>, |2,0>)
  double transfer = 0.0;                               ///< |<2,0|U|1,1>|^2
  std::size_t steps = 0;
};

/// Time-ordered product of midpoint step exponentials of
/// [[-delta, c e^{-i w t}], [c e^{+i w t}, -2 delta]] with w = Delta + alpha1 and
/// c = sqrt(2) g, over [t0, t1].
InteractionPropagator interaction_propagator(const DeviceParams& params,
                                             const std::function<double(double)>& delta,
                                             double t0, double t1, std::size_t steps);

/// Same for a trajectory over [epsilon, tau] with delta the transmon-1 deviation.
InteractionPropagator interaction_propagator(const Trajectory& trajectory,
                                             const DeviceParams& params,
                                             std::size_t steps = 20000);

/// cos((D - a2) t) l1 + sin((D - a2) t) l2 + cos((D + a1) t) l6 + sin((D + a1) t) l7
/// - diag(0, delta, 2 delta) in the basis (|0,2>, |1,1>, |2,0>).
Eigen::Matrix3cd interaction_frame_generator(const DeviceParams& params, double delta, double t);

struct MetricReport {
  double n_norm = 0.0;
  ResidualCurve residual;
  double constraint_value = 0.0;  ///< NaN when phi leaves the tracked range
  double leakage_estimate = 0.0;
};

MetricReport compute_metrics(const Trajectory& trajectory, const TrackedSpectrum& spectrum,
                             const MetricConfig& config = {}, std::size_t propagator_steps = 20000);

}  // namespace fluxgate
