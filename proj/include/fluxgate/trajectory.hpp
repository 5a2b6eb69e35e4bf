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

// Parametric flux trajectories phi(t) = A s(t).
//
// Every shape is peak-normalized and lives on the active window [eps, tau - eps];
// it is exactly zero at both window ends and outside. Gaussian-type shapes are
// brought to zero at the window ends by subtracting the straight line through
// the two end values. The amplitude A is either fixed or calibrated so that the
// conditional phase integral of zeta equals pi + 2 pi k.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fluxgate/common.hpp"
#include "fluxgate/spectrum.hpp"

namespace fluxgate {

enum class Family {
  gaussian,
  mollifier,
  mollified_gaussian,
  prepulsed_gaussian,
  mollifier_prepulsed_gaussian,
};

std::string family_name(Family family);
/// Accepts the names produced by `family_name`; throws UsageError otherwise.
Family parse_family(const std::string& name);
bool family_uses_mu(Family family);

enum class PrepulseKind { gaussian, mollifier };

inline constexpr double kGaussianPrepulseWeight = 1.0 / 3.0;
inline constexpr double kMollifierPrepulseWeight = 1.0 / 6.0;

struct TrajectoryParams {
  Family family = Family::gaussian;
  double sigma = 1.0;
  double mu = 0.0;  ///< ignored by the single-parameter families
  double tau = 20.0;
  double epsilon = 1e-3;
  double amplitude = 0.0;
  std::optional<double> prepulse_weight;  ///< overrides 1/3 or 1/6

  /// Shape-level checks (amplitude is checked separately).
  void validate() const;
  double weight() const;
};

/// Gaussian on the window [epsilon, tau - epsilon] with a linear baseline
/// through the window-end values removed, scaled to 1 at `center`.
double shape_gaussian(double t, double sigma, double center, double tau, double epsilon = 1e-3);

/// exp(1 + 1 / (x^2 - 1)) for |x| < 1 with x = (t - center) / sigma, else 0.
double shape_mollifier(double t, double sigma, double center);

/// Gaussian (centered tau/2, width sigma_g) convolved with a mollifier (width
/// sigma_m) so that the result is centered at mu; re-zeroed, clamped at 0 and
/// peak-normalized.
double shape_mollified_gaussian(double t, double sigma_g, double sigma_m, double tau, double mu,
                                double epsilon = 1e-3);
double shape_mollified_gaussian(double t, double sigma, double tau, double mu,
                                double epsilon = 1e-3);

/// w p(t; sigma, mu) + G(t; sigma, tau/2), peak-normalized.
double shape_prepulsed(double t, double sigma, double tau, double mu, PrepulseKind kind,
                       double epsilon = 1e-3, std::optional<double> weight = std::nullopt);

/// A peak-normalized shape with its normalizers precomputed.
class PulseShape {
 public:
  explicit PulseShape(const TrajectoryParams& params);

  double operator()(double t) const;
  const TrajectoryParams& params() const noexcept { return params_; }
  /// Non-fatal conditions such as support touching the domain boundary.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  TrajectoryParams params_;
  std::function<double(double)> eval_;
  std::vector<std::string> warnings_;
};

/// Sampled flux curve on the uniform grid of [epsilon, tau].
struct Trajectory {
  TrajectoryParams params;
  std::vector<double> t;
  std::vector<double> phi;
  std::vector<std::string> warnings;
  /// Exact continuous curve when the trajectory came from a shape.
  std::shared_ptr<const PulseShape> shape;
  /// Monotone cubic through the samples, set for sample-built trajectories.
  std::shared_ptr<const MonotoneCubic> interpolant;

  double dt() const;
  /// phi at any time: the exact curve when known, else a monotone cubic through
  /// the samples; zero outside [epsilon, tau].
  double phi_at(double t) const;
};

/// Samples A s(t) with A = params.amplitude on `samples` uniform points.
Trajectory sample_trajectory(const TrajectoryParams& params, std::size_t samples = 4001);

/// Wraps raw samples (uniform grid required) as a trajectory.
Trajectory trajectory_from_samples(TrajectoryParams params, std::vector<double> t,
                                   std::vector<double> phi);

/// Simpson integral of zeta(phi(t)) over the trajectory grid.
double phase_integral(const Trajectory& trajectory, const TrackedSpectrum& spectrum);

enum class AmplitudePolicy {
  strict,    ///< unreachable targets raise ConstraintUnreachable
  saturate,  ///< unreachable targets use the amplitude cap and report constraint_met = false
};

struct CalibrationOptions {
  int k = 0;
  std::size_t samples = 4001;
  double tolerance = 1e-8;
  AmplitudePolicy policy = AmplitudePolicy::strict;
};

struct CalibrationResult {
  Trajectory trajectory;
  double target = 0.0;
  double constraint_value = 0.0;
  double residual = 0.0;
  double max_phase = 0.0;  ///< phase integral at the amplitude cap
  bool constraint_met = false;
};

/// Bisection on A in (0, A_max] with A_max the tracked range of the spectrum.
CalibrationResult calibrate_amplitude(const TrajectoryParams& params,
                                      const TrackedSpectrum& spectrum,
                                      CalibrationOptions options = {});

}  // namespace fluxgate
