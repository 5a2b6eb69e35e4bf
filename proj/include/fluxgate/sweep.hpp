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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fluxgate/metrics.hpp"
#include "fluxgate/spectrum.hpp"
#include "fluxgate/trajectory.hpp"

namespace fluxgate {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;

  void validate(const std::string& what) const;
  std::vector<double> values() const;
  /// Parses "lo:hi:n".
  static Range parse(const std::string& text);
};

enum class SweepMode {
  peak_normalized,  ///< amplitude fixed at `peak`, no phase constraint
  pi_calibrated,    ///< amplitude calibrated per point; unreachable points are infeasible
};

std::string sweep_mode_name(SweepMode mode);
SweepMode parse_sweep_mode(const std::string& name);

struct SweepSpec {
  Family family = Family::gaussian;
  Range sigma;
  std::optional<Range> mu;  ///< ignored by single-parameter families
  double tau = 20.0;
  double epsilon = 1e-3;
  SweepMode mode = SweepMode::peak_normalized;
  double peak = 1.0;
  std::size_t samples = 4001;
  CalibrationOptions calibration;
  bool refine = false;
  std::size_t workers = 1;

  void validate() const;
};

struct SweepPoint {
  double sigma = 0.0;
  double mu = 0.0;
  double n_norm = 0.0;
  double constraint_value = 0.0;  ///< NaN when not computable
  bool feasible = false;
  double amplitude = 0.0;
};

struct RefinedOptimum {
  double sigma = 0.0;
  double mu = 0.0;
  double n_norm = 0.0;
  std::size_t evaluations = 0;
  bool aborted = false;  ///< a non-finite value stopped the descent
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;  ///< sigma-major, then mu, both ascending
  std::optional<std::size_t> argmin;
  std::optional<RefinedOptimum> refined;
  double max_phase = 0.0;  ///< largest phase at the amplitude cap (pi_calibrated)
};

/// One grid point; never throws for infeasible or invalid parameters.
SweepPoint evaluate_point(const SweepSpec& spec, const TrackedSpectrum& spectrum,
                          const MetricConfig& config, double sigma, double mu);

SweepResult run_sweep(const SweepSpec& spec, const TrackedSpectrum& spectrum,
                      const MetricConfig& config = {});

/// Coordinate golden-section descent from (sigma0, mu0) inside the given boxes,
/// tolerance `tol` per coordinate. Never returns a value worse than `f0`.
RefinedOptimum coordinate_refine(const std::function<double(double, double)>& objective,
                                 double sigma0, double mu0, double f0,
                                 std::array<double, 2> sigma_box,
                                 std::optional<std::array<double, 2>> mu_box, double tol = 1e-4);

/// Refines the grid argmin of `result` within its neighbouring cells.
RefinedOptimum refine_optimum(const SweepResult& result, const TrackedSpectrum& spectrum,
                              const MetricConfig& config = {});

/// Long-format CSV: sigma,mu,n_norm,constraint_value,feasible,amplitude.
std::string sweep_csv(const SweepResult& result);

}  // namespace fluxgate
