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

// Adiabatically labeled spectrum of the coupled Hamiltonian.
//
// Eigenvectors are labeled by bare state at zero flux and the labels are carried
// along the flux axis by maximum overlap with the previous sample. Near an
// avoided crossing the step is halved until every overlap exceeds a threshold,
// so the labels follow the adiabatic (non-crossing) branches.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fluxgate/common.hpp"
#include "fluxgate/device.hpp"
#include "fluxgate/numerics.hpp"

namespace fluxgate {

struct TrackingOptions {
  double min_overlap = 0.9;
  double min_step = 1e-6;
};

/// Eigenvalues and eigenvectors at one flux value, columns ordered by label index.
struct LabeledEigensystem {
  double phi = 0.0;
  Vector9d energies = Vector9d::Zero();
  Matrix9d vectors = Matrix9d::Zero();
};

class TrackedSpectrum {
 public:
  TrackedSpectrum(DeviceParams params, std::vector<LabeledEigensystem> samples,
                  TrackingOptions options);

  const DeviceParams& params() const noexcept { return params_; }
  const TrackingOptions& options() const noexcept { return options_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const LabeledEigensystem& sample(std::size_t k) const { return samples_.at(k); }
  const std::vector<double>& phi_grid() const noexcept { return phi_; }
  /// Sampled eigenvalue curve of one label.
  const std::vector<double>& energies(BasisLabel label) const { return curves_.at(label.index()); }
  double phi_max() const noexcept { return phi_.back(); }

  /// Interpolated eigenvalue; throws DomainError outside the tracked range.
  double omega(BasisLabel label, double phi) const;

  /// Index of the tracked sample closest to `phi`.
  std::size_t nearest_sample(double phi) const;

 private:
  DeviceParams params_;
  TrackingOptions options_;
  std::vector<LabeledEigensystem> samples_;
  std::vector<double> phi_;
  std::array<std::vector<double>, kDim> curves_;
  std::array<MonotoneCubic, kDim> interpolants_;
};

/// Tracks labels on `steps` uniform intervals of [0, phi_max], inserting extra
/// samples wherever adaptive halving was needed.
TrackedSpectrum track_spectrum(const DeviceParams& params, double phi_max, std::size_t steps,
                               TrackingOptions options = {});

/// Labeled eigensystem at an arbitrary flux, continued from the nearest tracked sample.
LabeledEigensystem labeled_eigensystem(const TrackedSpectrum& spectrum, double phi);

/// omega_ij(0) - omega_ij(phi).
double delta_ij(const TrackedSpectrum& spectrum, BasisLabel label, double phi);

/// delta_11 - delta_10 - delta_01.
double zeta(const TrackedSpectrum& spectrum, double phi);

struct Slope {
  double value = 0.0;
  bool one_sided = false;  ///< set when the stencil had to avoid a range boundary
};

/// Central difference of zeta with step h; second-order one-sided at the ends.
Slope dzeta_dphi(const TrackedSpectrum& spectrum, double phi, double h = 1e-4);

struct Crossing {
  std::string name;
  BasisLabel first;
  BasisLabel second;
  int occurrence = 1;  ///< which local gap minimum along the flux axis
  bool found = false;
  double phi = 0.0;
  double gap = 0.0;
};

struct CrossingSet {
  std::array<Crossing, 5> items;  ///< A1 .. A5

  const Crossing& at(const std::string& name) const;
  /// True when every crossing was found and A2 < A5 < A3 < A1 < A4.
  bool ordered() const;
};

struct CrossingSearch {
  double phi_max = 1.0;
  std::size_t steps = 2000;
  double x_tolerance = 1e-9;
};

/// Locates the five labeled avoided crossings: A1 (01,10), A2 (20,11) first
/// minimum, A3 (11,02), A4 (20,11) second minimum, A5 (12,21).
CrossingSet find_crossings(const DeviceParams& params, CrossingSearch search = {});

}  // namespace fluxgate
