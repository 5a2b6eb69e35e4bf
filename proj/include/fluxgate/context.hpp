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

#include "fluxgate/device.hpp"
#include "fluxgate/spectrum.hpp"

namespace fluxgate {

/// Device, its avoided crossings and the spectrum tracked over [0, A2], the
/// codomain every trajectory is restricted to.
class ModelContext {
 public:
  explicit ModelContext(const DeviceParams& params, std::size_t steps = 4000);

  const DeviceParams& params() const noexcept { return params_; }
  const CrossingSet& crossings() const noexcept { return crossings_; }
  const TrackedSpectrum& spectrum() const noexcept { return spectrum_; }
  double amplitude_cap() const noexcept { return spectrum_.phi_max(); }

 private:
  DeviceParams params_;
  CrossingSet crossings_;
  TrackedSpectrum spectrum_;
};

}  // namespace fluxgate
