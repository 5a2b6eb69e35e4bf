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

// Two capacitively coupled transmons, each truncated to three levels.
//
// Only transmon 1 is flux tuned. Its qubit frequency follows the split-junction
// model w_q(phi) = (w1 - a1) sqrt(cos phi) + a1, and every level uses the Duffing
// ladder w^j = j w_q + (a/2) j (j - 1). The coupling is the excitation-swapping
// form g (a (x) a^dag + a^dag (x) a). All frequencies are angular (rad/ns).

#pragma once

#include <array>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "fluxgate/common.hpp"

namespace fluxgate {

struct DeviceParams {
  double omega1 = 0.0;  ///< qubit 1 angular frequency at zero flux
  double omega2 = 0.0;  ///< qubit 2 angular frequency (static)
  double alpha1 = 0.0;  ///< anharmonicity of transmon 1, negative
  double alpha2 = 0.0;  ///< anharmonicity of transmon 2, negative
  double g = 0.0;       ///< coupling strength

  /// 5.889 / 5.031 GHz, -324.3 / -234.7 MHz, g = 24.7 MHz (all times 2 pi).
  static DeviceParams standard();

  /// Same device with a different coupling strength.
  DeviceParams with_coupling(double coupling) const;

  /// Throws DomainError when the invariants (w1 > w2 > 0, a < 0,
  /// 0 <= g < |w1 - w2|) do not hold.
  void validate() const;

  double detuning() const noexcept { return omega1 - omega2; }
};

/// Strict JSON ingestion: GHz / MHz keys, unknown keys rejected.
DeviceParams device_from_json(const nlohmann::json& doc);
nlohmann::json device_to_json(const DeviceParams& params);
DeviceParams load_device_file(const std::filesystem::path& path);

/// Reduced external flux in radians, restricted to [0, pi/2).
class FluxPoint {
 public:
  explicit FluxPoint(double phi);
  double value() const noexcept { return phi_; }

 private:
  double phi_;
};

enum class Transmon { first, second };

double qubit_frequency(const DeviceParams& params, FluxPoint phi);

/// Frequency of level `level` of one transmon; transmon 2 ignores the flux.
double level_frequency(const DeviceParams& params, Transmon transmon, int level, FluxPoint phi);

/// Qubit-frequency drop of transmon 1, (w1 - a1)(1 - sqrt(cos phi)).
double frequency_deviation(const DeviceParams& params, double phi);

/// d/dphi of `frequency_deviation`.
double frequency_deviation_slope(const DeviceParams& params, double phi);

/// Sum of bare level frequencies for each |i,j>, lexicographic order.
Vector9d bare_energies(const DeviceParams& params, FluxPoint phi);

/// The excitation-swapping coupling on the 9-level space (real, symmetric).
Matrix9d interaction_hamiltonian(const DeviceParams& params);

/// Real symmetric Hamiltonian; the hot path used by tracking and propagation.
Matrix9d hamiltonian_real(const DeviceParams& params, FluxPoint phi);

/// Complex Hermitian Hamiltonian in the |i,j> basis.
Matrix9cd build_hamiltonian(const DeviceParams& params, FluxPoint phi);

/// Pauli X and the Gell-Mann matrices lambda_1 .. lambda_8.
Eigen::Matrix2cd pauli_x();
Eigen::Matrix3cd gell_mann(int k);

struct BlockStructureCheck {
  bool matches = false;
  double max_deviation = 0.0;
  /// The seven states of the interaction sector, sorted by zero-flux energy.
  std::array<BasisLabel, 7> ordering{};
};

/// Restricts the coupling to the seven states that carry it (all but |0,0>
/// and |2,2>), orders them by zero-flux energy and compares with
/// diag(g X, sqrt(2) g (lambda_1 + lambda_6), 2 g X).
BlockStructureCheck check_block_structure(const DeviceParams& params, double tolerance = 1e-12);

}  // namespace fluxgate
