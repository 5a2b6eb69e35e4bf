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

// Direct simulation of the nine-level system and gate scoring.
//
// The propagator runs over [0, tau] (flux is zero before epsilon) and is moved
// to the frame of the uncoupled zero-flux Hamiltonian. The gate matrix M is its
// restriction to B8 = (00, 01, 10, 11, 02, 20, 12, 21) and is compared with CZ
// zero-extended to the same space through the largest singular value.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fluxgate/common.hpp"
#include "fluxgate/device.hpp"
#include "fluxgate/metrics.hpp"
#include "fluxgate/spectrum.hpp"
#include "fluxgate/trajectory.hpp"

namespace fluxgate {

/// B8 ordering used for gate matrices.
inline constexpr std::array<BasisLabel, 8> kGateBasis = {
    BasisLabel{0, 0}, BasisLabel{0, 1}, BasisLabel{1, 0}, BasisLabel{1, 1},
    BasisLabel{0, 2}, BasisLabel{2, 0}, BasisLabel{1, 2}, BasisLabel{2, 1}};

struct PropagatorResult {
  Matrix9cd u_lab = Matrix9cd::Identity();
  Matrix9cd u_rot = Matrix9cd::Identity();
  double dt = 0.0;
  std::size_t steps = 0;
  double unitarity_defect = 0.0;  ///< max-entry norm of U^dag U - I
};

/// Midpoint-rule product of exact step exponentials over [0, tau]. The step
/// is tau / ceil(tau / dt). Throws when max |eigenvalue| dt exceeds 0.5 rad.
PropagatorResult propagate(const Trajectory& trajectory, const DeviceParams& params,
                           double dt = 1e-3);

/// Also records bare-state populations of the evolved basis state `initial` every `every` steps.
struct PopulationTrace {
  std::vector<double> t;
  std::vector<std::array<double, kDim>> populations;
};
PropagatorResult propagate(const Trajectory& trajectory, const DeviceParams& params, double dt,
                           BasisLabel initial, std::size_t every, PopulationTrace& trace);

struct AdiabaticPhases {
  double theta01 = 0.0;
  double theta10 = 0.0;
  double theta11 = 0.0;
  double conditional() const { return theta11 - theta01 - theta10; }
};

/// Simpson integrals of delta_ij(phi(t)) over the trajectory grid.
AdiabaticPhases adiabatic_phases(const Trajectory& trajectory, const TrackedSpectrum& spectrum);

/// Diagonal phases of the rotating-frame propagator predicted by the adiabatic
/// theorem: theta_ij - (omega_ij(0) - bare_ij) * tau.
AdiabaticPhases predicted_frame_phases(const Trajectory& trajectory,
                                       const TrackedSpectrum& spectrum);

enum class FidelityMode { raw, z_corrected, phase_optimized };
enum class GateSubspace { b8, qubit, ha };

std::string fidelity_mode_name(FidelityMode mode);
FidelityMode parse_fidelity_mode(const std::string& name);
std::string subspace_name(GateSubspace subspace);
GateSubspace parse_subspace(const std::string& name);

struct GateReport {
  Matrix8cd m = Matrix8cd::Zero();
  Eigen::Matrix4cd m_qubit = Eigen::Matrix4cd::Zero();
  AdiabaticPhases theta_simulated;  ///< arguments of the 01, 10, 11 diagonal entries
  std::optional<AdiabaticPhases> theta_adiabatic;
  std::optional<AdiabaticPhases> theta_predicted;  ///< adiabatic phases in the simulation frame
  double leakage_20 = 0.0;
  double unitarity_defect = 0.0;
  double f_raw = 0.0;
  double f_z_corrected = 0.0;
  double f_phase_optimized = 0.0;
  GateSubspace subspace = GateSubspace::b8;
};

/// M, simulated phases and leakage from a propagator; fills all three F values
/// on `subspace`.
GateReport reconstruct_gate(const PropagatorResult& propagator, GateSubspace subspace = GateSubspace::b8);

/// CZ = I - 2 |11><11| zero-extended to B8.
Matrix8cd cz_extended();

/// Largest singular value of (M' - CZ) restricted to `subspace`. The z-corrected
/// mode multiplies M by diag(exp(-i (n1 theta10 + n2 theta01))) built from the
/// simulated single-qubit phases; phase_optimized additionally minimizes over a
/// global phase.
double fidelity_distance(const GateReport& report, FidelityMode mode,
                         GateSubspace subspace = GateSubspace::b8);
double fidelity_distance(const Matrix8cd& m, FidelityMode mode, GateSubspace subspace);

struct SimulationOptions {
  double dt = 1e-3;
  GateSubspace subspace = GateSubspace::b8;
};

/// propagate + reconstruct_gate + adiabatic phase predictions.
GateReport simulate(const Trajectory& trajectory, const TrackedSpectrum& spectrum,
                    const SimulationOptions& options = {});

struct RankOptions {
  CalibrationOptions calibration;
  MetricConfig metric;
  SimulationOptions simulation;
  FidelityMode mode = FidelityMode::raw;
  std::size_t workers = 1;
};

struct RankRow {
  std::size_t index = 0;
  TrajectoryParams params;
  bool included = false;
  std::string note;
  double amplitude = 0.0;
  double constraint_value = 0.0;
  bool constraint_met = false;
  double n_norm = 0.0;
  double fidelity = 0.0;
  double leakage_20 = 0.0;
};

struct RankReport {
  std::vector<RankRow> rows;  ///< included rows sorted by N-norm, then excluded rows by index
  std::size_t included = 0;
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  std::size_t ties_norm = 0;  ///< pairs tied in N-norm only
  std::size_t ties_fidelity = 0;
  std::size_t ties_both = 0;
  std::optional<double> kendall_tau;  ///< tau-b; empty when undefined
};

/// Kendall tau-b and pair counts for two equally long sequences.
RankReport kendall(const std::vector<double>& x, const std::vector<double>& y);

RankReport rank_check(const std::vector<TrajectoryParams>& samples,
                      const TrackedSpectrum& spectrum, const RankOptions& options = {});

}  // namespace fluxgate
