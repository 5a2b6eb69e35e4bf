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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "fluxgate/context.hpp"
#include "fluxgate/evolution.hpp"
#include "fluxgate/numerics.hpp"
#include "support.hpp"

using namespace fluxgate;
using Catch::Approx;

namespace {

const ModelContext& standard_context() {
  static const ModelContext ctx(DeviceParams::standard());
  return ctx;
}

Trajectory gaussian(double sigma, double tau, double amplitude) {
  TrajectoryParams p;
  p.sigma = sigma;
  p.tau = tau;
  p.amplitude = amplitude;
  return sample_trajectory(p);
}

}  // namespace

TEST_CASE("zero flux gives the identity in the rotating frame", "[evolution]") {
  const Trajectory t = gaussian(3.0, 10.0, 0.0);
  const PropagatorResult r = propagate(t, DeviceParams::standard().with_coupling(0.0), 1e-3);
  CHECK((r.u_rot - Matrix9cd::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.steps == 10000);
}

TEST_CASE("static flux matches exp(-iHt)", "[evolution]") {
  const DeviceParams d = DeviceParams::standard();
  TrajectoryParams p;
  p.tau = 2.0;
  std::vector<double> times = linspace(p.epsilon, p.tau, 101);
  std::vector<double> phi(times.size(), 0.3);
  const Trajectory t = trajectory_from_samples(p, times, phi);
  const PropagatorResult r = propagate(t, d, 1e-3);
  Eigen::SelfAdjointEigenSolver<Matrix9d> s(testing::oracle_hamiltonian(d, 0.3));
  const std::complex<double> i{0.0, 1.0};
  Eigen::Matrix<std::complex<double>, 9, 1> ph;
  // phi = 0 for the first step, 0.3 afterwards.
  for (int n = 0; n < 9; ++n) ph(n) = std::exp(-i * s.eigenvalues()(n) * (p.tau - p.epsilon));
  const Matrix9cd v = s.eigenvectors().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Matrix9d> s0(testing::oracle_hamiltonian(d, 0.0));
  Eigen::Matrix<std::complex<double>, 9, 1> ph0;
  for (int n = 0; n < 9; ++n) ph0(n) = std::exp(-i * s0.eigenvalues()(n) * p.epsilon);
  const Matrix9cd v0 = s0.eigenvectors().cast<std::complex<double>>();
  const Matrix9cd expected = v * ph.asDiagonal() * v.adjoint() * v0 * ph0.asDiagonal() * v0.adjoint();
  CHECK((r.u_lab - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("propagator unitarity and convergence", "[evolution]") {
  const ModelContext& ctx = standard_context();
  const Trajectory t = gaussian(3.75, 20.0, ctx.amplitude_cap());
  const PropagatorResult a = propagate(t, ctx.params(), 1e-3);
  const PropagatorResult b = propagate(t, ctx.params(), 5e-4);
  CHECK(a.unitarity_defect <= 1e-9);
  CHECK((a.u_rot - b.u_rot).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK_THROWS_AS(propagate(t, ctx.params(), 0.1), DomainError);
  CHECK_THROWS_AS(propagate(t, ctx.params(), -1.0), DomainError);
}

TEST_CASE("zero-coupling phases equal the integrated deviations", "[evolution]") {
  const DeviceParams d = DeviceParams::standard().with_coupling(0.0);
  const TrackedSpectrum s = track_spectrum(d, 0.6, 4000);
  const Trajectory t = gaussian(3.0, 20.0, 0.55);
  const GateReport g = simulate(t, s);
  REQUIRE(g.theta_predicted);
  CHECK(std::abs(wrap_phase(g.theta_simulated.theta01 - g.theta_predicted->theta01)) < 1e-6);
  CHECK(std::abs(wrap_phase(g.theta_simulated.theta10 - g.theta_predicted->theta10)) < 1e-6);
  CHECK(std::abs(wrap_phase(g.theta_simulated.theta11 - g.theta_predicted->theta11)) < 1e-6);
  // Decoupled transmons: no conditional phase, no leakage.
  CHECK(std::abs(g.theta_adiabatic->conditional()) < 1e-9);
  CHECK(g.leakage_20 < 1e-20);
  // Transmon 1 alone: theta_10 is the integral of (w1 - a1)(1 - sqrt(cos phi)).
  std::vector<double> y(t.phi.size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = frequency_deviation(d, t.phi[k]);
  CHECK(g.theta_adiabatic->theta10 == Approx(simpson(y, t.dt())).epsilon(1e-8));
}

TEST_CASE("population trace starts at the initial state and conserves norm", "[evolution]") {
  const ModelContext& ctx = standard_context();
  const Trajectory t = gaussian(3.75, 20.0, ctx.amplitude_cap());
  PopulationTrace trace;
  propagate(t, ctx.params(), 1e-3, BasisLabel{1, 1}, 100, trace);
  REQUIRE(trace.t.size() == 201);
  CHECK(trace.populations.front()[BasisLabel{1, 1}.index()] == 1.0);
  for (const auto& p : trace.populations) {
    double total = 0.0;
    for (double x : p) total += x;
    CHECK(total == Approx(1.0).margin(1e-9));
  }
  CHECK_THROWS_AS(propagate(t, ctx.params(), 1e-3, BasisLabel{1, 1}, 0, trace), DomainError);
}

TEST_CASE("fidelity distance of ideal and perturbed gates", "[evolution]") {
  const Matrix8cd cz = cz_extended();
  for (FidelityMode m : {FidelityMode::raw, FidelityMode::z_corrected, FidelityMode::phase_optimized}) {
    CHECK(fidelity_distance(cz, m, GateSubspace::qubit) == Approx(0.0).margin(1e-12));
  }
  // B8 includes the leakage block where CZ is zero.
  CHECK(fidelity_distance(cz, FidelityMode::raw, GateSubspace::b8) == Approx(0.0).margin(1e-12));

  const std::complex<double> i{0.0, 1.0};
  Matrix8cd m = cz;
  m(1, 1) = std::exp(i * 0.3);
  m(2, 2) = std::exp(i * 0.5);
  m(3, 3) = -std::exp(i * 0.8);
  // Local Z phases only: removable.
  CHECK(fidelity_distance(m, FidelityMode::raw, GateSubspace::qubit) ==
        Approx(std::abs(std::exp(i * 0.8) - 1.0)));
  CHECK(fidelity_distance(m, FidelityMode::z_corrected, GateSubspace::qubit) ==
        Approx(0.0).margin(1e-12));

  Matrix8cd g = std::exp(i * 1.1) * cz;
  CHECK(fidelity_distance(g, FidelityMode::raw, GateSubspace::qubit) ==
        Approx(std::abs(std::exp(i * 1.1) - 1.0)));
  // Z-correction moves the global phase onto |00> and |11>; the best global
  // phase then splits it evenly.
  CHECK(fidelity_distance(g, FidelityMode::phase_optimized, GateSubspace::qubit) ==
        Approx(2.0 * std::sin(0.55)).epsilon(1e-9));

  Matrix8cd ha = Matrix8cd::Zero();
  CHECK(fidelity_distance(ha, FidelityMode::raw, GateSubspace::ha) == Approx(1.0));
}

TEST_CASE("mode and subspace names", "[evolution]") {
  CHECK(parse_fidelity_mode("z_corrected") == FidelityMode::z_corrected);
  CHECK(parse_subspace("ha") == GateSubspace::ha);
  CHECK_THROWS_AS(parse_fidelity_mode("best"), UsageError);
  CHECK_THROWS_AS(parse_subspace("b9"), UsageError);
}

TEST_CASE("gate report layout", "[evolution]") {
  const ModelContext& ctx = standard_context();
  const GateReport g = simulate(gaussian(3.75, 20.0, ctx.amplitude_cap()), ctx.spectrum());
  CHECK(g.m_qubit == g.m.topLeftCorner<4, 4>());
  CHECK(g.theta_simulated.theta11 == Approx(std::arg(g.m(3, 3))));
  CHECK(g.f_phase_optimized <= g.f_z_corrected + 1e-12);
  CHECK(g.leakage_20 >= 0.0);
  CHECK(g.leakage_20 <= 1.0);
  // Frozen reference values for this pulse.
  CHECK(g.f_raw == Approx(1.931).margin(2e-3));
  CHECK(g.f_z_corrected == Approx(1.887).margin(2e-3));
  CHECK(g.f_phase_optimized == Approx(1.313).margin(2e-3));
}

TEST_CASE("Kendall tau-b", "[evolution]") {
  const RankReport r = kendall({12, 2, 1, 12, 2}, {1, 4, 7, 1, 0});
  REQUIRE(r.kendall_tau);
  CHECK(*r.kendall_tau == Approx(-0.47140452079103173).margin(1e-12));
  CHECK(r.ties_both == 1);
  const RankReport same = kendall({1, 2, 3}, {10, 20, 30});
  CHECK(*same.kendall_tau == Approx(1.0));
  CHECK(same.concordant == 3);
  CHECK_FALSE(kendall({1, 1, 1}, {1, 2, 3}).kendall_tau);
  CHECK_THROWS_AS(kendall({1, 2}, {1}), DomainError);
}

TEST_CASE("rank check orders rows and excludes infeasible samples", "[evolution]") {
  const ModelContext& ctx = standard_context();
  std::vector<TrajectoryParams> samples(3);
  samples[0].sigma = 40.0;
  samples[0].tau = 120.0;
  samples[1].family = Family::mollifier;
  samples[1].sigma = 50.0;
  samples[1].tau = 120.0;
  samples[2].sigma = 2.0;
  samples[2].tau = 20.0;
  RankOptions o;
  o.simulation.dt = 2e-3;
  const RankReport r = rank_check(samples, ctx.spectrum(), o);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.included == 2);
  CHECK(r.rows[0].n_norm <= r.rows[1].n_norm);
  CHECK_FALSE(r.rows[2].included);
  CHECK(r.rows[2].index == 2);
  CHECK(r.rows[2].note.find("unreachable") != std::string::npos);
  CHECK(std::abs(r.rows[0].constraint_value - testing::kPi) < 1e-8);
  CHECK(r.kendall_tau);
  CHECK_THROWS_AS(rank_check({samples[0]}, ctx.spectrum(), o), DomainError);
}
