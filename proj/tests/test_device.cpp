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

#include "fluxgate/device.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace fluxgate;
using Catch::Approx;

TEST_CASE("standard device constants", "[device]") {
  const DeviceParams p = DeviceParams::standard();
  CHECK(p.omega1 == Approx(testing::kGHz * 5.889));
  CHECK(p.omega2 == Approx(testing::kGHz * 5.031));
  CHECK(p.alpha1 == Approx(-testing::kGHz * 0.3243));
  CHECK(p.alpha2 == Approx(-testing::kGHz * 0.2347));
  CHECK(p.g == Approx(testing::kGHz * 0.0247));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("device validation", "[device]") {
  DeviceParams p = DeviceParams::standard();
  CHECK_NOTHROW(p.with_coupling(0.0).validate());
  CHECK_THROWS_AS(p.with_coupling(-0.1).validate(), DomainError);
  CHECK_THROWS_AS(p.with_coupling(p.detuning()).validate(), DomainError);
  p.alpha1 = 0.1;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = DeviceParams::standard();
  p.omega2 = p.omega1 + 1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("device JSON round trip and strictness", "[device]") {
  const DeviceParams p = DeviceParams::standard();
  const DeviceParams q = device_from_json(device_to_json(p));
  CHECK(q.omega1 == p.omega1);
  CHECK(q.g == p.g);
  nlohmann::json doc = device_to_json(p);
  doc["bogus"] = 1.0;
  CHECK_THROWS_AS(device_from_json(doc), UsageError);
}

TEST_CASE("flux point range", "[device]") {
  CHECK_NOTHROW(FluxPoint(0.0));
  CHECK_NOTHROW(FluxPoint(1.5));
  CHECK_THROWS_AS(FluxPoint(-0.01), DomainError);
  CHECK_THROWS_AS(FluxPoint(testing::kPi / 2.0), DomainError);
}

TEST_CASE("level frequencies follow the Duffing ladder", "[device]") {
  const DeviceParams p = DeviceParams::standard();
  for (double phi : {0.0, 0.3, 0.7, 1.2}) {
    for (int level = 0; level < 3; ++level) {
      CHECK(level_frequency(p, Transmon::first, level, FluxPoint(phi)) ==
            Approx(testing::oracle_level(p.omega1, p.alpha1, level, phi)).epsilon(1e-14));
      CHECK(level_frequency(p, Transmon::second, level, FluxPoint(phi)) ==
            Approx(testing::oracle_level(p.omega2, p.alpha2, level, 0.0)).epsilon(1e-14));
    }
    CHECK(frequency_deviation(p, phi) ==
          Approx((p.omega1 - p.alpha1) * (1.0 - std::sqrt(std::cos(phi)))).margin(1e-13));
  }
  CHECK(qubit_frequency(p, FluxPoint(0.0)) == Approx(p.omega1));
  const double h = 1e-6;
  const double phi = 0.4;
  CHECK(frequency_deviation_slope(p, phi) ==
        Approx((frequency_deviation(p, phi + h) - frequency_deviation(p, phi - h)) / (2 * h))
            .epsilon(1e-8));
}

TEST_CASE("Hamiltonian matches the element-wise oracle", "[device]") {
  const DeviceParams p = DeviceParams::standard();
  for (double phi : {0.0, 0.25, 0.58, 1.0}) {
    const Matrix9d h = hamiltonian_real(p, FluxPoint(phi));
    CHECK((h - testing::oracle_hamiltonian(p, phi)).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Excitation number is conserved by the coupling.
  const Matrix9d v = interaction_hamiltonian(p);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      if (v(a, b) != 0.0) {
        const BasisLabel la = BasisLabel::from_index(a);
        const BasisLabel lb = BasisLabel::from_index(b);
        CHECK(la.i + la.j == lb.i + lb.j);
      }
}

TEST_CASE("Gell-Mann generators are Hermitian, traceless and orthogonal", "[device]") {
  for (int a = 1; a <= 8; ++a) {
    const Eigen::Matrix3cd ga = gell_mann(a);
    CHECK((ga - ga.adjoint()).norm() < 1e-15);
    CHECK(std::abs(ga.trace()) < 1e-15);
    for (int b = 1; b <= 8; ++b) {
      const double tr = (ga * gell_mann(b)).trace().real();
      CHECK(tr == Approx(a == b ? 2.0 : 0.0).margin(1e-14));
    }
  }
  CHECK_THROWS(gell_mann(0));
  CHECK_THROWS(gell_mann(9));
  CHECK((pauli_x() * pauli_x() - Eigen::Matrix2cd::Identity()).norm() < 1e-15);
}

TEST_CASE("block structure holds for standard and random devices", "[device]") {
  const BlockStructureCheck c = check_block_structure(DeviceParams::standard());
  CHECK(c.matches);
  CHECK(c.max_deviation <= 1e-12);
  for (int k = 0; k < 20; ++k) CHECK(check_block_structure(testing::random_device()).matches);
}

TEST_CASE("property: Hamiltonian Hermiticity over random devices", "[device][property]") {
  const testing::SuiteResult r = testing::hermiticity_suite();
  INFO(r.first_failure);
  CHECK(r.instances == testing::kPropertyInstances);
  CHECK(r.passed());
}
