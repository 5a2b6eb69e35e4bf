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
#include <sstream>

#include "fluxgate/context.hpp"
#include "fluxgate/sweep.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace fluxgate;
using Catch::Approx;

namespace {

const ModelContext& standard_context() {
  static const ModelContext ctx(DeviceParams::standard());
  return ctx;
}

}  // namespace

TEST_CASE("range parsing", "[sweep]") {
  const Range r = Range::parse("1.5:3:4");
  CHECK(r.lo == 1.5);
  CHECK(r.hi == 3.0);
  CHECK(r.n == 4);
  CHECK(r.values() == std::vector<double>{1.5, 2.0, 2.5, 3.0});
  CHECK_THROWS_AS(Range::parse("1:2"), UsageError);
  CHECK_THROWS_AS(Range::parse("1:x:3"), UsageError);
  CHECK_THROWS_AS(Range::parse("1:2:2.5"), UsageError);
  CHECK_THROWS_AS(Range::parse("2:1:3").validate("sigma"), UsageError);
}

TEST_CASE("sweep spec validation", "[sweep]") {
  SweepSpec s;
  s.family = Family::mollified_gaussian;
  s.sigma = Range{1.0, 2.0, 3};
  CHECK_THROWS_AS(s.validate(), UsageError);
  s.mu = Range{4.0, 6.0, 3};
  CHECK_NOTHROW(s.validate());
  CHECK(parse_sweep_mode("pi_calibrated") == SweepMode::pi_calibrated);
  CHECK_THROWS_AS(parse_sweep_mode("fast"), UsageError);
}

TEST_CASE("peak-normalized sweep layout and CSV", "[sweep]") {
  SweepSpec s;
  s.family = Family::prepulsed_gaussian;
  s.sigma = Range{1.0, 2.0, 3};
  s.mu = Range{4.0, 6.0, 2};
  s.samples = 801;
  const SweepResult r = run_sweep(s, standard_context().spectrum());
  REQUIRE(r.points.size() == 6);
  CHECK(r.points[1].sigma == 1.0);
  CHECK(r.points[1].mu == 6.0);
  CHECK(r.points[2].sigma == 1.5);
  for (const SweepPoint& p : r.points) {
    CHECK(p.feasible);
    CHECK(p.amplitude == 1.0);
    CHECK(std::isnan(p.constraint_value));  // peak above the tracked range
  }
  REQUIRE(r.argmin);
  const std::string csv = sweep_csv(r);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "sigma,mu,n_norm,constraint_value,feasible,amplitude");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("pi-calibrated sweep with no feasible point", "[sweep]") {
  SweepSpec s;
  s.sigma = Range{1.5, 2.5, 3};
  s.mode = SweepMode::pi_calibrated;
  s.samples = 801;
  try {
    run_sweep(s, standard_context().spectrum());
    FAIL("expected ConstraintUnreachable");
  } catch (const ConstraintUnreachable& e) {
    CHECK(e.achieved() < testing::kPi);
    CHECK(e.achieved() > 0.2);
  }
}

TEST_CASE("pi-calibrated sweep on long pulses", "[sweep]") {
  SweepSpec s;
  s.sigma = Range{35.0, 45.0, 3};
  s.tau = 120.0;
  s.mode = SweepMode::pi_calibrated;
  s.samples = 1201;
  const SweepResult r = run_sweep(s, standard_context().spectrum());
  for (const SweepPoint& p : r.points) {
    CHECK(p.feasible);
    CHECK(p.constraint_value == Approx(testing::kPi).margin(1e-8));
    CHECK(p.amplitude < standard_context().amplitude_cap());
  }
}

TEST_CASE("coordinate refinement on a synthetic bowl", "[sweep]") {
  auto bowl = [](double s, double m) { return (s - 1.234) * (s - 1.234) + 2.0 * (m - 5.678) * (m - 5.678); };
  const RefinedOptimum r = coordinate_refine(bowl, 1.0, 5.5, bowl(1.0, 5.5), {0.5, 2.0},
                                             std::array<double, 2>{5.0, 6.5});
  CHECK_FALSE(r.aborted);
  CHECK(r.sigma == Approx(1.234).margin(2e-4));
  CHECK(r.mu == Approx(5.678).margin(2e-4));
  CHECK(r.n_norm <= bowl(1.0, 5.5));

  auto holey = [](double s, double) { return s > 1.4 ? std::nan("") : (s - 1.2) * (s - 1.2); };
  const RefinedOptimum a = coordinate_refine(holey, 1.0, 0.0, 0.04, {0.5, 2.0}, std::nullopt);
  CHECK(a.aborted);
  CHECK(a.sigma == 1.0);
  CHECK(a.n_norm == 0.04);
}

TEST_CASE("grid refinement never worsens the grid minimum", "[sweep]") {
  SweepSpec s;
  s.sigma = Range{1.0, 6.0, 6};
  s.samples = 1001;
  s.refine = true;
  const SweepResult r = run_sweep(s, standard_context().spectrum());
  REQUIRE(r.refined);
  CHECK(r.refined->n_norm <= r.points[*r.argmin].n_norm);
  CHECK(std::abs(r.refined->sigma - r.points[*r.argmin].sigma) <= 1.0 + 1e-12);
}

TEST_CASE("property: sweep CSVs are deterministic", "[sweep][property]") {
  const testing::SuiteResult r = testing::sweep_determinism_suite();
  INFO(r.first_failure);
  CHECK(r.instances == testing::kPropertyInstances);
  CHECK(r.passed());
}
