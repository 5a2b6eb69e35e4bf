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

#include <atomic>
#include <cmath>
#include <vector>

#include "fluxgate/common.hpp"
#include "fluxgate/io.hpp"
#include "fluxgate/numerics.hpp"
#include "support.hpp"

using namespace fluxgate;
using Catch::Approx;

TEST_CASE("simpson integrates smooth functions", "[numerics]") {
  const std::vector<double> x = linspace(0.0, testing::kPi, 1001);
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = std::sin(x[k]);
  CHECK(simpson(y, x[1] - x[0]) == Approx(2.0).epsilon(1e-11));

  // Even sample count: cubic is still exact.
  const std::vector<double> u = linspace(0.0, 1.0, 10);
  std::vector<double> c(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) c[k] = u[k] * u[k] * u[k];
  CHECK(simpson(c, u[1] - u[0]) == Approx(0.25).epsilon(1e-13));
}

TEST_CASE("finite differences are exact on quartics", "[numerics]") {
  const double h = 0.01;
  std::vector<double> y(200);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double x = k * h;
    y[k] = 1.0 - 2.0 * x + 3.0 * x * x - x * x * x + 0.5 * x * x * x * x;
  }
  const std::vector<double> d1 = derivative(y, h);
  const std::vector<double> d2 = second_derivative(y, h);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double x = k * h;
    CHECK(d1[k] == Approx(-2.0 + 6.0 * x - 3.0 * x * x + 2.0 * x * x * x).margin(1e-9));
    CHECK(d2[k] == Approx(6.0 - 6.0 * x + 6.0 * x * x).margin(1e-6));
  }
  const std::vector<double> strided = derivative(y, h, 4);
  CHECK(strided[100] == Approx(d1[100]).margin(1e-9));
}

TEST_CASE("golden section finds a parabola vertex", "[numerics]") {
  const ScalarMinimum m =
      golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3) + 2.0; }, -1.0, 2.0, 1e-10);
  CHECK(m.x == Approx(0.3).margin(1e-8));
  CHECK(m.value == Approx(2.0).margin(1e-14));
}

TEST_CASE("monotone cubic keeps monotone data monotone", "[numerics]") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{0.0, 0.1, 0.1, 2.0, 2.1};
  const MonotoneCubic f(x, y);
  double prev = f(0.0);
  for (double t = 0.0; t <= 4.0; t += 0.01) {
    const double v = f(t);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(f(x[k]) == Approx(y[k]).margin(1e-15));
  CHECK(f(1.5) == Approx(0.1).margin(1e-15));  // flat segment stays flat
}

TEST_CASE("wrap_phase maps into (-pi, pi]", "[numerics]") {
  CHECK(wrap_phase(3.0 * testing::kPi) == Approx(testing::kPi));
  CHECK(wrap_phase(-testing::kPi) == Approx(testing::kPi));
  CHECK(wrap_phase(0.25) == Approx(0.25));
}

TEST_CASE("parallel_for visits each index once", "[numerics]") {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(hits.size(), 4, [&](std::size_t k) { hits[k]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("number formatting and JSON text", "[io]") {
  CHECK(format_number(1.0) == "1.0000000000000000e+00");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  nlohmann::json j = {{"b", 2.5}, {"a", std::nan("")}, {"c", {1, 2}}};
  const std::string text = to_json_text(j);
  CHECK(text.find("\"a\": null") != std::string::npos);
  CHECK(text.find("\"a\"") < text.find("\"b\""));
  CHECK(nlohmann::json::parse(text)["b"].get<double>() == 2.5);

  CsvWriter csv({"x", "y"});
  csv.row(std::vector<double>{1.0, 2.0});
  CHECK(csv.text() == "x,y\n1.0000000000000000e+00,2.0000000000000000e+00\n");
  CHECK_THROWS_AS(csv.row(std::vector<double>{1.0}), Error);
}
