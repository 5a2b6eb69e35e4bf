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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fluxgate {

/// Composite Simpson rule on uniformly spaced samples. An odd number of
/// intervals is closed with a 3/8 panel at the end.
double simpson(std::span<const double> y, double h);

/// First derivative of uniformly spaced samples, fourth-order accurate
/// (central in the interior, one-sided five-point stencils at the ends).
/// `stride` spaces the stencil nodes `stride` samples apart.
std::vector<double> derivative(std::span<const double> y, double h, std::size_t stride = 1);

/// Second derivative with the same stencil layout as `derivative`.
std::vector<double> second_derivative(std::span<const double> y, double h,
                                      std::size_t stride = 1);

/// `n` points from `lo` to `hi` inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a minimum of a unimodal function on [lo, hi].
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double x_tolerance);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes. Preserves
/// monotonicity of the data and never overshoots between knots.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double lower() const { return x_.front(); }
  double upper() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

/// Runs `body(i)` for i in [0, count) on up to `workers` threads. Results must
/// be written to per-index storage by the caller; scheduling order is not fixed.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace fluxgate
