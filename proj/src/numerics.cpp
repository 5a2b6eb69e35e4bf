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

#include "fluxgate/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "fluxgate/common.hpp"

namespace fluxgate {

double simpson(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  const std::size_t intervals = n - 1;
  if (intervals == 1) return 0.5 * h * (y[0] + y[1]);

  auto simpson_even = [&](std::size_t last) {
    // Intervals [0, last], `last` even.
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t k = 1; k < last; k += 2) odd += y[k];
    for (std::size_t k = 2; k < last; k += 2) even += y[k];
    return h / 3.0 * (y[0] + y[last] + 4.0 * odd + 2.0 * even);
  };

  if (intervals % 2 == 0) return simpson_even(intervals);
  const std::size_t m = intervals - 3;
  const double head = m > 0 ? simpson_even(m) : 0.0;
  const double tail = 3.0 * h / 8.0 * (y[m] + 3.0 * y[m + 1] + 3.0 * y[m + 2] + y[m + 3]);
  return head + tail;
}

namespace {

void require_stencil(std::size_t n, std::size_t stride) {
  if (stride == 0) throw DomainError("finite-difference stride must be positive");
  if (n < 8 * stride) {
    throw DomainError("too few samples for a fourth-order finite-difference stencil");
  }
}

}  // namespace

std::vector<double> derivative(std::span<const double> y, double h, std::size_t stride) {
  const std::size_t n = y.size();
  require_stencil(n, stride);
  const std::size_t s = stride;
  const double hs = h * static_cast<double>(s);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 * s && i + 2 * s < n) {
      d[i] = (y[i - 2 * s] - 8.0 * y[i - s] + 8.0 * y[i + s] - y[i + 2 * s]) / (12.0 * hs);
    } else if (i < 2 * s) {
      d[i] = (-25.0 * y[i] + 48.0 * y[i + s] - 36.0 * y[i + 2 * s] + 16.0 * y[i + 3 * s] -
              3.0 * y[i + 4 * s]) /
             (12.0 * hs);
    } else {
      d[i] = (25.0 * y[i] - 48.0 * y[i - s] + 36.0 * y[i - 2 * s] - 16.0 * y[i - 3 * s] +
              3.0 * y[i - 4 * s]) /
             (12.0 * hs);
    }
  }
  return d;
}

std::vector<double> second_derivative(std::span<const double> y, double h, std::size_t stride) {
  const std::size_t n = y.size();
  require_stencil(n, stride);
  const std::size_t s = stride;
  const double hs = h * static_cast<double>(s);
  const double denom = 12.0 * hs * hs;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 * s && i + 2 * s < n) {
      d[i] = (-y[i - 2 * s] + 16.0 * y[i - s] - 30.0 * y[i] + 16.0 * y[i + s] - y[i + 2 * s]) /
             denom;
    } else if (i < 2 * s) {
      d[i] = (45.0 * y[i] - 154.0 * y[i + s] + 214.0 * y[i + 2 * s] - 156.0 * y[i + 3 * s] +
              61.0 * y[i + 4 * s] - 10.0 * y[i + 5 * s]) /
             denom;
    } else {
      d[i] = (45.0 * y[i] - 154.0 * y[i - s] + 214.0 * y[i - 2 * s] - 156.0 * y[i - 3 * s] +
              61.0 * y[i - 4 * s] - 10.0 * y[i - 5 * s]) /
             denom;
    }
  }
  return d;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) out[k] = lo + step * static_cast<double>(k);
  if (n > 1) out.back() = hi;
  return out;
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double x_tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > x_tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

double wrap_phase(double angle) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(angle, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw DomainError("monotone cubic needs >= 2 matching samples");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(x_[k] > x_[k - 1])) throw DomainError("monotone cubic knots must be increasing");
  }
  std::vector<double> h(n - 1);
  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    delta[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = delta[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      slope_[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      slope_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  // Shape-preserving three-point end slopes.
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) {
      s = 0.0;
    } else if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double MonotoneCubic::operator()(double x) const {
  const double span = x_.back() - x_.front();
  const double tol = 1e-12 * std::max(1.0, span);
  if (x < x_.front() - tol || x > x_.back() + tol) {
    throw DomainError("interpolation outside tracked range: " + std::to_string(x));
  }
  x = std::clamp(x, x_.front(), x_.back());
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = static_cast<std::size_t>(std::distance(x_.begin(), it));
  k = k == 0 ? 0 : k - 1;
  if (k >= x_.size() - 1) k = x_.size() - 2;
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[k] + h10 * h * slope_[k] + h01 * y_[k + 1] + h11 * h * slope_[k + 1];
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fluxgate
