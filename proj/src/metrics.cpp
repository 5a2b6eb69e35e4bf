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

#include "fluxgate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluxgate/numerics.hpp"

namespace fluxgate {

namespace {

std::size_t stencil_stride(const Trajectory& trajectory, const MetricConfig& config) {
  if (!config.fd_step) return 1;
  const double ratio = *config.fd_step / trajectory.dt();
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * ratio) {
    throw DomainError("fd_step must be a positive multiple of the grid spacing");
  }
  return static_cast<std::size_t>(rounded);
}

void require_uniform_grid(const Trajectory& trajectory) {
  const auto& t = trajectory.t;
  if (t.size() < 2 || t.size() != trajectory.phi.size()) {
    throw DomainError("trajectory samples are malformed");
  }
  const double h = t[1] - t[0];
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs((t[k] - t[k - 1]) - h) > 1e-9 * std::max(1.0, h)) {
      throw DomainError("N-norm requires a uniform time grid");
    }
  }
}

double coupled_delta_slope(const TrackedSpectrum& spectrum, double phi) {
  constexpr double h = 1e-4;
  const BasisLabel l11{1, 1};
  const double lo = spectrum.phi_grid().front();
  const double hi = spectrum.phi_max();
  auto d = [&](double x) { return delta_ij(spectrum, l11, x); };
  if (phi - h >= lo && phi + h <= hi) return (d(phi + h) - d(phi - h)) / (2.0 * h);
  if (phi - h < lo) return (-3.0 * d(phi) + 4.0 * d(phi + h) - d(phi + 2.0 * h)) / (2.0 * h);
  return (3.0 * d(phi) - 4.0 * d(phi - h) + d(phi - 2.0 * h)) / (2.0 * h);
}

}  // namespace

void MetricConfig::validate() const {
  if (!(std::isfinite(upsilon) && std::isfinite(lambda))) {
    throw DomainError("metric weights must be finite");
  }
  if (!(std::isfinite(kappa) && kappa > 0.0)) throw DomainError("kappa must be positive");
  if (fd_step && !(*fd_step > 0.0)) throw DomainError("fd_step must be positive");
}

double n_norm(const Trajectory& trajectory, const TrackedSpectrum& spectrum,
              const MetricConfig& config) {
  config.validate();
  require_uniform_grid(trajectory);
  const double h = trajectory.dt();
  const std::vector<double> phidot = derivative(trajectory.phi, h, stencil_stride(trajectory, config));
  const DeviceParams& params = spectrum.params();
  std::vector<double> integrand(trajectory.phi.size());
  for (std::size_t k = 0; k < integrand.size(); ++k) {
    const double phi = trajectory.phi[k];
    double delta = 0.0;
    double slope = 0.0;
    if (config.delta == DeltaModel::decoupled) {
      delta = frequency_deviation(params, phi);
      slope = frequency_deviation_slope(params, phi);
    } else {
      delta = delta_ij(spectrum, {1, 1}, phi);
      slope = coupled_delta_slope(spectrum, phi);
    }
    const double rate = slope * phidot[k];
    integrand[k] = config.upsilon * delta + config.kappa * rate * rate;
  }
  return simpson(integrand, h);
}

double residual_point(const TrackedSpectrum& spectrum, const MetricConfig& config, double phi,
                      double phidot, double phiddot) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double zeta_slope = dzeta_dphi(spectrum, phi).value;
  return config.lambda * c * c / s * zeta_slope -
         2.0 * (config.upsilon / config.kappa) * std::sqrt(c * c * c) +
         (1.0 + c * c) * phidot * phidot - std::sin(2.0 * phi) * phiddot;
}

ResidualCurve el_residual(const Trajectory& trajectory, const TrackedSpectrum& spectrum,
                          const MetricConfig& config) {
  config.validate();
  require_uniform_grid(trajectory);
  const double h = trajectory.dt();
  const std::size_t stride = stencil_stride(trajectory, config);
  const std::vector<double> phidot = derivative(trajectory.phi, h, stride);
  const std::vector<double> phiddot = second_derivative(trajectory.phi, h, stride);

  ResidualCurve out;
  const std::size_t n = trajectory.phi.size();
  out.t = trajectory.t;
  out.d.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.masked.assign(n, false);

  std::size_t first = n;
  std::size_t last = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (trajectory.phi[k] > config.singular_phi) {
      first = std::min(first, k);
      last = k;
    }
  }

  std::vector<double> squared(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = trajectory.phi[k];
    if (phi <= config.singular_phi) {
      out.masked[k] = true;
      ++out.masked_count;
      if (first < n && k > first && k < last) ++out.masked_inside_support;
      continue;
    }
    out.d[k] = residual_point(spectrum, config, phi, phidot[k], phiddot[k]);
    squared[k] = out.d[k] * out.d[k];
  }
  if (out.masked_inside_support > 0) {
    out.warnings.push_back("flux at or below " + std::to_string(config.singular_phi) +
                           " rad inside the pulse support; " +
                           std::to_string(out.masked_inside_support) + " samples masked");
  }
  out.l2 = std::sqrt(simpson(squared, h));
  return out;
}

InteractionPropagator interaction_propagator(const DeviceParams& params,
                                             const std::function<double(double)>& delta,
                                             double t0, double t1, std::size_t steps) {
  InteractionPropagator out;
  out.steps = steps;
  if (steps == 0 || t1 == t0) return out;
  if (!(t1 > t0)) throw DomainError("propagation interval must be increasing");
  const double dt = (t1 - t0) / static_cast<double>(steps);
  const double w = params.detuning() + params.alpha1;
  if (std::abs(w) * dt > 0.1) {
    throw DomainError("too few steps: (Delta + alpha1) dt exceeds 0.1 rad");
  }
  const double c = std::sqrt(2.0) * params.g;
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  for (std::size_t k = 0; k < steps; ++k) {
    const double tm = t0 + (static_cast<double>(k) + 0.5) * dt;
    const double d = delta(tm);
    const Complex z = c * std::exp(-i * (w * tm));
    // G = m I + [[h, z], [conj z, -h]] with m = -3d/2 and h = d/2.
    const double m = -1.5 * d;
    const double hz = 0.5 * d;
    const double r = std::sqrt(hz * hz + std::norm(z));
    Eigen::Matrix2cd traceless;
    traceless << hz, z, std::conj(z), -hz;
    const Complex phase = std::exp(-i * (m * dt));
    Eigen::Matrix2cd step = std::cos(r * dt) * Eigen::Matrix2cd::Identity();
    if (r > 0.0) step -= i * (std::sin(r * dt) / r) * traceless;
    u = (phase * step) * u;
  }
  out.u = u;
  out.transfer = std::norm(u(1, 0));
  return out;
}

InteractionPropagator interaction_propagator(const Trajectory& trajectory,
                                             const DeviceParams& params, std::size_t steps) {
  auto delta = [&](double t) { return frequency_deviation(params, trajectory.phi_at(t)); };
  return interaction_propagator(params, delta, trajectory.t.front(), trajectory.t.back(), steps);
}

Eigen::Matrix3cd interaction_frame_generator(const DeviceParams& params, double delta, double t) {
  const double low = (params.detuning() - params.alpha2) * t;
  const double high = (params.detuning() + params.alpha1) * t;
  Eigen::Matrix3cd m = std::cos(low) * gell_mann(1) + std::sin(low) * gell_mann(2) +
                       std::cos(high) * gell_mann(6) + std::sin(high) * gell_mann(7);
  m(1, 1) -= delta;
  m(2, 2) -= 2.0 * delta;
  return m;
}

MetricReport compute_metrics(const Trajectory& trajectory, const TrackedSpectrum& spectrum,
                             const MetricConfig& config, std::size_t propagator_steps) {
  MetricReport report;
  report.n_norm = n_norm(trajectory, spectrum, config);
  const double peak = *std::max_element(trajectory.phi.begin(), trajectory.phi.end());
  if (peak <= spectrum.phi_max()) {
    report.residual = el_residual(trajectory, spectrum, config);
    report.constraint_value = phase_integral(trajectory, spectrum);
  } else {
    report.constraint_value = std::numeric_limits<double>::quiet_NaN();
    report.residual.warnings.push_back("flux exceeds the tracked range; residual not evaluated");
  }
  report.leakage_estimate =
      interaction_propagator(trajectory, spectrum.params(), propagator_steps).transfer;
  return report;
}

}  // namespace fluxgate
