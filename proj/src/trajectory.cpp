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

#include "fluxgate/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fluxgate/numerics.hpp"

namespace fluxgate {

namespace {

constexpr std::size_t kConvolutionNodes = 2001;
constexpr std::size_t kPeakScan = 2001;

double gaussian(double t, double sigma, double center) {
  const double x = (t - center) / sigma;
  return std::exp(-0.5 * x * x);
}

bool outside_window(double t, double tau, double epsilon) {
  return t < epsilon || t > tau - epsilon;
}

// Location and value of the maximum of f on [a, b]: dense scan, then a
// golden-section polish around the best sample.
ScalarMinimum peak_of(const std::function<double(double)>& f, double a, double b) {
  const std::vector<double> x = linspace(a, b, kPeakScan);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = f(x[k]);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double lo = x[best == 0 ? 0 : best - 1];
  const double hi = x[std::min(best + 1, x.size() - 1)];
  const ScalarMinimum m = golden_section_minimize([&](double s) { return -f(s); }, lo, hi, 1e-12);
  if (-m.value > best_value) return {m.x, -m.value};
  return {x[best], best_value};
}

// Baseline-subtracted, clamped curve b(t) = max(0, f(t) - line through the
// window-end values), zero outside the window.
double rezeroed(const std::function<double(double)>& f, double fa, double fb, double t,
                double tau, double epsilon) {
  if (outside_window(t, tau, epsilon)) return 0.0;
  const double a = epsilon;
  const double b = tau - epsilon;
  const double line = fa + (fb - fa) * (t - a) / (b - a);
  return std::max(0.0, f(t) - line);
}

struct MollifiedGaussian {
  double sigma_g, sigma_m, tau, mu, epsilon;
  double fa = 0.0, fb = 0.0, peak = 1.0;

  MollifiedGaussian(double sg, double sm, double tau_, double mu_, double eps)
      : sigma_g(sg), sigma_m(sm), tau(tau_), mu(mu_), epsilon(eps) {
    if (!(sigma_m > 0.0 && sigma_g > 0.0)) throw DomainError("widths must be positive");
    fa = convolution(epsilon);
    fb = convolution(tau - epsilon);
    const auto f = [this](double t) { return rezeroed_value(t); };
    peak = peak_of(f, epsilon, tau - epsilon).value;
    if (!(peak > 1e-12)) throw DomainError("mollified Gaussian vanishes on the window");
  }

  double convolution(double t) const {
    // Integration variable t' over [0, tau] where the shifted mollifier is nonzero.
    const double shift = t + 0.5 * tau - mu;
    const double lo = std::max(0.0, shift - sigma_m);
    const double hi = std::min(tau, shift + sigma_m);
    if (!(hi > lo)) return 0.0;
    const std::vector<double> x = linspace(lo, hi, kConvolutionNodes);
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      y[k] = shape_gaussian(x[k], sigma_g, 0.5 * tau, tau, epsilon) *
             shape_mollifier(t - x[k] + 0.5 * tau, sigma_m, mu);
    }
    return simpson(y, x[1] - x[0]);
  }

  double rezeroed_value(double t) const {
    return rezeroed([this](double s) { return convolution(s); }, fa, fb, t, tau, epsilon);
  }

  double operator()(double t) const { return std::min(1.0, rezeroed_value(t) / peak); }
};

struct Prepulsed {
  double sigma, tau, mu, epsilon, weight;
  PrepulseKind kind;
  double peak = 1.0;

  Prepulsed(double s, double tau_, double mu_, PrepulseKind k, double eps, double w)
      : sigma(s), tau(tau_), mu(mu_), epsilon(eps), weight(w), kind(k) {
    peak = peak_of([this](double t) { return raw(t); }, epsilon, tau - epsilon).value;
    if (!(peak > 1e-12)) throw DomainError("prepulsed shape vanishes on the window");
  }

  double raw(double t) const {
    if (outside_window(t, tau, epsilon)) return 0.0;
    const double p = kind == PrepulseKind::gaussian ? shape_gaussian(t, sigma, mu, tau, epsilon)
                                                    : shape_mollifier(t, sigma, mu);
    return weight * p + shape_gaussian(t, sigma, 0.5 * tau, tau, epsilon);
  }

  double operator()(double t) const { return std::min(1.0, raw(t) / peak); }
};

}  // namespace

std::string family_name(Family family) {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::mollifier: return "mollifier";
    case Family::mollified_gaussian: return "mollified_gaussian";
    case Family::prepulsed_gaussian: return "prepulsed_gaussian";
    case Family::mollifier_prepulsed_gaussian: return "mollifier_prepulsed_gaussian";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::gaussian, Family::mollifier, Family::mollified_gaussian,
                   Family::prepulsed_gaussian, Family::mollifier_prepulsed_gaussian}) {
    if (family_name(f) == name) return f;
  }
  throw UsageError("unknown trajectory family: " + name);
}

bool family_uses_mu(Family family) {
  return family != Family::gaussian && family != Family::mollifier;
}

void TrajectoryParams::validate() const {
  if (!(std::isfinite(sigma) && sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(std::isfinite(epsilon) && epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  if (!(std::isfinite(tau) && tau > 2.0 * epsilon)) throw DomainError("tau must exceed 2 epsilon");
  if (!(std::isfinite(amplitude) && amplitude >= 0.0)) {
    throw DomainError("amplitude must be finite and non-negative");
  }
  if (family_uses_mu(family) && !(std::isfinite(mu) && mu >= 0.0 && mu <= tau)) {
    throw DomainError("mu must lie in [0, tau]");
  }
  if (prepulse_weight && !(std::isfinite(*prepulse_weight) && *prepulse_weight >= 0.0)) {
    throw DomainError("prepulse weight must be non-negative");
  }
  if (family == Family::mollifier && sigma > 0.5 * tau) {
    throw DomainError("mollifier support exceeds [0, tau]");
  }
  if (family == Family::mollifier_prepulsed_gaussian && (mu - sigma < 0.0 || mu + sigma > tau)) {
    throw DomainError("mollifier prepulse support exceeds [0, tau]");
  }
}

double TrajectoryParams::weight() const {
  if (prepulse_weight) return *prepulse_weight;
  switch (family) {
    case Family::prepulsed_gaussian: return kGaussianPrepulseWeight;
    case Family::mollifier_prepulsed_gaussian: return kMollifierPrepulseWeight;
    default: return 0.0;
  }
}

double shape_gaussian(double t, double sigma, double center, double tau, double epsilon) {
  if (outside_window(t, tau, epsilon)) return 0.0;
  const double a = epsilon;
  const double b = tau - epsilon;
  const double ga = gaussian(a, sigma, center);
  const double gb = gaussian(b, sigma, center);
  const double line_at_center = ga + (gb - ga) * (center - a) / (b - a);
  const double scale = 1.0 - line_at_center;
  if (!(scale >= 1e-12)) throw DomainError("Gaussian too wide for its window (1 - Z < 1e-12)");
  const double line = ga + (gb - ga) * (t - a) / (b - a);
  return std::max(0.0, (gaussian(t, sigma, center) - line) / scale);
}

double shape_mollifier(double t, double sigma, double center) {
  const double x = (t - center) / sigma;
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 + 1.0 / (x * x - 1.0));
}

double shape_mollified_gaussian(double t, double sigma_g, double sigma_m, double tau, double mu,
                                double epsilon) {
  return MollifiedGaussian(sigma_g, sigma_m, tau, mu, epsilon)(t);
}

double shape_mollified_gaussian(double t, double sigma, double tau, double mu, double epsilon) {
  return shape_mollified_gaussian(t, sigma, sigma, tau, mu, epsilon);
}

double shape_prepulsed(double t, double sigma, double tau, double mu, PrepulseKind kind,
                       double epsilon, std::optional<double> weight) {
  const double w = weight.value_or(kind == PrepulseKind::gaussian ? kGaussianPrepulseWeight
                                                                   : kMollifierPrepulseWeight);
  return Prepulsed(sigma, tau, mu, kind, epsilon, w)(t);
}

PulseShape::PulseShape(const TrajectoryParams& params) : params_(params) {
  params.validate();
  const double sigma = params.sigma;
  const double tau = params.tau;
  const double eps = params.epsilon;
  const double mu = params.mu;
  const double a = eps;
  const double b = tau - eps;
  switch (params.family) {
    case Family::gaussian:
      shape_gaussian(0.5 * tau, sigma, 0.5 * tau, tau, eps);  // width guard
      eval_ = [=](double t) { return shape_gaussian(t, sigma, 0.5 * tau, tau, eps); };
      break;
    case Family::mollifier:
      eval_ = [=](double t) {
        return outside_window(t, tau, eps) ? 0.0 : shape_mollifier(t, sigma, 0.5 * tau);
      };
      break;
    case Family::mollified_gaussian: {
      if (mu - sigma < 0.0 || mu + sigma > tau) {
        warnings_.push_back("mollifier kernel support exceeds [0, tau]; values clamped");
      }
      auto shape = std::make_shared<MollifiedGaussian>(sigma, sigma, tau, mu, eps);
      eval_ = [shape](double t) { return (*shape)(t); };
      break;
    }
    case Family::prepulsed_gaussian:
    case Family::mollifier_prepulsed_gaussian: {
      const bool gaussian_kind = params.family == Family::prepulsed_gaussian;
      const double reach = gaussian_kind ? 5.0 * sigma : sigma;
      if (mu - reach < a || mu + reach > b) {
        warnings_.push_back("prepulse overlaps the domain boundary");
      }
      auto shape = std::make_shared<Prepulsed>(
          sigma, tau, mu, gaussian_kind ? PrepulseKind::gaussian : PrepulseKind::mollifier, eps,
          params.weight());
      eval_ = [shape](double t) { return (*shape)(t); };
      break;
    }
  }
}

double PulseShape::operator()(double t) const { return std::clamp(eval_(t), 0.0, 1.0); }

double Trajectory::dt() const {
  if (t.size() < 2) throw DomainError("trajectory has fewer than two samples");
  return t[1] - t[0];
}

namespace {

void require_uniform(const std::vector<double>& t) {
  if (t.size() < 2) throw DomainError("trajectory needs at least two samples");
  const double h = t[1] - t[0];
  if (!(h > 0.0)) throw DomainError("trajectory grid must be increasing");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs((t[k] - t[k - 1]) - h) > 1e-9 * std::max(1.0, h)) {
      throw DomainError("trajectory grid is not uniform");
    }
  }
}

}  // namespace

double Trajectory::phi_at(double time) const {
  if (time < t.front() || time > t.back()) return 0.0;
  if (shape) return params.amplitude * (*shape)(time);
  if (!interpolant) throw DomainError("trajectory has neither a shape nor an interpolant");
  return std::max(0.0, (*interpolant)(time));
}

Trajectory sample_trajectory(const TrajectoryParams& params, std::size_t samples) {
  if (samples < 3) throw DomainError("need at least three time samples");
  auto shape = std::make_shared<const PulseShape>(params);
  Trajectory traj;
  traj.params = params;
  traj.shape = shape;
  traj.warnings = shape->warnings();
  traj.t = linspace(params.epsilon, params.tau, samples);
  traj.phi.resize(samples);
  for (std::size_t k = 0; k < samples; ++k) traj.phi[k] = params.amplitude * (*shape)(traj.t[k]);
  return traj;
}

Trajectory trajectory_from_samples(TrajectoryParams params, std::vector<double> t,
                                   std::vector<double> phi) {
  if (t.size() != phi.size()) throw DomainError("time and flux sample counts differ");
  require_uniform(t);
  Trajectory traj;
  traj.params = std::move(params);
  traj.t = std::move(t);
  traj.phi = std::move(phi);
  traj.interpolant = std::make_shared<const MonotoneCubic>(traj.t, traj.phi);
  return traj;
}

double phase_integral(const Trajectory& trajectory, const TrackedSpectrum& spectrum) {
  require_uniform(trajectory.t);
  std::vector<double> z(trajectory.phi.size());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = zeta(spectrum, trajectory.phi[k]);
  return simpson(z, trajectory.dt());
}

CalibrationResult calibrate_amplitude(const TrajectoryParams& params,
                                      const TrackedSpectrum& spectrum,
                                      CalibrationOptions options) {
  if (options.k < 0) throw DomainError("phase branch k must be non-negative");
  if (!(options.tolerance > 0.0)) throw DomainError("calibration tolerance must be positive");
  TrajectoryParams unit = params;
  unit.amplitude = 1.0;
  const Trajectory shape = sample_trajectory(unit, options.samples);
  const double h = shape.dt();
  const double cap = spectrum.phi_max();

  std::vector<double> z(shape.phi.size());
  auto integral = [&](double amplitude) {
    for (std::size_t k = 0; k < z.size(); ++k) {
      z[k] = zeta(spectrum, std::min(cap, amplitude * shape.phi[k]));
    }
    return simpson(z, h);
  };

  CalibrationResult result;
  result.target = std::numbers::pi * (1.0 + 2.0 * options.k);
  result.max_phase = integral(cap);

  double amplitude = cap;
  if (result.max_phase < result.target) {
    if (options.policy == AmplitudePolicy::strict) {
      throw ConstraintUnreachable(result.max_phase, result.target);
    }
  } else {
    double lo = 0.0;
    double hi = cap;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double value = integral(mid);
      amplitude = mid;
      if (std::abs(value - result.target) <= 0.1 * options.tolerance) break;
      (value < result.target ? lo : hi) = mid;
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
  }

  TrajectoryParams calibrated = params;
  calibrated.amplitude = amplitude;
  result.trajectory = sample_trajectory(calibrated, options.samples);
  result.constraint_value = phase_integral(result.trajectory, spectrum);
  result.residual = result.constraint_value - result.target;
  result.constraint_met = std::abs(result.residual) <= options.tolerance;
  return result;
}

}  // namespace fluxgate
