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

#include "fluxgate/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fluxgate/io.hpp"
#include "fluxgate/numerics.hpp"

namespace fluxgate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

}  // namespace

void Range::validate(const std::string& what) const {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw UsageError(what + " range needs lo < hi");
  }
  if (n < 2) throw UsageError(what + " range needs at least two points");
}

std::vector<double> Range::values() const { return linspace(lo, hi, n); }

Range Range::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("range must look like lo:hi:n, got '" + text + "'");
  Range r;
  r.lo = parse_double(parts[0]);
  r.hi = parse_double(parts[1]);
  const double n = parse_double(parts[2]);
  if (!(n >= 2.0 && n == std::floor(n))) throw UsageError("range count must be an integer >= 2");
  r.n = static_cast<std::size_t>(n);
  return r;
}

std::string sweep_mode_name(SweepMode mode) {
  return mode == SweepMode::peak_normalized ? "peak_normalized" : "pi_calibrated";
}

SweepMode parse_sweep_mode(const std::string& name) {
  if (name == "peak_normalized") return SweepMode::peak_normalized;
  if (name == "pi_calibrated") return SweepMode::pi_calibrated;
  throw UsageError("unknown sweep mode: " + name);
}

void SweepSpec::validate() const {
  sigma.validate("sigma");
  if (family_uses_mu(family)) {
    if (!mu) throw UsageError("family " + family_name(family) + " needs a mu range");
    mu->validate("mu");
  }
  if (!(std::isfinite(tau) && tau > 0.0)) throw UsageError("tau must be positive");
  if (!(std::isfinite(peak) && peak > 0.0)) throw UsageError("peak must be positive");
  if (samples < 9) throw UsageError("too few time samples");
}

SweepPoint evaluate_point(const SweepSpec& spec, const TrackedSpectrum& spectrum,
                          const MetricConfig& config, double sigma, double mu) {
  SweepPoint p;
  p.sigma = sigma;
  p.mu = mu;
  p.n_norm = kNaN;
  p.constraint_value = kNaN;
  p.amplitude = kNaN;
  TrajectoryParams params;
  params.family = spec.family;
  params.sigma = sigma;
  params.mu = mu;
  params.tau = spec.tau;
  params.epsilon = spec.epsilon;
  try {
    if (spec.mode == SweepMode::pi_calibrated) {
      CalibrationOptions options = spec.calibration;
      options.samples = spec.samples;
      options.policy = AmplitudePolicy::strict;
      const CalibrationResult cal = calibrate_amplitude(params, spectrum, options);
      p.amplitude = cal.trajectory.params.amplitude;
      p.constraint_value = cal.constraint_value;
      p.n_norm = n_norm(cal.trajectory, spectrum, config);
    } else {
      params.amplitude = spec.peak;
      const Trajectory traj = sample_trajectory(params, spec.samples);
      p.amplitude = spec.peak;
      p.n_norm = n_norm(traj, spectrum, config);
      if (spec.peak <= spectrum.phi_max()) p.constraint_value = phase_integral(traj, spectrum);
    }
    p.feasible = std::isfinite(p.n_norm);
  } catch (const ConstraintUnreachable& e) {
    p.constraint_value = e.achieved();
    p.feasible = false;
  } catch (const DomainError&) {
    p.feasible = false;
  }
  return p;
}

SweepResult run_sweep(const SweepSpec& spec, const TrackedSpectrum& spectrum,
                      const MetricConfig& config) {
  spec.validate();
  config.validate();
  const std::vector<double> sigmas = spec.sigma.values();
  const std::vector<double> mus =
      family_uses_mu(spec.family) ? spec.mu->values() : std::vector<double>{0.5 * spec.tau};

  SweepResult result;
  result.spec = spec;
  result.points.resize(sigmas.size() * mus.size());
  parallel_for(result.points.size(), spec.workers, [&](std::size_t k) {
    const double sigma = sigmas[k / mus.size()];
    const double mu = mus[k % mus.size()];
    result.points[k] = evaluate_point(spec, spectrum, config, sigma, mu);
  });

  double max_phase = -kInf;
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const SweepPoint& p = result.points[k];
    if (spec.mode == SweepMode::pi_calibrated && std::isfinite(p.constraint_value)) {
      max_phase = std::max(max_phase, p.feasible ? std::numbers::pi : p.constraint_value);
    }
    if (!p.feasible) continue;
    if (!result.argmin || p.n_norm < result.points[*result.argmin].n_norm) result.argmin = k;
  }
  result.max_phase = max_phase;
  if (!result.argmin) {
    if (spec.mode == SweepMode::pi_calibrated && std::isfinite(max_phase)) {
      throw ConstraintUnreachable(max_phase,
                                  std::numbers::pi * (1.0 + 2.0 * spec.calibration.k));
    }
    throw DomainError("no feasible grid point");
  }
  if (spec.refine) result.refined = refine_optimum(result, spectrum, config);
  return result;
}

RefinedOptimum coordinate_refine(const std::function<double(double, double)>& objective,
                                 double sigma0, double mu0, double f0,
                                 std::array<double, 2> sigma_box,
                                 std::optional<std::array<double, 2>> mu_box, double tol) {
  RefinedOptimum best{sigma0, mu0, f0, 0, false};
  bool aborted = false;
  auto f = [&](double s, double m) {
    ++best.evaluations;
    const double v = objective(s, m);
    if (!std::isfinite(v)) {
      aborted = true;
      return kInf;
    }
    return v;
  };
  for (int cycle = 0; cycle < 50; ++cycle) {
    const double s_before = best.sigma;
    const double m_before = best.mu;
    const ScalarMinimum s = golden_section_minimize(
        [&](double x) { return f(x, best.mu); }, sigma_box[0], sigma_box[1], tol);
    if (aborted) break;
    if (s.value < best.n_norm) {
      best.sigma = s.x;
      best.n_norm = s.value;
    }
    if (mu_box) {
      const ScalarMinimum m = golden_section_minimize(
          [&](double x) { return f(best.sigma, x); }, (*mu_box)[0], (*mu_box)[1], tol);
      if (aborted) break;
      if (m.value < best.n_norm) {
        best.mu = m.x;
        best.n_norm = m.value;
      }
    }
    if (std::abs(best.sigma - s_before) <= tol && std::abs(best.mu - m_before) <= tol) break;
  }
  if (aborted) return RefinedOptimum{sigma0, mu0, f0, best.evaluations, true};
  return best;
}

RefinedOptimum refine_optimum(const SweepResult& result, const TrackedSpectrum& spectrum,
                              const MetricConfig& config) {
  if (!result.argmin) throw DomainError("no feasible grid argmin to refine");
  const SweepSpec& spec = result.spec;
  const SweepPoint& start = result.points[*result.argmin];
  auto box = [](const Range& r, double x) {
    const double cell = (r.hi - r.lo) / static_cast<double>(r.n - 1);
    return std::array<double, 2>{std::max(r.lo, x - cell), std::min(r.hi, x + cell)};
  };
  std::optional<std::array<double, 2>> mu_box;
  if (family_uses_mu(spec.family)) mu_box = box(*spec.mu, start.mu);
  auto objective = [&](double sigma, double mu) {
    const SweepPoint p = evaluate_point(spec, spectrum, config, sigma, mu);
    return p.feasible ? p.n_norm : kNaN;
  };
  return coordinate_refine(objective, start.sigma, start.mu, start.n_norm,
                           box(spec.sigma, start.sigma), mu_box);
}

std::string sweep_csv(const SweepResult& result) {
  CsvWriter csv({"sigma", "mu", "n_norm", "constraint_value", "feasible", "amplitude"});
  for (const SweepPoint& p : result.points) {
    csv.row(std::vector<std::string>{format_number(p.sigma), format_number(p.mu),
                                     format_number(p.n_norm), format_number(p.constraint_value),
                                     p.feasible ? "true" : "false", format_number(p.amplitude)});
  }
  return csv.text();
}

}  // namespace fluxgate
