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

#include "fluxgate/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace fluxgate {

namespace {

struct Assignment {
  std::array<int, kDim> column{};
  double worst_overlap = 1.0;
  bool bijective = true;
};

Assignment greedy_match(const Matrix9d& previous, const Matrix9d& current) {
  const Matrix9d overlap = (previous.transpose() * current).cwiseAbs();
  Assignment a;
  std::array<bool, kDim> taken{};
  for (int label = 0; label < kDim; ++label) {
    Eigen::Index best = 0;
    overlap.row(label).maxCoeff(&best);
    a.column[label] = static_cast<int>(best);
    a.worst_overlap = std::min(a.worst_overlap, overlap(label, best));
    if (taken[best]) a.bijective = false;
    taken[best] = true;
  }
  return a;
}

LabeledEigensystem relabel(double phi, const Eigen::SelfAdjointEigenSolver<Matrix9d>& solver,
                           const Assignment& a, const Matrix9d& previous) {
  LabeledEigensystem out;
  out.phi = phi;
  for (int label = 0; label < kDim; ++label) {
    const int c = a.column[label];
    out.energies(label) = solver.eigenvalues()(c);
    Eigen::Matrix<double, kDim, 1> v = solver.eigenvectors().col(c);
    if (v.dot(previous.col(label)) < 0.0) v = -v;  // fix the sign for continuity
    out.vectors.col(label) = v;
  }
  return out;
}

LabeledEigensystem initial_labels(const DeviceParams& params) {
  Eigen::SelfAdjointEigenSolver<Matrix9d> solver(hamiltonian_real(params, FluxPoint(0.0)));
  const Matrix9d identity = Matrix9d::Identity();
  const Assignment a = greedy_match(identity, solver.eigenvectors());
  if (!a.bijective) throw TrackingError("ambiguous bare-state labels at zero flux");
  return relabel(0.0, solver, a, identity);
}

// Continues `from` to `phi_to`, appending accepted intermediate samples to `out`.
void continue_labels(const DeviceParams& params, const TrackingOptions& options,
                     const LabeledEigensystem& from, double phi_to,
                     std::vector<LabeledEigensystem>& out) {
  LabeledEigensystem current = from;
  double h = phi_to - from.phi;
  const double direction = h >= 0.0 ? 1.0 : -1.0;
  while (direction * (phi_to - current.phi) > 0.0) {
    h = direction * std::min(std::abs(h), std::abs(phi_to - current.phi));
    const double next = std::abs(phi_to - current.phi - h) < 1e-15 ? phi_to : current.phi + h;
    Eigen::SelfAdjointEigenSolver<Matrix9d> solver(hamiltonian_real(params, FluxPoint(next)));
    const Assignment a = greedy_match(current.vectors, solver.eigenvectors());
    const bool good = a.bijective && a.worst_overlap >= options.min_overlap;
    if (!good && std::abs(h) > options.min_step) {
      h *= 0.5;
      continue;
    }
    if (!a.bijective) {
      throw TrackingError("label assignment ambiguous near phi = " + std::to_string(next));
    }
    current = relabel(next, solver, a, current.vectors);
    out.push_back(current);
    h *= 2.0;
  }
}

}  // namespace

TrackedSpectrum::TrackedSpectrum(DeviceParams params, std::vector<LabeledEigensystem> samples,
                                 TrackingOptions options)
    : params_(params), options_(options), samples_(std::move(samples)) {
  if (samples_.size() < 2) throw DomainError("a tracked spectrum needs at least two samples");
  phi_.reserve(samples_.size());
  for (const auto& s : samples_) phi_.push_back(s.phi);
  for (int label = 0; label < kDim; ++label) {
    auto& curve = curves_[label];
    curve.reserve(samples_.size());
    for (const auto& s : samples_) curve.push_back(s.energies(label));
    interpolants_[label] = MonotoneCubic(phi_, curve);
  }
}

double TrackedSpectrum::omega(BasisLabel label, double phi) const {
  return interpolants_.at(label.index())(phi);
}

std::size_t TrackedSpectrum::nearest_sample(double phi) const {
  auto it = std::lower_bound(phi_.begin(), phi_.end(), phi);
  if (it == phi_.end()) return phi_.size() - 1;
  const std::size_t k = static_cast<std::size_t>(std::distance(phi_.begin(), it));
  if (k > 0 && std::abs(phi_[k - 1] - phi) < std::abs(phi_[k] - phi)) return k - 1;
  return k;
}

TrackedSpectrum track_spectrum(const DeviceParams& params, double phi_max, std::size_t steps,
                               TrackingOptions options) {
  params.validate();
  if (!(phi_max > 0.0 && phi_max < std::numbers::pi / 2.0)) {
    throw DomainError("phi_max must lie in (0, pi/2)");
  }
  if (steps < 2) throw DomainError("tracking needs at least two steps");
  std::vector<LabeledEigensystem> samples;
  samples.reserve(steps + 1);
  samples.push_back(initial_labels(params));
  const std::vector<double> grid = linspace(0.0, phi_max, steps + 1);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const LabeledEigensystem from = samples.back();
    continue_labels(params, options, from, grid[k], samples);
  }
  return TrackedSpectrum(params, std::move(samples), options);
}

LabeledEigensystem labeled_eigensystem(const TrackedSpectrum& spectrum, double phi) {
  const std::size_t k = spectrum.nearest_sample(phi);
  const LabeledEigensystem& anchor = spectrum.sample(k);
  if (anchor.phi == phi) return anchor;
  std::vector<LabeledEigensystem> path;
  continue_labels(spectrum.params(), spectrum.options(), anchor, phi, path);
  return path.back();
}

double delta_ij(const TrackedSpectrum& spectrum, BasisLabel label, double phi) {
  return spectrum.energies(label).front() - spectrum.omega(label, phi);
}

double zeta(const TrackedSpectrum& spectrum, double phi) {
  return delta_ij(spectrum, {1, 1}, phi) - delta_ij(spectrum, {1, 0}, phi) -
         delta_ij(spectrum, {0, 1}, phi);
}

Slope dzeta_dphi(const TrackedSpectrum& spectrum, double phi, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  const double lo = spectrum.phi_grid().front();
  const double hi = spectrum.phi_max();
  if (phi < lo || phi > hi) throw DomainError("flux outside tracked range");
  auto z = [&](double x) { return zeta(spectrum, x); };
  if (phi - h >= lo && phi + h <= hi) {
    return {(z(phi + h) - z(phi - h)) / (2.0 * h), false};
  }
  if (phi - h < lo) {
    return {(-3.0 * z(phi) + 4.0 * z(phi + h) - z(phi + 2.0 * h)) / (2.0 * h), true};
  }
  return {(3.0 * z(phi) - 4.0 * z(phi - h) + z(phi - 2.0 * h)) / (2.0 * h), true};
}

const Crossing& CrossingSet::at(const std::string& name) const {
  for (const auto& c : items) {
    if (c.name == name) return c;
  }
  throw DomainError("unknown crossing: " + name);
}

bool CrossingSet::ordered() const {
  for (const auto& c : items) {
    if (!c.found) return false;
  }
  return at("A2").phi < at("A5").phi && at("A5").phi < at("A3").phi &&
         at("A3").phi < at("A1").phi && at("A1").phi < at("A4").phi;
}

CrossingSet find_crossings(const DeviceParams& params, CrossingSearch search) {
  const TrackedSpectrum spectrum = track_spectrum(params, search.phi_max, search.steps);
  CrossingSet set;
  set.items = {Crossing{"A1", {0, 1}, {1, 0}, 1}, Crossing{"A2", {2, 0}, {1, 1}, 1},
               Crossing{"A3", {1, 1}, {0, 2}, 1}, Crossing{"A4", {2, 0}, {1, 1}, 2},
               Crossing{"A5", {1, 2}, {2, 1}, 1}};
  const auto& grid = spectrum.phi_grid();
  for (auto& c : set.items) {
    const auto& ea = spectrum.energies(c.first);
    const auto& eb = spectrum.energies(c.second);
    int seen = 0;
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
      const double gk = std::abs(ea[k] - eb[k]);
      if (gk < std::abs(ea[k - 1] - eb[k - 1]) && gk <= std::abs(ea[k + 1] - eb[k + 1])) {
        if (++seen < c.occurrence) continue;
        auto gap = [&](double phi) {
          const LabeledEigensystem s = labeled_eigensystem(spectrum, phi);
          return std::abs(s.energies(c.first.index()) - s.energies(c.second.index()));
        };
        const ScalarMinimum m =
            golden_section_minimize(gap, grid[k - 1], grid[k + 1], search.x_tolerance);
        c.found = true;
        c.phi = m.x;
        c.gap = m.value;
        break;
      }
    }
  }
  return set;
}

}  // namespace fluxgate
