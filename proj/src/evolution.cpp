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

#include "fluxgate/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fluxgate/numerics.hpp"

namespace fluxgate {

namespace {

constexpr double kMaxStepPhase = 0.5;

double unitarity_defect(const Matrix9cd& u) {
  return (u.adjoint() * u - Matrix9cd::Identity()).cwiseAbs().maxCoeff();
}

PropagatorResult propagate_impl(const Trajectory& trajectory, const DeviceParams& params,
                                double dt, std::optional<BasisLabel> initial, std::size_t every,
                                PopulationTrace* trace) {
  params.validate();
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const double tau = trajectory.params.tau;
  const auto steps = static_cast<std::size_t>(std::ceil(tau / dt - 1e-9));
  const double h = tau / static_cast<double>(steps);
  const Complex i{0.0, 1.0};

  Matrix9cd u = Matrix9cd::Identity();
  Matrix9cd step = Matrix9cd::Identity();
  double cached_phi = -1.0;
  auto record = [&](double t) {
    if (!trace) return;
    std::array<double, kDim> p{};
    for (int k = 0; k < kDim; ++k) p[k] = std::norm(u(k, initial->index()));
    trace->t.push_back(t);
    trace->populations.push_back(p);
  };
  record(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double tm = (static_cast<double>(k) + 0.5) * h;
    const double phi = trajectory.phi_at(tm);
    if (phi != cached_phi) {
      Eigen::SelfAdjointEigenSolver<Matrix9d> solver(hamiltonian_real(params, FluxPoint(phi)));
      const Vector9d& lambda = solver.eigenvalues();
      if (lambda.cwiseAbs().maxCoeff() * h > kMaxStepPhase) {
        throw DomainError("time step too large: max |eigenvalue| dt exceeds 0.5 rad");
      }
      const Matrix9cd v = solver.eigenvectors().cast<Complex>();
      Eigen::Matrix<Complex, kDim, 1> phases;
      for (int n = 0; n < kDim; ++n) phases(n) = std::exp(-i * (lambda(n) * h));
      step = v * phases.asDiagonal() * v.adjoint();
      cached_phi = phi;
    }
    u = step * u;
    if (trace && ((k + 1) % every == 0 || k + 1 == steps)) {
      record(static_cast<double>(k + 1) * h);
    }
  }

  PropagatorResult out;
  out.u_lab = u;
  out.dt = h;
  out.steps = steps;
  const Vector9d bare = bare_energies(params, FluxPoint(0.0));
  Eigen::Matrix<Complex, kDim, 1> frame;
  for (int n = 0; n < kDim; ++n) frame(n) = std::exp(i * (bare(n) * tau));
  out.u_rot = frame.asDiagonal() * u;
  out.unitarity_defect = unitarity_defect(u);
  return out;
}

std::vector<int> subspace_indices(GateSubspace subspace) {
  switch (subspace) {
    case GateSubspace::b8: return {0, 1, 2, 3, 4, 5, 6, 7};
    case GateSubspace::qubit: return {0, 1, 2, 3};
    case GateSubspace::ha: return {1, 2, 3};
  }
  return {};
}

double spectral_distance(const Matrix8cd& m, const std::vector<int>& idx) {
  const Matrix8cd cz = cz_extended();
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd diff(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) diff(r, c) = m(idx[r], idx[c]) - cz(idx[r], idx[c]);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
  return svd.singularValues()(0);
}

Matrix8cd z_corrected(const Matrix8cd& m) {
  const double theta01 = std::arg(m(1, 1));
  const double theta10 = std::arg(m(2, 2));
  const Complex i{0.0, 1.0};
  Eigen::Matrix<Complex, 8, 1> z;
  for (int k = 0; k < 8; ++k) {
    const BasisLabel l = kGateBasis[k];
    z(k) = std::exp(-i * (l.i * theta10 + l.j * theta01));
  }
  return z.asDiagonal() * m;
}

}  // namespace

PropagatorResult propagate(const Trajectory& trajectory, const DeviceParams& params, double dt) {
  return propagate_impl(trajectory, params, dt, std::nullopt, 1, nullptr);
}

PropagatorResult propagate(const Trajectory& trajectory, const DeviceParams& params, double dt,
                           BasisLabel initial, std::size_t every, PopulationTrace& trace) {
  if (every == 0) throw DomainError("population stride must be positive");
  return propagate_impl(trajectory, params, dt, initial, every, &trace);
}

AdiabaticPhases adiabatic_phases(const Trajectory& trajectory, const TrackedSpectrum& spectrum) {
  const double h = trajectory.dt();
  auto integral = [&](BasisLabel label) {
    std::vector<double> y(trajectory.phi.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = delta_ij(spectrum, label, trajectory.phi[k]);
    return simpson(y, h);
  };
  return {integral({0, 1}), integral({1, 0}), integral({1, 1})};
}

AdiabaticPhases predicted_frame_phases(const Trajectory& trajectory,
                                       const TrackedSpectrum& spectrum) {
  const AdiabaticPhases theta = adiabatic_phases(trajectory, spectrum);
  const Vector9d bare = bare_energies(spectrum.params(), FluxPoint(0.0));
  const double tau = trajectory.params.tau;
  auto offset = [&](BasisLabel l) {
    return (spectrum.energies(l).front() - bare(l.index())) * tau;
  };
  return {theta.theta01 - offset({0, 1}), theta.theta10 - offset({1, 0}),
          theta.theta11 - offset({1, 1})};
}

std::string fidelity_mode_name(FidelityMode mode) {
  switch (mode) {
    case FidelityMode::raw: return "raw";
    case FidelityMode::z_corrected: return "z_corrected";
    case FidelityMode::phase_optimized: return "phase_optimized";
  }
  return "raw";
}

FidelityMode parse_fidelity_mode(const std::string& name) {
  for (FidelityMode m :
       {FidelityMode::raw, FidelityMode::z_corrected, FidelityMode::phase_optimized}) {
    if (fidelity_mode_name(m) == name) return m;
  }
  throw UsageError("unknown fidelity mode: " + name);
}

std::string subspace_name(GateSubspace subspace) {
  switch (subspace) {
    case GateSubspace::b8: return "b8";
    case GateSubspace::qubit: return "qubit";
    case GateSubspace::ha: return "ha";
  }
  return "b8";
}

GateSubspace parse_subspace(const std::string& name) {
  for (GateSubspace s : {GateSubspace::b8, GateSubspace::qubit, GateSubspace::ha}) {
    if (subspace_name(s) == name) return s;
  }
  throw UsageError("unknown gate subspace: " + name);
}

Matrix8cd cz_extended() {
  Matrix8cd cz = Matrix8cd::Zero();
  for (int k = 0; k < 4; ++k) cz(k, k) = 1.0;
  cz(3, 3) = -1.0;
  return cz;
}

double fidelity_distance(const Matrix8cd& m, FidelityMode mode, GateSubspace subspace) {
  const std::vector<int> idx = subspace_indices(subspace);
  if (mode == FidelityMode::raw) return spectral_distance(m, idx);
  const Matrix8cd corrected = z_corrected(m);
  if (mode == FidelityMode::z_corrected) return spectral_distance(corrected, idx);

  const Complex i{0.0, 1.0};
  auto f = [&](double theta) {
    return spectral_distance(std::exp(i * theta) * corrected, idx);
  };
  constexpr int scan = 360;
  const double step = 2.0 * std::numbers::pi / scan;
  int best = 0;
  double best_value = f(0.0);
  for (int k = 1; k < scan; ++k) {
    const double v = f(k * step);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const ScalarMinimum m_opt =
      golden_section_minimize(f, (best - 1) * step, (best + 1) * step, 1e-12);
  return std::min(best_value, m_opt.value);
}

double fidelity_distance(const GateReport& report, FidelityMode mode, GateSubspace subspace) {
  return fidelity_distance(report.m, mode, subspace);
}

GateReport reconstruct_gate(const PropagatorResult& propagator, GateSubspace subspace) {
  GateReport report;
  for (int f = 0; f < 8; ++f)
    for (int e = 0; e < 8; ++e)
      report.m(f, e) = propagator.u_rot(kGateBasis[f].index(), kGateBasis[e].index());
  report.m_qubit = report.m.topLeftCorner<4, 4>();
  report.theta_simulated = {std::arg(report.m(1, 1)), std::arg(report.m(2, 2)),
                            std::arg(report.m(3, 3))};
  report.leakage_20 =
      std::norm(propagator.u_rot(BasisLabel{2, 0}.index(), BasisLabel{1, 1}.index()));
  report.unitarity_defect = propagator.unitarity_defect;
  report.subspace = subspace;
  report.f_raw = fidelity_distance(report.m, FidelityMode::raw, subspace);
  report.f_z_corrected = fidelity_distance(report.m, FidelityMode::z_corrected, subspace);
  report.f_phase_optimized = fidelity_distance(report.m, FidelityMode::phase_optimized, subspace);
  return report;
}

GateReport simulate(const Trajectory& trajectory, const TrackedSpectrum& spectrum,
                    const SimulationOptions& options) {
  const PropagatorResult prop = propagate(trajectory, spectrum.params(), options.dt);
  GateReport report = reconstruct_gate(prop, options.subspace);
  const double peak = *std::max_element(trajectory.phi.begin(), trajectory.phi.end());
  if (peak <= spectrum.phi_max()) {
    report.theta_adiabatic = adiabatic_phases(trajectory, spectrum);
    report.theta_predicted = predicted_frame_phases(trajectory, spectrum);
  }
  return report;
}

RankReport kendall(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("rank sequences differ in length");
  RankReport r;
  const std::size_t n = x.size();
  r.included = n;
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const int sx = sign(x[a] - x[b]);
      const int sy = sign(y[a] - y[b]);
      if (sx == 0 && sy == 0) {
        ++r.ties_both;
      } else if (sx == 0) {
        ++r.ties_norm;
      } else if (sy == 0) {
        ++r.ties_fidelity;
      } else if (sx == sy) {
        ++r.concordant;
      } else {
        ++r.discordant;
      }
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - (n > 0)) / 2.0;
  const double tx = static_cast<double>(r.ties_norm + r.ties_both);
  const double ty = static_cast<double>(r.ties_fidelity + r.ties_both);
  const double denom = std::sqrt((pairs - tx) * (pairs - ty));
  if (denom > 0.0) {
    r.kendall_tau =
        (static_cast<double>(r.concordant) - static_cast<double>(r.discordant)) / denom;
  }
  return r;
}

RankReport rank_check(const std::vector<TrajectoryParams>& samples,
                      const TrackedSpectrum& spectrum, const RankOptions& options) {
  if (samples.size() < 2) throw DomainError("rank check needs at least two samples");
  std::vector<RankRow> rows(samples.size());
  parallel_for(samples.size(), options.workers, [&](std::size_t k) {
    RankRow& row = rows[k];
    row.index = k;
    row.params = samples[k];
    try {
      const CalibrationResult cal = calibrate_amplitude(samples[k], spectrum, options.calibration);
      row.params = cal.trajectory.params;
      row.amplitude = cal.trajectory.params.amplitude;
      row.constraint_value = cal.constraint_value;
      row.constraint_met = cal.constraint_met;
      row.n_norm = n_norm(cal.trajectory, spectrum, options.metric);
      const GateReport gate = simulate(cal.trajectory, spectrum, options.simulation);
      row.fidelity = fidelity_distance(gate, options.mode, options.simulation.subspace);
      row.leakage_20 = gate.leakage_20;
      row.included = true;
      if (!cal.constraint_met) row.note = "amplitude saturated at the cap";
    } catch (const ConstraintUnreachable& e) {
      row.note = "excluded: constraint unreachable, max phase " + std::to_string(e.achieved());
    } catch (const DomainError& e) {
      row.note = std::string("excluded: ") + e.what();
    }
  });

  std::vector<RankRow> included;
  std::vector<RankRow> excluded;
  for (auto& row : rows) (row.included ? included : excluded).push_back(row);
  std::stable_sort(included.begin(), included.end(), [](const RankRow& a, const RankRow& b) {
    return a.n_norm < b.n_norm || (a.n_norm == b.n_norm && a.index < b.index);
  });
  std::vector<double> norms;
  std::vector<double> fids;
  for (const auto& row : included) {
    norms.push_back(row.n_norm);
    fids.push_back(row.fidelity);
  }
  RankReport report = kendall(norms, fids);
  report.rows = std::move(included);
  report.rows.insert(report.rows.end(), excluded.begin(), excluded.end());
  return report;
}

}  // namespace fluxgate
