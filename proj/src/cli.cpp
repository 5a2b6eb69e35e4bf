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

#include "fluxgate/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "fluxgate/context.hpp"
#include "fluxgate/evolution.hpp"
#include "fluxgate/io.hpp"
#include "fluxgate/metrics.hpp"
#include "fluxgate/sweep.hpp"
#include "fluxgate/trajectory.hpp"

namespace fluxgate {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalArgs {
  std::string device;
  std::string out_dir = ".";
  std::size_t workers = 1;
};

struct TrajArgs {
  std::string family = "gaussian";
  double sigma = 2.0;
  std::optional<double> mu;
  double tau = 20.0;
  double epsilon = 1e-3;
  int k = 0;
  std::size_t samples = 4001;
  std::string policy = "strict";
  std::optional<double> amplitude;
  std::optional<double> weight;
};

DeviceParams resolve_device(const GlobalArgs& g) {
  std::string source = g.device;
  if (source.empty()) {
    const char* env = std::getenv("FLUXGATE_DEVICE");
    source = env && *env ? env : "default";
  }
  if (source == "default") return DeviceParams::standard();
  return load_device_file(source);
}

void add_traj_options(CLI::App* app, TrajArgs& a) {
  app->add_option("--family", a.family,
                  "gaussian | mollifier | mollified_gaussian | prepulsed_gaussian | "
                  "mollifier_prepulsed_gaussian")
      ->capture_default_str();
  app->add_option("--sigma", a.sigma, "width (ns)")->capture_default_str();
  app->add_option("--mu", a.mu, "center/shift (ns); default tau/2");
  app->add_option("--tau", a.tau, "gate time (ns)")->capture_default_str();
  app->add_option("--epsilon", a.epsilon, "domain start (ns)")->capture_default_str();
  app->add_option("--k", a.k, "phase branch: target pi + 2 pi k")->capture_default_str();
  app->add_option("--samples", a.samples, "time samples")->capture_default_str();
  app->add_option("--policy", a.policy, "strict | saturate (unreachable phase target)")
      ->capture_default_str();
  app->add_option("--amplitude", a.amplitude, "fixed peak flux (rad); skips calibration");
  app->add_option("--prepulse-weight", a.weight, "override the prepulse weight");
}

TrajectoryParams to_params(const TrajArgs& a) {
  TrajectoryParams p;
  p.family = parse_family(a.family);
  p.sigma = a.sigma;
  p.tau = a.tau;
  p.mu = a.mu.value_or(0.5 * a.tau);
  p.epsilon = a.epsilon;
  p.prepulse_weight = a.weight;
  return p;
}

AmplitudePolicy parse_policy(const std::string& s) {
  if (s == "strict") return AmplitudePolicy::strict;
  if (s == "saturate") return AmplitudePolicy::saturate;
  throw UsageError("unknown amplitude policy: " + s);
}

json params_json(const TrajectoryParams& p) {
  json j = {{"family", family_name(p.family)}, {"sigma", p.sigma},   {"mu", p.mu},
            {"tau", p.tau},                    {"epsilon", p.epsilon}, {"amplitude", p.amplitude},
            {"prepulse_weight", p.weight()}};
  return j;
}

TrajectoryParams params_from_json(const json& j) {
  static const std::set<std::string> known = {"family", "sigma", "mu", "tau", "epsilon",
                                              "prepulse_weight", "amplitude"};
  if (!j.is_object()) throw UsageError("each sample must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw UsageError("unknown sample key: " + key);
    if (key != "family" && !value.is_number()) throw UsageError("sample key " + key + " must be numeric");
  }
  if (!j.contains("family") || !j.at("family").is_string()) {
    throw UsageError("sample needs a string 'family'");
  }
  if (!j.contains("sigma") || !j.contains("tau")) throw UsageError("sample needs sigma and tau");
  TrajectoryParams p;
  p.family = parse_family(j.at("family").get<std::string>());
  p.sigma = j.at("sigma").get<double>();
  p.tau = j.at("tau").get<double>();
  p.mu = j.value("mu", 0.5 * p.tau);
  p.epsilon = j.value("epsilon", 1e-3);
  if (j.contains("prepulse_weight")) p.prepulse_weight = j.at("prepulse_weight").get<double>();
  return p;
}

struct Built {
  Trajectory trajectory;
  json info;
};

Built build_trajectory(const TrajectoryParams& params, const TrajArgs& a, const ModelContext& ctx) {
  Built b;
  if (a.amplitude) {
    TrajectoryParams p = params;
    p.amplitude = *a.amplitude;
    if (!(p.amplitude > 0.0 && p.amplitude <= ctx.amplitude_cap())) {
      throw DomainError("amplitude must lie in (0, A2]");
    }
    b.trajectory = sample_trajectory(p, a.samples);
    const double value = phase_integral(b.trajectory, ctx.spectrum());
    b.info = {{"calibrated", false}, {"constraint_value", value}};
  } else {
    CalibrationOptions o;
    o.k = a.k;
    o.samples = a.samples;
    o.policy = parse_policy(a.policy);
    const CalibrationResult cal = calibrate_amplitude(params, ctx.spectrum(), o);
    b.trajectory = cal.trajectory;
    b.info = {{"calibrated", true},
              {"constraint_value", cal.constraint_value},
              {"target", cal.target},
              {"residual", cal.residual},
              {"max_phase", cal.max_phase},
              {"constraint_met", cal.constraint_met}};
  }
  b.info["params"] = params_json(b.trajectory.params);
  b.info["warnings"] = b.trajectory.warnings;
  b.info["amplitude_cap"] = ctx.amplitude_cap();
  return b;
}

std::string trajectory_csv(const Trajectory& t) {
  CsvWriter csv({"t", "phi"});
  for (std::size_t k = 0; k < t.t.size(); ++k) csv.row(std::vector<double>{t.t[k], t.phi[k]});
  return csv.text();
}

json complex_matrix(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json phases_json(const AdiabaticPhases& p) {
  return {{"01", p.theta01}, {"10", p.theta10}, {"11", p.theta11},
          {"conditional", p.conditional()}};
}

json gate_json(const GateReport& g, FidelityMode mode) {
  json basis = json::array();
  for (const auto& l : kGateBasis) basis.push_back(l.name());
  json j = {{"basis", basis},
            {"M", complex_matrix(g.m)},
            {"M_qubit", complex_matrix(g.m_qubit)},
            {"theta_simulated", phases_json(g.theta_simulated)},
            {"leakage_20", g.leakage_20},
            {"unitarity_defect", g.unitarity_defect},
            {"subspace", subspace_name(g.subspace)},
            {"F_raw", g.f_raw},
            {"F_z_corrected", g.f_z_corrected},
            {"F_phase_optimized", g.f_phase_optimized},
            {"fidelity_mode", fidelity_mode_name(mode)}};
  j["F"] = mode == FidelityMode::raw           ? g.f_raw
           : mode == FidelityMode::z_corrected ? g.f_z_corrected
                                               : g.f_phase_optimized;
  j["theta_adiabatic"] = g.theta_adiabatic ? phases_json(*g.theta_adiabatic) : json(nullptr);
  j["theta_predicted"] = g.theta_predicted ? phases_json(*g.theta_predicted) : json(nullptr);
  return j;
}

json crossings_json(const CrossingSet& set) {
  json j = json::object();
  for (const auto& c : set.items) {
    json e = {{"labels", {c.first.name(), c.second.name()}}, {"occurrence", c.occurrence}};
    e["phi"] = c.found ? json(c.phi) : json(nullptr);
    e["gap"] = c.found ? json(c.gap) : json(nullptr);
    j[c.name] = e;
  }
  return j;
}

std::string spectrum_csv(const TrackedSpectrum& s) {
  CsvWriter csv({"phi", "label", "omega_rad_per_ns"});
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (int l = 0; l < kDim; ++l) {
      const BasisLabel label = BasisLabel::from_index(l);
      csv.row(std::vector<std::string>{format_number(s.phi_grid()[k]), label.name(),
                                       format_number(s.energies(label)[k])});
    }
  }
  return csv.text();
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

json metric_json(const MetricReport& r) {
  json j = {{"n_norm", r.n_norm},
            {"constraint_value", r.constraint_value},
            {"leakage_estimate", r.leakage_estimate},
            {"residual_l2", r.residual.l2},
            {"residual_masked", r.residual.masked_count},
            {"residual_masked_inside_support", r.residual.masked_inside_support},
            {"warnings", r.residual.warnings}};
  return j;
}

std::string residual_csv(const ResidualCurve& r) {
  CsvWriter csv({"t", "D"});
  for (std::size_t k = 0; k < r.t.size(); ++k) csv.row(std::vector<double>{r.t[k], r.d[k]});
  return csv.text();
}

json sweep_optimum_json(const SweepResult& r) {
  const SweepPoint& p = r.points.at(*r.argmin);
  json j = {{"family", family_name(r.spec.family)},
            {"mode", sweep_mode_name(r.spec.mode)},
            {"tau", r.spec.tau},
            {"grid_argmin", {{"sigma", p.sigma}, {"mu", p.mu}, {"n_norm", p.n_norm},
                             {"amplitude", p.amplitude}, {"constraint_value", p.constraint_value}}}};
  if (r.refined) {
    j["refined"] = {{"sigma", r.refined->sigma},
                    {"mu", r.refined->mu},
                    {"n_norm", r.refined->n_norm},
                    {"evaluations", r.refined->evaluations},
                    {"aborted", r.refined->aborted}};
  } else {
    j["refined"] = nullptr;
  }
  return j;
}

std::string rank_csv(const RankReport& r) {
  CsvWriter csv({"index", "family", "sigma", "mu", "tau", "included", "amplitude",
                 "constraint_value", "constraint_met", "n_norm", "fidelity", "leakage_20", "note"});
  for (const auto& row : r.rows) {
    std::string note = row.note;
    std::replace(note.begin(), note.end(), ',', ';');
    csv.row(std::vector<std::string>{
        std::to_string(row.index), family_name(row.params.family), format_number(row.params.sigma),
        format_number(row.params.mu), format_number(row.params.tau), row.included ? "true" : "false",
        format_number(row.amplitude), format_number(row.constraint_value),
        row.constraint_met ? "true" : "false", format_number(row.n_norm),
        format_number(row.fidelity), format_number(row.leakage_20), note});
  }
  return csv.text();
}

json rank_summary_json(const RankReport& r, FidelityMode mode, GateSubspace subspace) {
  json j = {{"samples", r.rows.size()},
            {"included", r.included},
            {"concordant", r.concordant},
            {"discordant", r.discordant},
            {"ties_norm", r.ties_norm},
            {"ties_fidelity", r.ties_fidelity},
            {"ties_both", r.ties_both},
            {"fidelity_mode", fidelity_mode_name(mode)},
            {"subspace", subspace_name(subspace)}};
  j["kendall_tau"] = r.kendall_tau ? json(*r.kendall_tau) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// reproduce

struct Manifest {
  json entries = json::object();
};

void reproduce_fig2(const ModelContext& ctx, const fs::path& dir, Manifest& m) {
  constexpr double kPhiMax = 1.0;
  constexpr std::size_t kSteps = 4000;
  const TrackedSpectrum wide = track_spectrum(ctx.params(), kPhiMax, kSteps);
  write_text(dir / "spectrum.csv", spectrum_csv(wide));
  CsvWriter sum({"phi", "omega01_plus_omega10", "omega11", "omega20"});
  for (std::size_t k = 0; k < wide.size(); ++k) {
    sum.row(std::vector<double>{wide.phi_grid()[k],
                                wide.energies({0, 1})[k] + wide.energies({1, 0})[k],
                                wide.energies({1, 1})[k], wide.energies({2, 0})[k]});
  }
  write_text(dir / "sum_curve.csv", sum.text());
  write_text(dir / "crossings.json", to_json_text(crossings_json(ctx.crossings())));
  m.entries["fig2"] = {{"phi_max", kPhiMax}, {"steps", kSteps},
                       {"files", {"spectrum.csv", "sum_curve.csv", "crossings.json"}}};
}

std::vector<TrajectoryParams> fig3_params() {
  auto make = [](Family f, double sigma, double mu) {
    TrajectoryParams p;
    p.family = f;
    p.sigma = sigma;
    p.tau = 20.0;
    p.mu = mu;
    return p;
  };
  return {make(Family::gaussian, 2.0, 10.0), make(Family::mollifier, 6.5, 10.0),
          make(Family::mollified_gaussian, 2.5, 4.0), make(Family::prepulsed_gaussian, 1.3, 12.0),
          make(Family::mollifier_prepulsed_gaussian, 2.0, 13.0)};
}

void reproduce_fig3(const ModelContext& ctx, const fs::path& dir, Manifest& m) {
  json listed = json::array();
  int n = 1;
  for (const TrajectoryParams& p : fig3_params()) {
    CalibrationOptions o;
    o.policy = AmplitudePolicy::saturate;
    const CalibrationResult cal = calibrate_amplitude(p, ctx.spectrum(), o);
    const std::string stem = std::to_string(n++) + "_" + family_name(p.family);
    write_text(dir / (stem + ".csv"), trajectory_csv(cal.trajectory));
    json info = params_json(cal.trajectory.params);
    info["file"] = stem + ".csv";
    info["constraint_value"] = cal.constraint_value;
    info["constraint_met"] = cal.constraint_met;
    info["max_phase"] = cal.max_phase;
    info["warnings"] = cal.trajectory.warnings;
    listed.push_back(info);
  }
  m.entries["fig3"] = {{"policy", "saturate"}, {"trajectories", listed}};
}

SweepSpec peak_sweep(Family f, Range sigma, std::optional<Range> mu, double tau,
                     std::size_t workers) {
  SweepSpec s;
  s.family = f;
  s.sigma = sigma;
  s.mu = mu;
  s.tau = tau;
  s.mode = SweepMode::peak_normalized;
  s.peak = 1.0;
  s.workers = workers;
  return s;
}

json sweep_manifest(const SweepSpec& s, const std::string& file) {
  json j = {{"family", family_name(s.family)},
            {"sigma", {s.sigma.lo, s.sigma.hi, s.sigma.n}},
            {"tau", s.tau},
            {"mode", sweep_mode_name(s.mode)},
            {"peak", s.peak},
            {"samples", s.samples},
            {"file", file}};
  j["mu"] = s.mu ? json({s.mu->lo, s.mu->hi, s.mu->n}) : json(nullptr);
  return j;
}

void reproduce_fig4(const ModelContext& ctx, const fs::path& dir, Manifest& m,
                    std::size_t workers) {
  json listed = json::array();
  const std::vector<std::pair<Family, Range>> panels = {
      {Family::gaussian, Range{1.0, 6.0, 26}}, {Family::mollifier, Range{1.5, 10.0, 35}}};
  for (const auto& [family, sigma] : panels) {
    const SweepSpec spec = peak_sweep(family, sigma, std::nullopt, 20.0, workers);
    const SweepResult r = run_sweep(spec, ctx.spectrum());
    const std::string file = family_name(family) + "_norm.csv";
    write_text(dir / file, sweep_csv(r));
    CsvWriter curves({"sigma", "t", "phi"});
    for (double s : sigma.values()) {
      TrajectoryParams p;
      p.family = family;
      p.sigma = s;
      p.tau = 20.0;
      p.amplitude = 1.0;
      const Trajectory t = sample_trajectory(p, 401);
      for (std::size_t k = 0; k < t.t.size(); ++k) curves.row(std::vector<double>{s, t.t[k], t.phi[k]});
    }
    const std::string cfile = family_name(family) + "_curves.csv";
    write_text(dir / cfile, curves.text());
    json e = sweep_manifest(spec, file);
    e["curves"] = cfile;
    listed.push_back(e);
  }
  m.entries["fig4"] = listed;
}

void reproduce_fig5(const ModelContext& ctx, const fs::path& dir, Manifest& m,
                    std::size_t workers) {
  TrajectoryParams p;
  p.sigma = 3.75;
  p.tau = 20.0;
  p.amplitude = ctx.amplitude_cap();
  const Trajectory traj = sample_trajectory(p);
  const ResidualCurve d = el_residual(traj, ctx.spectrum());
  write_text(dir / "residual_gaussian_3.75.csv", residual_csv(d));
  json listed = json::array();
  for (Family f : {Family::mollified_gaussian, Family::prepulsed_gaussian,
                   Family::mollifier_prepulsed_gaussian}) {
    const SweepSpec spec = peak_sweep(f, Range{1.0, 3.0, 9}, Range{4.0, 8.0, 9}, 20.0, workers);
    const SweepResult r = run_sweep(spec, ctx.spectrum());
    const std::string file = family_name(f) + "_heatmap.csv";
    write_text(dir / file, sweep_csv(r));
    listed.push_back(sweep_manifest(spec, file));
  }
  m.entries["fig5"] = {{"residual", {{"family", "gaussian"}, {"sigma", 3.75}, {"tau", 20.0},
                                     {"amplitude", p.amplitude}, {"l2", d.l2},
                                     {"file", "residual_gaussian_3.75.csv"}}},
                       {"heatmaps", listed}};
}

void reproduce_sec5(const ModelContext& ctx, const fs::path& dir, Manifest& m) {
  json listed = json::array();
  for (auto [family, sigma] : std::vector<std::pair<Family, double>>{{Family::gaussian, 3.75},
                                                                     {Family::mollifier, 4.15}}) {
    TrajectoryParams p;
    p.family = family;
    p.sigma = sigma;
    p.tau = 20.0;
    CalibrationOptions o;
    o.policy = AmplitudePolicy::saturate;
    const CalibrationResult cal = calibrate_amplitude(p, ctx.spectrum(), o);
    const GateReport g = simulate(cal.trajectory, ctx.spectrum());
    json j = gate_json(g, FidelityMode::raw);
    j["F_ha"] = {{"raw", fidelity_distance(g, FidelityMode::raw, GateSubspace::ha)},
                 {"z_corrected", fidelity_distance(g, FidelityMode::z_corrected, GateSubspace::ha)},
                 {"phase_optimized",
                  fidelity_distance(g, FidelityMode::phase_optimized, GateSubspace::ha)}};
    j["trajectory"] = params_json(cal.trajectory.params);
    j["constraint_value"] = cal.constraint_value;
    j["constraint_met"] = cal.constraint_met;
    const std::string file = "gate_" + family_name(family) + ".json";
    write_text(dir / file, to_json_text(j));
    json e = params_json(cal.trajectory.params);
    e["file"] = file;
    listed.push_back(e);
  }
  m.entries["sec5-matrices"] = {{"policy", "saturate"}, {"dt", 1e-3}, {"reports", listed}};
}

std::string normalize_id(std::string id, std::optional<int> figure) {
  if (figure) {
    if (!id.empty()) throw UsageError("give either an id or --figure, not both");
    id = "fig" + std::to_string(*figure);
  }
  static const std::set<std::string> ids = {"fig2", "fig3", "fig4", "fig5", "sec5-matrices"};
  if (!ids.count(id)) throw UsageError("unknown reproduce id: '" + id + "'");
  return id;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adiabatic flux-trajectory design for a two-transmon CZ gate", "fluxgate"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalArgs g;
  app.add_option("--device", g.device,
                 "device JSON file or 'default' (env FLUXGATE_DEVICE when omitted)");
  app.add_option("--out-dir", g.out_dir, "directory for multi-file outputs")->capture_default_str();
  app.add_option("--workers", g.workers, "parallel workers")->capture_default_str();

  std::function<int()> action;

  // spectrum
  auto* spectrum_cmd = app.add_subcommand("spectrum", "tracked eigenvalues as CSV");
  std::optional<double> phi_max;
  std::size_t steps = 4000;
  std::string output;
  spectrum_cmd->add_option("--phi-max", phi_max, "upper flux (default A2)");
  spectrum_cmd->add_option("--steps", steps, "uniform tracking intervals")->capture_default_str();
  spectrum_cmd->add_option("--output", output, "output file (default stdout)");
  spectrum_cmd->callback([&] {
    action = [&] {
      const DeviceParams params = resolve_device(g);
      const double top = phi_max ? *phi_max : ModelContext(params, 2).amplitude_cap();
      emit(spectrum_csv(track_spectrum(params, top, steps)), output, out);
      return kExitOk;
    };
  });

  // crossings
  auto* crossings_cmd = app.add_subcommand("crossings", "avoided crossings A1..A5 as JSON");
  crossings_cmd->add_option("--output", output, "output file (default stdout)");
  crossings_cmd->callback([&] {
    action = [&] {
      emit(to_json_text(crossings_json(find_crossings(resolve_device(g)))), output, out);
      return kExitOk;
    };
  });

  // trajectory
  TrajArgs traj;
  std::string prefix = "trajectory";
  auto* trajectory_cmd = app.add_subcommand("trajectory", "calibrated trajectory CSV + JSON");
  add_traj_options(trajectory_cmd, traj);
  trajectory_cmd->add_option("--prefix", prefix, "output file stem in --out-dir")
      ->capture_default_str();
  trajectory_cmd->callback([&] {
    action = [&] {
      const ModelContext ctx(resolve_device(g));
      const Built b = build_trajectory(to_params(traj), traj, ctx);
      const fs::path dir(g.out_dir);
      write_text(dir / (prefix + ".csv"), trajectory_csv(b.trajectory));
      write_text(dir / (prefix + ".json"), to_json_text(b.info));
      out << to_json_text(b.info);
      return kExitOk;
    };
  });

  // metrics
  MetricConfig metric;
  std::string delta_model = "decoupled";
  std::optional<double> fd_step;
  std::string residual_path;
  auto* metrics_cmd = app.add_subcommand("metrics", "N-norm, residual and U_Ev estimate");
  add_traj_options(metrics_cmd, traj);
  metrics_cmd->add_option("--upsilon", metric.upsilon)->capture_default_str();
  metrics_cmd->add_option("--kappa", metric.kappa)->capture_default_str();
  metrics_cmd->add_option("--lambda", metric.lambda)->capture_default_str();
  metrics_cmd->add_option("--fd-step", fd_step, "derivative stencil spacing (ns)");
  metrics_cmd->add_option("--delta-model", delta_model, "decoupled | coupled")
      ->capture_default_str();
  metrics_cmd->add_option("--residual-csv", residual_path, "write t,D samples here");
  metrics_cmd->add_option("--output", output, "output file (default stdout)");
  metrics_cmd->callback([&] {
    action = [&] {
      if (delta_model == "decoupled") {
        metric.delta = DeltaModel::decoupled;
      } else if (delta_model == "coupled") {
        metric.delta = DeltaModel::coupled;
      } else {
        throw UsageError("unknown delta model: " + delta_model);
      }
      metric.fd_step = fd_step;
      const ModelContext ctx(resolve_device(g));
      const Built b = build_trajectory(to_params(traj), traj, ctx);
      const MetricReport r = compute_metrics(b.trajectory, ctx.spectrum(), metric);
      json j = metric_json(r);
      j["trajectory"] = b.info;
      if (!residual_path.empty()) write_text(residual_path, residual_csv(r.residual));
      emit(to_json_text(j), output, out);
      return kExitOk;
    };
  });

  // sweep
  std::string family = "gaussian";
  std::string sigma_range;
  std::string mu_range;
  double tau = 20.0;
  std::string mode = "peak_normalized";
  bool refine = false;
  double peak = 1.0;
  std::size_t samples = 4001;
  int k = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "N-norm over a (sigma, mu) grid");
  sweep_cmd->add_option("--family", family)->capture_default_str();
  sweep_cmd->add_option("--sigma", sigma_range, "lo:hi:n")->required();
  sweep_cmd->add_option("--mu", mu_range, "lo:hi:n (two-parameter families)");
  sweep_cmd->add_option("--tau", tau)->capture_default_str();
  sweep_cmd->add_option("--mode", mode, "peak_normalized | pi_calibrated")->capture_default_str();
  sweep_cmd->add_option("--peak", peak, "peak flux in peak_normalized mode")->capture_default_str();
  sweep_cmd->add_option("--samples", samples)->capture_default_str();
  sweep_cmd->add_option("--k", k)->capture_default_str();
  sweep_cmd->add_flag("--refine", refine, "golden-section refinement of the grid argmin");
  sweep_cmd->callback([&] {
    action = [&] {
      SweepSpec spec;
      spec.family = parse_family(family);
      spec.sigma = Range::parse(sigma_range);
      if (!mu_range.empty()) spec.mu = Range::parse(mu_range);
      spec.tau = tau;
      spec.mode = parse_sweep_mode(mode);
      spec.peak = peak;
      spec.samples = samples;
      spec.calibration.k = k;
      spec.refine = refine;
      spec.workers = g.workers;
      spec.validate();
      const ModelContext ctx(resolve_device(g));
      const SweepResult r = run_sweep(spec, ctx.spectrum());
      const fs::path dir(g.out_dir);
      write_text(dir / "sweep.csv", sweep_csv(r));
      const json opt = sweep_optimum_json(r);
      write_text(dir / "optimum.json", to_json_text(opt));
      out << to_json_text(opt);
      return kExitOk;
    };
  });

  // simulate
  double dt = 1e-3;
  std::string fidelity_mode = "raw";
  std::string subspace = "b8";
  std::string populations;
  auto* simulate_cmd = app.add_subcommand("simulate", "nine-level propagation and gate report");
  add_traj_options(simulate_cmd, traj);
  simulate_cmd->add_option("--dt", dt, "time step (ns)")->capture_default_str();
  simulate_cmd->add_option("--fidelity-mode", fidelity_mode, "raw | z_corrected | phase_optimized")
      ->capture_default_str();
  simulate_cmd->add_option("--subspace", subspace, "b8 | qubit | ha")->capture_default_str();
  simulate_cmd->add_option("--populations-csv", populations,
                           "per-step populations from |1,1> (t,p00..p22)");
  simulate_cmd->add_option("--output", output, "output file (default stdout)");
  simulate_cmd->callback([&] {
    action = [&] {
      const FidelityMode fm = parse_fidelity_mode(fidelity_mode);
      SimulationOptions so;
      so.dt = dt;
      so.subspace = parse_subspace(subspace);
      const ModelContext ctx(resolve_device(g));
      const Built b = build_trajectory(to_params(traj), traj, ctx);
      const GateReport report = simulate(b.trajectory, ctx.spectrum(), so);
      if (!populations.empty()) {
        PopulationTrace trace;
        propagate(b.trajectory, ctx.params(), dt, BasisLabel{1, 1}, 1, trace);
        std::vector<std::string> header{"t"};
        for (int l = 0; l < kDim; ++l) header.push_back("p" + BasisLabel::from_index(l).name());
        CsvWriter csv(header);
        for (std::size_t s = 0; s < trace.t.size(); ++s) {
          std::vector<double> row{trace.t[s]};
          row.insert(row.end(), trace.populations[s].begin(), trace.populations[s].end());
          csv.row(row);
        }
        write_text(populations, csv.text());
      }
      json j = gate_json(report, fm);
      j["trajectory"] = b.info;
      j["dt"] = dt;
      emit(to_json_text(j), output, out);
      return kExitOk;
    };
  });

  // rank-check
  std::string samples_file;
  auto* rank_cmd = app.add_subcommand("rank-check", "N-norm vs gate-distance rank agreement");
  rank_cmd->add_option("--samples-file", samples_file, "JSON list of trajectory parameters")
      ->required();
  rank_cmd->add_option("--policy", traj.policy, "strict | saturate")->capture_default_str();
  rank_cmd->add_option("--dt", dt)->capture_default_str();
  rank_cmd->add_option("--fidelity-mode", fidelity_mode)->capture_default_str();
  rank_cmd->add_option("--subspace", subspace)->capture_default_str();
  rank_cmd->callback([&] {
    action = [&] {
      std::ifstream in(samples_file);
      if (!in) throw UsageError("cannot open samples file: " + samples_file);
      json doc;
      try {
        in >> doc;
      } catch (const json::parse_error& e) {
        throw UsageError(std::string("samples file is not valid JSON: ") + e.what());
      }
      if (!doc.is_array()) throw UsageError("samples file must hold a JSON array");
      std::vector<TrajectoryParams> list;
      for (const auto& item : doc) list.push_back(params_from_json(item));
      RankOptions ro;
      ro.calibration.policy = parse_policy(traj.policy);
      ro.simulation.dt = dt;
      ro.simulation.subspace = parse_subspace(subspace);
      ro.mode = parse_fidelity_mode(fidelity_mode);
      ro.workers = g.workers;
      const ModelContext ctx(resolve_device(g));
      const RankReport r = rank_check(list, ctx.spectrum(), ro);
      const fs::path dir(g.out_dir);
      write_text(dir / "rank.csv", rank_csv(r));
      const json summary = rank_summary_json(r, ro.mode, ro.simulation.subspace);
      write_text(dir / "rank_summary.json", to_json_text(summary));
      out << to_json_text(summary);
      return kExitOk;
    };
  });

  // reproduce
  std::string id;
  std::optional<int> figure;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "canned figure and table pipelines");
  reproduce_cmd->add_option("id", id, "fig2 | fig3 | fig4 | fig5 | sec5-matrices");
  reproduce_cmd->add_option("--figure", figure, "figure number (2-5)");
  reproduce_cmd->callback([&] {
    action = [&] {
      const std::string which = normalize_id(id, figure);
      const ModelContext ctx(resolve_device(g));
      const fs::path dir = fs::path(g.out_dir) / which;
      Manifest m;
      if (which == "fig2") reproduce_fig2(ctx, dir, m);
      if (which == "fig3") reproduce_fig3(ctx, dir, m);
      if (which == "fig4") reproduce_fig4(ctx, dir, m, g.workers);
      if (which == "fig5") reproduce_fig5(ctx, dir, m, g.workers);
      if (which == "sec5-matrices") reproduce_sec5(ctx, dir, m);
      json manifest = {{"id", which},
                       {"device", device_to_json(ctx.params())},
                       {"amplitude_cap", ctx.amplitude_cap()},
                       {"outputs", m.entries}};
      write_text(dir / "MANIFEST", to_json_text(manifest));
      out << "wrote " << (dir / "MANIFEST").string() << "\n";
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (!args.empty()) err << "error: " << e.what() << "\n";
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace fluxgate
