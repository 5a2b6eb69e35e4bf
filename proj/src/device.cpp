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

#include "fluxgate/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace fluxgate {

namespace {

constexpr double kGHz = kTwoPi;          // GHz -> rad/ns
constexpr double kMHz = kTwoPi * 1e-3;   // MHz -> rad/ns

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

DeviceParams DeviceParams::standard() {
  DeviceParams p;
  p.omega1 = 5.889 * kGHz;
  p.omega2 = 5.031 * kGHz;
  p.alpha1 = -324.3 * kMHz;
  p.alpha2 = -234.7 * kMHz;
  p.g = 24.7 * kMHz;
  return p;
}

DeviceParams DeviceParams::with_coupling(double coupling) const {
  DeviceParams p = *this;
  p.g = coupling;
  return p;
}

void DeviceParams::validate() const {
  if (!finite_all({omega1, omega2, alpha1, alpha2, g})) {
    throw DomainError("device parameters must be finite");
  }
  if (!(omega1 > omega2 && omega2 > 0.0)) {
    throw DomainError("device parameters require omega1 > omega2 > 0");
  }
  if (!(alpha1 < 0.0 && alpha2 < 0.0)) {
    throw DomainError("device parameters require negative anharmonicities");
  }
  if (!(g >= 0.0 && g < std::abs(omega1 - omega2))) {
    throw DomainError("device parameters require 0 <= g < |omega1 - omega2|");
  }
}

DeviceParams device_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw UsageError("device file must contain a JSON object");
  static const std::set<std::string> required = {"omega1_ghz", "omega2_ghz", "alpha1_mhz",
                                                 "alpha2_mhz", "g_mhz"};
  static const std::set<std::string> ignored = {"t1_us", "t2_us"};
  for (const auto& [key, value] : doc.items()) {
    if (required.count(key) == 0 && ignored.count(key) == 0) {
      throw UsageError("unknown device key: " + key);
    }
    auto numeric = [](const nlohmann::json& v) { return v.is_number(); };
    const bool ok = numeric(value) ||
                    (ignored.count(key) && value.is_array() &&
                     std::all_of(value.begin(), value.end(), numeric));
    if (!ok) throw UsageError("device key " + key + " must be numeric");
  }
  for (const auto& key : required) {
    if (!doc.contains(key)) throw UsageError("missing device key: " + key);
  }
  DeviceParams p;
  p.omega1 = doc.at("omega1_ghz").get<double>() * kGHz;
  p.omega2 = doc.at("omega2_ghz").get<double>() * kGHz;
  p.alpha1 = doc.at("alpha1_mhz").get<double>() * kMHz;
  p.alpha2 = doc.at("alpha2_mhz").get<double>() * kMHz;
  p.g = doc.at("g_mhz").get<double>() * kMHz;
  p.validate();
  return p;
}

nlohmann::json device_to_json(const DeviceParams& p) {
  return {{"omega1_ghz", p.omega1 / kGHz}, {"omega2_ghz", p.omega2 / kGHz},
          {"alpha1_mhz", p.alpha1 / kMHz}, {"alpha2_mhz", p.alpha2 / kMHz},
          {"g_mhz", p.g / kMHz}};
}

DeviceParams load_device_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open device file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("device file is not valid JSON: " + std::string(e.what()));
  }
  return device_from_json(doc);
}

FluxPoint::FluxPoint(double phi) : phi_(phi) {
  if (!(phi >= 0.0 && phi < std::numbers::pi / 2.0)) {
    throw DomainError("flux outside [0, pi/2): " + std::to_string(phi));
  }
}

double qubit_frequency(const DeviceParams& params, FluxPoint phi) {
  return (params.omega1 - params.alpha1) * std::sqrt(std::cos(phi.value())) + params.alpha1;
}

double level_frequency(const DeviceParams& params, Transmon transmon, int level, FluxPoint phi) {
  if (level < 0 || level >= kLevels) {
    throw DomainError("level index out of range: " + std::to_string(level));
  }
  const double j = level;
  const bool tuned = transmon == Transmon::first;
  const double omega = tuned ? qubit_frequency(params, phi) : params.omega2;
  const double alpha = tuned ? params.alpha1 : params.alpha2;
  return j * omega + 0.5 * alpha * j * (j - 1.0);
}

double frequency_deviation(const DeviceParams& params, double phi) {
  return (params.omega1 - params.alpha1) * (1.0 - std::sqrt(std::cos(phi)));
}

double frequency_deviation_slope(const DeviceParams& params, double phi) {
  return (params.omega1 - params.alpha1) * std::sin(phi) / (2.0 * std::sqrt(std::cos(phi)));
}

Vector9d bare_energies(const DeviceParams& params, FluxPoint phi) {
  Vector9d e;
  for (int i = 0; i < kLevels; ++i) {
    const double first = level_frequency(params, Transmon::first, i, phi);
    for (int j = 0; j < kLevels; ++j) {
      e(BasisLabel{i, j}.index()) = first + level_frequency(params, Transmon::second, j, phi);
    }
  }
  return e;
}

Matrix9d interaction_hamiltonian(const DeviceParams& params) {
  Eigen::Matrix3d lower = Eigen::Matrix3d::Zero();  // annihilation operator
  lower(0, 1) = 1.0;
  lower(1, 2) = std::sqrt(2.0);
  const Eigen::Matrix3d raise = lower.transpose();
  Matrix9d h = Matrix9d::Zero();
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; j < kLevels; ++j)
      for (int k = 0; k < kLevels; ++k)
        for (int l = 0; l < kLevels; ++l) {
          const double v = lower(i, k) * raise(j, l) + raise(i, k) * lower(j, l);
          h(kLevels * i + j, kLevels * k + l) = params.g * v;
        }
  return h;
}

Matrix9d hamiltonian_real(const DeviceParams& params, FluxPoint phi) {
  Matrix9d h = interaction_hamiltonian(params);
  h.diagonal() += bare_energies(params, phi);
  return h;
}

Matrix9cd build_hamiltonian(const DeviceParams& params, FluxPoint phi) {
  return hamiltonian_real(params, phi).cast<Complex>();
}

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd x;
  x << 0.0, 1.0, 1.0, 0.0;
  return x;
}

Eigen::Matrix3cd gell_mann(int k) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  switch (k) {
    case 1: m(0, 1) = m(1, 0) = 1.0; break;
    case 2: m(0, 1) = -i; m(1, 0) = i; break;
    case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    case 4: m(0, 2) = m(2, 0) = 1.0; break;
    case 5: m(0, 2) = -i; m(2, 0) = i; break;
    case 6: m(1, 2) = m(2, 1) = 1.0; break;
    case 7: m(1, 2) = -i; m(2, 1) = i; break;
    case 8:
      m(0, 0) = m(1, 1) = 1.0 / std::sqrt(3.0);
      m(2, 2) = -2.0 / std::sqrt(3.0);
      break;
    default: throw DomainError("Gell-Mann index must be in 1..8");
  }
  return m;
}

BlockStructureCheck check_block_structure(const DeviceParams& params, double tolerance) {
  const Matrix9cd h = build_hamiltonian(params, FluxPoint(0.0));
  Matrix9cd coupling = h;
  coupling.diagonal().setZero();

  const Vector9d energies = bare_energies(params, FluxPoint(0.0));
  std::array<BasisLabel, 7> order{};
  {
    std::size_t n = 0;
    for (int k = 0; k < kDim; ++k) {
      const BasisLabel label = BasisLabel::from_index(k);
      if (label == BasisLabel{0, 0} || label == BasisLabel{2, 2}) continue;
      order[n++] = label;
    }
    std::stable_sort(order.begin(), order.end(), [&](BasisLabel a, BasisLabel b) {
      return energies(a.index()) < energies(b.index());
    });
  }

  Eigen::Matrix<Complex, 7, 7> restricted;
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) restricted(a, b) = coupling(order[a].index(), order[b].index());

  Eigen::Matrix<Complex, 7, 7> expected = Eigen::Matrix<Complex, 7, 7>::Zero();
  expected.block<2, 2>(0, 0) = params.g * pauli_x();
  expected.block<3, 3>(2, 2) = std::sqrt(2.0) * params.g * (gell_mann(1) + gell_mann(6));
  expected.block<2, 2>(5, 5) = 2.0 * params.g * pauli_x();

  BlockStructureCheck out;
  out.ordering = order;
  out.max_deviation = (restricted - expected).cwiseAbs().maxCoeff();
  out.matches = out.max_deviation <= tolerance;
  return out;
}

}  // namespace fluxgate
