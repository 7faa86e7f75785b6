// Copyright 2026 The feblockade Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "feblockade/electron_ladder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "feblockade/errors.hpp"

namespace feb {

void LadderConfig::validate() const {
  if (D < 3) throw SpaceError("ladder dimension D must be >= 3");
  if (l0 < 0 || l0 >= D) throw SpaceError("ladder center l0 must lie in [0, D)");
}

TensorSpace LadderConfig::factor() const {
  validate();
  return TensorSpace::single(std::string(labels::kLadder), static_cast<std::size_t>(D));
}

Ladder build_ladder(const LadderConfig& cfg) {
  const auto space = cfg.factor();
  Matrix b = Matrix::Zero(cfg.D, cfg.D);
  for (int l = 0; l < cfg.D; ++l) b((l + cfg.D - 1) % cfg.D, l) = 1.0;
  return {space, Operator(space, std::move(b))};
}

StateVector rung_state(int l, const LadderConfig& cfg) {
  if (l < 0 || l >= cfg.D) throw SpaceError("rung " + std::to_string(l) + " outside the ladder");
  return StateVector::basis(cfg.factor(), static_cast<std::size_t>(l));
}

StateVector comb_state(double phi, const LadderConfig& cfg) {
  Vector v(cfg.D);
  const double norm = 1.0 / std::sqrt(static_cast<double>(cfg.D));
  for (int l = 0; l < cfg.D; ++l) v(l) = std::polar(norm, l * phi);
  return StateVector::normalized(cfg.factor(), std::move(v));
}

double energy_to_velocity(double kev) {
  if (!(kev >= 0.0)) throw SpaceError("electron kinetic energy must be nonnegative");
  const double gamma = 1.0 + kev / kElectronRestEnergyKeV;
  return std::sqrt(1.0 - 1.0 / (gamma * gamma));
}

void EnvelopeSamples::validate() const {
  if (z.size() < 2) throw SpaceError("envelope needs at least 2 samples");
  if (z.size() != field.size()) throw SpaceError("envelope positions and field values differ in length");
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (!(z[i] > z[i - 1])) throw SpaceError("envelope positions must be strictly increasing");
  }
}

cplx coupling_from_envelope(const EnvelopeSamples& env, double q) {
  env.validate();
  cplx acc = 0.0;
  cplx prev = std::polar(1.0, -q * env.z[0]) * env.field[0];
  for (std::size_t i = 1; i < env.z.size(); ++i) {
    const cplx cur = std::polar(1.0, -q * env.z[i]) * env.field[i];
    acc += 0.5 * (env.z[i] - env.z[i - 1]) * (prev + cur);
    prev = cur;
  }
  return env.prefactor * acc;
}

EnvelopeSamples read_envelope_csv(const std::filesystem::path& path, double prefactor) {
  std::ifstream in(path);
  if (!in) throw SpaceError("cannot open envelope file " + path.string());
  EnvelopeSamples env;
  env.prefactor = prefactor;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (auto& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream row(line);
    double z = 0, re = 0, im = 0;
    if (!(row >> z >> re >> im)) {
      if (lineno == 1) continue;  // header
      throw SpaceError("malformed envelope row " + std::to_string(lineno) + " in " + path.string());
    }
    env.z.push_back(z);
    env.field.emplace_back(re, im);
  }
  env.validate();
  return env;
}

}  // namespace feb
