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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "feblockade/errors.hpp"
#include "feblockade/presets.hpp"
#include "feblockade/scenario.hpp"

using namespace feb;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json minimal(const std::string& scenario) { return {{"schema", kSchema}, {"scenario", scenario}}; }

std::string error_field(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(ScenarioConfig, Defaults) {
  const auto cfg = parse_config(minimal("evolve"));
  EXPECT_EQ(cfg.kind, ScenarioKind::Evolve);
  EXPECT_EQ(cfg.model.kind, CavityKind::Kerr);
  EXPECT_DOUBLE_EQ(cfg.model.kappa, 0.02);
  EXPECT_EQ(cfg.model.n_cut, 0);
  EXPECT_EQ(cfg.electron.D, 65);
  EXPECT_DOUBLE_EQ(cfg.electron.omega_t, 472.43);
  EXPECT_EQ(cfg.initial_level, "0");
  EXPECT_DOUBLE_EQ(cfg.gamma, 1e-5);
  EXPECT_EQ(cfg.workers, 1);
}

TEST(ScenarioConfig, JcDefaults) {
  json j = minimal("evolve");
  j["model"] = {{"type", "jc"}};
  const auto cfg = parse_config(j);
  EXPECT_EQ(cfg.initial_level, "0*");
  EXPECT_EQ(cfg.electron.phase_match, "1+");
}

TEST(ScenarioConfig, ErrorsNameTheField) {
  EXPECT_EQ(error_field({{"scenario", "evolve"}}), "schema");
  EXPECT_EQ(error_field({{"schema", "feblock/0"}, {"scenario", "evolve"}}), "schema");
  EXPECT_EQ(error_field(minimal("bogus")), "scenario");

  json unknown = minimal("evolve");
  unknown["modle"] = json::object();
  EXPECT_EQ(error_field(unknown), "modle");

  json nested = minimal("evolve");
  nested["model"] = {{"kapa", 0.1}};
  EXPECT_EQ(error_field(nested), "model.kapa");

  json cut = minimal("evolve");
  cut["model"] = {{"n_cut", 1}};
  EXPECT_EQ(error_field(cut), "model.n_cut");

  json empty = minimal("sweep_kappa");
  empty["sweep"] = {{"values", json::array()}};
  EXPECT_EQ(error_field(empty), "sweep.values");

  json zero = minimal("sweep_gq");
  zero["sweep"] = {{"start", 0.0}, {"stop", 1.0}, {"count", 0}};
  EXPECT_EQ(error_field(zero), "sweep.count");

  json two = minimal("evolve");
  two["electron"] = {{"phase_match", "1"}, {"delta", 0.1}};
  EXPECT_EQ(error_field(two), "electron");

  json level = minimal("evolve");
  level["initial_level"] = "7+";
  EXPECT_EQ(error_field(level), "initial_level");

  json pair = minimal("evolve");
  pair["model"] = {{"type", "jc"}};
  pair["electron"] = {{"phase_match", "1-"}};
  pair["initial_level"] = "1+";
  pair["target_level"] = "2-";
  EXPECT_EQ(error_field(pair), "target_level");

  json no_match = minimal("evolve");
  no_match["electron"] = {{"phase_match", "0"}};
  EXPECT_EQ(error_field(no_match), "electron.phase_match");

  json stray = minimal("evolve");
  stray["sweep"] = {{"values", {1.0}}};
  EXPECT_EQ(error_field(stray), "sweep");

  json steps = minimal("evolve");
  steps["integrator"] = {{"min_steps", 10}};
  EXPECT_EQ(error_field(steps), "integrator.min_steps");

  json gates = minimal("gates");
  gates["gates"] = {{"D", 10}};
  EXPECT_EQ(error_field(gates), "gates.D");

  json energy = minimal("evolve");
  energy["report"] = {{"eels_energy", true}};
  EXPECT_EQ(error_field(energy), "report.eels_energy");
}

TEST(ScenarioConfig, GridForms) {
  json j = minimal("sweep_gq");
  j["sweep"] = {{"start", 0.0}, {"stop", 1.0}, {"count", 5}};
  const auto cfg = parse_config(j);
  ASSERT_EQ(cfg.values.size(), 5u);
  EXPECT_DOUBLE_EQ(cfg.values[2], 0.5);
  EXPECT_DOUBLE_EQ(cfg.values[4], 1.0);
}

TEST(ScenarioConfig, JsonRoundTrip) {
  for (const auto& name : preset_names()) {
    SCOPED_TRACE(name);
    const auto cfg = parse_config(preset(name));
    const json once = to_json(cfg);
    const json twice = to_json(parse_config(once));
    EXPECT_EQ(once, twice);
  }
}

TEST(ScenarioConfig, LengthAndWavelengthGiveOmegaT) {
  json j = minimal("evolve");
  j["electron"] = {{"length_um", 40.0}, {"wavelength_nm", 532.0}};
  const auto cfg = parse_config(j);
  EXPECT_NEAR(base_omega_t(cfg.electron), 2 * kPi * 40000.0 / 532.0, 1e-12);
  EXPECT_NEAR(base_omega_t(cfg.electron), 472.43, 0.02);
}

TEST(ScenarioTuning, PhaseMatchShiftsVelocityAndTime) {
  const auto kerr = build_kerr(0.02, 6);
  ElectronSpec e;
  e.phase_match = "2";
  auto [delta, T] = tuning(e, kerr);
  EXPECT_NEAR(delta, 2 * 0.02, 1e-15);
  EXPECT_NEAR(T, 472.43 / 1.04, 1e-12);

  const auto jc = build_jc(0.02, 6);
  e.phase_match = "1-";
  std::tie(delta, T) = tuning(e, jc);
  EXPECT_NEAR(delta, -0.02, 1e-15);
  EXPECT_NEAR(T, 472.43 / 0.98, 1e-12);

  e.tuning = TuningMode::VelocityRatio;
  e.velocity_ratio = 1.02;
  std::tie(delta, T) = tuning(e, jc);
  EXPECT_NEAR(delta, 0.02, 1e-15);
  EXPECT_NEAR(T, 472.43 / 1.02, 1e-12);

  e.tuning = TuningMode::Delta;
  e.delta = 0.3;
  std::tie(delta, T) = tuning(e, jc);
  EXPECT_DOUBLE_EQ(delta, 0.3);
  EXPECT_DOUBLE_EQ(T, 472.43);
}

// At Omega = pi/4 the output is an equal superposition, and the targets built
// from -i conj(W) and +i conj(W) are orthogonal; a deep blockade (kappa T = 50)
// must match the first.
TEST(ScenarioTarget, PhaseConventionMatchesDynamics) {
  PointSpec p;
  p.model = {CavityKind::Kerr, 0.1, 6};
  p.electron.D = 17;
  p.electron.omega_t = 500.0;
  p.electron.g_q = kPi / 4;
  p.electron.phase_match = "1";
  p.gamma = 0.0;
  p.initial_level = "0";
  p.integrator.step_halving = false;
  const SystemConfig sys = point_system(p, 6);
  ASSERT_NEAR(sys.model.kappa() * sys.T, 50.0, 1e-9);

  const auto basis = polariton_eigenbasis(sys.model);
  const SectorDensity rho0 = SectorDensity::product(sys, basis.state("0"));
  const Evolution ev = evolve_lindblad(rho0, sys, p.integrator.base);
  const SectorDensity aligned = frame_align(ev.state, sys);

  EXPECT_GE(state_fidelity(aligned, blockade_target(sys, "0", "1")), 0.99);

  const cplx omega = rabi_angle(sys.model, basis, "0", "1", sys.g_q);
  const Operator flipped = scattering_blockade(cplx(0.0, 1.0) * std::conj(omega), basis, "0", "1", sys.ladder);
  const StateVector in = kron(rung_state(sys.ladder.l0, sys.ladder), StateVector(basis.unitary.space(), basis.state("0")));
  const StateVector other = StateVector::normalized(in.space(), flipped.matrix() * in.amplitudes());
  EXPECT_LE(state_fidelity(aligned, other), 0.01);
}

TEST(ScenarioPoint, KerrBlockadePoint) {
  json j = minimal("evolve");
  j["model"] = {{"type", "kerr"}, {"kappa", 0.1}};
  j["electron"] = {{"D", 17}, {"phase_match", "1"}, {"omega_t", 200.0}};
  j["loss"] = {{"gamma", 0.0}};
  j["target_level"] = "1";
  const auto cfg = parse_config(j);
  const PointResult r = run_point(base_point(cfg));
  ASSERT_TRUE(r.converged) << r.error;
  EXPECT_EQ(r.n_cut, kAutoCutoffs[0]);
  EXPECT_GT(r.stats->at("1"), 0.97);
  EXPECT_GT(*r.fidelity, 0.97);
  EXPECT_LE(r.halving_change, 1e-6);
  EXPECT_LE(r.diagnostics.trace_drift, 1e-8);
  EXPECT_NEAR(r.eels->at("-1"), r.stats->at("1"), 1e-6);
}

TEST(ScenarioPoint, CutoffEscalatesInAutoMode) {
  json j = minimal("evolve");
  j["model"] = {{"type", "kerr"}, {"kappa", 0.0}};
  j["electron"] = {{"D", 61}, {"g_q", 2.0}, {"delta", 0.0}, {"omega_t", 50.0}};
  j["loss"] = {{"gamma", 0.0}};
  const PointResult r = run_point(base_point(parse_config(j)));
  ASSERT_TRUE(r.converged) << r.error;
  EXPECT_GT(r.n_cut, kAutoCutoffs[0]);
  EXPECT_NEAR(r.stats->total_variation(poisson_reference(4.0, r.n_cut)), 0.0, 1e-5);
}

TEST(ScenarioPoint, FixedCutoffReportsFailure) {
  json j = minimal("evolve");
  j["model"] = {{"type", "kerr"}, {"kappa", 0.0}, {"n_cut", 2}};
  j["electron"] = {{"D", 21}, {"g_q", 2.0}, {"delta", 0.0}, {"omega_t", 50.0}};
  const PointResult r = run_point(base_point(parse_config(j)));
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.error.empty());
}

TEST(Presets, AllParse) {
  EXPECT_EQ(preset_names().size(), 9u);
  for (const auto& name : preset_names()) {
    SCOPED_TRACE(name);
    EXPECT_NO_THROW(parse_config(preset(name)));
  }
  EXPECT_THROW(preset("fig9"), ConfigError);
}

TEST(Presets, Fig5cHasBothModels) {
  const auto cfg = parse_config(preset("fig5c"));
  ASSERT_EQ(cfg.variants.size(), 2u);
  EXPECT_EQ(cfg.variants[0].name, "kerr");
  EXPECT_EQ(cfg.variants[1].name, "jc");
  EXPECT_EQ(cfg.map_gammas.size(), 4u);
}
