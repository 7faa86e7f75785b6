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

/**
 * @file
 * Scenario configuration and single-point evaluation.
 *
 * Configs are JSON objects with a "schema" field equal to kSchema. Unknown
 * keys are rejected with a ConfigError naming the key path.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "feblockade/dynamics.hpp"
#include "feblockade/gates.hpp"
#include "feblockade/observables.hpp"

namespace feb {

inline constexpr const char* kSchema = "feblock/1";

enum class ScenarioKind { Evolve, SweepKappa, SweepVelocity, SweepGq, FidelityMap, Gates, Feasibility };

std::string to_string(ScenarioKind kind);

struct ModelSpec {
  CavityKind kind = CavityKind::Kerr;
  double kappa = 0.02;
  int n_cut = 0;  ///< 0 selects the smallest adequate cutoff from kAutoCutoffs
};

inline constexpr int kAutoCutoffs[] = {6, 10, 14, 18, 24, 30};

/// How the detuning and interaction time are set.
enum class TuningMode { PhaseMatch, VelocityRatio, Delta };

struct ElectronSpec {
  int D = 65;
  int l0 = -1;                 ///< -1 selects D / 2
  double energy_kev = 200.0;
  double g_q = 1.5707963267948966;
  double g_q_phase = 0.0;
  TuningMode tuning = TuningMode::PhaseMatch;
  std::string phase_match = "1";  ///< upper level of the matched transition
  double velocity_ratio = 1.0;    ///< v / v0
  double delta = 0.0;
  double omega_t = 472.43;        ///< omega T at v = v0
  std::optional<double> length_um;
  std::optional<double> wavelength_nm;
};

struct IntegratorSpec {
  IntegratorConfig base;
  bool step_halving = true;
  double halving_tol = 1e-6;
};

struct GatesSpec {
  int D = 16;
  int random_inputs = 20;
  unsigned seed = 7;
  double tolerance = 1e-9;
  double corrupt_phase = 0.0;
  bool noisy = false;  ///< also propagate cep_rz through the configured cavity
};

struct FeasibilitySpec {
  std::optional<double> dw_pm;  ///< defaults to 1 / (omega T)
  double de_over_e = 1e-5;
  double margin = 10.0;
};

struct MapVariant {
  std::string name;
  nlohmann::json patch;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Evolve;
  ModelSpec model;
  ElectronSpec electron;
  double gamma = 1e-5;
  std::string initial_level = "";  ///< empty selects the ground level
  std::optional<std::string> target_level;
  IntegratorSpec integrator;
  std::vector<double> values;        ///< sweep grid
  std::vector<double> map_kappas;
  std::vector<double> map_gammas;
  std::vector<MapVariant> variants;  ///< fidelity_map: one table per variant
  GatesSpec gates;
  FeasibilitySpec feasibility;
  bool eels_energy = false;
  int workers = 1;
  std::string output = "out";
};

/// Parses and validates; throws ConfigError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Every field after defaults, in a form parse_config accepts.
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Resolved physical parameters of one evaluation.
struct PointSpec {
  ModelSpec model;
  ElectronSpec electron;
  double gamma = 0.0;
  std::string initial_level;
  std::optional<std::string> target_level;
  IntegratorSpec integrator;
};

PointSpec base_point(const ScenarioConfig& cfg);

/// The dynamical system for a point and a given cutoff.
SystemConfig point_system(const PointSpec& p, int n_cut);
/// Detuning and interaction time implied by the electron block.
std::pair<double, double> tuning(const ElectronSpec& e, const CavityModel& model);
double base_omega_t(const ElectronSpec& e);

/// Throws ConfigError if the point cannot be built (bad labels, cutoffs).
void validate_point(const PointSpec& p, const std::string& where);

struct PointResult {
  bool converged = false;
  std::string error;  ///< empty on success
  int n_cut = 0;
  double delta = 0.0;
  double T = 0.0;
  std::optional<Distribution> eels;
  std::optional<Distribution> stats;
  std::optional<double> fidelity;
  EvolutionDiagnostics diagnostics;
  double halving_change = 0.0;  ///< max change of a reported probability
};

/// Propagates one point with cutoff selection and the step-halving gate.
/// Numerical failures are recorded in the result, not thrown.
PointResult run_point(const PointSpec& p);

/// Ideal pure state scattering_blockade(W) |l0>|initial> with W the angle
/// the propagated pass realizes, on the joint space of `sys`.
StateVector blockade_target(const SystemConfig& sys, const std::string& lower, const std::string& upper);

}  // namespace feb
