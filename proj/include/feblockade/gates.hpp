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
 * Electron-mediated gates on path (x) ladder (x) polariton qubits.
 *
 * Each polariton qubit is the two-level subspace {|0>, |1>} of one cavity
 * selected by the blockade. The electron carries a path qubit ("path",
 * |E>_0 far from the cavity, |E>_1 near it) and its energy ladder ("el").
 * Polariton factors are labelled "pol1", "pol2".
 */

#pragma once

#include <array>
#include <string>
#include <vector>

#include "feblockade/dynamics.hpp"
#include "feblockade/tensor_core.hpp"

namespace feb {

struct PathRegister {
  static constexpr const char* kLabel = "path";
  TensorSpace space = TensorSpace::single(kLabel, 2);

  Operator projector(int m) const;
};

std::string polariton_label(int qubit);  // "pol1", "pol2"

/// Register layout shared by all gates.
struct GateContext {
  LadderConfig ladder{16, 8, 1.0};  ///< D a multiple of 4 keeps the pi/2 comb exact
  int qubits = 1;

  void validate() const;
  /// path (x) el (x) pol1 [(x) pol2].
  TensorSpace space() const;
  /// el (x) pol<q>.
  TensorSpace branch_space(int qubit) const;
  /// |E>_m (x) |l0> (x) polariton product state.
  StateVector product_state(int path, const std::vector<Vector>& polaritons) const;
};

/// Scattering through the cavity holding `qubit`. When `conditioned_on_path`
/// the |E>_0 branch is left alone.
Operator gate_pass(cplx omega, int qubit, bool conditioned_on_path, const GateContext& ctx);

/// Two pi/2 passes, the second with phase phi, acting on el (x) pol<q>.
/// Equals I_el (x) -(e^{-i phi}|0><0| + e^{i phi}|1><1|).
Operator cep_rz_branch(double phi, const LadderConfig& ladder);
/// The same two passes on the full register, conditioned on the near path.
Operator cep_rz(double phi, int qubit, const GateContext& ctx);

struct TransverseResult {
  Operator polariton;            ///< induced 2x2 unitary, comb-state expectation
  double residual_entropy = 0.0; ///< max electron-polariton entropy over test inputs
  double leakage = 0.0;          ///< 1 - min output overlap with comb (x) polariton
};

/// A pass of angle |Omega| with the electron prepared in comb_state(phi).
/// D phi must be a multiple of 2 pi; throws SpaceError otherwise.
TransverseResult r_transverse(double omega_mag, double phi, const LadderConfig& ladder);

/// Settings left open by the cpe construction.
struct PathPhases {
  double first = 0.0;        ///< phase of the path-conditioned pass
  double second_far = 0.0;   ///< phase of the second pass on output path 0
  double second_near = 0.0;  ///< phase of the second pass on output path 1
  bool lower_to_far = true;  ///< spectrometer sends rungs below l0 to path 0
};

/// Rungs below l0 swap path when `lower_to_far`, rungs above l0 otherwise.
Operator spectrometer(bool lower_to_far, const GateContext& ctx);

/// Pass on the near path, spectrometer, pass on each output path.
/// On |E>_1|l0>(a|0> + b|1>) yields a|0>|E>_0 + b|1>|E>_1 up to global
/// phase with the default settings.
Operator cpe_path(int qubit, const GateContext& ctx, const PathPhases& phases = {});

/// Throws SpaceError unless `psi` has its electron in |E>_1 (x) |l0>.
void require_near_path_input(const StateVector& psi, const GateContext& ctx);

/// Hadamard on the path register.
Operator electron_hadamard(const GateContext& ctx);

/// e^{i eta} on the near path.
Operator path_phase(double eta, const GateContext& ctx);

struct EquivalenceResult {
  bool equivalent = false;
  double phase = 0.0;
  double deviation = 0.0;
};

/// theta = arg tr(V^dag U); equivalent iff max|U - e^{i theta} V| <= tol.
EquivalenceResult equivalence_up_to_phase(const Operator& u, const Operator& v, double tol = 1e-10);

struct CzCalibration {
  PathPhases cpe;
  double eta = 0.0;  ///< near-path phase before the last Hadamard
};

struct CircuitReport {
  std::string name;
  Operator circuit;                 ///< full register
  Operator composed;                ///< induced unitary on pol1 (x) pol2
  Operator target;
  double phase = 0.0;
  double deviation = 0.0;
  double ancilla_fidelity = 0.0;    ///< min over inputs, to |E>_0 (x) |l0>
  double ancilla_entropy = 0.0;     ///< max over inputs
  double unitarity_error = 0.0;     ///< max|W^dag W - I| for the induced map
  int random_inputs = 0;
  CzCalibration calibration;
  int settings_tried = 0;
  double tolerance = 1e-9;

  bool pass() const;
};

struct CzOptions {
  int random_inputs = 20;
  unsigned seed = 7;
  double tolerance = 1e-9;
  /// Added to the C_epZ phase on qubit 2. Nonzero values break the circuit
  /// and are meant for negative-control tests.
  double corrupt_phase = 0.0;
};

/// Builds the circuit for one calibration setting.
Operator cz_circuit(const CzCalibration& cal, const GateContext& ctx, double corrupt_phase = 0.0);

/// cpe_path(1) -> C_epZ(2) -> H_e -> C_epZ(1) -> H_e with the ancilla in
/// |E>_1|l0>, calibrated over the discrete pass phases, spectrometer
/// convention and near-path phase. Reports the first setting meeting the
/// tolerance, or the best one found otherwise.
CircuitReport two_polariton_cz(const GateContext& ctx = {LadderConfig{16, 8, 1.0}, 2},
                               const CzOptions& opts = {});

/// Evaluates a fixed calibration.
CircuitReport evaluate_cz(const CzCalibration& cal, const GateContext& ctx, const CzOptions& opts);

/// Coupling g_Q whose propagated pass reproduces scattering_blockade(omega)
/// on the pair (lower, upper).
cplx pass_coupling(cplx omega, const CavityModel& model, const std::string& lower, const std::string& upper);

struct NoisyGateReport {
  std::vector<double> fidelities;  ///< one per test input
  double mean_fidelity = 0.0;
  double min_fidelity = 0.0;
};

/// Lindblad version of the two cep_rz passes through the cavity of `cfg`
/// (its g_q is ignored). Each pass is propagated and frame-aligned, then
/// compared with the ideal two-pass output for the inputs |0>, |1>,
/// (|0>+|1>)/sqrt2 and (|0>+i|1>)/sqrt2 of the pair.
NoisyGateReport noisy_cep_rz(double phi, const SystemConfig& cfg, const IntegratorConfig& icfg,
                             const std::string& lower, const std::string& upper);

struct IdentityCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;      ///< deviation, entropy or error measured
  double tolerance = 0.0;
  std::string detail;
};

struct GateSuiteOptions {
  LadderConfig ladder{16, 8, 1.0};
  int random_pairs = 20;
  unsigned seed = 11;
  double tolerance = 1e-10;
  CzOptions cz;
};

struct GateSuiteResult {
  std::vector<IdentityCheck> checks;
  CircuitReport cz;

  bool pass() const;
};

/// Unitarity of the scattering matrices, the R_z family, the transverse
/// family, the Hadamard composite, cpe_path, the electron Hadamard, ladder
/// wrap-around and the calibrated controlled-Z.
GateSuiteResult verify_gate_identities(const GateSuiteOptions& opts = {});

}  // namespace feb
