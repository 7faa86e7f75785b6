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
 * Joint electron (x) cavity dynamics.
 *
 * The propagated equation is, in the interaction picture of the free
 * Hamiltonian (omega = hbar = 1),
 *
 *   d rho/dt = -i [H(t), rho] + gamma (a rho a^dag - {a^dag a, rho}/2),
 *   H(t)     = H_nl + i (g_Q/T) e^{i Delta t} b^dag a - i (conj(g_Q)/T) e^{-i Delta t} b a^dag,
 *
 * for 0 <= t <= T with a rectangular coupling window. The closed-form
 * scattering matrices live in the frame where H_nl is part of the free
 * evolution; frame_align() maps between the two.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feblockade/cavity_models.hpp"
#include "feblockade/electron_ladder.hpp"
#include "feblockade/tensor_core.hpp"

namespace feb {

struct SystemConfig {
  CavityModel model = build_kerr(0.0, 2);
  LadderConfig ladder;
  cplx g_q = 0.0;         ///< dimensionless coupling g L / v
  double T = 1.0;         ///< interaction time omega T
  double delta = 0.0;     ///< q0 v - omega
  double gamma = 0.0;     ///< photon loss rate / omega
  double de_over_e = 0.0; ///< electron energy spread; only used by feasibility_check

  void validate() const;
  /// "el" (x) model space.
  TensorSpace joint_space() const;
};

struct IntegratorConfig {
  int steps = 0;              ///< fixed step count; 0 derives it from step_factor
  double step_factor = 0.05;  ///< bound on dt * (fastest rate in the rotating frame)
  int min_steps = 100;
  double trace_drift_bound = 1e-8;
  double cutoff_bound = 1e-6;  ///< population allowed in the top two photon levels
  double wrap_bound = 1e-8;    ///< population allowed within 2 rungs of the ladder seam
  bool check_wrap = true;
  int record_every = 0;        ///< store a trajectory point every this many steps

  void validate() const;
};

struct Evolution;

/// Density matrix on "el" (x) cavity stored by conserved charge.
///
/// b^dag a and the loss operator a both respect c = (rung + excitation) mod D,
/// so rho splits into D x D blocks rho_{c,c'} of cavity size, and only the
/// diagonals c - c' = const that are present initially are ever populated.
/// Each block is indexed by local cavity basis states; the rung is implied
/// by l = c - excitation.
class SectorDensity {
 public:
  static SectorDensity from_dense(const DensityMatrix& rho, const SystemConfig& cfg);
  /// |l0><l0| (x) |v><v| for a normalized local cavity vector v of definite
  /// excitation number.
  static SectorDensity product(const SystemConfig& cfg, const Vector& cavity_state);

  DensityMatrix to_dense() const;

  const TensorSpace& joint_space() const { return joint_; }
  int ladder_dim() const { return D_; }
  int local_dim() const { return s_; }
  const std::vector<int>& diagonals() const { return diagonals_; }
  /// Block rho_{c, c-d} for diagonal offset d.
  const Matrix& block(int d, int c) const;

  cplx trace() const;
  /// Diagonal of the reduced electron state, indexed by rung.
  std::vector<double> ladder_populations() const;
  /// Electron traced out.
  DensityMatrix cavity_state() const;
  /// <psi|rho|psi> for psi on the joint space.
  double overlap(const StateVector& psi) const;
  double min_eigenvalue() const;
  /// Total population of basis states selected by `pred(rung, local index)`.
  template <class Pred>
  double population_where(Pred pred) const;

  /// V rho V^dag for V acting on the cavity; V must conserve excitation.
  SectorDensity transformed(const Matrix& local) const;

 private:
  friend Evolution evolve_lindblad(const SectorDensity&, const SystemConfig&, const IntegratorConfig&);

  int index_of(int d) const;
  std::size_t joint_index(int c, int j) const;

  TensorSpace joint_;
  int D_ = 0;
  int s_ = 0;
  std::vector<int> exc_;
  std::vector<int> diagonals_;
  std::vector<std::vector<Matrix>> blocks_;
};

template <class Pred>
double SectorDensity::population_where(Pred pred) const {
  const int di = index_of(0);
  double acc = 0.0;
  for (int c = 0; c < D_; ++c) {
    const Matrix& b = blocks_[static_cast<std::size_t>(di)][static_cast<std::size_t>(c)];
    for (int j = 0; j < s_; ++j) {
      const int l = ((c - exc_[static_cast<std::size_t>(j)]) % D_ + D_) % D_;
      if (pred(l, j)) acc += b(j, j).real();
    }
  }
  return acc;
}

struct EvolutionDiagnostics {
  int steps = 0;
  double dt = 0.0;
  double trace_drift = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double cutoff_population = 0.0;  ///< maximum seen over the run
  double wrap_population = 0.0;    ///< maximum seen over the run
};

struct TrajectoryPoint {
  double t = 0.0;
  SectorDensity state;
};

struct Evolution {
  SectorDensity state;  ///< rho(T), interaction picture of the propagated equation
  EvolutionDiagnostics diagnostics;
  std::vector<TrajectoryPoint> trajectory;

  DensityMatrix rho() const { return state.to_dense(); }
};

/// Hermitian, dense, on cfg.joint_space().
Operator interaction_hamiltonian(double t, const SystemConfig& cfg);

/// Number of RK4 steps evolve_lindblad() will take.
int step_count(const SystemConfig& cfg, const IntegratorConfig& icfg);

/// Fixed-step RK4 propagation over [0, T]. Throws NumericalError on trace
/// drift, lost positivity, cutoff population or ladder wrap-around
/// population beyond the configured bounds.
Evolution evolve_lindblad(const DensityMatrix& rho0, const SystemConfig& cfg, const IntegratorConfig& icfg);
Evolution evolve_lindblad(const SectorDensity& rho0, const SystemConfig& cfg, const IntegratorConfig& icfg);

/// |l0><l0| (x) |level><level| with `level` a polariton label.
DensityMatrix initial_state(const SystemConfig& cfg, const std::string& level);
SectorDensity initial_sector_state(const SystemConfig& cfg, const std::string& level);

/// exp(g_Q b^dag a - g_Q^* b a^dag) on a space "el" (x) "cav" [(x) "atom"].
Operator scattering_linear(cplx g_q, const TensorSpace& joint);

/// cos|W| on span{|lower>, |upper>} (x) ladder,
/// -i sin|W| (e^{i arg W} b (x) |upper><lower| + h.c.), identity elsewhere.
/// `lower`/`upper` are orthonormal vectors in `local`; result lives on
/// "el" (x) local.
Operator scattering_blockade(cplx omega, const Vector& lower, const Vector& upper, const TensorSpace& local,
                             const LadderConfig& ladder);
/// Same, for a consecutive same-branch pair of polariton levels.
Operator scattering_blockade(cplx omega, const PolaritonBasis& basis, const std::string& lower,
                             const std::string& upper, const LadderConfig& ladder);

/// e^{+i H_nl t} rho e^{-i H_nl t}, with t = cfg.T unless given.
DensityMatrix frame_align(const DensityMatrix& rho, const SystemConfig& cfg);
DensityMatrix frame_align(const DensityMatrix& rho, const SystemConfig& cfg, double t);
SectorDensity frame_align(const SectorDensity& rho, const SystemConfig& cfg);
SectorDensity frame_align(const SectorDensity& rho, const SystemConfig& cfg, double t);

struct FeasibilityReport {
  double dw_pm = 0.0;  ///< phase-matching bandwidth / omega = 1 / (omega T)
  double gamma = 0.0;
  double de_over_e = 0.0;
  double kappa = 0.0;
  double margin = 10.0;
  bool loss_ok = false;          ///< gamma < dw_pm / margin
  bool energy_spread_ok = false; ///< dE/E < dw_pm / margin
  bool nonlinearity_ok = false;  ///< dw_pm < kappa / margin

  bool pass() const { return loss_ok && energy_spread_ok && nonlinearity_ok; }
};

FeasibilityReport feasibility_check(double dw_pm, double kappa, double gamma, double de_over_e, double margin = 10.0);
FeasibilityReport feasibility_check(const SystemConfig& cfg, double margin = 10.0);

}  // namespace feb
