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
 * Nonlinear cavity models: a Kerr oscillator and a resonant Jaynes-Cummings
 * cavity, their polariton eigenbases and level frequencies.
 *
 * Units: hbar = omega = 1. Kerr: H_nl = kappa a^dag a^dag a a on Fock states
 * |0..N>. JC: photon (x) emitter with emitter basis (|g>, |e>), H_nl =
 * kappa (sigma_+ a + sigma_- a^dag), emitter resonant with the cavity.
 */

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "feblockade/tensor_core.hpp"

namespace feb {

enum class CavityKind { Kerr, JC };

std::string to_string(CavityKind kind);

class CavityModel {
 public:
  CavityKind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  int n_cut() const { return n_cut_; }

  /// Local cavity space: "cav" (Kerr) or "cav" x "atom" (JC).
  const TensorSpace& space() const { return space_; }
  std::size_t dim() const { return space_.dim(); }

  const Operator& a() const { return a_; }
  Operator adag() const { return a_.adjoint(); }
  const Operator& h_nl() const { return h_nl_; }
  /// H_p + H_matt, shifted so the ground state has energy 0.
  const Operator& h_bare() const { return h_bare_; }
  /// Photon number a^dag a.
  const Operator& photon_number() const { return n_; }
  /// Conserved excitation number (photons plus emitter excitation).
  const Operator& excitation_number() const { return exc_; }

  /// JC only; throw SpaceError for Kerr.
  const Operator& sigma_plus() const;
  const Operator& sigma_minus() const;
  const Operator& sigma_z() const;

  /// Excitation number of each local basis state.
  const std::vector<int>& excitations() const { return exc_of_; }
  /// Photon number of each local basis state.
  const std::vector<int>& photons() const { return photon_of_; }

 private:
  friend CavityModel build_kerr(double, int);
  friend CavityModel build_jc(double, int);

  CavityKind kind_ = CavityKind::Kerr;
  double kappa_ = 0.0;
  int n_cut_ = 0;
  TensorSpace space_;
  Operator a_, h_nl_, h_bare_, n_, exc_;
  Operator sp_, sm_, sz_;
  std::vector<int> exc_of_, photon_of_;
};

CavityModel build_kerr(double kappa, int n_cut);
CavityModel build_jc(double kappa, int n_cut);
CavityModel build_model(CavityKind kind, double kappa, int n_cut);

struct PolaritonLevel {
  std::string label;  ///< "n" (Kerr); "0*", "n+", "n-", "top_e" (JC)
  int excitation = 0;
  int branch = 0;          ///< +1 upper, -1 lower, 0 ground / Kerr / uncoupled
  double frequency = 0.0;  ///< eigenvalue of h_bare + h_nl
  double nl_shift = 0.0;   ///< eigenvalue of h_nl
};

/// Polariton eigenbasis. Column k of `unitary` is level k expressed in the
/// bare basis; for JC the <g,n| component is real and positive.
struct PolaritonBasis {
  Operator unitary;
  std::vector<PolaritonLevel> levels;

  std::size_t index_of(const std::string& label) const;
  const PolaritonLevel& level(const std::string& label) const { return levels[index_of(label)]; }
  /// Eigenstate of `label` in the local bare basis.
  Vector state(const std::string& label) const;
  std::vector<std::string> level_labels() const;
};

PolaritonBasis polariton_eigenbasis(const CavityModel& model);

/// omega_upper - omega_predecessor within the same branch.
double transition_frequency(const CavityModel& model, const std::string& upper_level);

/// f_{n+} = sqrt(n+1) + sqrt(n), f_{n-} = sqrt(n+1) - sqrt(n).
std::pair<double, double> jc_branch_factors(int n);

/// True when (lower, upper) are consecutive levels of one branch
/// (ground -> first excited of either branch counts).
bool is_consecutive_pair(const PolaritonBasis& basis, const std::string& lower, const std::string& upper);

/// Effective Rabi angle Omega = g_Q <lower|a|upper> for the pair
/// (g_Q for Kerr 0->1, g_Q/sqrt(2) for JC 0*->1+-).
cplx rabi_angle(const CavityModel& model, const PolaritonBasis& basis, const std::string& lower,
                const std::string& upper, cplx g_q);

}  // namespace feb
