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
 * The free-electron energy ladder. Rung l carries energy E + (l - l0) hbar
 * omega0. The ladder is cyclic so that b is exactly unitary; dynamical runs
 * guard against population near the wrap-around point instead.
 */

#pragma once

#include <filesystem>
#include <vector>

#include "feblockade/tensor_core.hpp"

namespace feb {

struct LadderConfig {
  int D = 33;
  int l0 = 16;
  double omega0 = 1.0;  ///< sideband quantum q0 v, units of omega

  void validate() const;
  TensorSpace factor() const;
};

struct Ladder {
  TensorSpace space;
  Operator b;  ///< b|l> = |l-1 mod D>
};

Ladder build_ladder(const LadderConfig& cfg);

/// Rung basis state |l>.
StateVector rung_state(int l, const LadderConfig& cfg);

/// sum_l e^{i l phi} |l> / sqrt(D). An exact eigenvector of b when D phi is
/// a multiple of 2 pi.
StateVector comb_state(double phi, const LadderConfig& cfg);

inline constexpr double kElectronRestEnergyKeV = 510.999;

/// v/c for an electron of kinetic energy `kev`.
double energy_to_velocity(double kev);

struct EnvelopeSamples {
  std::vector<double> z;       ///< strictly increasing positions over [0, L]
  std::vector<cplx> field;     ///< longitudinal field E_z(r_T, z)
  double prefactor = 1.0;      ///< e v / (hbar omega)

  void validate() const;
};

/// prefactor * int e^{-i q z} E_z(z) dz by the trapezoidal rule.
cplx coupling_from_envelope(const EnvelopeSamples& env, double q);

/// Reads rows of `z, Re E, Im E` (an optional non-numeric header is skipped).
EnvelopeSamples read_envelope_csv(const std::filesystem::path& path, double prefactor);

}  // namespace feb
