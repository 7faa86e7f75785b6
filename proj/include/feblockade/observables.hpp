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
 * Reported quantities: EELS spectra, polariton statistics, fidelities and
 * entanglement.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "feblockade/cavity_models.hpp"
#include "feblockade/dynamics.hpp"
#include "feblockade/tensor_core.hpp"

namespace feb {

/// A labelled probability distribution.
class Distribution {
 public:
  static constexpr double kSumTol = 1e-8;
  static constexpr double kClipTol = 1e-12;

  Distribution() = default;
  /// Entries in [-kClipTol, 0) are set to zero and the rest renormalized;
  /// anything more negative, or a total off by more than kSumTol, throws
  /// NumericalError.
  Distribution(std::vector<std::string> labels, std::vector<double> probabilities);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& probabilities() const { return p_; }
  std::size_t size() const { return p_.size(); }
  /// Total magnitude removed by clipping.
  double clipped_mass() const { return clipped_; }

  /// Probability of `label`; throws SpaceError if absent.
  double at(const std::string& label) const;
  double total_variation(const Distribution& other) const;
  double shannon_entropy() const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> p_;
  double clipped_ = 0.0;
};

/// Diagonal of the reduced electron state, labelled by l - l0.
Distribution eels_spectrum(const DensityMatrix& rho, int l0);
Distribution eels_spectrum(const SectorDensity& rho, int l0);

/// <u_k| rho_cav |u_k> over the columns of the polariton basis.
Distribution polariton_statistics(const DensityMatrix& rho, const PolaritonBasis& basis);
Distribution polariton_statistics(const SectorDensity& rho, const PolaritonBasis& basis);

/// Probability of each photon number, emitter traced out.
Distribution photon_statistics(const DensityMatrix& rho);
Distribution photon_statistics(const SectorDensity& rho);

/// <psi|rho|psi>.
double state_fidelity(const DensityMatrix& rho, const StateVector& psi);
double state_fidelity(const SectorDensity& rho, const StateVector& psi);

/// Von Neumann entropy (nats) of the reduced state on `partition`. The total
/// state must be pure.
double entanglement_entropy(const DensityMatrix& rho, const std::vector<std::string>& partition);
double entanglement_entropy(const StateVector& psi, const std::vector<std::string>& partition);

/// Poisson(mean) on {0..n_max}, renormalized.
Distribution poisson_reference(double mean, int n_max);

/// Two columns with the given header, 17 significant digits.
void write_distribution_csv(std::ostream& os, const Distribution& dist, const std::string& label_header);

}  // namespace feb
