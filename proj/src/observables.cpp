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

#include "feblockade/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "feblockade/csv.hpp"
#include "feblockade/errors.hpp"

namespace feb {

Distribution::Distribution(std::vector<std::string> labels, std::vector<double> probabilities)
    : labels_(std::move(labels)), p_(std::move(probabilities)) {
  if (labels_.size() != p_.size()) throw SpaceError("distribution labels and probabilities differ in length");
  if (p_.empty()) throw SpaceError("empty distribution");
  double total = 0.0;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!std::isfinite(p_[i])) throw NumericalError(NumericalError::Kind::Other, "non-finite probability");
    if (p_[i] < -kClipTol) {
      throw NumericalError(NumericalError::Kind::Positivity,
                           "probability of '" + labels_[i] + "' is " + csv::format(p_[i]));
    }
    if (p_[i] < 0.0) {
      clipped_ += -p_[i];
      p_[i] = 0.0;
    }
    total += p_[i];
  }
  if (std::abs(total - 1.0) > kSumTol) {
    throw NumericalError(NumericalError::Kind::TraceDrift, "probabilities sum to " + csv::format(total));
  }
  if (clipped_ > 0.0) {
    for (auto& p : p_) p /= total;
  }
}

double Distribution::at(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return p_[i];
  }
  throw SpaceError("distribution has no entry '" + label + "'");
}

double Distribution::total_variation(const Distribution& other) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    double q = 0.0;
    for (std::size_t j = 0; j < other.labels_.size(); ++j) {
      if (other.labels_[j] == labels_[i]) q = other.p_[j];
    }
    acc += std::abs(p_[i] - q);
  }
  for (std::size_t j = 0; j < other.labels_.size(); ++j) {
    bool seen = false;
    for (const auto& l : labels_) seen = seen || l == other.labels_[j];
    if (!seen) acc += other.p_[j];
  }
  return 0.5 * acc;
}

double Distribution::shannon_entropy() const {
  double h = 0.0;
  for (double p : p_) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

namespace {

std::vector<std::string> cavity_labels(const TensorSpace& space) {
  std::vector<std::string> keep;
  for (const auto& f : space.factors()) {
    if (f.label == labels::kCavity || f.label == labels::kEmitter) keep.push_back(f.label);
  }
  if (keep.empty() || keep.front() != labels::kCavity) throw SpaceError("state has no cavity factor");
  return keep;
}

Distribution diagonal_statistics(const Matrix& rho, const PolaritonBasis& basis) {
  const Matrix& u = basis.unitary.matrix();
  if (u.rows() != rho.rows()) throw SpaceError("polariton basis does not match the cavity space");
  std::vector<double> p(static_cast<std::size_t>(u.cols()));
  for (Eigen::Index k = 0; k < u.cols(); ++k) p[static_cast<std::size_t>(k)] = u.col(k).dot(rho * u.col(k)).real();
  return Distribution(basis.level_labels(), std::move(p));
}

Distribution photon_marginal(const DensityMatrix& cav) {
  const auto& f = cav.space().factors();
  const auto nc = static_cast<Eigen::Index>(f[0].dim);
  const Eigen::Index na = static_cast<Eigen::Index>(cav.dim()) / nc;
  std::vector<double> p(static_cast<std::size_t>(nc), 0.0);
  std::vector<std::string> labels;
  for (Eigen::Index n = 0; n < nc; ++n) {
    labels.push_back(std::to_string(n));
    for (Eigen::Index s = 0; s < na; ++s) p[static_cast<std::size_t>(n)] += cav.matrix()(n * na + s, n * na + s).real();
  }
  return Distribution(std::move(labels), std::move(p));
}

Distribution ladder_distribution(const std::vector<double>& pops, int l0) {
  std::vector<std::string> labels;
  for (std::size_t l = 0; l < pops.size(); ++l) labels.push_back(std::to_string(static_cast<int>(l) - l0));
  return Distribution(std::move(labels), pops);
}

}  // namespace

Distribution eels_spectrum(const DensityMatrix& rho, int l0) {
  const DensityMatrix el = partial_trace(rho, {std::string(labels::kLadder)});
  std::vector<double> pops(el.dim());
  for (std::size_t l = 0; l < el.dim(); ++l) pops[l] = el.matrix()(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)).real();
  return ladder_distribution(pops, l0);
}

Distribution eels_spectrum(const SectorDensity& rho, int l0) { return ladder_distribution(rho.ladder_populations(), l0); }

Distribution polariton_statistics(const DensityMatrix& rho, const PolaritonBasis& basis) {
  const DensityMatrix cav = partial_trace(rho, cavity_labels(rho.space()));
  if (!(cav.space() == basis.unitary.space())) {
    throw SpaceError("polariton basis space " + basis.unitary.space().describe() + " does not match " +
                     cav.space().describe());
  }
  return diagonal_statistics(cav.matrix(), basis);
}

Distribution polariton_statistics(const SectorDensity& rho, const PolaritonBasis& basis) {
  const DensityMatrix cav = rho.cavity_state();
  if (!(cav.space() == basis.unitary.space())) throw SpaceError("polariton basis does not match the cavity space");
  return diagonal_statistics(cav.matrix(), basis);
}

Distribution photon_statistics(const DensityMatrix& rho) {
  return photon_marginal(partial_trace(rho, cavity_labels(rho.space())));
}

Distribution photon_statistics(const SectorDensity& rho) { return photon_marginal(rho.cavity_state()); }

double state_fidelity(const DensityMatrix& rho, const StateVector& psi) {
  if (!(rho.space() == psi.space())) throw SpaceError("fidelity: space mismatch");
  const Vector& v = psi.amplitudes();
  return std::clamp(v.dot(rho.matrix() * v).real(), 0.0, 1.0);
}

double state_fidelity(const SectorDensity& rho, const StateVector& psi) {
  return std::clamp(rho.overlap(psi), 0.0, 1.0);
}

double entanglement_entropy(const DensityMatrix& rho, const std::vector<std::string>& partition) {
  const double purity = rho.purity();
  if (purity < 1.0 - 1e-8) {
    throw SpaceError("entanglement entropy needs a pure state (purity " + csv::format(purity) + ")");
  }
  const DensityMatrix red = partial_trace(rho, partition);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (red.matrix() + red.matrix().adjoint()), Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-300) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double entanglement_entropy(const StateVector& psi, const std::vector<std::string>& partition) {
  return entanglement_entropy(DensityMatrix::pure(psi), partition);
}

Distribution poisson_reference(double mean, int n_max) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw SpaceError("Poisson mean must be finite and nonnegative");
  if (n_max < 0) throw SpaceError("n_max must be nonnegative");
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
  std::vector<std::string> labels;
  for (int n = 0; n <= n_max; ++n) {
    labels.push_back(std::to_string(n));
    p[static_cast<std::size_t>(n)] =
        mean == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= total;
  return Distribution(std::move(labels), std::move(p));
}

void write_distribution_csv(std::ostream& os, const Distribution& dist, const std::string& label_header) {
  double total = 0.0;
  for (double p : dist.probabilities()) total += p;
  if (std::abs(total - 1.0) > Distribution::kSumTol) {
    throw NumericalError(NumericalError::Kind::TraceDrift, "distribution sums to " + csv::format(total));
  }
  csv::write_row(os, {label_header, "probability"});
  for (std::size_t i = 0; i < dist.size(); ++i) csv::write_row(os, {dist.labels()[i], csv::format(dist.probabilities()[i])});
}

}  // namespace feb
