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
 * Labeled tensor-product Hilbert spaces and the dense complex operator
 * algebra on top of them.
 *
 * Factors are ordered; the leftmost factor is the slowest-varying index of
 * the joint basis (standard Kronecker convention). Everything above this
 * layer addresses factors by label, never by position.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace feb {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Canonical factor labels. Joint spaces are always ordered
/// (electron ladder, path register, cavity photon, emitter, ...).
namespace labels {
inline constexpr std::string_view kLadder = "el";
inline constexpr std::string_view kPath = "path";
inline constexpr std::string_view kCavity = "cav";
inline constexpr std::string_view kEmitter = "atom";
}  // namespace labels

struct Factor {
  std::string label;
  std::size_t dim = 1;

  bool operator==(const Factor&) const = default;
};

class TensorSpace {
 public:
  TensorSpace() = default;
  explicit TensorSpace(std::vector<Factor> factors);

  static TensorSpace single(std::string label, std::size_t dim);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t dim() const { return dim_; }
  std::size_t num_factors() const { return factors_.size(); }

  bool contains(std::string_view label) const;
  /// Position of a factor; throws SpaceError for an unknown label.
  std::size_t position(std::string_view label) const;
  std::size_t factor_dim(std::string_view label) const;

  /// Factors of `*this` followed by those of `other`.
  TensorSpace concat(const TensorSpace& other) const;
  /// The named factors, kept in this space's order.
  TensorSpace restrict_to(const std::vector<std::string>& keep) const;

  /// Mixed-radix digits of a joint basis index, one per factor.
  std::vector<std::size_t> digits(std::size_t index) const;
  std::size_t index(const std::vector<std::size_t>& digits) const;

  std::string describe() const;

  bool operator==(const TensorSpace& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  std::size_t dim_ = 1;
};

class Operator {
 public:
  Operator() = default;
  Operator(TensorSpace space, Matrix entries);

  static Operator identity(const TensorSpace& space);
  static Operator zero(const TensorSpace& space);

  const TensorSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return space_.dim(); }

  Operator adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  bool is_unitary(double tol = 1e-12) const;
  /// max |A - A^dagger|
  double hermiticity_error() const;

  Operator operator*(const Operator& rhs) const;
  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator operator*(cplx s) const;

 private:
  TensorSpace space_;
  Matrix m_;
};

inline Operator operator*(cplx s, const Operator& op) { return op * s; }

/// max |[A, B]| entrywise.
double commutator_norm(const Operator& a, const Operator& b);
/// max |A - B| entrywise; spaces must agree.
double max_abs_diff(const Operator& a, const Operator& b);

class StateVector {
 public:
  StateVector() = default;
  /// Requires unit norm within 1e-12.
  StateVector(TensorSpace space, Vector amplitudes);

  /// Normalizes `amplitudes`; throws SpaceError on a zero vector.
  static StateVector normalized(TensorSpace space, Vector amplitudes);
  static StateVector basis(TensorSpace space, std::size_t index);

  const TensorSpace& space() const { return space_; }
  const Vector& amplitudes() const { return v_; }

  cplx inner(const StateVector& other) const;  // <this|other>

 private:
  TensorSpace space_;
  Vector v_;
};

/// Result of validating a density matrix against its invariants.
struct DensityDiagnostics {
  double hermiticity_error = 0.0;
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
};

class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kDefaultTraceDrift = 1e-8;
  static constexpr double kPositivityTol = 1e-8;

  DensityMatrix() = default;
  /// Validates Hermiticity, trace and positivity; throws NumericalError.
  DensityMatrix(TensorSpace space, Matrix entries, double trace_drift_bound = kDefaultTraceDrift);

  /// Skips validation. For producers that have already established the
  /// invariants (the propagator checks them block-wise).
  static DensityMatrix unchecked(TensorSpace space, Matrix entries);
  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(const TensorSpace& space);

  const TensorSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return space_.dim(); }

  cplx trace() const { return m_.trace(); }
  double purity() const;
  DensityDiagnostics diagnose() const;

  /// U rho U^dagger.
  DensityMatrix conjugated(const Operator& u) const;

 private:
  DensityMatrix(TensorSpace space, Matrix entries, std::nullptr_t) : space_(std::move(space)), m_(std::move(entries)) {}

  TensorSpace space_;
  Matrix m_;
};

/// A (x) B with A's factors leftmost.
Operator kron(const Operator& a, const Operator& b);
StateVector kron(const StateVector& a, const StateVector& b);
DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);

/// Lifts an operator on one factor into `space` (identity elsewhere).
Operator embed(const Operator& local, std::string_view target_label, const TensorSpace& space);
/// Lifts an operator on several factors. `local`'s factors are matched, in
/// order, to `target_labels`.
Operator embed(const Operator& local, const std::vector<std::string>& target_labels, const TensorSpace& space);

/// Reduced state on `keep_labels` (kept in the original factor order).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep_labels);

/// trace(rho O).
cplx expectation(const DensityMatrix& rho, const Operator& op);

}  // namespace feb
