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

#include "feblockade/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "feblockade/errors.hpp"

namespace feb {

// ---------------------------------------------------------------------------
// TensorSpace

TensorSpace::TensorSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  dim_ = 1;
  for (const auto& f : factors_) {
    if (f.dim == 0) throw SpaceError("factor '" + f.label + "' has zero dimension");
    if (!seen.insert(f.label).second) throw SpaceError("duplicate factor label '" + f.label + "'");
    dim_ *= f.dim;
  }
}

TensorSpace TensorSpace::single(std::string label, std::size_t dim) {
  return TensorSpace({Factor{std::move(label), dim}});
}

bool TensorSpace::contains(std::string_view label) const {
  return std::any_of(factors_.begin(), factors_.end(), [&](const Factor& f) { return f.label == label; });
}

std::size_t TensorSpace::position(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  throw SpaceError("unknown factor label '" + std::string(label) + "' in space " + describe());
}

std::size_t TensorSpace::factor_dim(std::string_view label) const { return factors_[position(label)].dim; }

TensorSpace TensorSpace::concat(const TensorSpace& other) const {
  auto all = factors_;
  all.insert(all.end(), other.factors_.begin(), other.factors_.end());
  return TensorSpace(std::move(all));
}

TensorSpace TensorSpace::restrict_to(const std::vector<std::string>& keep) const {
  for (const auto& k : keep) (void)position(k);
  std::vector<Factor> out;
  for (const auto& f : factors_) {
    if (std::find(keep.begin(), keep.end(), f.label) != keep.end()) out.push_back(f);
  }
  return TensorSpace(std::move(out));
}

std::vector<std::size_t> TensorSpace::digits(std::size_t index) const {
  std::vector<std::size_t> d(factors_.size());
  for (std::size_t k = factors_.size(); k-- > 0;) {
    d[k] = index % factors_[k].dim;
    index /= factors_[k].dim;
  }
  return d;
}

std::size_t TensorSpace::index(const std::vector<std::size_t>& digits) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < factors_.size(); ++k) idx = idx * factors_[k].dim + digits[k];
  return idx;
}

std::string TensorSpace::describe() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << " x ";
    os << factors_[i].label << ':' << factors_[i].dim;
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Operator

namespace {

void require_same_space(const TensorSpace& a, const TensorSpace& b, const char* what) {
  if (!(a == b)) throw SpaceError(std::string(what) + ": space mismatch " + a.describe() + " vs " + b.describe());
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

Operator::Operator(TensorSpace space, Matrix entries) : space_(std::move(space)), m_(std::move(entries)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (m_.rows() != d || m_.cols() != d) {
    throw SpaceError("operator shape " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) +
                     " does not match space " + space_.describe());
  }
}

Operator Operator::identity(const TensorSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  return Operator(space, Matrix::Identity(d, d));
}

Operator Operator::zero(const TensorSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  return Operator(space, Matrix::Zero(d, d));
}

Operator Operator::adjoint() const { return Operator(space_, m_.adjoint()); }

double Operator::hermiticity_error() const { return max_abs(m_ - m_.adjoint()); }

bool Operator::is_hermitian(double tol) const { return hermiticity_error() <= tol; }

bool Operator::is_unitary(double tol) const {
  const Matrix id = Matrix::Identity(m_.rows(), m_.cols());
  return max_abs(m_ * m_.adjoint() - id) <= tol && max_abs(m_.adjoint() * m_ - id) <= tol;
}

Operator Operator::operator*(const Operator& rhs) const {
  require_same_space(space_, rhs.space_, "operator product");
  return Operator(space_, m_ * rhs.m_);
}

Operator Operator::operator+(const Operator& rhs) const {
  require_same_space(space_, rhs.space_, "operator sum");
  return Operator(space_, m_ + rhs.m_);
}

Operator Operator::operator-(const Operator& rhs) const {
  require_same_space(space_, rhs.space_, "operator difference");
  return Operator(space_, m_ - rhs.m_);
}

Operator Operator::operator*(cplx s) const { return Operator(space_, m_ * s); }

double commutator_norm(const Operator& a, const Operator& b) {
  require_same_space(a.space(), b.space(), "commutator");
  return max_abs(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

double max_abs_diff(const Operator& a, const Operator& b) {
  require_same_space(a.space(), b.space(), "difference");
  return max_abs(a.matrix() - b.matrix());
}

// ---------------------------------------------------------------------------
// States

StateVector::StateVector(TensorSpace space, Vector amplitudes) : space_(std::move(space)), v_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(v_.size()) != space_.dim()) {
    throw SpaceError("state length " + std::to_string(v_.size()) + " does not match space " + space_.describe());
  }
  if (std::abs(v_.norm() - 1.0) > 1e-12) {
    throw SpaceError("state vector is not normalized (norm " + std::to_string(v_.norm()) + ")");
  }
}

StateVector StateVector::normalized(TensorSpace space, Vector amplitudes) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw SpaceError("cannot normalize the zero vector");
  return StateVector(std::move(space), amplitudes / n);
}

StateVector StateVector::basis(TensorSpace space, std::size_t index) {
  if (index >= space.dim()) throw SpaceError("basis index out of range for " + space.describe());
  Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(space), std::move(v));
}

cplx StateVector::inner(const StateVector& other) const {
  require_same_space(space_, other.space_, "inner product");
  return v_.dot(other.v_);
}

DensityMatrix::DensityMatrix(TensorSpace space, Matrix entries, double trace_drift_bound)
    : space_(std::move(space)), m_(std::move(entries)) {
  const auto d = static_cast<Eigen::Index>(space_.dim());
  if (m_.rows() != d || m_.cols() != d) throw SpaceError("density matrix shape does not match " + space_.describe());
  const auto diag = diagnose();
  if (diag.hermiticity_error > kHermitianTol) {
    throw NumericalError(NumericalError::Kind::Hermiticity,
                         "density matrix not Hermitian (" + std::to_string(diag.hermiticity_error) + ")");
  }
  if (diag.trace_drift > trace_drift_bound) {
    throw NumericalError(NumericalError::Kind::TraceDrift,
                         "density matrix trace drift " + std::to_string(diag.trace_drift));
  }
  if (diag.min_eigenvalue < -kPositivityTol) {
    throw NumericalError(NumericalError::Kind::Positivity,
                         "density matrix has eigenvalue " + std::to_string(diag.min_eigenvalue));
  }
}

DensityMatrix DensityMatrix::unchecked(TensorSpace space, Matrix entries) {
  return DensityMatrix(std::move(space), std::move(entries), nullptr);
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.space(), psi.amplitudes() * psi.amplitudes().adjoint(), nullptr);
}

DensityMatrix DensityMatrix::maximally_mixed(const TensorSpace& space) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  return DensityMatrix(space, Matrix::Identity(d, d) / static_cast<double>(d), nullptr);
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityDiagnostics DensityMatrix::diagnose() const {
  DensityDiagnostics out;
  out.hermiticity_error = max_abs(m_ - m_.adjoint());
  out.trace_drift = std::abs(m_.trace() - cplx(1.0, 0.0));
  const Matrix herm = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().size() ? es.eigenvalues().minCoeff() : 0.0;
  return out;
}

DensityMatrix DensityMatrix::conjugated(const Operator& u) const {
  require_same_space(space_, u.space(), "conjugation");
  return DensityMatrix(space_, u.matrix() * m_ * u.matrix().adjoint(), nullptr);
}

// ---------------------------------------------------------------------------
// Algebra

namespace {

Matrix kron_matrix(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

Operator kron(const Operator& a, const Operator& b) {
  return Operator(a.space().concat(b.space()), kron_matrix(a.matrix(), b.matrix()));
}

StateVector kron(const StateVector& a, const StateVector& b) {
  Vector v = kron_matrix(a.amplitudes(), b.amplitudes());
  return StateVector::normalized(a.space().concat(b.space()), std::move(v));
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(a.space().concat(b.space()), kron_matrix(a.matrix(), b.matrix()));
}

Operator embed(const Operator& local, std::string_view target_label, const TensorSpace& space) {
  return embed(local, std::vector<std::string>{std::string(target_label)}, space);
}

Operator embed(const Operator& local, const std::vector<std::string>& target_labels, const TensorSpace& space) {
  const auto& lf = local.space().factors();
  if (lf.size() != target_labels.size()) {
    throw SpaceError("embed: operator has " + std::to_string(lf.size()) + " factors but " +
                     std::to_string(target_labels.size()) + " target labels were given");
  }
  std::vector<std::size_t> pos(target_labels.size());
  for (std::size_t k = 0; k < target_labels.size(); ++k) {
    pos[k] = space.position(target_labels[k]);
    if (space.factors()[pos[k]].dim != lf[k].dim) {
      throw SpaceError("embed: dimension mismatch on factor '" + target_labels[k] + "'");
    }
  }

  const std::size_t n = space.dim();
  const std::size_t nl = local.dim();
  const Matrix& lm = local.matrix();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> digs;
  for (std::size_t col = 0; col < n; ++col) {
    digs = space.digits(col);
    std::size_t local_col = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) local_col = local_col * lf[k].dim + digs[pos[k]];
    for (std::size_t local_row = 0; local_row < nl; ++local_row) {
      const cplx v = lm(static_cast<Eigen::Index>(local_row), static_cast<Eigen::Index>(local_col));
      if (v == cplx(0.0)) continue;
      std::size_t rem = local_row;
      for (std::size_t k = pos.size(); k-- > 0;) {
        digs[pos[k]] = rem % lf[k].dim;
        rem /= lf[k].dim;
      }
      out(static_cast<Eigen::Index>(space.index(digs)), static_cast<Eigen::Index>(col)) = v;
    }
  }
  return Operator(space, std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep_labels) {
  if (keep_labels.empty()) throw SpaceError("partial_trace: keep_labels must be nonempty");
  const TensorSpace& space = rho.space();
  const TensorSpace kept = space.restrict_to(keep_labels);

  std::vector<bool> keep(space.num_factors(), false);
  for (const auto& l : keep_labels) keep[space.position(l)] = true;

  // Split every joint index into (kept index, traced index) once.
  const std::size_t n = space.dim();
  std::vector<std::size_t> kept_idx(n), traced_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = space.digits(i);
    std::size_t ki = 0, ti = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      const std::size_t fd = space.factors()[k].dim;
      if (keep[k]) {
        ki = ki * fd + d[k];
      } else {
        ti = ti * fd + d[k];
      }
    }
    kept_idx[i] = ki;
    traced_idx[i] = ti;
  }

  const auto nk = static_cast<Eigen::Index>(kept.dim());
  Matrix out = Matrix::Zero(nk, nk);
  const Matrix& m = rho.matrix();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (traced_idx[i] != traced_idx[j]) continue;
      out(static_cast<Eigen::Index>(kept_idx[i]), static_cast<Eigen::Index>(kept_idx[j])) +=
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return DensityMatrix::unchecked(kept, std::move(out));
}

cplx expectation(const DensityMatrix& rho, const Operator& op) {
  require_same_space(rho.space(), op.space(), "expectation");
  return (rho.matrix().cwiseProduct(op.matrix().transpose())).sum();
}

}  // namespace feb
