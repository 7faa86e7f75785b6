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

#include "feblockade/cavity_models.hpp"

#include <cmath>

#include "feblockade/errors.hpp"

namespace feb {

namespace {

Matrix lowering(int n_cut) {
  const Eigen::Index d = n_cut + 1;
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

void check_cutoff(int n_cut) {
  if (n_cut < 2) throw SpaceError("photon cutoff must be >= 2 (got " + std::to_string(n_cut) + ")");
}

}  // namespace

std::string to_string(CavityKind kind) { return kind == CavityKind::Kerr ? "kerr" : "jc"; }

const Operator& CavityModel::sigma_plus() const {
  if (kind_ != CavityKind::JC) throw SpaceError("sigma operators exist only for the JC model");
  return sp_;
}
const Operator& CavityModel::sigma_minus() const {
  if (kind_ != CavityKind::JC) throw SpaceError("sigma operators exist only for the JC model");
  return sm_;
}
const Operator& CavityModel::sigma_z() const {
  if (kind_ != CavityKind::JC) throw SpaceError("sigma operators exist only for the JC model");
  return sz_;
}

CavityModel build_kerr(double kappa, int n_cut) {
  check_cutoff(n_cut);
  CavityModel m;
  m.kind_ = CavityKind::Kerr;
  m.kappa_ = kappa;
  m.n_cut_ = n_cut;
  m.space_ = TensorSpace::single(std::string(labels::kCavity), static_cast<std::size_t>(n_cut) + 1);
  const Matrix a = lowering(n_cut);
  const Matrix ad = a.adjoint();
  m.a_ = Operator(m.space_, a);
  m.n_ = Operator(m.space_, ad * a);
  m.exc_ = m.n_;
  m.h_bare_ = m.n_;
  m.h_nl_ = Operator(m.space_, kappa * (ad * ad * a * a));
  for (int n = 0; n <= n_cut; ++n) {
    m.exc_of_.push_back(n);
    m.photon_of_.push_back(n);
  }
  return m;
}

CavityModel build_jc(double kappa, int n_cut) {
  check_cutoff(n_cut);
  CavityModel m;
  m.kind_ = CavityKind::JC;
  m.kappa_ = kappa;
  m.n_cut_ = n_cut;
  const auto cav = TensorSpace::single(std::string(labels::kCavity), static_cast<std::size_t>(n_cut) + 1);
  const auto atom = TensorSpace::single(std::string(labels::kEmitter), 2);
  m.space_ = cav.concat(atom);

  const Operator a_loc(cav, lowering(n_cut));
  Matrix sm = Matrix::Zero(2, 2);
  sm(0, 1) = 1.0;  // |g><e|
  Matrix sz = Matrix::Zero(2, 2);
  sz(0, 0) = -1.0;
  sz(1, 1) = 1.0;

  m.a_ = embed(a_loc, labels::kCavity, m.space_);
  m.sm_ = embed(Operator(atom, sm), labels::kEmitter, m.space_);
  m.sp_ = m.sm_.adjoint();
  m.sz_ = embed(Operator(atom, sz), labels::kEmitter, m.space_);
  m.n_ = m.a_.adjoint() * m.a_;
  m.exc_ = m.n_ + m.sp_ * m.sm_;
  // omega a^dag a + (omega/2) sigma_z + omega/2: ground |0,g> at zero.
  m.h_bare_ = m.n_ + m.sz_ * 0.5 + Operator::identity(m.space_) * 0.5;
  m.h_nl_ = (m.sp_ * m.a_ + m.sm_ * m.a_.adjoint()) * kappa;
  for (int n = 0; n <= n_cut; ++n) {
    for (int s = 0; s < 2; ++s) {
      m.exc_of_.push_back(n + s);
      m.photon_of_.push_back(n);
    }
  }
  return m;
}

CavityModel build_model(CavityKind kind, double kappa, int n_cut) {
  return kind == CavityKind::Kerr ? build_kerr(kappa, n_cut) : build_jc(kappa, n_cut);
}

std::size_t PolaritonBasis::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i].label == label) return i;
  }
  throw SpaceError("unknown polariton level '" + label + "'");
}

Vector PolaritonBasis::state(const std::string& label) const {
  return unitary.matrix().col(static_cast<Eigen::Index>(index_of(label)));
}

std::vector<std::string> PolaritonBasis::level_labels() const {
  std::vector<std::string> out;
  out.reserve(levels.size());
  for (const auto& l : levels) out.push_back(l.label);
  return out;
}

PolaritonBasis polariton_eigenbasis(const CavityModel& model) {
  PolaritonBasis basis;
  const int N = model.n_cut();
  const double k = model.kappa();
  if (model.kind() == CavityKind::Kerr) {
    basis.unitary = Operator::identity(model.space());
    for (int n = 0; n <= N; ++n) {
      const double shift = k * n * (n - 1);
      basis.levels.push_back({std::to_string(n), n, 0, n + shift, shift});
    }
    return basis;
  }

  // Local JC index of |n, s> is 2n + s with s = 0 (g), 1 (e).
  const auto d = static_cast<Eigen::Index>(model.dim());
  Matrix u = Matrix::Zero(d, d);
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Index col = 0;
  u(0, col++) = 1.0;
  basis.levels.push_back({"0*", 0, 0, 0.0, 0.0});
  for (int n = 1; n <= N; ++n) {
    const double split = std::sqrt(static_cast<double>(n)) * k;
    for (int sign : {+1, -1}) {
      u(2 * n, col) = r;
      u(2 * (n - 1) + 1, col) = sign * r;
      ++col;
      basis.levels.push_back({std::to_string(n) + (sign > 0 ? "+" : "-"), n, sign, n + sign * split, sign * split});
    }
  }
  // |N, e> has no partner below the cutoff and stays uncoupled.
  u(2 * N + 1, col) = 1.0;
  basis.levels.push_back({"top_e", N + 1, 0, static_cast<double>(N + 1), 0.0});
  basis.unitary = Operator(model.space(), std::move(u));
  return basis;
}

std::pair<double, double> jc_branch_factors(int n) {
  const double a = std::sqrt(static_cast<double>(n) + 1.0);
  const double b = std::sqrt(static_cast<double>(n));
  return {a + b, a - b};
}

namespace {

/// Same-branch predecessor label, or empty when none exists.
std::string predecessor(const CavityModel& model, const PolaritonLevel& lvl) {
  if (model.kind() == CavityKind::Kerr) return lvl.excitation >= 1 ? std::to_string(lvl.excitation - 1) : "";
  if (lvl.branch == 0) return "";
  if (lvl.excitation == 1) return "0*";
  return std::to_string(lvl.excitation - 1) + (lvl.branch > 0 ? "+" : "-");
}

}  // namespace

double transition_frequency(const CavityModel& model, const std::string& upper_level) {
  const auto basis = polariton_eigenbasis(model);
  const auto& up = basis.level(upper_level);
  const std::string prev = predecessor(model, up);
  if (prev.empty()) throw SpaceError("level '" + upper_level + "' has no same-branch predecessor");
  return up.frequency - basis.level(prev).frequency;
}

bool is_consecutive_pair(const PolaritonBasis& basis, const std::string& lower, const std::string& upper) {
  const auto& lo = basis.level(lower);
  const auto& up = basis.level(upper);
  if (up.excitation != lo.excitation + 1) return false;
  if (up.label == "top_e" || lo.label == "top_e") return false;
  if (lo.branch == 0) return true;  // Kerr rungs, or the JC ground state
  return lo.branch == up.branch;
}

cplx rabi_angle(const CavityModel& model, const PolaritonBasis& basis, const std::string& lower,
                const std::string& upper, cplx g_q) {
  if (!is_consecutive_pair(basis, lower, upper)) {
    throw SpaceError("(" + lower + ", " + upper + ") is not a consecutive same-branch polariton pair");
  }
  const cplx m = basis.state(lower).dot(model.a().matrix() * basis.state(upper));
  return g_q * m;
}

}  // namespace feb
