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

#include "feblockade/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Sparse>

#include "feblockade/errors.hpp"

namespace feb {

namespace {

constexpr double kSparseTol = 1e-14;

int wrap(int x, int n) { return ((x % n) + n) % n; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Configs

void SystemConfig::validate() const {
  ladder.validate();
  if (!(T > 0.0)) throw SpaceError("interaction time T must be positive");
  if (!(gamma >= 0.0)) throw SpaceError("loss ratio gamma must be nonnegative");
  if (!(std::abs(delta) < 1.0)) throw SpaceError("|delta| must stay below omega");
  if (!std::isfinite(g_q.real()) || !std::isfinite(g_q.imag())) throw SpaceError("g_Q must be finite");
}

TensorSpace SystemConfig::joint_space() const { return ladder.factor().concat(model.space()); }

void IntegratorConfig::validate() const {
  if (steps != 0 && steps < min_steps) {
    throw SpaceError("fixed step count " + std::to_string(steps) + " is below the minimum " +
                     std::to_string(min_steps));
  }
  if (min_steps < 100) throw SpaceError("min_steps must be >= 100");
  if (!(step_factor > 0.0)) throw SpaceError("step_factor must be positive");
  if (!(trace_drift_bound > 0.0)) throw SpaceError("trace_drift_bound must be positive");
}

// ---------------------------------------------------------------------------
// SectorDensity

int SectorDensity::index_of(int d) const {
  const auto it = std::find(diagonals_.begin(), diagonals_.end(), wrap(d, D_));
  if (it == diagonals_.end()) return -1;
  return static_cast<int>(it - diagonals_.begin());
}

std::size_t SectorDensity::joint_index(int c, int j) const {
  const int l = wrap(c - exc_[static_cast<std::size_t>(j)], D_);
  return static_cast<std::size_t>(l) * static_cast<std::size_t>(s_) + static_cast<std::size_t>(j);
}

const Matrix& SectorDensity::block(int d, int c) const {
  const int di = index_of(d);
  if (di < 0) throw SpaceError("sector diagonal " + std::to_string(d) + " is not populated");
  return blocks_[static_cast<std::size_t>(di)][static_cast<std::size_t>(wrap(c, D_))];
}

SectorDensity SectorDensity::from_dense(const DensityMatrix& rho, const SystemConfig& cfg) {
  const auto joint = cfg.joint_space();
  if (!(rho.space() == joint)) {
    throw SpaceError("state space " + rho.space().describe() + " does not match " + joint.describe());
  }
  SectorDensity out;
  out.joint_ = joint;
  out.D_ = cfg.ladder.D;
  out.s_ = static_cast<int>(cfg.model.dim());
  out.exc_ = cfg.model.excitations();

  const int D = out.D_, s = out.s_;
  const Matrix& m = rho.matrix();
  std::vector<int> sector(static_cast<std::size_t>(D * s));
  for (int l = 0; l < D; ++l) {
    for (int j = 0; j < s; ++j) sector[static_cast<std::size_t>(l * s + j)] = wrap(l + out.exc_[j], D);
  }
  std::set<int> ds{0};
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    for (Eigen::Index row = 0; row < m.rows(); ++row) {
      if (m(row, col) != cplx(0.0)) ds.insert(wrap(sector[row] - sector[col], D));
    }
  }
  out.diagonals_.assign(ds.begin(), ds.end());
  out.blocks_.assign(out.diagonals_.size(), std::vector<Matrix>(static_cast<std::size_t>(D), Matrix::Zero(s, s)));
  for (std::size_t di = 0; di < out.diagonals_.size(); ++di) {
    const int d = out.diagonals_[di];
    for (int c = 0; c < D; ++c) {
      Matrix& b = out.blocks_[di][static_cast<std::size_t>(c)];
      for (int j = 0; j < s; ++j) {
        for (int jp = 0; jp < s; ++jp) {
          b(j, jp) = m(static_cast<Eigen::Index>(out.joint_index(c, j)),
                       static_cast<Eigen::Index>(out.joint_index(c - d, jp)));
        }
      }
    }
  }
  return out;
}

SectorDensity SectorDensity::product(const SystemConfig& cfg, const Vector& cavity_state) {
  cfg.ladder.validate();
  SectorDensity out;
  out.joint_ = cfg.joint_space();
  out.D_ = cfg.ladder.D;
  out.s_ = static_cast<int>(cfg.model.dim());
  out.exc_ = cfg.model.excitations();
  if (cavity_state.size() != out.s_) throw SpaceError("cavity state has the wrong dimension");
  if (std::abs(cavity_state.norm() - 1.0) > 1e-12) throw SpaceError("cavity state must be normalized");
  int exc = -1;
  for (int j = 0; j < out.s_; ++j) {
    if (std::abs(cavity_state(j)) == 0.0) continue;
    if (exc >= 0 && exc != out.exc_[j]) throw SpaceError("cavity state must have a definite excitation number");
    exc = out.exc_[j];
  }
  out.diagonals_ = {0};
  out.blocks_.assign(1, std::vector<Matrix>(static_cast<std::size_t>(out.D_), Matrix::Zero(out.s_, out.s_)));
  out.blocks_[0][static_cast<std::size_t>(wrap(cfg.ladder.l0 + exc, out.D_))] = cavity_state * cavity_state.adjoint();
  return out;
}

DensityMatrix SectorDensity::to_dense() const {
  const auto n = static_cast<Eigen::Index>(joint_.dim());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t di = 0; di < diagonals_.size(); ++di) {
    const int d = diagonals_[di];
    for (int c = 0; c < D_; ++c) {
      const Matrix& b = blocks_[di][static_cast<std::size_t>(c)];
      for (int j = 0; j < s_; ++j) {
        for (int jp = 0; jp < s_; ++jp) {
          m(static_cast<Eigen::Index>(joint_index(c, j)), static_cast<Eigen::Index>(joint_index(c - d, jp))) =
              b(j, jp);
        }
      }
    }
  }
  return DensityMatrix::unchecked(joint_, std::move(m));
}

cplx SectorDensity::trace() const {
  cplx acc = 0.0;
  for (const auto& b : blocks_[static_cast<std::size_t>(index_of(0))]) acc += b.trace();
  return acc;
}

std::vector<double> SectorDensity::ladder_populations() const {
  std::vector<double> p(static_cast<std::size_t>(D_), 0.0);
  const auto& blocks = blocks_[static_cast<std::size_t>(index_of(0))];
  for (int c = 0; c < D_; ++c) {
    for (int j = 0; j < s_; ++j) {
      p[static_cast<std::size_t>(wrap(c - exc_[j], D_))] += blocks[static_cast<std::size_t>(c)](j, j).real();
    }
  }
  return p;
}

DensityMatrix SectorDensity::cavity_state() const {
  Matrix m = Matrix::Zero(s_, s_);
  for (std::size_t di = 0; di < diagonals_.size(); ++di) {
    const int d = diagonals_[di];
    for (int c = 0; c < D_; ++c) {
      const Matrix& b = blocks_[di][static_cast<std::size_t>(c)];
      for (int j = 0; j < s_; ++j) {
        for (int jp = 0; jp < s_; ++jp) {
          // Same rung on both sides: c - exc_j == c - d - exc_jp (mod D).
          if (wrap(exc_[j] - exc_[jp] - d, D_) == 0) m(j, jp) += b(j, jp);
        }
      }
    }
  }
  return DensityMatrix::unchecked(joint_.restrict_to([&] {
    std::vector<std::string> keep;
    for (const auto& f : joint_.factors()) {
      if (f.label != labels::kLadder) keep.push_back(f.label);
    }
    return keep;
  }()),
                                  std::move(m));
}

double SectorDensity::overlap(const StateVector& psi) const {
  if (!(psi.space() == joint_)) throw SpaceError("overlap: space mismatch");
  const Vector& v = psi.amplitudes();
  std::vector<Vector> by_sector(static_cast<std::size_t>(D_), Vector::Zero(s_));
  for (int c = 0; c < D_; ++c) {
    for (int j = 0; j < s_; ++j) {
      by_sector[static_cast<std::size_t>(c)](j) = v(static_cast<Eigen::Index>(joint_index(c, j)));
    }
  }
  cplx acc = 0.0;
  for (std::size_t di = 0; di < diagonals_.size(); ++di) {
    const int d = diagonals_[di];
    for (int c = 0; c < D_; ++c) {
      const auto& left = by_sector[static_cast<std::size_t>(c)];
      const auto& right = by_sector[static_cast<std::size_t>(wrap(c - d, D_))];
      acc += left.dot(blocks_[di][static_cast<std::size_t>(c)] * right);
    }
  }
  return acc.real();
}

double SectorDensity::min_eigenvalue() const {
  if (diagonals_.size() == 1) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_[0]) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.adjoint()), Eigen::EigenvaluesOnly);
      lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    return lo;
  }
  return to_dense().diagnose().min_eigenvalue;
}

SectorDensity SectorDensity::transformed(const Matrix& local) const {
  if (local.rows() != s_ || local.cols() != s_) throw SpaceError("local transform has the wrong dimension");
  for (int i = 0; i < s_; ++i) {
    for (int j = 0; j < s_; ++j) {
      if (exc_[i] != exc_[j] && std::abs(local(i, j)) > kSparseTol) {
        throw SpaceError("local transform does not conserve excitation number");
      }
    }
  }
  SectorDensity out = *this;
  for (auto& diag : out.blocks_) {
    for (auto& b : diag) b = local * b * local.adjoint();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hamiltonian and closed forms

Operator interaction_hamiltonian(double t, const SystemConfig& cfg) {
  cfg.validate();
  const auto ladder = build_ladder(cfg.ladder);
  const auto& a = cfg.model.a();
  const cplx g = cfg.g_q / cfg.T;
  const cplx ph = std::polar(1.0, cfg.delta * t);
  const cplx i(0.0, 1.0);
  return kron(Operator::identity(ladder.space), cfg.model.h_nl()) +
         kron(ladder.b.adjoint(), a) * (i * g * ph) - kron(ladder.b, a.adjoint()) * (i * std::conj(g) * std::conj(ph));
}

DensityMatrix initial_state(const SystemConfig& cfg, const std::string& level) {
  return initial_sector_state(cfg, level).to_dense();
}

SectorDensity initial_sector_state(const SystemConfig& cfg, const std::string& level) {
  const auto basis = polariton_eigenbasis(cfg.model);
  return SectorDensity::product(cfg, basis.state(level));
}

namespace {

struct LocalCavity {
  Matrix a;
  std::vector<int> exc;
};

LocalCavity local_cavity_of(const TensorSpace& joint) {
  const auto& f = joint.factors();
  const bool ok = (f.size() == 2 && f[0].label == labels::kLadder && f[1].label == labels::kCavity) ||
                  (f.size() == 3 && f[0].label == labels::kLadder && f[1].label == labels::kCavity &&
                   f[2].label == labels::kEmitter && f[2].dim == 2);
  if (!ok) throw SpaceError("expected a space el x cav [x atom], got " + joint.describe());
  const auto nc = static_cast<Eigen::Index>(f[1].dim);
  const Eigen::Index na = f.size() == 3 ? 2 : 1;
  LocalCavity out;
  out.a = Matrix::Zero(nc * na, nc * na);
  for (Eigen::Index n = 0; n < nc; ++n) {
    for (Eigen::Index s = 0; s < na; ++s) {
      if (n > 0) out.a((n - 1) * na + s, n * na + s) = std::sqrt(static_cast<double>(n));
      out.exc.push_back(static_cast<int>(n + s));
    }
  }
  return out;
}

}  // namespace

Operator scattering_linear(cplx g_q, const TensorSpace& joint) {
  const auto cav = local_cavity_of(joint);
  const int D = static_cast<int>(joint.factors()[0].dim);
  const auto s = cav.a.rows();
  // Each charge sector carries the same local generator g a - g^* a^dag.
  const Matrix gen = g_q * cav.a - std::conj(g_q) * cav.a.adjoint();
  const Matrix herm = cplx(0.0, 1.0) * gen;  // gen = -i herm
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (herm + herm.adjoint()));
  Vector phases(s);
  for (Eigen::Index k = 0; k < s; ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k));
  const Matrix v = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

  const auto n = static_cast<Eigen::Index>(joint.dim());
  Matrix out = Matrix::Zero(n, n);
  for (int l = 0; l < D; ++l) {
    for (Eigen::Index j = 0; j < s; ++j) {
      const int c = l + cav.exc[static_cast<std::size_t>(j)];
      for (Eigen::Index jp = 0; jp < s; ++jp) {
        const int lp = wrap(c - cav.exc[static_cast<std::size_t>(jp)], D);
        out(lp * s + jp, l * s + j) = v(jp, j);
      }
    }
  }
  return Operator(joint, std::move(out));
}

Operator scattering_blockade(cplx omega, const Vector& lower, const Vector& upper, const TensorSpace& local,
                             const LadderConfig& ladder_cfg) {
  const auto d = static_cast<Eigen::Index>(local.dim());
  if (lower.size() != d || upper.size() != d) throw SpaceError("blockade pair vectors have the wrong dimension");
  if (std::abs(lower.norm() - 1.0) > 1e-12 || std::abs(upper.norm() - 1.0) > 1e-12 ||
      std::abs(lower.dot(upper)) > 1e-12) {
    throw SpaceError("blockade pair must be orthonormal");
  }
  const auto ladder = build_ladder(ladder_cfg);
  const double mag = std::abs(omega);
  const double theta = std::arg(omega);
  const cplx i(0.0, 1.0);
  const Operator proj(local, lower * lower.adjoint() + upper * upper.adjoint());
  const Operator raise(local, upper * lower.adjoint());  // |upper><lower|
  const Operator id_el = Operator::identity(ladder.space);
  const Operator joint_id = Operator::identity(ladder.space.concat(local));
  return joint_id - kron(id_el, proj) * (1.0 - std::cos(mag)) -
         (kron(ladder.b, raise) * std::polar(1.0, theta) + kron(ladder.b.adjoint(), raise.adjoint()) * std::polar(1.0, -theta)) *
             (i * std::sin(mag));
}

Operator scattering_blockade(cplx omega, const PolaritonBasis& basis, const std::string& lower,
                             const std::string& upper, const LadderConfig& ladder) {
  if (!is_consecutive_pair(basis, lower, upper)) {
    throw SpaceError("(" + lower + ", " + upper + ") is not a consecutive same-branch polariton pair");
  }
  return scattering_blockade(omega, basis.state(lower), basis.state(upper), basis.unitary.space(), ladder);
}

namespace {

Matrix nl_phase(const SystemConfig& cfg, double t) {
  const auto basis = polariton_eigenbasis(cfg.model);
  const auto s = static_cast<Eigen::Index>(cfg.model.dim());
  Vector ph(s);
  for (Eigen::Index k = 0; k < s; ++k) ph(k) = std::polar(1.0, basis.levels[static_cast<std::size_t>(k)].nl_shift * t);
  const Matrix& u = basis.unitary.matrix();
  return u * ph.asDiagonal() * u.adjoint();
}

}  // namespace

DensityMatrix frame_align(const DensityMatrix& rho, const SystemConfig& cfg) { return frame_align(rho, cfg, cfg.T); }

DensityMatrix frame_align(const DensityMatrix& rho, const SystemConfig& cfg, double t) {
  std::vector<std::string> cav_labels;
  for (const auto& f : cfg.model.space().factors()) cav_labels.push_back(f.label);
  const Operator phase = embed(Operator(cfg.model.space(), nl_phase(cfg, t)), cav_labels, rho.space());
  return rho.conjugated(phase);
}

SectorDensity frame_align(const SectorDensity& rho, const SystemConfig& cfg) { return frame_align(rho, cfg, cfg.T); }

SectorDensity frame_align(const SectorDensity& rho, const SystemConfig& cfg, double t) {
  return rho.transformed(nl_phase(cfg, t));
}

// ---------------------------------------------------------------------------
// Feasibility

FeasibilityReport feasibility_check(double dw_pm, double kappa, double gamma, double de_over_e, double margin) {
  if (!(margin >= 1.0)) throw SpaceError("feasibility margin must be >= 1");
  FeasibilityReport r;
  r.dw_pm = dw_pm;
  r.kappa = kappa;
  r.gamma = gamma;
  r.de_over_e = de_over_e;
  r.margin = margin;
  r.loss_ok = gamma < dw_pm / margin;
  r.energy_spread_ok = de_over_e < dw_pm / margin;
  r.nonlinearity_ok = dw_pm < kappa / margin;
  return r;
}

FeasibilityReport feasibility_check(const SystemConfig& cfg, double margin) {
  return feasibility_check(1.0 / cfg.T, cfg.model.kappa(), cfg.gamma, cfg.de_over_e, margin);
}

// ---------------------------------------------------------------------------
// Propagation
//
// The integrator works in the polariton eigenbasis and in the frame rotating
// with H_nl, where every operator picks up e^{i(lambda_i - lambda_j) t}. The
// fast phases of unpopulated high levels then only enter through coupling
// terms, which keeps the step count set by the populated dynamics. The
// result is rotated back to the picture of the propagated equation.

namespace {

using Sparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Entries e^{i w_ij t} (c1 A_ij + c2 B_ij + c3 C_ij) on a fixed pattern.
class PhasedSparse {
 public:
  PhasedSparse(const Matrix& a, const Matrix& b, const Matrix& c, const Eigen::VectorXd& lambda) {
    std::vector<Eigen::Triplet<cplx>> trip;
    const Eigen::Index n = a.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(a(i, j)) > kSparseTol || std::abs(b(i, j)) > kSparseTol || std::abs(c(i, j)) > kSparseTol) {
          trip.emplace_back(i, j, cplx(1.0));
        }
      }
    }
    m_.resize(n, n);
    m_.setFromTriplets(trip.begin(), trip.end());
    m_.makeCompressed();
    for (Eigen::Index r = 0; r < m_.outerSize(); ++r) {
      for (Sparse::InnerIterator it(m_, r); it; ++it) {
        const auto i = it.row(), j = it.col();
        a_.push_back(std::abs(a(i, j)) > kSparseTol ? a(i, j) : cplx(0.0));
        b_.push_back(std::abs(b(i, j)) > kSparseTol ? b(i, j) : cplx(0.0));
        c_.push_back(std::abs(c(i, j)) > kSparseTol ? c(i, j) : cplx(0.0));
        w_.push_back(lambda(i) - lambda(j));
      }
    }
  }

  void update(double t, cplx c1, cplx c2, cplx c3) {
    cplx* v = m_.valuePtr();
    for (std::size_t p = 0; p < w_.size(); ++p) v[p] = std::polar(1.0, w_[p] * t) * (c1 * a_[p] + c2 * b_[p] + c3 * c_[p]);
  }

  const Sparse& matrix() const { return m_; }

 private:
  Sparse m_;
  std::vector<cplx> a_, b_, c_;
  std::vector<double> w_;
};

using Blocks = std::vector<std::vector<Matrix>>;
/// Blocks that can ever be nonzero, per diagonal and charge.
using Active = std::vector<std::vector<char>>;

void axpy(Blocks& out, const Blocks& y, double h, const Blocks& k, const Active& active) {
  for (std::size_t di = 0; di < out.size(); ++di) {
    for (std::size_t c = 0; c < out[di].size(); ++c) {
      if (active[di][c]) out[di][c] = y[di][c] + h * k[di][c];
    }
  }
}

/// The coherent part conserves the charge and loss lowers it by one while
/// removing an excitation, so a block is reachable only from a nonzero
/// block at most max_exc charges above it.
Active active_blocks(const Blocks& y, int max_exc, bool lossy) {
  Active out(y.size());
  for (std::size_t di = 0; di < y.size(); ++di) {
    const int D = static_cast<int>(y[di].size());
    out[di].assign(y[di].size(), 0);
    for (int c = 0; c < D; ++c) {
      if (y[di][static_cast<std::size_t>(c)].cwiseAbs().maxCoeff() == 0.0) continue;
      const int reach = lossy ? std::min(max_exc, D - 1) : 0;
      for (int k = 0; k <= reach; ++k) out[di][static_cast<std::size_t>(wrap(c - k, D))] = 1;
    }
  }
  return out;
}

struct Propagator {
  int D = 0;
  int s = 0;
  std::vector<int> diagonals;
  Active active;
  cplx g = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  PhasedSparse k_op;     // -iV(t) - (gamma/2) n(t)
  PhasedSparse loss_op;  // a(t)
  Sparse k_adj, loss_adj;
  Matrix tmp, tmp2;

  void rhs(double t, const Blocks& y, Blocks& dy) {
    const cplx ph = std::polar(1.0, delta * t);
    k_op.update(t, g * ph, -std::conj(g) * std::conj(ph), cplx(-0.5 * gamma));
    k_adj = k_op.matrix().adjoint();
    if (gamma > 0.0) {
      loss_op.update(t, 1.0, 0.0, 0.0);
      loss_adj = loss_op.matrix().adjoint();
    }
    const Sparse& k = k_op.matrix();
    for (std::size_t di = 0; di < diagonals.size(); ++di) {
      const bool hermitian = diagonals[di] == 0;
      for (int c = 0; c < D; ++c) {
        if (!active[di][static_cast<std::size_t>(c)]) continue;
        const Matrix& b = y[di][static_cast<std::size_t>(c)];
        Matrix& db = dy[di][static_cast<std::size_t>(c)];
        if (hermitian) {
          tmp.noalias() = k * b;
          db = tmp + tmp.adjoint();
        } else {
          db.noalias() = k * b;
          db.noalias() += b * k_adj;
        }
        if (gamma > 0.0) {
          const Matrix& above = y[di][static_cast<std::size_t>((c + 1) % D)];
          tmp.noalias() = loss_op.matrix() * above;
          tmp2.noalias() = tmp * loss_adj;
          db += gamma * tmp2;
        }
      }
    }
  }
};

struct RotatingFrame {
  Matrix u;                // bare <- eigen
  Eigen::VectorXd lambda;  // H_nl eigenvalues
  Matrix a_hat, n_hat;

  explicit RotatingFrame(const CavityModel& model) {
    const auto basis = polariton_eigenbasis(model);
    u = basis.unitary.matrix();
    lambda.resize(static_cast<Eigen::Index>(basis.levels.size()));
    for (std::size_t k = 0; k < basis.levels.size(); ++k) lambda(static_cast<Eigen::Index>(k)) = basis.levels[k].nl_shift;
    a_hat = u.adjoint() * model.a().matrix() * u;
    n_hat = u.adjoint() * model.photon_number().matrix() * u;
  }

  /// Maps eigen-frame blocks at time t back to the bare basis of the
  /// propagated equation: U e^{-i Lambda t} B e^{+i Lambda t} U^dag.
  Matrix to_bare(double t) const {
    Vector ph(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) ph(k) = std::polar(1.0, -lambda(k) * t);
    return u * ph.asDiagonal();
  }
};

}  // namespace

int step_count(const SystemConfig& cfg, const IntegratorConfig& icfg) {
  icfg.validate();
  if (icfg.steps > 0) return icfg.steps;
  const RotatingFrame frame(cfg.model);
  double rate = 0.0;
  for (Eigen::Index i = 0; i < frame.a_hat.rows(); ++i) {
    for (Eigen::Index j = 0; j < frame.a_hat.cols(); ++j) {
      const double w = frame.lambda(i) - frame.lambda(j);
      if (std::abs(frame.a_hat(i, j)) > kSparseTol) rate = std::max(rate, std::abs(cfg.delta + w));
      if (cfg.gamma > 0.0 && std::abs(frame.n_hat(i, j)) > kSparseTol) rate = std::max(rate, std::abs(w));
    }
  }
  const double n_top = static_cast<double>(cfg.model.n_cut()) + 1.0;
  // Spectral radius of the truncated coupling g a - g^* a^dag.
  rate = std::max(rate, 2.0 * std::abs(cfg.g_q) / cfg.T * std::sqrt(n_top));
  rate = std::max(rate, cfg.gamma * n_top);
  const double wanted = std::ceil(cfg.T * rate / icfg.step_factor);
  return std::max(icfg.min_steps, static_cast<int>(std::min(wanted, 1e9)));
}

Evolution evolve_lindblad(const DensityMatrix& rho0, const SystemConfig& cfg, const IntegratorConfig& icfg) {
  return evolve_lindblad(SectorDensity::from_dense(rho0, cfg), cfg, icfg);
}

Evolution evolve_lindblad(const SectorDensity& rho0, const SystemConfig& cfg, const IntegratorConfig& icfg) {
  cfg.validate();
  icfg.validate();
  if (!(rho0.joint_space() == cfg.joint_space())) {
    throw SpaceError("initial state space " + rho0.joint_space().describe() + " does not match " +
                     cfg.joint_space().describe());
  }

  const RotatingFrame frame(cfg.model);
  const int D = rho0.D_, s = rho0.s_;
  const int steps = step_count(cfg, icfg);
  const double dt = cfg.T / steps;
  const int N = cfg.model.n_cut();
  const auto& photon = cfg.model.photons();
  const auto& exc = rho0.exc_;

  Blocks y = rho0.blocks_;
  for (auto& diag : y) {
    for (auto& b : diag) b = frame.u.adjoint() * b * frame.u;
  }
  const int max_exc = *std::max_element(exc.begin(), exc.end());

  Propagator prop{D,
                  s,
                  rho0.diagonals_,
                  active_blocks(y, max_exc, cfg.gamma > 0.0),
                  cfg.g_q / cfg.T,
                  cfg.delta,
                  cfg.gamma,
                  PhasedSparse(frame.a_hat, frame.a_hat.adjoint(), frame.n_hat, frame.lambda),
                  PhasedSparse(frame.a_hat, Matrix::Zero(s, s), Matrix::Zero(s, s), frame.lambda),
                  {},
                  {},
                  Matrix(s, s),
                  Matrix(s, s)};
  const Active& active = prop.active;

  // Pairs (di, c) <-> (dj, c - d) related by Hermitian conjugation.
  struct Mirror {
    std::size_t di, c, dj, cp;
  };
  std::vector<Mirror> mirrors;
  for (std::size_t di = 0; di < prop.diagonals.size(); ++di) {
    const int d = prop.diagonals[di];
    if (d == 0) continue;
    const int dj = rho0.index_of(-d);
    if (dj < 0) throw SpaceError("initial state is not Hermitian: sector diagonal without its mirror");
    for (int c = 0; c < D; ++c) {
      const Mirror m{di, static_cast<std::size_t>(c), static_cast<std::size_t>(dj), static_cast<std::size_t>(wrap(c - d, D))};
      if (std::make_pair(m.di, m.c) < std::make_pair(m.dj, m.cp)) mirrors.push_back(m);
    }
  }

  EvolutionDiagnostics diag;
  diag.steps = steps;
  diag.dt = dt;

  const int zero_di = rho0.index_of(0);
  auto check_populations = [&](const Blocks& blocks, double t) {
    const Matrix m = frame.to_bare(t);
    double top = 0.0, seam = 0.0;
    for (int c = 0; c < D; ++c) {
      if (!active[static_cast<std::size_t>(zero_di)][static_cast<std::size_t>(c)]) continue;
      const Matrix& b = blocks[static_cast<std::size_t>(zero_di)][static_cast<std::size_t>(c)];
      const Vector p = ((m * b).cwiseProduct(m.conjugate())).rowwise().sum();
      for (int j = 0; j < s; ++j) {
        const double pj = p(j).real();
        if (photon[static_cast<std::size_t>(j)] >= N - 1) top += pj;
        const int l = wrap(c - exc[static_cast<std::size_t>(j)], D);
        if (l <= 1 || l >= D - 2) seam += pj;
      }
    }
    diag.cutoff_population = std::max(diag.cutoff_population, top);
    diag.wrap_population = std::max(diag.wrap_population, seam);
    if (top > icfg.cutoff_bound) {
      throw NumericalError(NumericalError::Kind::Cutoff,
                           "population " + fmt(top) + " in the top two photon levels (n_cut " + std::to_string(N) +
                               ") exceeds " + fmt(icfg.cutoff_bound) + " at t = " + fmt(t));
    }
    if (icfg.check_wrap && seam > icfg.wrap_bound) {
      throw NumericalError(NumericalError::Kind::WrapAround,
                           "population " + fmt(seam) + " within 2 rungs of the ladder seam exceeds " +
                               fmt(icfg.wrap_bound) + " at t = " + fmt(t));
    }
  };

  auto to_state = [&](const Blocks& blocks, double t) {
    SectorDensity out = rho0;
    const Matrix m = frame.to_bare(t);
    for (std::size_t di = 0; di < blocks.size(); ++di) {
      for (std::size_t c = 0; c < blocks[di].size(); ++c) {
        if (active[di][c]) out.blocks_[di][c] = m * blocks[di][c] * m.adjoint();
      }
    }
    return out;
  };

  Evolution result;
  Blocks k1 = y, k2 = y, k3 = y, k4 = y, stage = y;
  const int check_every = std::max(1, steps / 64);
  check_populations(y, 0.0);
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    prop.rhs(t, y, k1);
    axpy(stage, y, 0.5 * dt, k1, active);
    prop.rhs(t + 0.5 * dt, stage, k2);
    axpy(stage, y, 0.5 * dt, k2, active);
    prop.rhs(t + 0.5 * dt, stage, k3);
    axpy(stage, y, dt, k3, active);
    prop.rhs(t + dt, stage, k4);
    for (std::size_t di = 0; di < y.size(); ++di) {
      for (std::size_t c = 0; c < y[di].size(); ++c) {
        if (!active[di][c]) continue;
        y[di][c] += (dt / 6.0) * (k1[di][c] + 2.0 * k2[di][c] + 2.0 * k3[di][c] + k4[di][c]);
      }
    }
    // Hermiticity is restored explicitly; only the last step's defect is reported.
    const bool last = n + 1 == steps;
    for (const auto& mr : mirrors) {
      if (!active[mr.di][mr.c] && !active[mr.dj][mr.cp]) continue;
      Matrix& p = y[mr.di][mr.c];
      Matrix& q = y[mr.dj][mr.cp];
      if (last) diag.hermiticity_error = std::max(diag.hermiticity_error, (p - q.adjoint()).cwiseAbs().maxCoeff());
      const Matrix avg = 0.5 * (p + q.adjoint());
      p = avg;
      q = avg.adjoint();
    }
    if ((n + 1) % check_every == 0 || last) check_populations(y, t + dt);
    if (icfg.record_every > 0 && (n + 1) % icfg.record_every == 0) {
      result.trajectory.push_back({t + dt, to_state(y, t + dt)});
    }
  }

  result.state = to_state(y, cfg.T);
  diag.trace_drift = std::abs(result.state.trace() - cplx(1.0));
  diag.min_eigenvalue = result.state.min_eigenvalue();
  result.diagnostics = diag;

  if (diag.trace_drift > icfg.trace_drift_bound) {
    throw NumericalError(NumericalError::Kind::TraceDrift,
                         "trace drift " + fmt(diag.trace_drift) + " exceeds " + fmt(icfg.trace_drift_bound));
  }
  if (diag.min_eigenvalue < -DensityMatrix::kPositivityTol) {
    throw NumericalError(NumericalError::Kind::Positivity,
                         "final state has eigenvalue " + fmt(diag.min_eigenvalue));
  }
  return result;
}

}  // namespace feb
