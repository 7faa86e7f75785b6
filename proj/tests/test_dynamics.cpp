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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "feblockade/dynamics.hpp"
#include "feblockade/errors.hpp"
#include "feblockade/observables.hpp"
#include "oracles.hpp"

using namespace feb;

namespace {

constexpr double kPi = std::numbers::pi;

SystemConfig make(CavityModel model, int D, cplx g, double T, double delta = 0.0, double gamma = 0.0) {
  SystemConfig c;
  c.model = std::move(model);
  c.ladder = LadderConfig{D, D / 2, 1.0};
  c.g_q = g;
  c.T = T;
  c.delta = delta;
  c.gamma = gamma;
  return c;
}

IntegratorConfig icfg() { return IntegratorConfig{}; }

/// Population guards off, for comparisons against an oracle with the same truncation.
IntegratorConfig unguarded() {
  IntegratorConfig c;
  c.cutoff_bound = 1.0;
  c.check_wrap = false;
  return c;
}

Matrix vacuum_rho(const SystemConfig& c) { return initial_state(c, c.model.kind() == CavityKind::JC ? "0*" : "0").matrix(); }

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Hamiltonian, ZeroCouplingIsNonlinearPart) {
  const auto c = make(build_kerr(0.05, 4), 7, 0.0, 10.0);
  const auto h = interaction_hamiltonian(2.3, c);
  const Matrix want = oracle::kron(Matrix::Identity(7, 7), c.model.h_nl().matrix());
  EXPECT_EQ(max_diff(h.matrix(), want), 0.0);
}

TEST(Hamiltonian, HermitianAndMatchesOracle) {
  auto c = make(build_jc(0.05, 3), 7, cplx(0.7, -0.4), 10.0, 0.013);
  const auto h = interaction_hamiltonian(0.37 * c.T, c);
  EXPECT_LE(h.hermiticity_error(), 1e-14);
  oracle::Lindblad o{7, oracle::jc(0.05, 3), c.g_q, c.T, c.delta, 0.0};
  EXPECT_LT(max_diff(h.matrix(), o.hamiltonian(0.37 * c.T)), 1e-15);
}

TEST(Hamiltonian, CouplingMatrixElements) {
  const double g = 0.9, T = 5.0;
  const auto c = make(build_kerr(0.0, 3), 7, g, T);
  const Matrix h = interaction_hamiltonian(0.0, c).matrix();
  const int l = 3, nc = 4;
  // b^dag a: |l,1> -> |l+1,0> with +i g/T; b a^dag: |l,0> -> |l-1,1> with -i g/T.
  EXPECT_LT(std::abs(h((l + 1) * nc + 0, l * nc + 1) - cplx(0, g / T)), 1e-15);
  EXPECT_LT(std::abs(h((l - 1) * nc + 1, l * nc + 0) - cplx(0, -g / T)), 1e-15);
}

TEST(Evolve, MatchesDenseOracleKerrWithLoss) {
  const auto c = make(build_kerr(0.3, 4), 9, cplx(0.8, 0.3), 6.0, 0.12, 0.05);
  const Matrix rho0 = vacuum_rho(c);
  const auto ev = evolve_lindblad(initial_state(c, "0"), c, unguarded());
  oracle::Lindblad o{9, oracle::kerr(0.3, 4), c.g_q, c.T, c.delta, c.gamma};
  const Matrix want = o.evolve(rho0, 2000);
  EXPECT_LT(max_diff(ev.rho().matrix(), want), 1e-8);
}

TEST(Evolve, MatchesDenseOracleJCFromExcitedPolariton) {
  auto c = make(build_jc(0.2, 3), 9, cplx(0.5, -0.6), 8.0, -0.05, 0.02);
  const auto rho0 = initial_state(c, "1-");
  const auto ev = evolve_lindblad(rho0, c, unguarded());
  oracle::Lindblad o{9, oracle::jc(0.2, 3), c.g_q, c.T, c.delta, c.gamma};
  EXPECT_LT(max_diff(ev.rho().matrix(), o.evolve(rho0.matrix(), 2000)), 1e-8);
}

TEST(Evolve, LinearVacuumMeanPhotonNumber) {
  const auto c = make(build_kerr(0.0, 12), 33, 1.0, 20.0);
  const auto ev = evolve_lindblad(initial_sector_state(c, "0"), c, icfg());
  const auto stats = photon_statistics(ev.state);
  double mean = 0.0;
  for (std::size_t n = 0; n < stats.size(); ++n) mean += static_cast<double>(n) * stats.probabilities()[n];
  EXPECT_NEAR(mean, 1.0, 1e-3);
}

TEST(Evolve, NoCouplingKeepsPolaritonPopulations) {
  auto c = make(build_jc(0.1, 4), 7, 0.0, 30.0);
  const auto basis = polariton_eigenbasis(c.model);
  std::mt19937_64 rng(3);
  const Vector v = oracle::random_state(static_cast<Eigen::Index>(c.model.dim()), rng);
  // Mix excitation sectors through an incoherent sum of per-sector states.
  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(c.joint_space().dim()), static_cast<Eigen::Index>(c.joint_space().dim()));
  double w = 0.0;
  for (const auto& lvl : basis.levels) {
    const double p = std::norm(v(static_cast<Eigen::Index>(basis.index_of(lvl.label))));
    const auto s = initial_state(c, lvl.label);
    rho += p * s.matrix();
    w += p;
  }
  const DensityMatrix r0(c.joint_space(), rho / w);
  const auto before = polariton_statistics(r0, basis);
  const auto after = polariton_statistics(evolve_lindblad(r0, c, unguarded()).rho(), basis);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_NEAR(before.probabilities()[i], after.probabilities()[i], 1e-10);
  }
}

TEST(Evolve, SinglePhotonDecay) {
  const double gamma = 0.01, T = 50.0;
  const auto c = make(build_kerr(0.02, 3), 5, 0.0, T, 0.0, gamma);
  const auto ev = evolve_lindblad(initial_sector_state(c, "1"), c, icfg());
  EXPECT_NEAR(photon_statistics(ev.state).at("1"), std::exp(-gamma * T), 1e-6);
}

TEST(Evolve, LinearLimitMatchesScatteringMatrix) {
  const cplx g = std::polar(1.2, 0.4);
  const auto c = make(build_kerr(0.0, 16), 41, g, 30.0);
  const auto ev = evolve_lindblad(initial_sector_state(c, "0"), c, icfg());
  const auto s = scattering_linear(g, c.joint_space());
  const auto psi0 = StateVector::basis(c.joint_space(), static_cast<std::size_t>(c.ladder.l0) * 17);
  const StateVector target(c.joint_space(), s.matrix() * psi0.amplitudes());
  EXPECT_GE(state_fidelity(ev.state, target), 1 - 1e-6);
}

TEST(Evolve, PolaritonBasisEquivalence) {
  auto c = make(build_jc(0.15, 3), 9, cplx(0.9, 0.2), 12.0, 0.03);
  const auto rho0 = initial_state(c, "0*");
  const auto ev = evolve_lindblad(rho0, c, unguarded());
  // Oracle run with every operator conjugated into the polariton eigenbasis.
  const Matrix u = polariton_eigenbasis(c.model).unitary.matrix();
  oracle::Cavity pc = oracle::jc(0.15, 3);
  pc.a = u.adjoint() * pc.a * u;
  pc.h_nl = u.adjoint() * pc.h_nl * u;
  oracle::Lindblad o{9, pc, c.g_q, c.T, c.delta, 0.0};
  const Matrix U = oracle::kron(Matrix::Identity(9, 9), u);
  const Matrix pol = o.evolve(U.adjoint() * rho0.matrix() * U, 2000);
  const Matrix back = U * pol * U.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(back);
  const Vector psi = es.eigenvectors().col(es.eigenvalues().size() - 1);
  EXPECT_GE(state_fidelity(ev.rho(), StateVector::normalized(c.joint_space(), psi)), 1 - 1e-10);
}

TEST(Evolve, StepHalvingConverges) {
  const auto c = make(build_kerr(0.05, 6), 17, kPi / 2, 100.0, 0.0, 1e-4);
  IntegratorConfig a = icfg();
  a.steps = step_count(c, a);
  IntegratorConfig b = a;
  b.steps = 2 * a.steps;
  const auto pa = polariton_statistics(evolve_lindblad(initial_sector_state(c, "0"), c, a).state, polariton_eigenbasis(c.model));
  const auto pb = polariton_statistics(evolve_lindblad(initial_sector_state(c, "0"), c, b).state, polariton_eigenbasis(c.model));
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_LT(std::abs(pa.probabilities()[i] - pb.probabilities()[i]), 1e-6);
}

TEST(Evolve, DiagnosticsWithinBounds) {
  const auto c = make(build_kerr(0.02, 6), 33, kPi / 2, 472.43, 0.0, 1e-5);
  const auto ev = evolve_lindblad(initial_sector_state(c, "0"), c, icfg());
  const auto& d = ev.diagnostics;
  EXPECT_LE(d.trace_drift, 1e-8);
  EXPECT_GE(d.min_eigenvalue, -1e-8);
  EXPECT_LE(d.cutoff_population, 1e-6);
  EXPECT_LE(d.wrap_population, 1e-8);
  EXPECT_GE(d.steps, 100);
}

TEST(Evolve, CutoffViolationReported) {
  const auto c = make(build_kerr(0.0, 3), 33, 2.0, 10.0);
  try {
    evolve_lindblad(initial_sector_state(c, "0"), c, icfg());
    FAIL() << "expected a cutoff violation";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), NumericalError::Kind::Cutoff);
  }
}

TEST(Evolve, WrapViolationReported) {
  const auto c = make(build_kerr(0.0, 20), 7, 1.5, 10.0);
  try {
    evolve_lindblad(initial_sector_state(c, "0"), c, icfg());
    FAIL() << "expected a wrap-around violation";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), NumericalError::Kind::WrapAround);
  }
}

TEST(Evolve, TrajectoryRecorded) {
  const auto c = make(build_kerr(0.1, 4), 9, 0.5, 5.0);
  IntegratorConfig ic = unguarded();
  ic.steps = 200;
  ic.record_every = 50;
  const auto ev = evolve_lindblad(initial_sector_state(c, "0"), c, ic);
  ASSERT_EQ(ev.trajectory.size(), 4u);
  EXPECT_NEAR(ev.trajectory.front().t, 1.25, 1e-12);
  EXPECT_NEAR(ev.trajectory.back().t, 5.0, 1e-12);
}

TEST(Config, Validation) {
  auto c = make(build_kerr(0.1, 4), 9, 0.5, 5.0);
  c.T = -1.0;
  EXPECT_THROW(c.validate(), SpaceError);
  c.T = 1.0;
  c.gamma = -0.1;
  EXPECT_THROW(c.validate(), SpaceError);
  c.gamma = 0.0;
  c.delta = 1.5;
  EXPECT_THROW(c.validate(), SpaceError);
  IntegratorConfig ic;
  ic.steps = 50;
  EXPECT_THROW(ic.validate(), SpaceError);
}

TEST(ScatteringLinear, MatchesMatrixExponential) {
  const cplx g = std::polar(0.9, -0.7);
  const TensorSpace joint({{"el", 9}, {"cav", 6}});
  const Matrix b = oracle::kron(oracle::shift(9), Matrix::Identity(6, 6));
  const Matrix a = oracle::kron(Matrix::Identity(9, 9), oracle::lowering(5));
  const Matrix want = oracle::expm(g * b.adjoint() * a - std::conj(g) * b * a.adjoint());
  EXPECT_LT(max_diff(scattering_linear(g, joint).matrix(), want), 1e-12);
}

TEST(ScatteringLinear, IdentityAtZeroAndUnitary) {
  const TensorSpace joint({{"el", 9}, {"cav", 6}});
  EXPECT_LT(max_abs_diff(scattering_linear(0.0, joint), Operator::identity(joint)), 1e-15);
  EXPECT_TRUE(scattering_linear(kPi / 2, joint).is_unitary(1e-12));
  const TensorSpace jc({{"el", 7}, {"cav", 4}, {"atom", 2}});
  EXPECT_TRUE(scattering_linear(cplx(0.3, 1.0), jc).is_unitary(1e-12));
}

TEST(ScatteringLinear, PoissonStatistics) {
  const double g = 1.1;
  const int N = 20, D = 65;
  const TensorSpace joint({{"el", static_cast<std::size_t>(D)}, {"cav", static_cast<std::size_t>(N + 1)}});
  const auto psi0 = StateVector::basis(joint, static_cast<std::size_t>(D / 2 * (N + 1)));
  const StateVector out(joint, scattering_linear(g, joint).matrix() * psi0.amplitudes());
  const auto stats = photon_statistics(DensityMatrix::pure(out));
  double tv = 0.0;
  for (int n = 0; n <= N; ++n) tv += std::abs(stats.probabilities()[static_cast<std::size_t>(n)] - oracle::poisson(g * g, n));
  EXPECT_LT(tv / 2, 1e-6);
}

TEST(ScatteringBlockade, ZeroIsIdentity) {
  const auto m = build_kerr(0.02, 4);
  const LadderConfig lc{9, 4, 1.0};
  const auto s = scattering_blockade(0.0, polariton_eigenbasis(m), "0", "1", lc);
  EXPECT_LT(max_abs_diff(s, Operator::identity(s.space())), 1e-15);
}

TEST(ScatteringBlockade, FullTransferAtHalfPi) {
  const auto m = build_jc(0.02, 4);
  const auto basis = polariton_eigenbasis(m);
  const LadderConfig lc{9, 4, 1.0};
  const double arg = 0.6;
  const auto s = scattering_blockade(std::polar(kPi / 2, arg), basis, "0*", "1-", lc);
  const TensorSpace sp = s.space();
  const auto dim = static_cast<Eigen::Index>(m.dim());
  Vector in = Vector::Zero(static_cast<Eigen::Index>(sp.dim()));
  in.segment(4 * dim, dim) = basis.state("0*");
  Vector want = Vector::Zero(in.size());
  want.segment(3 * dim, dim) = cplx(0, -1) * std::polar(1.0, arg) * basis.state("1-");
  EXPECT_LT((s.matrix() * in - want).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(s.is_unitary(1e-12));
}

TEST(ScatteringBlockade, InvalidPairRejected) {
  const auto m = build_jc(0.02, 4);
  EXPECT_THROW(scattering_blockade(1.0, polariton_eigenbasis(m), "1+", "2-", LadderConfig{9, 4, 1.0}), SpaceError);
}

TEST(FrameAlign, KerrGroundPairUntouched) {
  const auto c = make(build_kerr(0.02, 4), 5, 0.0, 123.0);
  const TensorSpace j = c.joint_space();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(j.dim()));
  v(2 * 5 + 0) = 0.6;
  v(1 * 5 + 1) = cplx(0, 0.8);
  const auto rho = DensityMatrix::pure(StateVector(j, v));
  EXPECT_LT(max_diff(frame_align(rho, c).matrix(), rho.matrix()), 1e-15);
}

TEST(FrameAlign, JCUpperPolaritonPhase) {
  const double k = 0.03, T = 40.0;
  const auto c = make(build_jc(k, 3), 5, 0.0, T);
  const auto basis = polariton_eigenbasis(c.model);
  const TensorSpace j = c.joint_space();
  const auto dim = static_cast<Eigen::Index>(c.model.dim());
  Vector v = Vector::Zero(static_cast<Eigen::Index>(j.dim()));
  v.segment(2 * dim, dim) = (basis.state("0*") + basis.state("1+")) / std::sqrt(2.0);
  const auto rho = frame_align(DensityMatrix::pure(StateVector(j, v)), c);
  // Oracle phase from diagonalizing H_nl numerically.
  Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::jc(k, 3).h_nl);
  const Vector up = basis.state("1+");
  double lam = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvectors().col(i).dot(up)) > 0.999) lam = es.eigenvalues()(i);
  }
  EXPECT_NEAR(lam, k, 1e-12);
  const Eigen::Index g0 = 2 * dim + 0;
  const Eigen::Index pp = 2 * dim + 2;  // |g,1> component of |1+>
  const cplx coh = rho.matrix()(pp, g0) / rho.matrix()(g0, g0) * std::sqrt(2.0);
  EXPECT_LT(std::abs(coh - std::polar(1.0, lam * T)), 1e-12);
}

TEST(FrameAlign, InverseRoundTrip) {
  const auto c = make(build_jc(0.05, 3), 5, 0.0, 17.0);
  std::mt19937_64 rng(12);
  const DensityMatrix rho(c.joint_space(), oracle::random_density(static_cast<Eigen::Index>(c.joint_space().dim()), rng));
  const auto back = frame_align(frame_align(rho, c, 17.0), c, -17.0);
  EXPECT_LT(max_diff(back.matrix(), rho.matrix()), 1e-12);
}

TEST(FrameAlign, SectorAndDenseAgree) {
  const auto c = make(build_jc(0.05, 3), 9, cplx(0.4, 0.2), 30.0, 0.01, 0.01);
  const auto ev = evolve_lindblad(initial_sector_state(c, "1+"), c, unguarded());
  EXPECT_LT(max_diff(frame_align(ev.state, c).to_dense().matrix(), frame_align(ev.rho(), c).matrix()), 1e-13);
}

TEST(SectorDensity, DenseRoundTrip) {
  const auto c = make(build_jc(0.05, 2), 5, 0.0, 1.0);
  const auto s = initial_sector_state(c, "2-");
  const auto back = SectorDensity::from_dense(s.to_dense(), c);
  EXPECT_LT(max_diff(back.to_dense().matrix(), s.to_dense().matrix()), 1e-15);
  EXPECT_NEAR(s.trace().real(), 1.0, 1e-15);
  EXPECT_GE(s.min_eigenvalue(), -1e-15);
}

TEST(SectorDensity, GeneralDenseStateRoundTrip) {
  const auto c = make(build_kerr(0.05, 2), 5, 0.0, 1.0);
  std::mt19937_64 rng(1);
  const DensityMatrix rho(c.joint_space(), oracle::random_density(15, rng));
  const auto s = SectorDensity::from_dense(rho, c);
  EXPECT_EQ(max_diff(s.to_dense().matrix(), rho.matrix()), 0.0);
  EXPECT_NEAR(s.min_eigenvalue(), Eigen::SelfAdjointEigenSolver<Matrix>(rho.matrix()).eigenvalues()(0), 1e-12);
}

TEST(Feasibility, WorkedExamplePasses) {
  const auto r = feasibility_check(7e-4, 0.02, 1e-5, 1e-5, 10.0);
  EXPECT_TRUE(r.loss_ok);
  EXPECT_TRUE(r.energy_spread_ok);
  EXPECT_TRUE(r.nonlinearity_ok);
  EXPECT_TRUE(r.pass());
}

TEST(Feasibility, AtomicCqedFailsRightInequality) {
  const auto r = feasibility_check(7e-4, 1e-8, 1e-5, 1e-5, 10.0);
  EXPECT_TRUE(r.loss_ok);
  EXPECT_FALSE(r.nonlinearity_ok);
  EXPECT_FALSE(r.pass());
}

TEST(Feasibility, EqualRatiosFail) {
  const auto r = feasibility_check(1e-3, 1e-3, 1e-3, 1e-3, 1.0);
  EXPECT_FALSE(r.loss_ok);
  EXPECT_FALSE(r.energy_spread_ok);
  EXPECT_FALSE(r.nonlinearity_ok);
}

TEST(Feasibility, FromSystemUsesInverseInteractionTime) {
  auto c = make(build_kerr(0.02, 4), 5, 0.0, 1.0 / 7e-4, 0.0, 1e-5);
  c.de_over_e = 1e-5;
  const auto r = feasibility_check(c);
  EXPECT_NEAR(r.dw_pm, 7e-4, 1e-15);
  EXPECT_TRUE(r.pass());
}
