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

#include <algorithm>

#include "feblockade/cavity_models.hpp"
#include "feblockade/errors.hpp"
#include "oracles.hpp"

using namespace feb;

namespace {

std::vector<double> sector_eigenvalues(const CavityModel& m, int exc) {
  const Matrix h = (m.h_bare() + m.h_nl()).matrix();
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < m.excitations().size(); ++i) {
    if (m.excitations()[i] == exc) idx.push_back(static_cast<Eigen::Index>(i));
  }
  Matrix block(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) block(i, j) = h(idx[i], idx[j]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace

TEST(Kerr, DiagonalShifts) {
  const double k = 0.013;
  const auto m = build_kerr(k, 5);
  const Matrix& h = m.h_nl().matrix();
  EXPECT_EQ(h(0, 0), cplx(0.0));
  EXPECT_EQ(h(1, 1), cplx(0.0));
  EXPECT_NEAR(h(2, 2).real(), 2 * k, 1e-15);
  EXPECT_NEAR(h(3, 3).real(), 6 * k, 1e-15);
  EXPECT_LT((h - Matrix(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Kerr, LoweringOperatorMatchesOracle) {
  const auto m = build_kerr(0.02, 6);
  EXPECT_EQ((m.a().matrix() - oracle::lowering(6)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((m.h_nl().matrix() - oracle::kerr(0.02, 6).h_nl).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Kerr, CutoffBelowTwoRejected) {
  EXPECT_THROW(build_kerr(0.02, 1), SpaceError);
  EXPECT_THROW(build_jc(0.02, 1), SpaceError);
}

TEST(Kerr, HamiltonianCommutesWithNumber) {
  const auto m = build_kerr(0.4, 7);
  EXPECT_EQ(commutator_norm(m.h_nl(), m.photon_number()), 0.0);
}

TEST(JC, MatchesOracleOperators) {
  const auto m = build_jc(0.03, 4);
  const auto o = oracle::jc(0.03, 4);
  EXPECT_EQ((m.a().matrix() - o.a).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((m.h_nl().matrix() - o.h_nl).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(m.dim(), 10u);
}

TEST(JC, SingleExcitationSplitting) {
  const double k = 0.02;
  const auto m = build_jc(k, 4);
  const auto e1 = sector_eigenvalues(m, 1);
  ASSERT_EQ(e1.size(), 2u);
  EXPECT_NEAR(e1[0], 1 - k, 1e-12);
  EXPECT_NEAR(e1[1], 1 + k, 1e-12);
  const auto e2 = sector_eigenvalues(m, 2);
  EXPECT_NEAR(e2[1] - e2[0], 2 * std::sqrt(2.0) * k, 1e-12);
  EXPECT_NEAR(e2[0], 2 - std::sqrt(2.0) * k, 1e-12);
}

TEST(JC, GroundStateUncoupled) {
  const auto m = build_jc(0.05, 3);
  const auto basis = polariton_eigenbasis(m);
  const Vector g = basis.state("0*");
  EXPECT_LT(std::abs(g.dot(m.h_nl().matrix() * g)), 1e-15);
}

TEST(JC, ExcitationNumberConserved) {
  const auto m = build_jc(0.07, 6);
  EXPECT_LE(commutator_norm(m.h_nl(), m.excitation_number()), 1e-12);
}

TEST(Basis, KerrIsIdentity) {
  const auto b = polariton_eigenbasis(build_kerr(0.02, 5));
  EXPECT_EQ(max_abs_diff(b.unitary, Operator::identity(b.unitary.space())), 0.0);
  EXPECT_EQ(b.level("3").frequency, 3 + 6 * 0.02);
}

TEST(Basis, JCDiagonalizesAndIsUnitary) {
  const auto m = build_jc(0.02, 6);
  const auto b = polariton_eigenbasis(m);
  EXPECT_TRUE(b.unitary.is_unitary(1e-12));
  const Matrix d = b.unitary.matrix().adjoint() * (m.h_bare() + m.h_nl()).matrix() * b.unitary.matrix();
  const Matrix off = d - Matrix(d.diagonal().asDiagonal());
  EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-10);
  for (std::size_t i = 0; i < b.levels.size(); ++i) {
    EXPECT_NEAR(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real(), b.levels[i].frequency, 1e-12);
  }
}

TEST(Basis, JCUpperPolaritonComposition) {
  const auto m = build_jc(0.02, 4);
  const auto b = polariton_eigenbasis(m);
  const Vector p = b.state("1+");
  EXPECT_NEAR(std::norm(p(2)), 0.5, 1e-15);  // |g,1>
  EXPECT_GT(p(2).real(), 0.0);
  EXPECT_GT(p(1).real(), 0.0);  // + sign on |e,0>
  EXPECT_LT(b.state("1-")(1).real(), 0.0);
  EXPECT_NEAR(b.level("3-").frequency, 3 - std::sqrt(3.0) * 0.02, 1e-15);
}

TEST(Transition, Frequencies) {
  const double k = 0.02;
  const auto kerr = build_kerr(k, 6);
  EXPECT_NEAR(transition_frequency(kerr, "1"), 1.0, 1e-15);
  EXPECT_NEAR(transition_frequency(kerr, "2"), 1 + 2 * k, 1e-15);
  const auto jc = build_jc(k, 6);
  EXPECT_NEAR(transition_frequency(jc, "1+"), 1 + k, 1e-15);
  EXPECT_NEAR(transition_frequency(jc, "1-"), 1 - k, 1e-15);
  EXPECT_NEAR(transition_frequency(jc, "2+"), 1 + (std::sqrt(2.0) - 1) * k, 1e-15);
  EXPECT_THROW(transition_frequency(jc, "7+"), SpaceError);
  EXPECT_THROW(transition_frequency(jc, "0*"), SpaceError);
  EXPECT_THROW(transition_frequency(kerr, "0"), SpaceError);
}

TEST(Transition, BranchFactors) {
  const auto [p, m] = jc_branch_factors(3);
  EXPECT_NEAR(p, 2 + std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(m, 2 - std::sqrt(3.0), 1e-15);
}

TEST(Transition, RabiAngle) {
  const auto kerr = build_kerr(0.02, 6);
  const auto jc = build_jc(0.02, 6);
  const auto kb = polariton_eigenbasis(kerr), jb = polariton_eigenbasis(jc);
  EXPECT_NEAR(std::abs(rabi_angle(kerr, kb, "0", "1", 1.0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(rabi_angle(kerr, kb, "1", "2", 1.0)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(rabi_angle(jc, jb, "0*", "1+", 1.0)), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(rabi_angle(jc, jb, "0*", "1-", 1.0)), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(rabi_angle(jc, jb, "1+", "2-", 1.0), SpaceError);
  EXPECT_THROW(rabi_angle(kerr, kb, "0", "2", 1.0), SpaceError);
}

TEST(Property, SpacingMonotonicity) {
  const double k = 0.02;
  const auto kerr = build_kerr(k, 8);
  for (int n = 2; n <= 8; ++n) {
    EXPECT_GT(transition_frequency(kerr, std::to_string(n)), transition_frequency(kerr, std::to_string(n - 1)));
  }
  const auto jc = build_jc(k, 8);
  for (const char* br : {"+", "-"}) {
    for (int n = 2; n <= 8; ++n) {
      const double cur = std::abs(transition_frequency(jc, std::to_string(n) + br) - 1.0);
      const double prev = std::abs(transition_frequency(jc, std::to_string(n - 1) + br) - 1.0);
      EXPECT_LT(cur, prev);
    }
  }
}

TEST(Property, LinearLimit) {
  const auto jc = build_jc(0.0, 5);
  const auto b = polariton_eigenbasis(jc);
  for (const auto& l : b.levels) EXPECT_NEAR(l.frequency, l.excitation, 1e-12);
  const auto kerr = build_kerr(0.0, 5);
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(transition_frequency(kerr, std::to_string(n)), 1.0, 1e-15);
  for (const char* lbl : {"1+", "3-", "5+"}) EXPECT_NEAR(transition_frequency(jc, lbl), 1.0, 1e-12);
}
