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

#include <random>

#include "feblockade/errors.hpp"
#include "feblockade/tensor_core.hpp"
#include "oracles.hpp"

using namespace feb;

namespace {

TensorSpace sp(const char* label, std::size_t d) { return TensorSpace::single(label, d); }

Operator random_op(const TensorSpace& s, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(s.dim());
  return Operator(s, oracle::random_density(d, rng) + oracle::random_unitary(d, rng));
}

}  // namespace

TEST(TensorSpace, DimensionIsProductOfFactors) {
  const TensorSpace s({{"a", 2}, {"b", 3}, {"c", 5}});
  EXPECT_EQ(s.dim(), 30u);
  EXPECT_EQ(s.position("b"), 1u);
  EXPECT_EQ(s.index(s.digits(17)), 17u);
  EXPECT_THROW(s.position("z"), SpaceError);
}

TEST(TensorSpace, RejectsDuplicateLabelsAndZeroDims) {
  EXPECT_THROW(TensorSpace({{"a", 2}, {"a", 3}}), SpaceError);
  EXPECT_THROW(TensorSpace({{"a", 0}}), SpaceError);
}

TEST(Kron, IdentityTimesIdentity) {
  const auto i2a = Operator::identity(sp("a", 2));
  const auto i2b = Operator::identity(sp("b", 2));
  const auto k = kron(i2a, i2b);
  EXPECT_EQ(k.dim(), 4u);
  EXPECT_EQ(max_abs_diff(k, Operator::identity(k.space())), 0.0);
}

TEST(Kron, DimensionsMultiply) {
  std::mt19937_64 rng(1);
  const auto k = kron(random_op(sp("a", 3), rng), random_op(sp("b", 5), rng));
  EXPECT_EQ(k.matrix().rows(), 15);
  EXPECT_EQ(k.space().factors().front().label, "a");
}

TEST(Kron, MixedProductMatchesDirectMultiplication) {
  std::mt19937_64 rng(2);
  const auto A = random_op(sp("a", 2), rng), C = random_op(sp("a", 2), rng);
  const auto B = random_op(sp("b", 3), rng), D = random_op(sp("b", 3), rng);
  const Matrix lhs = oracle::kron(A.matrix(), B.matrix()) * oracle::kron(C.matrix(), D.matrix());
  EXPECT_LT((kron(A * C, B * D).matrix() - lhs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((kron(A, B).matrix() - oracle::kron(A.matrix(), B.matrix())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Kron, Associative) {
  std::mt19937_64 rng(3);
  const auto A = random_op(sp("a", 2), rng), B = random_op(sp("b", 3), rng), C = random_op(sp("c", 2), rng);
  EXPECT_LE(max_abs_diff(kron(kron(A, B), C), kron(A, kron(B, C))), 1e-14);
}

TEST(Embed, FlipsAtomOnly) {
  const TensorSpace s = sp("atom", 2).concat(sp("cav", 3));
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  const auto X = embed(Operator(sp("atom", 2), sx), "atom", s);
  const auto g0 = StateVector::basis(s, s.index({0, 0}));
  const Vector out = X.matrix() * g0.amplitudes();
  EXPECT_EQ(out(static_cast<Eigen::Index>(s.index({1, 0}))), cplx(1.0));
  EXPECT_NEAR(out.norm(), 1.0, 1e-15);
}

TEST(Embed, IdentityStaysIdentity) {
  const TensorSpace s({{"el", 4}, {"cav", 3}});
  EXPECT_EQ(max_abs_diff(embed(Operator::identity(sp("cav", 3)), "cav", s), Operator::identity(s)), 0.0);
}

TEST(Embed, DisjointFactorsCommute) {
  const TensorSpace s({{"el", 5}, {"cav", 4}});
  const auto a = embed(Operator(sp("cav", 4), oracle::lowering(3)), "cav", s);
  const auto b = embed(Operator(sp("el", 5), oracle::shift(5)), "el", s);
  EXPECT_EQ(commutator_norm(a, b), 0.0);
}

TEST(Embed, PreservesHermiticityAndUnitarity) {
  std::mt19937_64 rng(4);
  const TensorSpace s({{"x", 2}, {"y", 3}, {"z", 2}});
  const Matrix h0 = oracle::random_density(3, rng);
  EXPECT_TRUE(embed(Operator(sp("y", 3), h0), "y", s).is_hermitian());
  EXPECT_TRUE(embed(Operator(sp("y", 3), oracle::random_unitary(3, rng)), "y", s).is_unitary());
}

TEST(Embed, ErrorsOnUnknownLabelOrWrongDimension) {
  const TensorSpace s({{"el", 4}, {"cav", 3}});
  EXPECT_THROW(embed(Operator::identity(sp("atom", 2)), "atom", s), SpaceError);
  EXPECT_THROW(embed(Operator::identity(sp("cav", 2)), "cav", s), SpaceError);
}

TEST(Embed, MultiFactorMatchesKronOrder) {
  std::mt19937_64 rng(5);
  const TensorSpace s({{"x", 2}, {"y", 3}, {"z", 2}});
  const Matrix xz = oracle::random_unitary(4, rng);
  const auto op = embed(Operator(TensorSpace({{"x", 2}, {"z", 2}}), xz), std::vector<std::string>{"x", "z"}, s);
  // Oracle: permute y to the back, kron, permute back.
  for (std::size_t i = 0; i < s.dim(); ++i) {
    for (std::size_t j = 0; j < s.dim(); ++j) {
      const auto di = s.digits(i), dj = s.digits(j);
      const cplx want = di[1] == dj[1] ? xz(static_cast<Eigen::Index>(di[0] * 2 + di[2]),
                                            static_cast<Eigen::Index>(dj[0] * 2 + dj[2]))
                                       : cplx(0.0);
      ASSERT_LT(std::abs(op.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - want), 1e-15);
    }
  }
}

TEST(PartialTrace, ProductStateKeepsFirst) {
  std::mt19937_64 rng(6);
  const auto psi = StateVector(sp("a", 3), oracle::random_state(3, rng));
  const auto phi = StateVector(sp("b", 2), oracle::random_state(2, rng));
  const auto rho = kron(DensityMatrix::pure(psi), DensityMatrix::pure(phi));
  const auto red = partial_trace(rho, {"a"});
  EXPECT_LT((red.matrix() - DensityMatrix::pure(psi).matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PartialTrace, BellStateIsMaximallyMixed) {
  const TensorSpace s({{"a", 2}, {"b", 2}});
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const auto rho = DensityMatrix::pure(StateVector(s, v));
  for (const char* keep : {"a", "b"}) {
    const auto red = partial_trace(rho, {keep});
    EXPECT_LT((red.matrix() - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(PartialTrace, PreservesTrace) {
  std::mt19937_64 rng(7);
  const DensityMatrix rho(TensorSpace({{"a", 2}, {"b", 3}}), oracle::random_density(6, rng));
  EXPECT_NEAR(partial_trace(rho, {"b"}).trace().real(), rho.trace().real(), 1e-14);
}

TEST(PartialTrace, OrderOfReductionIrrelevant) {
  std::mt19937_64 rng(8);
  const DensityMatrix rho(TensorSpace({{"a", 2}, {"b", 3}, {"c", 2}}), oracle::random_density(12, rng));
  const auto direct = partial_trace(rho, {"b"});
  const auto via_ab = partial_trace(partial_trace(rho, {"a", "b"}), {"b"});
  const auto via_bc = partial_trace(partial_trace(rho, {"b", "c"}), {"b"});
  EXPECT_LT((direct.matrix() - via_ab.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((direct.matrix() - via_bc.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTrace, UnknownLabelThrows) {
  const auto rho = DensityMatrix::maximally_mixed(TensorSpace({{"a", 2}, {"b", 2}}));
  EXPECT_THROW(partial_trace(rho, {"q"}), SpaceError);
  EXPECT_THROW(partial_trace(rho, {}), SpaceError);
}

TEST(Expectation, NumberOperator) {
  const auto s = sp("cav", 4);
  const Operator a(s, oracle::lowering(3));
  const auto n = a.adjoint() * a;
  EXPECT_EQ(expectation(DensityMatrix::pure(StateVector::basis(s, 0)), n), cplx(0.0));
  EXPECT_NEAR(expectation(DensityMatrix::pure(StateVector::basis(s, 1)), n).real(), 1.0, 1e-15);
}

TEST(Expectation, MaximallyMixedGivesNormalizedTrace) {
  std::mt19937_64 rng(9);
  const auto s = sp("x", 5);
  const Operator o(s, oracle::random_density(5, rng) * 3.0);
  const cplx e = expectation(DensityMatrix::maximally_mixed(s), o);
  EXPECT_LT(std::abs(e - o.matrix().trace() / 5.0), 1e-15);
  EXPECT_LT(std::abs(e.imag()), 1e-10);
}

TEST(Expectation, SpaceMismatchThrows) {
  EXPECT_THROW(expectation(DensityMatrix::maximally_mixed(sp("x", 2)), Operator::identity(sp("y", 2))), SpaceError);
}

TEST(DensityMatrix, ValidatesInvariants) {
  const auto s = sp("x", 2);
  Matrix bad_trace = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix(s, bad_trace), NumericalError);
  Matrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityMatrix(s, neg), NumericalError);
  Matrix nonherm(2, 2);
  nonherm << 0.5, 0.1, 0.0, 0.5;
  EXPECT_THROW(DensityMatrix(s, nonherm), NumericalError);
}

TEST(StateVector, RequiresUnitNorm) {
  Vector v = Vector::Ones(2);
  EXPECT_THROW(StateVector(sp("x", 2), v), SpaceError);
  EXPECT_NEAR(StateVector::normalized(sp("x", 2), v).amplitudes().norm(), 1.0, 1e-15);
  EXPECT_THROW(StateVector::normalized(sp("x", 2), Vector::Zero(2)), SpaceError);
}

TEST(Property, UnitaryConjugationPreservesTrace) {
  std::mt19937_64 rng(10);
  const auto s = TensorSpace({{"a", 3}, {"b", 3}});
  for (int k = 0; k < 10; ++k) {
    const DensityMatrix rho(s, oracle::random_density(9, rng));
    const Operator u(s, oracle::random_unitary(9, rng));
    EXPECT_NEAR(rho.conjugated(u).trace().real(), 1.0, 1e-12);
  }
}
