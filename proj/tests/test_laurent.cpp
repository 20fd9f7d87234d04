#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qmf/laurent.hpp"

namespace {

using qmf::cplx;
using qmf::CMatrix;
using qmf::LaurentPoly;
using qmf::MatLaurentPoly;

const double kR = 1.0 / std::sqrt(2.0);

CMatrix v_matrix() {
  CMatrix v(2, 2);
  v << kR, kR, kR, -kR;
  return v;
}

TEST(LaurentPoly, CanonicalFormStripsNegligibleEnds) {
  LaurentPoly p(-2, {1e-16, 0.0, 3.0, 0.0, 1e-15});
  EXPECT_EQ(p.min_deg(), 0);
  EXPECT_EQ(p.max_deg(), 0);
  EXPECT_EQ(p[0], cplx(3.0));
  EXPECT_TRUE(LaurentPoly(5, {0.0, 1e-15}).is_zero());
  EXPECT_EQ(LaurentPoly().span_width(), -1);
}

TEST(LaurentPoly, EvaluationExamples) {
  EXPECT_EQ(LaurentPoly()(cplx(0.0, 1.0)), cplx(0.0));
  EXPECT_NEAR(std::abs(LaurentPoly::monomial(1.0, 1)(-1.0) - cplx(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(LaurentPoly(0, {kR, kR})(1.0).real(), 1.41421356, 1e-8);
}

TEST(LaurentPoly, EvaluationMatchesDirectSum) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const LaurentPoly p = oracle::random_poly(rng, -5 + trial % 4, 3 + trial % 7);
    for (int k = 0; k < 16; ++k) {
      const cplx z = qmf::torus_point(k, 16);
      EXPECT_LT(std::abs(p(z) - oracle::eval(p, z)), 1e-12);
    }
  }
}

TEST(LaurentPoly, AlgebraIdentities) {
  const LaurentPoly one_plus(0, {1.0, 1.0}), one_minus(0, {1.0, -1.0});
  EXPECT_EQ(one_plus * one_minus, LaurentPoly(0, {1.0, 0.0, -1.0}));
  EXPECT_EQ(LaurentPoly(0, {kR, kR}).adjoint(), LaurentPoly(-1, {kR, kR}));
  EXPECT_EQ(one_plus - one_plus, LaurentPoly());
  EXPECT_EQ(LaurentPoly(1, {2.0}).dilate(3), LaurentPoly::monomial(2.0, 3));
  EXPECT_EQ(one_plus.shifted(-4).min_deg(), -4);
}

TEST(LaurentPoly, ProductIsPointwiseAndAdjointIsInvolution) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const LaurentPoly p = oracle::random_poly(rng, -3, 4), q = oracle::random_poly(rng, -6, 1);
    EXPECT_EQ(p.adjoint().adjoint(), p);
    for (int k = 0; k < 32; ++k) {
      const cplx z = qmf::torus_point(k, 32);
      EXPECT_LT(std::abs((p * q)(z) - p(z) * q(z)), 1e-12 * (1.0 + std::abs(p(z) * q(z))));
      EXPECT_LT(std::abs(p.adjoint()(z) - std::conj(p(z))), 1e-12);
    }
  }
}

TEST(MatLaurentPoly, VIsSelfInverse) {
  const auto v = MatLaurentPoly::constant(v_matrix());
  EXPECT_LT(qmf::max_coeff_diff(v * v, MatLaurentPoly::identity(2)), 1e-15);
}

TEST(MatLaurentPoly, DimensionMismatchIsInvalidOperand) {
  EXPECT_THROW(MatLaurentPoly::identity(2) * MatLaurentPoly::identity(3), qmf::InvalidOperand);
  EXPECT_THROW(MatLaurentPoly::identity(2) + MatLaurentPoly::identity(3), qmf::InvalidOperand);
  EXPECT_THROW(MatLaurentPoly(2, 0, {CMatrix::Zero(3, 3)}), qmf::InvalidOperand);
}

TEST(MatLaurentPoly, AdjointMatchesConjugateTranspose) {
  std::mt19937_64 rng(3);
  std::vector<LaurentPoly> e;
  for (int i = 0; i < 9; ++i) e.push_back(oracle::random_poly(rng, -2, 2));
  const auto a = MatLaurentPoly::from_entries(3, e);
  for (int k = 0; k < 8; ++k) {
    const cplx z = qmf::torus_point(k, 8);
    EXPECT_LT((a.adjoint()(z) - a(z).adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MatLaurentPoly, DeterminantAndAdjugate) {
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 4; ++n) {
    std::vector<LaurentPoly> e;
    for (int i = 0; i < n * n; ++i) e.push_back(oracle::random_poly(rng, -1, 1));
    const auto a = MatLaurentPoly::from_entries(n, e);
    const auto det = qmf::determinant(a);
    const auto prod = a * qmf::adjugate(a);
    const auto expect = MatLaurentPoly::identity(n) * det;
    EXPECT_LT(qmf::max_coeff_diff(prod, expect), 1e-10 * (1.0 + det.max_abs_coeff()));
    for (int k = 0; k < 8; ++k) {
      const cplx z = qmf::torus_point(k, 8);
      const cplx ref = a(z).determinant();
      EXPECT_LT(std::abs(det(z) - ref), 1e-10 * (1.0 + std::abs(ref)));
    }
  }
}

TEST(Unitarity, Examples) {
  const auto v = MatLaurentPoly::constant(v_matrix());
  const auto rv = qmf::is_unitary_on_torus(v);
  EXPECT_TRUE(rv.unitary);
  EXPECT_LE(rv.residual, 1e-15);

  const auto diag = MatLaurentPoly::from_entries(2, {LaurentPoly::monomial(1.0, 1), {}, {}, LaurentPoly::constant(1.0)});
  EXPECT_TRUE(qmf::is_unitary_on_torus(v * diag).unitary);

  const auto shear =
      MatLaurentPoly::from_entries(2, {LaurentPoly::constant(1.0), LaurentPoly::monomial(1.0, 1), {}, LaurentPoly::constant(1.0)});
  const auto rs = qmf::is_unitary_on_torus(shear);
  EXPECT_FALSE(rs.unitary);
  EXPECT_GE(rs.residual, 1.0);
}

TEST(Unitarity, GridTooSmallForDegreeIsRejected) {
  const auto a = MatLaurentPoly(1, 0, {CMatrix::Identity(1, 1), CMatrix::Zero(1, 1), CMatrix::Zero(1, 1), CMatrix::Identity(1, 1)});
  EXPECT_THROW(qmf::is_unitary_on_torus(a, 4), qmf::ValidationError);
}

TEST(Unitarity, ResidualMatchesDirectOracleAndImpliesUnimodularDet) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = qmf::unitary_from_projections(qmf::random_projection_params(1 + trial % 5, rng));
    const auto rep = qmf::is_unitary_on_torus(a, 64);
    EXPECT_NEAR(rep.residual, oracle::unitarity_residual(a, 64), 1e-14);
    ASSERT_TRUE(rep.unitary);
    const auto det = qmf::determinant(a);
    for (int k = 0; k < 1024; ++k) EXPECT_NEAR(std::abs(det(qmf::torus_point(k, 1024))), 1.0, 1e-9);
  }
}

TEST(Winding, Monomials) {
  EXPECT_EQ(qmf::winding_number(LaurentPoly::monomial(1.0, 1)), 1);
  EXPECT_EQ(qmf::winding_number(LaurentPoly::monomial(1.0, 3)), 3);
  EXPECT_EQ(qmf::winding_number(LaurentPoly::monomial(2.0, -5)), -5);
  EXPECT_EQ(qmf::winding_number(LaurentPoly::constant(-1.0)), 0);
}

TEST(Winding, HighDegreeTriggersRefinement) {
  // z^600 on 64 points takes steps above pi/2; refinement must recover 600
  EXPECT_EQ(qmf::winding_number(LaurentPoly::monomial(1.0, 600), 64), 600);
}

TEST(Winding, ZeroOnTorusIsSingular) {
  try {
    qmf::winding_number(LaurentPoly(0, {1.0, 1.0}), 1024);  // vanishes at z = -1
    FAIL() << "expected SingularOnTorus";
  } catch (const qmf::SingularOnTorus& e) {
    EXPECT_LT(e.min_modulus(), 1e-9);
  }
}

TEST(Winding, AdditiveOnProducts) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> deg(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    // monomial times a root-free perturbation 2 + z^k / 2 keeps |p| >= 1.5
    const LaurentPoly p = LaurentPoly::monomial(oracle::random_complex(rng), deg(rng)) *
                          (LaurentPoly::constant(2.0) + LaurentPoly::monomial(0.5, deg(rng)));
    const LaurentPoly q = LaurentPoly::monomial(oracle::random_complex(rng), deg(rng));
    EXPECT_EQ(qmf::winding_number(p * q), qmf::winding_number(p) + qmf::winding_number(q));
  }
}

TEST(Winding, ProjectionFactorHasClassOne) {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 4; ++n) {
    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) v(j) = oracle::random_complex(rng);
    v.normalize();
    const CMatrix p = v * v.adjoint();
    const auto a = MatLaurentPoly(n, 0, {CMatrix::Identity(n, n) - p, p});
    EXPECT_EQ(qmf::k1_class(a), 1);
  }
}

}  // namespace
