#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qmf/qmf.hpp"

namespace {

using qmf::cplx;
using qmf::CMatrix;
using qmf::FilterBank;
using qmf::LaurentPoly;
using qmf::MatLaurentPoly;

const double kR = 1.0 / std::sqrt(2.0);

TEST(Polyphase, HaarIsV) {
  const auto a = qmf::polyphase_from_filters(qmf::haar_bank());
  ASSERT_EQ(a.min_deg(), 0);
  ASSERT_EQ(a.max_deg(), 0);
  CMatrix v(2, 2);
  v << kR, kR, kR, -kR;
  EXPECT_LT((a.coeff(0) - v).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Polyphase, DelayedTapIsPermutation) {
  const FilterBank bank(2, {LaurentPoly::monomial(1.0, 1), LaurentPoly::constant(1.0)});
  const auto a = qmf::polyphase_from_filters(bank);
  CMatrix p(2, 2);
  p << 0, 1, 1, 0;
  EXPECT_EQ(a, MatLaurentPoly::constant(p));
}

TEST(Polyphase, D4BlocksFollowCoefficientLayout) {
  const auto bank = qmf::daubechies4();
  const auto a = qmf::polyphase_from_filters(bank);
  ASSERT_EQ(a.min_deg(), 0);
  ASSERT_EQ(a.max_deg(), 1);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(a.coeff(k)(0, j), bank.filter(0)[2 * k + j]);
      EXPECT_EQ(a.coeff(k)(1, j), bank.filter(1)[2 * k + j]);
    }
}

TEST(Polyphase, MatchesRootOfUnityFormula) {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 4; ++n) {
    std::vector<LaurentPoly> filters;
    for (int i = 0; i < n; ++i) filters.push_back(oracle::random_poly(rng, -5 + i, 7));
    const FilterBank bank(n, filters);
    const auto a = qmf::polyphase_from_filters(bank);
    for (int g = 0; g < 9; ++g) {
      const double angle = 2.0 * oracle::kPi * g / 9.0 + 0.1;
      EXPECT_LT((a(oracle::unit(angle)) - oracle::polyphase_at(bank, angle)).cwiseAbs().maxCoeff(), 1e-11);
    }
  }
}

TEST(Polyphase, RoundTripIsExact) {
  std::mt19937_64 rng(12);
  for (int n = 2; n <= 5; ++n) {
    std::vector<LaurentPoly> filters;
    for (int i = 0; i < n; ++i) filters.push_back(oracle::random_poly(rng, -3 - i, 2 + 2 * i));
    const FilterBank bank(n, filters);
    EXPECT_EQ(qmf::filters_from_polyphase(qmf::polyphase_from_filters(bank)), bank);
  }
  const FilterBank six(2, {oracle::random_poly(rng, 0, 5), oracle::random_poly(rng, 0, 5)});
  EXPECT_EQ(qmf::filters_from_polyphase(qmf::polyphase_from_filters(six)), six);
}

TEST(Polyphase, IdentityGivesDeltaFilters) {
  const auto bank = qmf::filters_from_polyphase(MatLaurentPoly::identity(3));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(bank.filter(i), LaurentPoly::monomial(1.0, i));
}

TEST(FilterBank, ValidatesShape) {
  EXPECT_THROW(FilterBank(1, {LaurentPoly()}), qmf::ValidationError);
  EXPECT_THROW(FilterBank(3, {LaurentPoly(), LaurentPoly()}), qmf::ValidationError);
}

TEST(HighpassCompletion, FollowsAlternatingFlip) {
  const auto d4 = qmf::daubechies4();
  const auto& a = d4.filter(0);
  const auto& b = d4.filter(1);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(b[k], (k % 2 == 0 ? 1.0 : -1.0) * std::conj(a[3 - k]));
  EXPECT_NEAR(std::abs(b(1.0)), 0.0, 1e-15);
}

TEST(CheckQmf, Examples) {
  const auto haar = qmf::check_qmf(qmf::haar_bank());
  EXPECT_TRUE(haar.pass);
  EXPECT_TRUE(haar.lowpass_ok);
  EXPECT_LE(haar.max_residual, 1e-14);

  EXPECT_TRUE(qmf::check_qmf(qmf::daubechies4()).pass);

  const LaurentPoly m(0, {kR, kR});
  const auto twin = qmf::check_qmf(FilterBank(2, {m, m}));
  EXPECT_FALSE(twin.pass);
  EXPECT_NEAR(twin.max_residual, 2.0, 1e-12);
}

TEST(CheckQmf, LowpassNormalizationIsReported) {
  // a sign flip keeps the QMF conditions and breaks m0(1) = sqrt2
  const auto h = qmf::haar_bank();
  const auto rep = qmf::check_qmf(FilterBank(2, {h.filter(0) * cplx(-1.0), h.filter(1)}));
  EXPECT_TRUE(rep.pass);
  EXPECT_FALSE(rep.lowpass_ok);
}

TEST(CheckQmf, EquivalentToUnitaryPolyphase) {
  std::mt19937_64 rng(13);
  std::vector<FilterBank> corpus{qmf::haar_bank(), qmf::daubechies4()};
  for (int i = 0; i < 20; ++i) corpus.push_back(oracle::random_qmf_bank(rng, 1 + i % 8));
  for (int i = 0; i < 6; ++i) corpus.push_back(oracle::random_qmf_bank_n(rng, 3 + i % 2, 1 + i % 3));
  const std::size_t good = corpus.size();
  for (std::size_t i = 0; i < 6; ++i) {
    auto filters = corpus[i].filters();
    filters[1] = filters[1] + LaurentPoly::monomial(0.01 * static_cast<double>(i + 1), static_cast<int>(i));
    corpus.emplace_back(corpus[i].scale(), filters);
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto q = qmf::check_qmf(corpus[i]);
    const auto u = qmf::is_unitary_on_torus(qmf::polyphase_from_filters(corpus[i]));
    EXPECT_EQ(q.pass, u.unitary) << "bank " << i;
    EXPECT_EQ(q.pass, i < good) << "bank " << i;
  }
}

TEST(DualFilters, UnitaryIsSelfDual) {
  const auto a = qmf::polyphase_from_filters(qmf::daubechies4());
  const auto pair = qmf::dual_filters(a);
  for (int i = 0; i < 2; ++i) EXPECT_LT(qmf::max_coeff_diff(pair.dual.filter(i), pair.primal.filter(i)), 1e-14);
  EXPECT_LT(qmf::duality_residual(pair), 1e-12);
}

TEST(DualFilters, ShearHasLowerDual) {
  const auto a = MatLaurentPoly::from_entries(2, {LaurentPoly::constant(1.0), LaurentPoly::monomial(1.0, 1), {},
                                                  LaurentPoly::constant(1.0)});
  const auto pair = qmf::dual_filters(a);
  const auto dual = qmf::polyphase_from_filters(pair.dual);
  // (A*)^-1 = [[1, 0], [-z^-1, 1]]
  const auto expect = MatLaurentPoly::from_entries(2, {LaurentPoly::constant(1.0), {}, LaurentPoly::monomial(-1.0, -1),
                                                       LaurentPoly::constant(1.0)});
  EXPECT_LT(qmf::max_coeff_diff(dual, expect), 1e-15);
  EXPECT_LT(qmf::duality_residual(pair), 1e-12);
}

TEST(DualFilters, DiagonalScaling) {
  CMatrix d(2, 2);
  d << 2, 0, 0, 1;
  const auto pair = qmf::dual_filters(MatLaurentPoly::constant(d));
  CMatrix e(2, 2);
  e << 0.5, 0, 0, 1;
  EXPECT_LT(qmf::max_coeff_diff(qmf::polyphase_from_filters(pair.dual), MatLaurentPoly::constant(e)), 1e-16);
  EXPECT_FALSE(qmf::check_qmf(pair.primal).pass);
  EXPECT_FALSE(qmf::check_qmf(pair.dual).pass);
  EXPECT_LT(qmf::duality_residual(pair), 1e-12);
}

TEST(DualFilters, Errors) {
  // det = 1 + z/2: nonvanishing but not a monomial
  const auto a = MatLaurentPoly::from_entries(2, {LaurentPoly(0, {1.0, 0.5}), {}, {}, LaurentPoly::constant(1.0)});
  try {
    qmf::dual_filters(a);
    FAIL() << "expected NonPolynomialInverse";
  } catch (const qmf::NonPolynomialInverse& e) {
    EXPECT_EQ(e.determinant(), LaurentPoly(0, {1.0, 0.5}));
  }
  // det = 1 + z vanishes at z = -1
  const auto s = MatLaurentPoly::from_entries(2, {LaurentPoly(0, {1.0, 1.0}), {}, {}, LaurentPoly::constant(1.0)});
  EXPECT_THROW(qmf::dual_filters(s), qmf::SingularOnTorus);
}

TEST(DualFilters, RandomMonomialDeterminant) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    // random lifting product (det 1) times diag(c z^d, 1)
    const auto steps = oracle::random_sl2_steps(rng, 3, 1);
    const auto a = qmf::lifting_recompose(steps) *
                   MatLaurentPoly::from_entries(2, {LaurentPoly::monomial(oracle::random_complex(rng), trial % 3 - 1), {}, {},
                                                    LaurentPoly::constant(1.0)});
    const auto pair = qmf::dual_filters(a);
    EXPECT_LT(qmf::duality_residual(pair), 1e-9);
    // A~* A = I coefficient-wise
    const auto dual = qmf::polyphase_from_filters(pair.dual);
    EXPECT_LT(qmf::max_coeff_diff(dual.adjoint() * a, MatLaurentPoly::identity(2)), 1e-9);
  }
}

}  // namespace
