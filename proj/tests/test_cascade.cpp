#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qmf/qmf.hpp"

namespace {

using qmf::cplx;
using qmf::FilterBank;
using qmf::GridFunction;
using qmf::LaurentPoly;

const double kR = 1.0 / std::sqrt(2.0);

FilterBank stretched_haar() { return qmf::bank_from_lowpass(LaurentPoly(0, {kR, 0.0, 0.0, kR})); }

// Converged D4 scaling function, shared by the property tests.
const GridFunction& d4_phi() {
  static const GridFunction phi = [] {
    const auto res = qmf::scaling_function(qmf::daubechies4(), 10, 40);
    EXPECT_TRUE(res.converged);
    return res.phi;
  }();
  return phi;
}

TEST(CascadeStep, HaarBoxIsFixed) {
  const auto box = GridFunction::box(6);
  const auto next = qmf::cascade_step(qmf::haar_bank(), box);
  EXPECT_EQ(next.support_lo, box.support_lo);
  EXPECT_EQ(next.support_hi, box.support_hi);
  EXPECT_EQ(qmf::grid_l2_diff(next, box), 0.0);

  const auto res = qmf::scaling_function(qmf::haar_bank(), 10, 12);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_EQ(res.log.at(0), 0.0);
}

TEST(CascadeStep, D4OneStepPlateaus) {
  const int j = 6;
  const auto bank = qmf::daubechies4();
  const auto g = qmf::cascade_step(bank, GridFunction::box(j));
  const int half = 1 << (j - 1);
  for (int n = 0; n < 4; ++n)
    for (int k = n * half; k < (n + 1) * half; ++k)
      EXPECT_NEAR(std::abs(g.at(k) - std::sqrt(2.0) * bank.filter(0)[n]), 0.0, 1e-15) << "plateau " << n;
  EXPECT_EQ(g.at(-1), cplx{});
  EXPECT_EQ(g.at(4 * half), cplx{});
}

TEST(CascadeStep, ZeroInput) {
  EXPECT_TRUE(qmf::cascade_step(qmf::daubechies4(), GridFunction{5, 0, -1, {}}).empty());
}

TEST(ScalingFunction, Validation) {
  EXPECT_THROW(qmf::scaling_function(qmf::haar_bank(), 10, 0), qmf::ValidationError);
  EXPECT_THROW(qmf::scaling_function(qmf::haar_bank(), -1, 3), qmf::ValidationError);
}

TEST(ScalingFunction, D4TwelveIterations) {
  const auto res = qmf::scaling_function(qmf::daubechies4(), 10, 12);
  ASSERT_EQ(res.log.size(), 12u);
  EXPECT_GE(res.phi.x(res.phi.support_lo), 0.0);
  EXPECT_LE(res.phi.x(res.phi.support_hi), 3.0);
  EXPECT_NEAR(std::abs(qmf::grid_integral(res.phi) - 1.0), 0.0, 1e-3);
  EXPECT_FALSE(res.diverged);
  // the difference shrinks by about 1/sqrt2 per step (subdominant transfer
  // eigenvalue 1/2 acting on the squared norm), so 12 steps stop near 7e-4
  for (std::size_t i = 4; i < res.log.size(); ++i) {
    const double rate = res.log[i] / res.log[i - 1];
    EXPECT_GT(rate, 0.45);
    EXPECT_LT(rate, 0.8);
  }
  EXPECT_FALSE(res.converged);
  EXPECT_GT(res.log.back(), 1e-4);
}

TEST(ScalingFunction, D4ConvergesWithMoreIterations) {
  const auto res = qmf::scaling_function(qmf::daubechies4(), 10, 60);
  EXPECT_TRUE(res.converged);
  EXPECT_LT(res.log.back(), 1e-6);
  EXPECT_LT(res.iterations, 40);
}

TEST(ScalingFunction, FixedPointProperty) {
  const auto& phi = d4_phi();
  EXPECT_LE(qmf::grid_l2_diff(qmf::cascade_step(qmf::daubechies4(), phi), phi), 1e-5);
}

TEST(ScalingFunction, StretchedHaarConvergesOnlyWeakly) {
  const int j = 8;
  const auto res = qmf::scaling_function(stretched_haar(), j, 12);
  // the fixed grid saturates after J steps; before that every step moves by 1 in L2
  EXPECT_EQ(res.iterations, j + 1);
  EXPECT_TRUE(res.converged);
  for (int i = 0; i < j; ++i) EXPECT_NEAR(res.log[static_cast<std::size_t>(i)], 1.0, 1e-12);
  const auto& g = res.phi;
  EXPECT_GE(g.x(g.support_lo), 0.0);
  EXPECT_LE(g.x(g.support_hi), 3.0);
  // mass 1/3 on each unit interval, as for the box on [0,3] divided by 3
  double avg[3] = {0.0, 0.0, 0.0};
  for (int k = g.support_lo; k <= g.support_hi; ++k) avg[static_cast<int>(std::floor(g.x(k)))] += g.at(k).real() * g.step();
  for (double a : avg) EXPECT_NEAR(a, 1.0 / 3.0, 0.01);
  // but not in L2: the box/3 has norm 1/sqrt3
  EXPECT_GT(std::sqrt(qmf::grid_inner(g, g).real()), 0.9);
  EXPECT_FALSE(qmf::per_check(stretched_haar(), 16, 1000).is_constant_1);
}

TEST(Wavelet, HaarMotherFunction) {
  const int j = 6;
  const auto psi = qmf::wavelet_from_scaling(qmf::haar_bank(), GridFunction::box(j));
  ASSERT_EQ(psi.size(), 1u);
  const int n = 1 << j;
  for (int k = -2; k < n + 2; ++k) EXPECT_EQ(psi[0].at(k).real(), qmf::haar_psi(k * psi[0].step())) << k;
}

TEST(Wavelet, D4SupportAndMoments) {
  const auto& phi = d4_phi();
  const auto psi = qmf::wavelet_from_scaling(qmf::daubechies4(), phi).at(0);
  EXPECT_GE(psi.x(psi.support_lo), 0.0);
  EXPECT_LE(psi.x(psi.support_hi), 3.0);
  EXPECT_NEAR(std::abs(qmf::grid_integral(psi)), 0.0, 1e-3);
  EXPECT_NEAR(std::abs(qmf::grid_moment(psi, 0)), 0.0, 1e-3);
  EXPECT_NEAR(std::abs(qmf::grid_moment(psi, 1)), 0.0, 1e-3);
  EXPECT_NEAR(std::abs(qmf::grid_integral(phi) - 1.0), 0.0, 1e-12);
  // unit L2 norm follows from the QMF conditions
  EXPECT_NEAR(qmf::grid_inner(psi, psi).real(), 1.0, 1e-3);
}

TEST(Wavelet, ThreeBandHasTwoWavelets) {
  std::mt19937_64 rng(61);
  const auto bank = oracle::random_qmf_bank_n(rng, 3, 1);
  const auto psi = qmf::wavelet_from_scaling(bank, GridFunction::box(4));
  EXPECT_EQ(psi.size(), 2u);
}

TEST(InfiniteProduct, Examples) {
  std::mt19937_64 rng(62);
  for (const auto& bank : {qmf::haar_bank(), qmf::daubechies4(), oracle::random_qmf_bank(rng, 2)})
    EXPECT_NEAR(std::abs(qmf::fourier_infinite_product(bank, 0.0) - 1.0), 0.0, 1e-15);
  EXPECT_LT(std::abs(qmf::fourier_infinite_product(qmf::haar_bank(), 2.0 * oracle::kPi, 40)), 1e-6);
  for (double t : {0.3, 1.0, 2.5, 7.0, -4.0})
    EXPECT_LT(std::abs(qmf::fourier_infinite_product(qmf::haar_bank(), t, 40) - oracle::haar_phi_hat(t)), 1e-9);
  EXPECT_THROW(qmf::fourier_infinite_product(qmf::haar_bank(), 1.0, 0), qmf::ValidationError);
}

TEST(InfiniteProduct, OneStepRecursion) {
  const auto bank = qmf::daubechies4();
  for (double t : {0.5, 2.0, 5.0, 11.0}) {
    const cplx lhs = qmf::fourier_infinite_product(bank, t);
    const cplx rhs = bank.lowpass()(qmf::at_angle(t / 2.0)) / std::sqrt(2.0) * qmf::fourier_infinite_product(bank, t / 2.0);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  }
}

TEST(InfiniteProduct, MatchesGridTransformOfCascade) {
  const auto& phi = d4_phi();
  const auto bank = qmf::daubechies4();
  EXPECT_LT(std::abs(qmf::fourier_infinite_product(bank, oracle::kPi, 40) - qmf::grid_fourier(phi, oracle::kPi)), 1e-3);
  for (int s = 0; s < 16; ++s) {
    const double t = -12.0 + 1.6 * s;
    EXPECT_LT(std::abs(qmf::fourier_infinite_product(bank, t) - qmf::grid_fourier(phi, t)), 1e-3) << "t = " << t;
  }
}

TEST(ExpectedPosition, Haar) {
  const auto psi = qmf::wavelet_from_scaling(qmf::haar_bank(), GridFunction::box(10)).at(0);
  const auto e = qmf::expected_position(psi);
  EXPECT_NEAR(e.position, 0.5, 1e-6);
  EXPECT_EQ(e.nearest_half, 0.5);
  EXPECT_NEAR(qmf::expected_position(qmf::translated(psi, 3)).position, 3.5, 1e-6);
  EXPECT_NEAR(qmf::expected_position(qmf::translated(psi, -2)).position, -1.5, 1e-6);
}

TEST(ExpectedPosition, D4AndZero) {
  const auto psi = qmf::wavelet_from_scaling(qmf::daubechies4(), d4_phi()).at(0);
  const auto e = qmf::expected_position(psi);
  EXPECT_LE(e.gap, 1e-2) << "position " << e.position;
  EXPECT_THROW(qmf::expected_position(GridFunction{4, 0, 3, std::vector<cplx>(4)}), qmf::ValidationError);
}

TEST(Telescoping, PaperExamples) {
  const auto a = qmf::haar_telescoping(0.5, 40);
  EXPECT_EQ(a[0], 0.5);
  EXPECT_EQ(a[1], 0.75);
  EXPECT_NEAR(a.back(), 1.0, 1e-12);
  const auto b = qmf::haar_telescoping(1.5, 40);
  EXPECT_EQ(b[0], -0.5);
  EXPECT_EQ(b[1], -0.25);
  EXPECT_NEAR(b.back(), 0.0, 1e-12);
  const auto c = qmf::haar_telescoping(3.0, 40);
  EXPECT_EQ(c[0], 0.0);
  EXPECT_EQ(c[1], -0.25);
  EXPECT_NEAR(c.back(), 0.0, 1e-12);
  EXPECT_THROW(qmf::haar_telescoping(1.0, 0), qmf::ValidationError);
}

TEST(Telescoping, TailIdentity) {
  std::mt19937_64 rng(63);
  std::uniform_real_distribution<double> u(-5.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = u(rng);
    const auto sums = qmf::haar_telescoping(x, 60);
    for (int n = 1; n <= 20; ++n) {
      // sum_{k>n} 2^-k psi(2^-k x) = 2^-n phi(2^-n x)
      const double tail = sums.back() - sums[static_cast<std::size_t>(n - 1)];
      EXPECT_NEAR(tail, qmf::haar_tail(x, n) - qmf::haar_tail(x, 60), 1e-12);
    }
    EXPECT_NEAR(sums.back(), qmf::haar_phi(x), 1e-12 + qmf::haar_tail(x, 60));
  }
}

TEST(ScalingFunction, PartitionOfUnityAndOrthogonalTranslates) {
  const auto& phi = d4_phi();
  const int unit = 1 << phi.j_level;
  for (int k = 0; k < unit; k += 7) {
    cplx s{};
    for (int m = -3; m <= 3; ++m) s += phi.at(k + m * unit);
    EXPECT_NEAR(std::abs(s - 1.0), 0.0, 1e-3) << "x = " << phi.x(k);
  }
  for (int k = -3; k <= 3; ++k) {
    const cplx ip = qmf::grid_inner(phi, qmf::translated(phi, k));
    EXPECT_NEAR(std::abs(ip - (k == 0 ? 1.0 : 0.0)), 0.0, 1e-3) << "shift " << k;
  }
}

}  // namespace
