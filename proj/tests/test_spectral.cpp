#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "persistlab/spectral.hpp"

using namespace persistlab;

TEST(FgnCovariance, ClosedFormValues) {
  EXPECT_NEAR(fgn_covariance(HurstParam(0.75), 1), 0.41421356237309505, 1e-15);
  EXPECT_NEAR(fgn_covariance(HurstParam(0.3), 1), -0.24214171674480097, 1e-15);
  EXPECT_NEAR(fgn_covariance(HurstParam(0.3), 10), -0.0047907295657464308, 1e-16);
  EXPECT_NEAR(fgn_covariance(HurstParam(0.7), 1), 0.31950791077289418, 1e-15);
  EXPECT_NEAR(fgn_covariance(HurstParam(0.7), 1000), 0.0044377012939072996, 1e-16);
  EXPECT_DOUBLE_EQ(fgn_covariance(HurstParam(0.4), 0), 1.0);
  EXPECT_DOUBLE_EQ(fgn_covariance(HurstParam(0.4), -3), fgn_covariance(HurstParam(0.4), 3));
}

TEST(FgnCovariance, WhiteNoiseAtHalf) {
  for (long k = 1; k < 40; ++k) EXPECT_NEAR(fgn_covariance(HurstParam(0.5), k), 0.0, 1e-15);
}

TEST(FgnCovariance, SeriesBranchIsContinuous) {
  for (double H : {0.2, 0.45, 0.9}) {
    const double a = 2 * H;
    const double direct = 0.5 * (std::pow(9.0, a) - 2 * std::pow(8.0, a) + std::pow(7.0, a));
    EXPECT_NEAR(fgn_covariance(HurstParam(H), 8), direct, 1e-13);
  }
}

TEST(VarianceProfile, FgnIsPowerLaw) {
  for (double H : {0.3, 0.5, 0.7}) {
    const auto p = variance_profile(ProcessModel::fgn(HurstParam(H)), 512);
    for (long n : {1L, 2L, 17L, 512L}) EXPECT_NEAR(p(n) / std::pow(n, 2 * H), 1.0, 1e-10) << "H=" << H << " n=" << n;
    EXPECT_DOUBLE_EQ(p(0), 0.0);
  }
}

TEST(DensityCovariance, ConstantFactor) {
  const auto r = covariance_sequence(ProcessModel::density(HurstParam(0.7), SlowlyVarying::constant(1.0)), 8);
  // mpmath quadrature of 2 m_H int_0^pi cos(ku) u^{1-2H} du
  EXPECT_NEAR(r(0), 1.0595641415800709, 1e-8);
  EXPECT_NEAR(r(1), 0.3011859660968123, 1e-8);
  EXPECT_NEAR(r(5), 0.1076219603262797, 1e-8);
}

TEST(DensityCovariance, LogPowerFactor) {
  const auto r = covariance_sequence(ProcessModel::density(HurstParam(0.7), SlowlyVarying::log_power(1.0, 0.5)), 8);
  EXPECT_NEAR(r(0), 1.3554273143794998, 1e-8);
  EXPECT_NEAR(r(3), 0.31328348398336593, 1e-8);
}

TEST(DensityCovariance, FlatDensityIsWhite) {
  const auto r = covariance_sequence(ProcessModel::density(HurstParam(0.5), SlowlyVarying::constant(1.0), std::numbers::pi), 16);
  EXPECT_NEAR(r(0), 1.0, 1e-9);
  for (long k = 1; k <= 16; ++k) EXPECT_NEAR(r(k), 0.0, 1e-9);
}

TEST(DensityCovariance, FgnSpectralMatchesClosedForm) {
  const auto r = covariance_sequence(ProcessModel::fgn_spectral(HurstParam(0.6)), 64);
  for (long k = 0; k <= 64; ++k) EXPECT_NEAR(r(k), fgn_covariance(HurstParam(0.6), k), 1e-12);
}

TEST(Combinations, IntegratedProcessCoefficients) {
  const auto c = I_combination(3);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (std::pair<long, double>{1, 1.0}));
  EXPECT_EQ(c[2], (std::pair<long, double>{3, 0.5}));
  const auto m = I_combination(-2);
  EXPECT_EQ(m[0], (std::pair<long, double>{-1, -1.0}));
  EXPECT_EQ(m[1], (std::pair<long, double>{-2, -0.5}));
  EXPECT_TRUE(I_combination(0).empty());
}

TEST(Combinations, SecondMomentOfI) {
  // numpy quadratic form on the S covariance matrix
  const double expect[] = {25811094.053345915, 357913856.0, 5052901881.9841518};
  int i = 0;
  for (double H : {0.3, 0.5, 0.7}) {
    const auto p = variance_profile(ProcessModel::fgn(HurstParam(H)), 1024);
    const auto c = I_combination(1024);
    EXPECT_NEAR(covariance(p, c, c) / expect[i], 1.0, 1e-11) << "H=" << H;
    ++i;
  }
}

TEST(Combinations, IbarSecondMomentIsSumOfS) {
  const auto p = variance_profile(ProcessModel::fgn(HurstParam(0.5)), 10);
  // Ibar_10 = S_1 + ... + S_10 with independent increments: sum_k (11-k)^2
  double want = 0;
  for (int k = 1; k <= 10; ++k) want += (11.0 - k) * (11.0 - k);
  EXPECT_NEAR(second_moment_Ibar(p, 10), want, 1e-10);
}

TEST(Gram, SymmetricAndPsd) {
  const auto p = variance_profile(ProcessModel::fgn(HurstParam(0.7)), 16);
  const std::vector<long> idx = {-3, -1, 1, 2, 5};
  const Eigen::MatrixXd G = cov_I(p, idx);
  EXPECT_LT((G - G.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(ShiftedI, CenteringOnSPreservesLaw) {
  const std::vector<long> idx = {-5, -2, -1, 1, 3, 6};
  for (double H : {0.3, 0.7}) {
    const auto p = variance_profile(ProcessModel::fgn(HurstParam(H)), 64);
    EXPECT_LT(shifted_I_covariance_check(p, 7, idx), 1e-9);
  }
}

TEST(ShiftedI, MidpointCenteringDoesNot) {
  const std::vector<long> idx = {-5, -2, -1, 1, 3, 6};
  const auto p = variance_profile(ProcessModel::fgn(HurstParam(0.7)), 64);
  EXPECT_GT(shifted_I_covariance_check(p, 7, idx, ShiftCentering::Stilde), 1.0);
}

TEST(Szego, HoldsForFgnAndDensities) {
  EXPECT_TRUE(szego_check(ProcessModel::fgn(HurstParam(0.3))));
  EXPECT_TRUE(szego_check(ProcessModel::fgn(HurstParam(0.7))));
  EXPECT_TRUE(szego_check(ProcessModel::density(HurstParam(0.7), SlowlyVarying::log_power(1.0, 0.5))));
}

TEST(Szego, FailsWhenDensityVanishesOnAnInterval) {
  const auto m = ProcessModel::custom_density(HurstParam(0.5), [](double u) { return u < 1.0 ? 1.0 : 0.0; });
  EXPECT_FALSE(szego_check(m));
  EXPECT_THROW(szego_check(ProcessModel::profile(HurstParam(0.6), SlowlyVarying::constant())), ConfigError);
}

TEST(SignChanges, Counts) {
  const std::vector<double> x = {1, -1, 0, -2, 3, 3, -1};
  EXPECT_EQ(count_sign_changes(x), 3);
  EXPECT_EQ(count_sign_changes(std::vector<double>{}), 0);
}
