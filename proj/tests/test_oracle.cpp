#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "persistlab/oracle.hpp"

using namespace persistlab;

namespace {

double binom_over_4n(long N) {
  double p = 1.0;
  for (long k = 1; k <= N; ++k) p *= (2.0 * k - 1.0) / (2.0 * k);
  return p;
}

}  // namespace

TEST(Orthant, BivariateArcsine) {
  for (double rho : {-0.8, -0.2, 0.0, 0.5, 0.95}) {
    Eigen::MatrixXd c(2, 2);
    c << 1, rho, rho, 1;
    const auto r = orthant_prob({c, Eigen::VectorXd::Zero(2)});
    EXPECT_NEAR(r.prob, 0.25 + std::asin(rho) / (2 * std::numbers::pi), std::max(r.err, 1e-6)) << rho;
  }
}

TEST(Orthant, TrivariateArcsine) {
  Eigen::MatrixXd c(3, 3);
  c << 1, 0.2, 0.5, 0.2, 1, -0.3, 0.5, -0.3, 1;
  const auto r = orthant_prob({c, Eigen::VectorXd::Zero(3)});
  EXPECT_NEAR(r.prob, 0.15844354987374083, std::max(r.err, 1e-6));
  EXPECT_LT(r.err, 1e-4);
}

TEST(Orthant, UnivariateAndScaled) {
  Eigen::MatrixXd c(1, 1);
  c << 4.0;
  Eigen::VectorXd u(1);
  u << 2.0;
  EXPECT_NEAR(orthant_prob({c, u}).prob, normal_cdf(1.0), 1e-12);
}

TEST(Orthant, IndependentProduct) {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(6, 6);
  Eigen::VectorXd u(6);
  u << -1, -0.5, 0, 0.3, 1, 2;
  double want = 1;
  for (int i = 0; i < 6; ++i) want *= normal_cdf(u[i]);
  const auto r = orthant_prob({c, u});
  EXPECT_NEAR(r.prob, want, std::max(r.err, 1e-7));
}

TEST(Orthant, SingularCovariance) {
  Eigen::MatrixXd c(2, 2);
  c << 1, 1, 1, 1;  // X1 = X2
  const auto r = orthant_prob({c, Eigen::VectorXd::Zero(2)});
  EXPECT_NEAR(r.prob, 0.5, std::max(r.err, 1e-6));
}

TEST(Orthant, Rejections) {
  Eigen::MatrixXd c(2, 2);
  c << 1, 2, 2, 1;
  EXPECT_THROW(orthant_prob({c, Eigen::VectorXd::Zero(2)}), NotPSD);
  const Eigen::MatrixXd big = Eigen::MatrixXd::Identity(13, 13);
  EXPECT_THROW(orthant_prob({big, Eigen::VectorXd::Zero(13)}), DimensionTooLarge);
}

TEST(Exact, SparreAndersenValues) {
  EXPECT_DOUBLE_EQ(sparre_andersen_one_sided(1), 0.5);
  EXPECT_DOUBLE_EQ(sparre_andersen_one_sided(2), 0.375);
  EXPECT_DOUBLE_EQ(sparre_andersen_one_sided(3), 0.3125);
  EXPECT_NEAR(sparre_andersen_one_sided(256), binom_over_4n(256), 1e-15);
  EXPECT_THROW(sparre_andersen_one_sided(0), ConfigError);
}

TEST(Exact, WhiteNoiseTwoSidedIsSquare) {
  const auto m = ProcessModel::fgn(HurstParam(0.5));
  for (long N = 1; N <= 5; ++N) {
    const auto r = persistence_exact(m, N, Process::S, Side::two_sided, Barrier::zero());
    const double sa = binom_over_4n(N);
    EXPECT_NEAR(r.prob, sa * sa, std::max(r.err, 1e-6)) << "N=" << N;
  }
}

TEST(Exact, ScipyReferenceValues) {
  const auto m7 = ProcessModel::fgn(HurstParam(0.7));
  const auto s = persistence_exact(m7, 2, Process::S, Side::two_sided, Barrier::zero());
  EXPECT_NEAR(s.prob, 0.11007879259994259, s.err + 1e-6);
  const auto i = persistence_exact(m7, 2, Process::I, Side::two_sided, Barrier::zero());
  EXPECT_NEAR(i.prob, 0.26188649200541159, i.err + 1e-6);
  const auto one = persistence_exact(m7, 3, Process::I, Side::one_sided, Barrier::zero());
  EXPECT_NEAR(one.prob, 0.42048342126389487, one.err + 1e-6);
  // b(n) = |n|
  const auto lin = persistence_exact(ProcessModel::fgn(HurstParam(0.3)), 2, Process::I, Side::two_sided, Barrier::abs_linear(-1.0));
  EXPECT_NEAR(lin.prob, 0.83009477721198632, lin.err + 1e-6);
}

TEST(Exact, DimensionLimitAndOrigin) {
  const auto m = ProcessModel::fgn(HurstParam(0.5));
  EXPECT_THROW(persistence_exact(m, 7, Process::S, Side::two_sided, Barrier::zero()), DimensionTooLarge);
  EXPECT_NO_THROW(persistence_exact(m, 12, Process::S, Side::one_sided, Barrier::zero()));
  EXPECT_EQ(persistence_exact(m, 2, Process::S, Side::two_sided, Barrier::constant(-0.5)).prob, 0.0);
}

TEST(Prekopa, OrderingAndSymmetry) {
  for (double H : {0.3, 0.7}) {
    for (long m : {1L, 2L}) {
      const auto r = prekopa_check(ProcessModel::fgn(HurstParam(H)), 2, m);
      EXPECT_TRUE(r.ok()) << "H=" << H << " m=" << m << " margin " << r.margin();
    }
  }
  EXPECT_THROW(prekopa_check(ProcessModel::fgn(HurstParam(0.5)), 5, 1), DimensionTooLarge);
  const auto b = prekopa_thresholds(2, 1);
  EXPECT_EQ(b[0], -4.0);  // n = -2
  EXPECT_EQ(b[3], 0.0);   // n = 2
}

TEST(ChangeOfMeasure, UnivariateBracket) {
  Eigen::MatrixXd c(1, 1);
  c << 1.0;
  Eigen::VectorXd f(1), u(1);
  f << 1.0;
  u << 0.0;
  const auto r = com_bounds_check(c, f, u);
  EXPECT_NEAR(r.base.prob, 0.5, 1e-12);
  EXPECT_NEAR(r.shifted.prob, 0.15865525393145707, 1e-12);
  EXPECT_NEAR(r.lower, 0.093428653038915635, 1e-12);
  EXPECT_TRUE(r.upper_applies);
  EXPECT_NEAR(r.upper, 0.98438602400221453, 1e-12);
  EXPECT_TRUE(r.ok());
}

TEST(ChangeOfMeasure, LargeShiftDropsUpperBound) {
  Eigen::MatrixXd c(1, 1);
  c << 1.0;
  Eigen::VectorXd f(1), u(1);
  f << -3.0;
  u << 0.0;
  const auto r = com_bounds_check(c, f, u);
  EXPECT_FALSE(r.upper_applies);
  EXPECT_TRUE(r.ok());
}

TEST(QuadraticForm, InverseAndSingular) {
  Eigen::MatrixXd c(2, 2);
  c << 2, 0, 0, 0.5;
  Eigen::VectorXd f(2);
  f << 2, 1;
  EXPECT_NEAR(inverse_quadratic_form(c, f), 4.0, 1e-14);
  Eigen::MatrixXd s(2, 2);
  s << 1, 1, 1, 1;
  EXPECT_THROW(inverse_quadratic_form(s, f), NotInvertible);
}
