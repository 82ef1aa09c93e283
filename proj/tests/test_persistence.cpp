#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "persistlab/oracle.hpp"
#include "persistlab/persistence.hpp"

using namespace persistlab;

TEST(Wilson, MatchesReferenceInterval) {
  // statsmodels proportion_confint(method="wilson")
  const auto e = wilson_estimate(50, 1000);
  EXPECT_NEAR(e.ci_low, 0.038130262392748811, 1e-12);
  EXPECT_NEAR(e.ci_high, 0.065313820244250809, 1e-12);
  EXPECT_DOUBLE_EQ(e.phat, 0.05);
  const auto z = wilson_estimate(0, 1000);
  EXPECT_EQ(z.ci_low, 0.0);
  EXPECT_NEAR(z.ci_high, 0.0038267584855551252, 1e-12);
  const auto full = wilson_estimate(10, 10);
  EXPECT_EQ(full.ci_high, 1.0);
  EXPECT_LT(full.ci_low, 1.0);
}

TEST(Wilson, RejectsBadCounts) {
  EXPECT_THROW(wilson_estimate(0, 0), ConfigError);
  EXPECT_THROW(wilson_estimate(5, 4), ConfigError);
}

TEST(Barrier, ParseAndEvaluate) {
  EXPECT_EQ(Barrier::parse("zero")(5), 0.0);
  EXPECT_TRUE(std::isinf(Barrier::parse("inf")(-3)));
  EXPECT_EQ(Barrier::parse("constant:1.5")(7), 1.5);
  EXPECT_EQ(Barrier::parse("abs_linear:2")(-3), -6.0);
  EXPECT_EQ(Barrier::parse("abs_linear:2").tag(), "abs_linear:2");
  EXPECT_THROW(Barrier::parse("linear:2"), ConfigError);
  EXPECT_THROW(Barrier::parse("constant:x"), ConfigError);
  const auto c = Barrier::custom(-1, {1, 2, 3});
  EXPECT_EQ(c(1), 3.0);
  EXPECT_THROW(c(2), ConfigError);
}

TEST(Fit, MatchesWeightedLeastSquares) {
  // numpy solve of the weighted normal equations
  const std::vector<double> N = {16, 32, 64, 128, 256};
  const std::vector<double> p = {0.061, 0.032, 0.0149, 0.0081, 0.0037};
  std::vector<PersistenceEstimate> est;
  for (std::size_t i = 0; i < N.size(); ++i) {
    PersistenceEstimate e;
    e.N = static_cast<long>(N[i]);
    e.phat = p[i];
    e.trials = 100000;
    est.push_back(e);
  }
  const auto f = fit_exponent(est);
  EXPECT_NEAR(f.slope, -0.99399746090822461, 1e-12);
  EXPECT_NEAR(f.intercept, -0.031409107109320059, 1e-11);
  EXPECT_NEAR(f.slope_stderr, 0.012099330306372417, 1e-12);
}

TEST(Fit, ExactPowerLaw) {
  std::vector<double> N, p, w;
  for (double n : {8.0, 16.0, 32.0, 64.0}) {
    N.push_back(n);
    p.push_back(3.0 * std::pow(n, -0.75));
    w.push_back(n);
  }
  const auto f = fit_power_law(N, p, w);
  EXPECT_NEAR(f.slope, -0.75, 1e-13);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
}

TEST(Fit, InsufficientData) {
  const std::vector<double> N = {1, 2, 3}, p = {0.5, 0.4, 0.3}, w = {1, 1, 1};
  EXPECT_THROW(fit_power_law(N, p, w), InsufficientData);
  const std::vector<double> N4 = {1, 2, 3, 4}, p4 = {0.5, 0.0, 0.3, 0.2}, w4 = {1, 1, 1, 1};
  EXPECT_THROW(fit_power_law(N4, p4, w4), InsufficientData);
}

TEST(MonteCarlo, WhiteNoiseSmallN) {
  const SimConfig cfg{ProcessModel::fgn(HurstParam(0.5)), 1, 17, 1024, 0};
  const long grid[] = {1, 2, 3};
  const auto est = mc_persistence_grid(cfg, grid, PersistenceQuery{}, 100000);
  for (std::size_t i = 0; i < 3; ++i) {
    const double sa = sparre_andersen_one_sided(grid[i]);
    EXPECT_NEAR(est[i].phat, sa * sa, 4.0 * est[i].se()) << "N=" << grid[i];
  }
}

TEST(MonteCarlo, AgreesWithOrthantProbability) {
  // scipy multivariate normal CDF of the four coordinates S_{-2}, S_{-1}, S_1, S_2
  const SimConfig cfg{ProcessModel::fgn(HurstParam(0.7)), 2, 23, 1024, 0};
  const auto e = mc_persistence(cfg, 2, Process::S, Side::two_sided, Barrier::zero(), 100000);
  EXPECT_NEAR(e.phat, 0.11007879259994259, 4.0 * e.se());
  const auto i = mc_persistence(cfg, 2, Process::I, Side::two_sided, Barrier::zero(), 100000);
  EXPECT_NEAR(i.phat, 0.26188649200541159, 4.0 * i.se());
}

TEST(MonteCarlo, NestedHitsAreMonotone) {
  const SimConfig cfg{ProcessModel::fgn(HurstParam(0.3)), 1, 5, 512, 0};
  const long grid[] = {2, 4, 8, 16, 32};
  const PersistenceQuery qs[] = {{Process::S, Side::two_sided, Barrier::zero()},
                                 {Process::I, Side::one_sided, Barrier::zero()},
                                 {Process::Ibar, Side::two_sided, Barrier::zero()}};
  const auto est = mc_persistence_grid(cfg, grid, qs, 5000);
  for (const auto& row : est) {
    for (std::size_t g = 1; g < row.size(); ++g) EXPECT_LE(row[g].hits, row[g - 1].hits);
  }
}

TEST(MonteCarlo, InfiniteBarrierAlwaysHolds) {
  const SimConfig cfg{ProcessModel::fgn(HurstParam(0.6)), 1, 1, 256, 1};
  const auto e = mc_persistence(cfg, 8, Process::I, Side::two_sided, Barrier::parse("inf"), 500);
  EXPECT_EQ(e.hits, 500u);
  const auto neg = mc_persistence(cfg, 8, Process::S, Side::two_sided, Barrier::constant(-1.0), 500);
  EXPECT_EQ(neg.hits, 0u);
}

TEST(MeanF, LowerBoundValue) {
  const auto p = variance_profile(ProcessModel::fgn(HurstParam(0.5)), 64);
  EXPECT_NEAR(mean_F_lower_bound(p, 64), 3.6204836197957131, 1e-12);
}

TEST(MeanF, TwoEstimatorsAgree) {
  const SimConfig cfg{ProcessModel::fgn(HurstParam(0.7)), 1, 31, 1024, 0};
  const auto m = mean_F(cfg, 64, 20000);
  EXPECT_TRUE(m.agree(4.0)) << m.mean_F << " vs " << m.mean_2gamma0;
  const auto p = variance_profile(ProcessModel::fgn(HurstParam(0.7)), 64);
  EXPECT_GE(m.mean_F + 4 * m.se_F, mean_F_lower_bound(p, 64));
}

TEST(Ordering, IbarEventImpliesIEvent) {
  const SimConfig cfg{ProcessModel::fgn(HurstParam(0.7)), 1, 11, 1024, 0};
  const long grid[] = {4, 16, 64};
  const auto r = ordering_check(cfg, grid, 20000);
  for (std::size_t g = 0; g < 3; ++g) {
    EXPECT_EQ(r.violations[g], 0u);
    EXPECT_LE(r.ibar_hits[g], r.i_hits[g]);
  }
}

TEST(Events, RearrangementAndArgmax) {
  const SimConfig cfg{ProcessModel::fgn(HurstParam(0.5)), 1, 2, 1024, 0};
  const auto r = rearrangement_check(cfg, 8, 3, 20000);
  EXPECT_TRUE(r.cis_overlap());
  // white noise: P(T_2 = 0) = 3/8
  const auto t0 = mc_event(cfg, 2, EventSpec::argmax_eq(0), 40000);
  EXPECT_NEAR(t0.phat, 0.375, 4.0 * t0.se());
  const auto all = mc_event(cfg, 5, EventSpec::argmax_in(0, 5), 100);
  EXPECT_EQ(all.hits, 100u);
}
