#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "persistlab/model.hpp"
#include "persistlab/normal.hpp"
#include "persistlab/philox.hpp"

using namespace persistlab;

TEST(Hurst, RejectsOutsideOpenInterval) {
  EXPECT_THROW(HurstParam(0.0), ConfigError);
  EXPECT_THROW(HurstParam(1.0), ConfigError);
  EXPECT_THROW(HurstParam(1.5), ConfigError);
  EXPECT_THROW(HurstParam(std::nan("")), ConfigError);
  EXPECT_DOUBLE_EQ(HurstParam(0.3).value(), 0.3);
}

TEST(Hurst, SpectralConstant) {
  // mpmath, 30 digits
  EXPECT_NEAR(fgn_spectral_constant(0.3), 0.11504819084081605, 1e-15);
  EXPECT_NEAR(fgn_spectral_constant(0.5), 0.15915494309189534, 1e-15);
  EXPECT_NEAR(fgn_spectral_constant(0.7), 0.15994054933367393, 1e-15);
  EXPECT_NEAR(fgn_spectral_constant(0.5), 1.0 / (2.0 * std::numbers::pi), 1e-16);
}

TEST(FgnDensity, MatchesAliasSum) {
  EXPECT_NEAR(fgn_spectral_density(0.7, 1.0), 0.15239982634949147, 1e-12);
  EXPECT_NEAR(fgn_spectral_density(0.3, 2.5), 0.21583833919301148, 1e-12);
  // white noise is flat
  for (double u : {1e-3, 0.5, 2.0, 3.1}) EXPECT_NEAR(fgn_spectral_density(0.5, u), 1.0 / (2.0 * std::numbers::pi), 1e-12);
}

TEST(FgnDensity, RegularPartFiniteNearZero) {
  for (double H : {0.3, 0.7}) {
    const double at0 = fgn_regular_part(H, 1e-300);
    EXPECT_TRUE(std::isfinite(at0));
    EXPECT_NEAR(at0, fgn_spectral_constant(H), 1e-12);
    EXPECT_NEAR(fgn_regular_part(H, 1e-5), at0, 1e-8);
  }
}

TEST(SlowlyVarying, Variants) {
  EXPECT_DOUBLE_EQ(SlowlyVarying::constant(2.0)(123.0), 2.0);
  const auto lp = SlowlyVarying::log_power(1.0, 0.5);
  EXPECT_NEAR(lp(10.0), std::sqrt(std::log(std::numbers::e + 10.0)), 1e-15);
  const auto cl = SlowlyVarying::cosine_log(1.0, 0.5);
  EXPECT_GT(cl(2.0), 0.0);
  EXPECT_THROW(SlowlyVarying::constant(-1.0), ConfigError);
}

TEST(Model, FactoryValidation) {
  EXPECT_THROW(ProcessModel::fgn(HurstParam(0.5), SlowlyVarying::log_power(1.0, 0.5)), ConfigError);
  EXPECT_THROW(ProcessModel::density(HurstParam(0.5), SlowlyVarying::cosine_log(1.0, 0.5)), ConfigError);
  EXPECT_THROW(ProcessModel::density(HurstParam(0.5), SlowlyVarying::constant(), 4.0), ConfigError);
  EXPECT_THROW(ProcessModel::profile(HurstParam(0.6), SlowlyVarying::constant()).density(1.0), ConfigError);
}

TEST(Model, JsonRoundTrip) {
  const auto m = ProcessModel::density(HurstParam(0.7), SlowlyVarying::log_power(1.0, 0.5));
  const auto back = ProcessModel::from_json(m.to_json());
  EXPECT_EQ(back.tag(), m.tag());
  EXPECT_DOUBLE_EQ(back.density(0.3), m.density(0.3));
  EXPECT_THROW(ProcessModel::from_json(nlohmann::json{{"kind", "fgn"}}), ConfigError);
  EXPECT_THROW(ProcessModel::from_json(nlohmann::json{{"kind", "nope"}, {"H", 0.5}}), ConfigError);
  EXPECT_THROW(ProcessModel::from_json(nlohmann::json{{"kind", "fgn"}, {"H", 1.2}}), ConfigError);
}

TEST(Model, DensityRegularPartRelation) {
  const auto m = ProcessModel::density(HurstParam(0.4), SlowlyVarying::constant(2.0));
  for (double u : {0.01, 0.5, 3.0}) EXPECT_NEAR(m.density(u), m.regular_part(u) * std::pow(u, 1.0 - 0.8), 1e-14);
}

TEST(Philox, KnownAnswerVectors) {
  // independent Python implementation of the round function
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32(0)(C{0, 0, 0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32(0xFFFFFFFFFFFFFFFFull)(C{0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  // key words are the low and high halves of the seed
  EXPECT_EQ(Philox4x32(0x299F31D0A4093822ull)(C{0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Normal, QuantileValues) {
  EXPECT_NEAR(normal_quantile(0.975), 1.9599639845400539, 1e-15);
  EXPECT_NEAR(normal_quantile(0.3), -0.52440051270804082, 1e-15);
  EXPECT_NEAR(normal_quantile(1e-10), -6.3613409024040562, 1e-12);
  EXPECT_NEAR(normal_quantile(1 - 1e-12), 7.0344869100478352, 1e-4);  // 1 - 1e-12 is inexact in double
  EXPECT_DOUBLE_EQ(normal_quantile(0.5), 0.0);
  for (double p : {1e-6, 0.01, 0.2, 0.7, 0.999}) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14 + 1e-13 * p);
}

TEST(Normal, StreamIsDeterministicAndStandard) {
  NormalStream a(7, 3), b(7, 3), c(7, 4);
  double s = 0, s2 = 0;
  bool differs = false;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
    s += x;
    s2 += x * x;
  }
  EXPECT_TRUE(differs);
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}
