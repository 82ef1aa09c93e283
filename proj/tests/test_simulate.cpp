#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "persistlab/persistence.hpp"
#include "persistlab/simulate.hpp"

using namespace persistlab;

namespace {

struct Moments {
  std::vector<double> lag;  // sum xi_0 xi_k over paths
  std::uint64_t n = 0;
  void merge(const Moments& o) {
    if (lag.empty()) lag.assign(o.lag.size(), 0.0);
    for (std::size_t k = 0; k < o.lag.size(); ++k) lag[k] += o.lag[k];
    n += o.n;
  }
};

}  // namespace

TEST(Embedding, FgnEigenvaluesNonNegative) {
  for (double H : {0.1, 0.3, 0.5, 0.7, 0.95}) {
    const auto e = build_embedding(fgn_covariance_sequence(HurstParam(H), 1024), 1024);
    const double top = *std::max_element(e.eigenvalues.begin(), e.eigenvalues.end());
    EXPECT_GE(e.min_raw, -1e-12 * top) << "H=" << H;
  }
}

TEST(Embedding, RejectsShortSequence) {
  EXPECT_THROW(build_embedding(fgn_covariance_sequence(HurstParam(0.5), 8), 16), ConfigError);
}

TEST(Embedding, NegativeEigenvalueDetected) {
  CovarianceSequence r;
  r.r = {1.0, 0.9, 0.0, 0.0, 0.0};  // not positive definite as a circulant
  EXPECT_THROW(build_embedding(r, 4), NegativeEigenvalue);
}

TEST(PathAssembly, Identities) {
  const std::vector<double> xi = {0.5, -1.0, 2.0, 0.25, -0.75, 1.5};  // xi_{-2..3}
  const auto p = assemble_paths(xi, 3);
  EXPECT_DOUBLE_EQ(p.S(0), 0.0);
  EXPECT_DOUBLE_EQ(p.S(1), 0.25);
  EXPECT_DOUBLE_EQ(p.S(3), 1.0);
  EXPECT_DOUBLE_EQ(p.S(-1), -2.0);
  EXPECT_DOUBLE_EQ(p.S(-3), -1.5);
  for (long n = -2; n <= 3; ++n) {
    EXPECT_DOUBLE_EQ(p.S(n) - p.S(n - 1), p.xi(n));
    EXPECT_DOUBLE_EQ(p.Itilde(n), 0.5 * (p.S(n) + p.S(n - 1)));
    EXPECT_NEAR(p.I(n) - p.I(n - 1), p.Itilde(n), 1e-15);
  }
  for (long n = -3; n <= 3; ++n) EXPECT_NEAR(p.Ibar(n), p.I(n) + 0.5 * p.S(n), 1e-14);
  EXPECT_DOUBLE_EQ(p.Ibar_extended(-4), p.Ibar(-3) - p.S(-3));
  EXPECT_THROW(assemble_paths(xi, 4), ConfigError);
}

TEST(Sampler, DeterministicPerSeedAndIndex) {
  const PathSampler s(ProcessModel::fgn(HurstParam(0.7)), 64);
  SimConfig cfg{ProcessModel::fgn(HurstParam(0.7)), 64, 9, 16, 1};
  const auto a = simulate_one(s, cfg, 37);
  const auto b = simulate_one(s, cfg, 37);
  const auto c = simulate_one(s, cfg, 38);
  for (long n = -64; n <= 64; ++n) EXPECT_EQ(a.S(n), b.S(n));
  EXPECT_NE(a.S(64), c.S(64));
  cfg.base_seed = 10;
  EXPECT_NE(simulate_one(s, cfg, 37).S(64), a.S(64));
}

TEST(Sampler, SimulateOneMatchesStream) {
  const PathSampler s(ProcessModel::fgn(HurstParam(0.3)), 32);
  const SimConfig cfg{ProcessModel::fgn(HurstParam(0.3)), 32, 5, 8, 2};
  struct Acc {
    std::vector<double> last;
    void merge(const Acc& o) {
      last.insert(last.end(), o.last.begin(), o.last.end());
    }
  };
  const auto acc = simulate_paths(s, cfg, 30, Acc{}, [](Acc& a, const PathBundle& p) { a.last.push_back(p.S(32)); });
  ASSERT_EQ(acc.last.size(), 30u);
  for (std::uint64_t i : {0u, 7u, 8u, 29u}) EXPECT_EQ(acc.last[i], simulate_one(s, cfg, i).S(32));
}

TEST(Sampler, ThreadCountDoesNotChangeResults) {
  SimConfig cfg{ProcessModel::fgn(HurstParam(0.7)), 128, 3, 64, 1};
  const long grid[] = {16, 128};
  const auto one = mc_persistence_grid(cfg, grid, PersistenceQuery{}, 2000);
  cfg.threads = 4;
  const auto four = mc_persistence_grid(cfg, grid, PersistenceQuery{}, 2000);
  for (std::size_t g = 0; g < 2; ++g) EXPECT_EQ(one[g].hits, four[g].hits);
}

TEST(Sampler, EmpiricalCovarianceMatchesModel) {
  for (double H : {0.3, 0.7}) {
    const long N = 16;
    const auto model = ProcessModel::fgn(HurstParam(H));
    const PathSampler s(model, N);
    const SimConfig cfg{model, N, 21, 1024, 0};
    constexpr std::uint64_t T = 40000;
    Moments init;
    init.lag.assign(4, 0.0);
    const auto m = simulate_paths(s, cfg, T, init, [](Moments& a, const PathBundle& p) {
      if (a.lag.empty()) a.lag.assign(4, 0.0);
      for (long k = 0; k < 4; ++k) a.lag[static_cast<std::size_t>(k)] += p.xi(1) * p.xi(1 + k);
      ++a.n;
    });
    ASSERT_EQ(m.n, T);
    for (long k = 0; k < 4; ++k) {
      // Var(xi_0 xi_k) <= 2, so 5 sigma is below 0.036
      EXPECT_NEAR(m.lag[static_cast<std::size_t>(k)] / T, fgn_covariance(HurstParam(H), k), 0.036) << "H=" << H << " k=" << k;
    }
  }
}

TEST(Sampler, TerminalVarianceMatchesProfile) {
  const auto model = ProcessModel::density(HurstParam(0.7), SlowlyVarying::log_power(1.0, 0.5));
  const long N = 64;
  const PathSampler s(model, N);
  const SimConfig cfg{model, N, 4, 1024, 0};
  struct Acc {
    RunningStats r, l;
    void merge(const Acc& o) {
      r.merge(o.r);
      l.merge(o.l);
    }
  };
  const auto a = simulate_paths(s, cfg, 20000, Acc{}, [&](Acc& acc, const PathBundle& p) {
    acc.r.add(p.S(N) * p.S(N));
    acc.l.add(p.S(-N) * p.S(-N));
  });
  const double v = variance_profile(model, N)(N);
  EXPECT_NEAR(a.r.mean / v, 1.0, 0.05);
  EXPECT_NEAR(a.l.mean / v, 1.0, 0.05);
}

TEST(DirectSampler, FactorReproducesCovariance) {
  Eigen::MatrixXd cov(3, 3);
  cov << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  const Eigen::MatrixXd A = psd_factor(cov);
  EXPECT_LT((A * A.transpose() - cov).cwiseAbs().maxCoeff(), 1e-13);
  Eigen::MatrixXd bad = cov;
  bad(0, 0) = -1;
  EXPECT_THROW(psd_factor(bad), NotPSD);
  EXPECT_THROW(sample_exact_small(Eigen::MatrixXd::Identity(65, 65), 1), DimensionTooLarge);
}

TEST(BatchSeed, GoldenRatioStride) {
  EXPECT_EQ(batch_seed(42, 0), 42u);
  EXPECT_EQ(batch_seed(42, 2), 42u + 2 * 0x9E3779B97F4A7C15ull);
}

TEST(SimConfig, Validation) {
  SimConfig cfg{ProcessModel::fgn(HurstParam(0.5)), 0, 1, 1, 1};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.N = 4;
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
