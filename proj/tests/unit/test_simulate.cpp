#include <cmath>

#include <gtest/gtest.h>

#include "hfsync/error.hpp"
#include "hfsync/simulate.hpp"
#include "test_support.hpp"

namespace hfsync {
namespace {

DgpConfig small_config(int n_assets, int days = 1) {
  DgpConfig c;
  c.n_assets = n_assets;
  c.days = days;
  return c;
}

TEST(DgpConfig, DefaultsMatchReferenceParameters) {
  const DgpConfig c;
  EXPECT_EQ(c.heston.kappa, 3.0);
  EXPECT_DOUBLE_EQ(c.heston.theta, 0.09);
  EXPECT_EQ(c.heston.s, 0.3);
  EXPECT_EQ(c.factor_drift, (std::vector<double>{0.05, 0.03, 0.02}));
  EXPECT_EQ(c.n_factors, 3);
  EXPECT_EQ(c.noise_scale, 0.1);
  EXPECT_EQ(c.n_assets, 100);
  EXPECT_EQ(c.days, 5);
  EXPECT_EQ(c.day_increments, 390);
  EXPECT_GT(c.feller_ratio(), 1.0);
}

TEST(DgpConfig, Validation) {
  DgpConfig c;
  c.factor_strength = 0.0;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = DgpConfig{};
  c.async_intensity = {-1.0};
  EXPECT_THROW(c.validate(), InvalidInput);
  c = DgpConfig{};
  c.factor_drift = {0.1};
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(DgpConfig, KeyValueRoundTrip) {
  DgpConfig c;
  c.n_assets = 17;
  c.async_intensity = {0.5, 2.0};
  c.factor_strength = 0.5;
  c.seed = 99;
  const auto back = DgpConfig::from_kv(KeyValueText::parse(c.to_kv().str()));
  EXPECT_EQ(back.n_assets, 17);
  EXPECT_EQ(back.async_intensity, c.async_intensity);
  EXPECT_EQ(back.factor_strength, 0.5);
  EXPECT_EQ(back.seed, 99u);
}

TEST(DgpConfig, GroupsAreContiguous) {
  DgpConfig c;
  c.n_assets = 7;
  c.async_intensity = {1.0, 2.0};
  EXPECT_EQ(c.asset_groups(), (std::vector<int>{0, 0, 0, 0, 1, 1, 1}));
}

TEST(Simulate, NoiselessDeltaEqualsPi) {
  auto c = small_config(10);
  c.noise_scale = 0.0;
  const auto out = simulate(c);
  EXPECT_EQ(out.delta_true, out.pi_true);
}

TEST(Simulate, ShapesAndTruthConsistency) {
  auto c = small_config(12, 2);
  c.day_increments = 50;
  const auto out = simulate(c);
  EXPECT_EQ(out.delta_true.rows(), 12);
  EXPECT_EQ(out.delta_true.cols(), 100);
  EXPECT_EQ(out.factor_paths.cols(), 101);
  EXPECT_EQ(out.panel.n_increments(), 100);
  EXPECT_LT((out.pi_true - out.beta * (out.factor_paths.rightCols(100) - out.factor_paths.leftCols(100)))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  for (int i = 0; i < 12; ++i) {
    const auto& s = out.panel.series(i);
    for (std::size_t k = 0; k < s.size(); ++k)
      EXPECT_EQ(s.log_price[k], out.prices_true(i, s.obs_idx[k]));
    EXPECT_TRUE(std::find(s.obs_idx.begin(), s.obs_idx.end(), 50) != s.obs_idx.end());
  }
  EXPECT_LT((out.sigma_true - out.sigma_true.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(out.sigma_true).eigenvalues().minCoeff(), -1e-12);
}

TEST(Simulate, DeterministicInSeed) {
  const auto a = simulate(small_config(5));
  const auto b = simulate(small_config(5));
  EXPECT_EQ(a.delta_true, b.delta_true);
  EXPECT_TRUE(a.panel == b.panel);
  auto c = small_config(5);
  c.seed = 2;
  EXPECT_NE(simulate(c).delta_true, a.delta_true);
}

TEST(Poisson, RateOneObservationProbability) {
  const auto idx = sample_poisson_times(10000, 1.0, std::uint64_t{5});
  EXPECT_NEAR(static_cast<double>(idx.size() - 1) / 10000.0, 1.0 - std::exp(-1.0), 0.03);
  EXPECT_EQ(idx.front(), 0);
}

TEST(Poisson, LargeRateObservesEverything) {
  EXPECT_EQ(sample_poisson_times(1000, 50.0, std::uint64_t{1}).size(), 1001u);
}

TEST(Poisson, EmptyGridAndBadRate) {
  EXPECT_EQ(sample_poisson_times(0, 1.0, std::uint64_t{1}), std::vector<int>{0});
  EXPECT_THROW(sample_poisson_times(10, 0.0, std::uint64_t{1}), InvalidInput);
}

TEST(Correlation, UnitDiagonalAndPsd) {
  for (const auto& m : {factor_correlation(3, 0.6), factor_correlation(5, -0.4), idiosyncratic_correlation(23, 10, 0.6)}) {
    EXPECT_LT((m.diagonal().array() - 1.0).abs().maxCoeff(), 1e-14);
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(m).info(), Eigen::Success);
  }
  const auto rs = idiosyncratic_correlation(12, 10, 0.6);
  EXPECT_EQ(rs(0, 10), 0.0);
  EXPECT_NEAR(rs(0, 2), 0.36, 1e-15);
  EXPECT_NEAR(rs(10, 11), 0.6, 1e-15);
}

TEST(Loadings, NormalizedGram) {
  const Eigen::MatrixXd raw = Eigen::MatrixXd::Random(40, 3);
  for (double alpha : {1.0, 0.5, 0.2}) {
    const auto b = normalize_loadings(raw, alpha);
    const Eigen::MatrixXd g = b.transpose() * b / std::pow(40.0, alpha);
    EXPECT_LT((g - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Simulate, VarianceMeanReverts) {
  auto c = small_config(20, 20);
  c.day_increments = 78;
  const auto out = simulate(c);
  EXPECT_GE(out.factor_variance.minCoeff(), 0.0);
  EXPECT_NEAR(out.idio_variance.mean(), c.heston.theta, 0.2 * c.heston.theta);
  EXPECT_NEAR(out.factor_variance.mean(), c.heston.theta, 0.2 * c.heston.theta);
}

TEST(Simulate, LeadingEigenvalueGrowsWithN) {
  std::vector<double> top;
  for (int n : {20, 50, 100}) {
    const auto out = simulate(small_config(n));
    top.push_back(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(out.sigma_true).eigenvalues().maxCoeff());
  }
  EXPECT_GT(top[1] / top[0], 1.6);
  EXPECT_GT(top[2] / top[1], 1.4);
}

TEST(Simulate, NoiseShareNearEighteenPercent) {
  const auto out = simulate(small_config(100));
  const Eigen::MatrixXd z = out.delta_true - out.pi_true;
  double share = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double sz = std::sqrt((z.row(i).array() - z.row(i).mean()).square().mean());
    const double sx = std::sqrt((out.delta_true.row(i).array() - out.delta_true.row(i).mean()).square().mean());
    share += sz / sx;
  }
  share /= static_cast<double>(z.rows());
  EXPECT_GE(share, 0.12);
  EXPECT_LE(share, 0.24);
}

TEST(ReplicationSeed, DistinctAndStable) {
  EXPECT_EQ(replication_seed(7, 3), replication_seed(7, 3));
  EXPECT_NE(replication_seed(7, 3), replication_seed(7, 4));
  EXPECT_NE(replication_seed(7, 0), replication_seed(8, 0));
}

TEST(WriteDgp, WritesTruthAndPanel) {
  const auto dir = testing::scratch_dir("write_dgp");
  auto c = small_config(4);
  c.day_increments = 20;
  const auto out = simulate(c);
  write_dgp(dir, c, out);
  EXPECT_TRUE(read_panel(dir + "/panel.csv") == out.panel);
  EXPECT_EQ(DgpConfig::from_kv(KeyValueText::read(dir + "/dgp_config.txt")).n_assets, 4);
}

}  // namespace
}  // namespace hfsync
