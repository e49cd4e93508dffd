#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "hfsync/baselines.hpp"
#include "hfsync/error.hpp"
#include "hfsync/estimators.hpp"
#include "hfsync/simulate.hpp"
#include "hfsync/solver.hpp"

namespace hfsync {
namespace {

Eigen::MatrixXd gaussian(int rows, int cols, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sd);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = z(rng);
  return m;
}

TEST(RealizedCov, MatchesLoop) {
  const Eigen::MatrixXd r = Eigen::MatrixXd::Random(4, 6);
  const Eigen::MatrixXd c = realized_cov(r);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0.0;
      for (int t = 0; t < 6; ++t) s += r(a, t) * r(b, t);
      EXPECT_NEAR(c(a, b), s, 1e-14);
    }
}

TEST(RealizedCov, OneColumnAndOrthogonalRows) {
  Eigen::MatrixXd r(2, 1);
  r << 2, 3;
  EXPECT_EQ(realized_cov(r), r * r.transpose());
  Eigen::MatrixXd o(2, 2);
  o << 1, 0, 0, 2;
  EXPECT_EQ(realized_cov(o)(0, 1), 0.0);
}

TEST(PcaFactorCov, PreservesDiagonal) {
  const Eigen::MatrixXd r = gaussian(8, 50, 3);
  const auto est = pca_factor_cov(r, 3);
  EXPECT_LT((est.sigma.diagonal() - realized_cov(r).diagonal()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(est.rank_used, 3);
  for (Eigen::Index k = 1; k < est.eigenvalues.size(); ++k) EXPECT_GE(est.eigenvalues(k - 1), est.eigenvalues(k));
}

TEST(PcaFactorCov, ExactLowRankInputs) {
  const Eigen::VectorXd b = Eigen::VectorXd::Random(5);
  const Eigen::MatrixXd r1 = b * Eigen::RowVectorXd::Random(30);
  EXPECT_LT((pca_factor_cov(r1, 1).sigma - realized_cov(r1)).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd r4 = Eigen::MatrixXd::Random(5, 4) * Eigen::MatrixXd::Random(4, 30);
  EXPECT_LT((pca_factor_cov(r4, 4).sigma - realized_cov(r4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PcaFactorCov, RejectsBadRank) {
  const Eigen::MatrixXd r = Eigen::MatrixXd::Random(3, 10);
  EXPECT_THROW(pca_factor_cov(r, 0), InvalidInput);
  EXPECT_THROW(pca_factor_cov(r, 3), InvalidInput);
}

TEST(EigenByGroup, PerfectCorrelationGivesUnitShare) {
  Eigen::MatrixXd r(4, 100);
  const Eigen::RowVectorXd f = gaussian(1, 100, 2);
  for (int i = 0; i < 4; ++i) r.row(i) = f;
  const auto shares = eigen_by_group(r, {{0, 1, 2, 3}}, 2);
  EXPECT_NEAR(shares[0](0), 1.0, 1e-12);
  EXPECT_NEAR(shares[0](1), 0.0, 1e-12);
}

TEST(EigenByGroup, IidAssetsShareNearOneOverN) {
  const auto shares = eigen_by_group(gaussian(10, 20000, 5), {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}, 1);
  EXPECT_NEAR(shares[0](0), 0.1, 0.02);
}

TEST(GroupsByMissingness, OrdersMostMissingFirst) {
  const auto g = groups_by_missingness({5, 1, 9, 3, 9, 0}, 3);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], (std::vector<int>{2, 4}));
  EXPECT_EQ(g[1], (std::vector<int>{0, 3}));
  EXPECT_EQ(g[2], (std::vector<int>{1, 5}));
}

TEST(EigenByGroup, StaleFillLowersCommonShare) {
  DgpConfig c;
  c.n_assets = 20;
  c.days = 1;
  c.async_intensity = {2.0};
  const auto out = simulate(c);
  std::vector<int> all(20);
  for (int i = 0; i < 20; ++i) all[static_cast<std::size_t>(i)] = i;
  const auto pi = eigen_by_group(row_diff(previous_tick(out.panel)), {all}, 1);
  const auto nn = eigen_by_group(synchronize(out.panel, SolverConfig{}).delta_hat, {all}, 1);
  EXPECT_LT(pi[0](0), nn[0](0));
}

TEST(Bipower, ZeroAndConstant) {
  EXPECT_EQ(bipower_variation(Eigen::VectorXd::Zero(10)), 0.0);
  Eigen::VectorXd r(5);
  r << 0.2, -0.2, 0.2, 0.2, -0.2;
  EXPECT_NEAR(bipower_variation(r), M_PI / 2.0 * 4 * 0.04, 1e-15);
}

TEST(Bipower, GaussianConsistency) {
  const Eigen::VectorXd r = gaussian(10000, 1, 9).col(0);
  const double ratio = bipower_variation(r) / r.squaredNorm();
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.1);
}

TEST(TruncateJumps, IdentityWithoutOutliers) {
  Eigen::VectorXd r(6);
  r << 0.1, -0.1, 0.1, 0.1, -0.1, 0.1;
  const auto t = truncate_jumps(r);
  EXPECT_EQ(t.returns, r);
  EXPECT_EQ(t.truncated, 0);
  const Eigen::VectorXd g = gaussian(500, 1, 1).col(0);
  EXPECT_EQ(truncate_jumps(g, std::numeric_limits<double>::infinity()).returns, g);
}

TEST(TruncateJumps, RemovesSingleSpike) {
  Eigen::VectorXd r = gaussian(1000, 1, 4, 0.01).col(0);
  r(321) = 0.2;
  const auto t = truncate_jumps(r);
  EXPECT_EQ(t.truncated, 1);
  EXPECT_EQ(t.returns(321), 0.0);
  for (Eigen::Index j = 0; j < r.size(); ++j)
    if (j != 321) EXPECT_EQ(t.returns(j), r(j));
  EXPECT_THROW(truncate_jumps(Eigen::VectorXd::Zero(1)), InvalidInput);
}

TEST(SpotBeta, IdentityAndScaling) {
  const Eigen::VectorXd m = gaussian(50, 1, 3).col(0);
  const auto one = spot_beta(m, m, 10);
  const auto two = spot_beta(2.0 * m, m, 10);
  ASSERT_EQ(one.size(), 41u);
  for (std::size_t t = 0; t < one.size(); ++t) {
    EXPECT_NEAR(*one[t], 1.0, 1e-12);
    EXPECT_NEAR(*two[t], 2.0, 1e-12);
  }
}

TEST(SpotBeta, FlatMarketHasNoEstimate) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(6);
  m(5) = 1.0;
  const auto b = spot_beta(Eigen::VectorXd::Ones(6), m, 3);
  EXPECT_FALSE(b[0].has_value());
  EXPECT_TRUE(b[3].has_value());
  EXPECT_THROW(spot_beta(m, m, 0), InvalidInput);
  EXPECT_THROW(spot_beta(m, Eigen::VectorXd::Zero(5), 2), InvalidInput);
}

TEST(SpotBeta, StalePreviousTickGivesZeroBeta) {
  const Eigen::VectorXd m = gaussian(30, 1, 8).col(0);
  Eigen::VectorXd stock = 0.8 * m;
  stock.segment(10, 10).setZero();
  const auto b = spot_beta(stock, m, 5);
  for (int t = 10; t <= 15; ++t) EXPECT_EQ(*b[static_cast<std::size_t>(t)], 0.0);
}

}  // namespace
}  // namespace hfsync
