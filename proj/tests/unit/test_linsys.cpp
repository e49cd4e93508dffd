#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "hfsync/error.hpp"
#include "hfsync/linsys.hpp"
#include "test_support.hpp"

namespace hfsync {
namespace {

using testing::dense_A;
using testing::unvec_rows;
using testing::vec_rows;

TEST(BuildSystem, ObservationsZeroTwoThree) {
  Eigen::MatrixXd prices(1, 4);
  prices << 1.0, 1.5, 2.0, 2.25;
  const auto sys = build_system(testing::panel_from({{0, 2, 3}}, prices));
  ASSERT_EQ(sys.n_rows(), 2);
  Eigen::MatrixXd expected(2, 3);
  expected << 1, 1, 0, 0, 0, 1;
  EXPECT_EQ(dense_A(sys), expected);
  EXPECT_DOUBLE_EQ(sys.b()(0), 1.0);
  EXPECT_DOUBLE_EQ(sys.b()(1), 0.25);
}

TEST(BuildSystem, TrailingIncrementsUnconstrained) {
  const auto sys = build_system(testing::panel_from({{0, 1}}, Eigen::MatrixXd::Zero(1, 4)));
  EXPECT_EQ(sys.n_rows(), 1);
  EXPECT_EQ(dense_A(sys).row(0).sum(), 1.0);
}

TEST(DurationSystem, RejectsGapsAndBadRhs) {
  EXPECT_THROW(DurationSystem(1, 3, {{Duration{0, 1}, Duration{2, 3}}}, Eigen::VectorXd::Zero(2)), InvalidInput);
  EXPECT_THROW(DurationSystem(1, 3, {{Duration{0, 4}}}, Eigen::VectorXd::Zero(1)), InvalidInput);
  EXPECT_THROW(DurationSystem(1, 3, {{Duration{0, 1}}}, Eigen::VectorXd::Zero(2)), InvalidInput);
}

TEST(ApplyA, MatchesDenseOracle) {
  const auto panel = testing::random_panel(5, 20, 0.4, 21);
  const auto sys = build_system(panel);
  const Eigen::MatrixXd delta = Eigen::MatrixXd::Random(5, 20);
  const Eigen::VectorXd oracle = dense_A(sys) * vec_rows(delta);
  EXPECT_LT((apply_A(sys, delta) - oracle).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyA, BMatchesLatentIncrements) {
  Eigen::MatrixXd prices;
  const auto panel = testing::random_panel(4, 30, 0.5, 3, &prices);
  const auto sys = build_system(panel);
  Eigen::MatrixXd delta = prices.rightCols(30) - prices.leftCols(30);
  EXPECT_LT((apply_A(sys, delta) - sys.b()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyAt, AdjointIdentity) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const auto sys = build_system(testing::random_panel(3 + rep % 4, 15 + rep, 0.5, 100 + rep));
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(sys.n_assets(), sys.n_increments());
    const Eigen::VectorXd y = Eigen::VectorXd::Random(sys.n_rows());
    const double lhs = apply_A(sys, x).dot(y);
    const double rhs = (x.array() * apply_At(sys, y).array()).sum();
    EXPECT_NEAR(lhs, rhs, 1e-10);
  }
}

TEST(ApplyAt, UnitVectorScattersOverRange) {
  Eigen::MatrixXd prices = Eigen::MatrixXd::Zero(1, 6);
  const auto sys = build_system(testing::panel_from({{0, 1, 4, 5}}, prices));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(sys.n_rows());
  e(1) = 1.0;
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(1, 5);
  expected.block(0, 1, 1, 3).setOnes();
  EXPECT_EQ(apply_At(sys, e), expected);
}

TEST(SolveRidge, MatchesDenseInverse) {
  const auto sys = build_system(testing::random_panel(3, 10, 0.5, 8));
  const Eigen::MatrixXd w = Eigen::MatrixXd::Random(3, 10);
  for (double eta : {1e-3, 0.1, 5.0}) {
    const Eigen::MatrixXd a = dense_A(sys);
    const Eigen::MatrixXd lhs = a.transpose() * a + eta * Eigen::MatrixXd::Identity(30, 30);
    const Eigen::VectorXd rhs = a.transpose() * sys.b() + eta * vec_rows(w);
    const Eigen::MatrixXd oracle = unvec_rows(lhs.ldlt().solve(rhs), 3, 10);
    EXPECT_LT((solve_ridge(sys, w, eta) - oracle).cwiseAbs().maxCoeff(), 1e-8) << "eta=" << eta;
  }
}

TEST(SolveRidge, NormalEquationResidual) {
  const auto sys = build_system(testing::random_panel(6, 40, 0.3, 12));
  const Eigen::MatrixXd w = Eigen::MatrixXd::Random(6, 40);
  const double eta = 0.01;
  const Eigen::MatrixXd y = solve_ridge(sys, w, eta);
  const Eigen::MatrixXd resid = apply_At(sys, apply_A(sys, y)) + eta * y - apply_At(sys, sys.b()) - eta * w;
  EXPECT_LT(resid.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveRidge, RejectsNonPositiveEta) {
  const auto sys = build_system(testing::random_panel(2, 5, 0.5, 1));
  EXPECT_THROW(solve_ridge(sys, Eigen::MatrixXd::Zero(2, 5), 0.0), InvalidInput);
  EXPECT_THROW(solve_ridge(sys, Eigen::MatrixXd::Zero(3, 5), 1.0), InvalidInput);
}

// Every ordered partition of 6 increments into contiguous durations.
void for_each_partition(int n, const std::function<void(const std::vector<Duration>&)>& f) {
  for (int bits = 0; bits < (1 << (n - 1)); ++bits) {
    std::vector<Duration> d;
    int lo = 0;
    for (int j = 1; j < n; ++j)
      if (bits & (1 << (j - 1))) {
        d.push_back({lo, j});
        lo = j;
      }
    d.push_back({lo, n});
    f(d);
  }
}

TEST(DurationSystem, GramIsDiagonalWithLengths) {
  int checked = 0;
  for_each_partition(6, [&](const std::vector<Duration>& d) {
    const DurationSystem sys(1, 6, {d}, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.size())));
    const Eigen::MatrixXd a = dense_A(sys);
    const Eigen::MatrixXd gram = a * a.transpose();
    for (Eigen::Index r = 0; r < gram.rows(); ++r)
      for (Eigen::Index c = 0; c < gram.cols(); ++c)
        EXPECT_EQ(gram(r, c), r == c ? d[static_cast<std::size_t>(r)].length() : 0);
    ++checked;
  });
  EXPECT_EQ(checked, 32);
}

TEST(DurationSystem, OperatorNormBoundedByLongestDuration) {
  for (int rep = 0; rep < 5; ++rep) {
    const auto sys = build_system(testing::random_panel(4, 25, 0.3, 50 + rep));
    const Eigen::MatrixXd a = dense_A(sys);
    const double top = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
    EXPECT_LE(top * top, sys.max_duration() + 1e-9);
  }
}

}  // namespace
}  // namespace hfsync
