#include <gtest/gtest.h>

#include "hfsync/error.hpp"
#include "hfsync/experiments.hpp"
#include "test_support.hpp"

namespace hfsync {
namespace {

Scenario tiny_scenario() {
  Scenario s{"tiny", DgpConfig{}};
  s.dgp.n_assets = 6;
  s.dgp.days = 2;
  s.dgp.day_increments = 40;
  return s;
}

TEST(Scenarios, AllNamesResolve) {
  for (const auto& name : scenario_names()) EXPECT_EQ(make_scenario(name).name, name);
  EXPECT_EQ(make_scenario("table1-N20").dgp.n_assets, 20);
  EXPECT_EQ(make_scenario("table1-5m").dgp.day_increments, 78);
  EXPECT_EQ(make_scenario("table2-alpha-0.5").dgp.factor_strength, 0.5);
  EXPECT_EQ(make_scenario("table2-async-0.5-2").dgp.async_intensity, (std::vector<double>{0.5, 2.0}));
  EXPECT_THROW(make_scenario("nope"), InvalidInput);
}

TEST(AggregateReturns, SumsBlocksAndDropsTail) {
  Eigen::MatrixXd r(1, 5);
  r << 1, 2, 3, 4, 5;
  const auto a = aggregate_returns(r, 2);
  ASSERT_EQ(a.cols(), 2);
  EXPECT_EQ(a(0, 0), 3.0);
  EXPECT_EQ(a(0, 1), 7.0);
  EXPECT_EQ(aggregate_returns(r, 1), r);
  EXPECT_THROW(aggregate_returns(r, 0), InvalidInput);
}

TEST(RunMethod, ShapesPerMethod) {
  const auto out = simulate(tiny_scenario().dgp);
  const SolverConfig c;
  EXPECT_EQ(run_method(out.panel, 40, Method::NN, c).increments.cols(), 80);
  EXPECT_EQ(run_method(out.panel, 40, Method::PI, c).returns.cols(), 80);
  EXPECT_EQ(run_method(out.panel, 40, Method::RT, c).increments.size(), 0);
  EXPECT_EQ(run_method(out.panel, 40, Method::PA, c).increments.cols(), 80);
  EXPECT_EQ(run_method(out.panel, 40, Method::PA, c).returns.cols(), 2 * (40 / default_pa_block(40) - 1));
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  const auto s = tiny_scenario();
  const auto a = run_monte_carlo(s, 3, 11, SolverConfig{}, 1);
  const auto b = run_monte_carlo(s, 3, 11, SolverConfig{}, 3);
  EXPECT_EQ(summary_csv(a.summary), summary_csv(b.summary));
  EXPECT_EQ(replication_metrics_csv(a), replication_metrics_csv(b));
  EXPECT_EQ(a.replications[2].seed, replication_seed(11, 2));
  EXPECT_EQ(replication_manifest_csv(a).substr(0, 9), "rep,seed\n");
}

TEST(MonteCarlo, SummaryCoversMethodsAndMetrics) {
  const auto r = run_monte_carlo(tiny_scenario(), 1, 1, SolverConfig{});
  int nn_rows = 0, rt_increment_rows = 0;
  for (const auto& row : r.summary) {
    if (row.method == "NN") ++nn_rows;
    if (row.method == "RT" && row.metric == "increment_l1") ++rt_increment_rows;
  }
  EXPECT_EQ(nn_rows, 4);
  EXPECT_EQ(rt_increment_rows, 0);
}

TEST(ImputationStudy, RowsPerMethodAndProbability) {
  const auto out = simulate(tiny_scenario().dgp);
  const auto rows = imputation_study(split_days(out.panel, 40)[0], {0.1, 0.3}, 1, 3, SolverConfig{});
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) EXPECT_GT(r.abs_error, 0.0);
}

TEST(IsometryGap, ZeroForFullObservation) {
  const auto sys = build_system(testing::random_panel(3, 10, 1.0, 1));
  EXPECT_NEAR(isometry_gap(sys, Eigen::MatrixXd::Random(3, 10)), 0.0, 1e-12);
}

TEST(EigenReport, RowCountAndLabels) {
  const auto s = tiny_scenario();
  const auto out = simulate(s.dgp);
  const auto rows = eigen_report(out.panel, 40, 2, 2, {1, 5}, {Method::NN, Method::PI}, SolverConfig{});
  EXPECT_EQ(rows.size(), 2u * 2u * 2u * 2u);
  const auto text = eigen_report_csv(rows);
  EXPECT_EQ(text.rfind("group,method,frequency,eig_rank,value\n", 0), 0u);
  EXPECT_NE(text.find("s,"), std::string::npos);
}

TEST(StaleBeta, PreviousTickZeroesBetaWhereNnDoesNot) {
  const auto r = stale_beta_study(StaleBetaConfig{});
  EXPECT_GT(r.zero_windows, 0);
  EXPECT_EQ(r.pi_zero_beta, r.zero_windows);
  EXPECT_EQ(r.nn_nonzero_beta, r.zero_windows);
}

TEST(SpotBetaCsv, EmptyCellForMissingEstimate) {
  const auto text = spot_beta_csv({"X"}, {{1.5, std::nullopt}});
  EXPECT_EQ(text, "asset,t_index,beta\nX,0,1.5\nX,1,\n");
}

}  // namespace
}  // namespace hfsync
