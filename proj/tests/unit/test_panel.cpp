#include <cmath>

#include <gtest/gtest.h>

#include "hfsync/csv.hpp"
#include "hfsync/error.hpp"
#include "hfsync/panel.hpp"
#include "hfsync/simulate.hpp"
#include "test_support.hpp"

namespace hfsync {
namespace {

GridSpec unit_grid(int count) { return GridSpec{0.0, 1.0, count}; }

TEST(Panel, RejectsMissingAnchor) {
  EXPECT_THROW(ObservationPanel(unit_grid(3), {TickSeries{"a", {1, 2}, {0.0, 0.1}}}), InvalidInput);
}

TEST(Panel, RejectsUnsortedOrOutOfRange) {
  EXPECT_THROW(ObservationPanel(unit_grid(3), {TickSeries{"a", {0, 2, 2}, {0, 0, 0}}}), InvalidInput);
  EXPECT_THROW(ObservationPanel(unit_grid(3), {TickSeries{"a", {0, 4}, {0, 0}}}), InvalidInput);
  EXPECT_THROW(ObservationPanel(unit_grid(3), {TickSeries{"a", {0, 1}, {0.0}}}), InvalidInput);
  EXPECT_THROW(ObservationPanel(unit_grid(3), {TickSeries{"a", {0, 1}, {0.0, NAN}}}), InvalidInput);
}

TEST(Panel, RejectsDuplicateAssetIds) {
  EXPECT_THROW(ObservationPanel(unit_grid(2), {TickSeries{"a", {0}, {0.0}}, TickSeries{"a", {0}, {0.0}}}),
               InvalidInput);
}

TEST(Panel, CountsMissingCells) {
  const ObservationPanel p(unit_grid(4), {TickSeries{"a", {0, 2}, {0.0, 0.1}}, TickSeries{"b", {0, 1, 2, 3, 4}, {0, 0, 0, 0, 0}}});
  EXPECT_EQ(p.missing_count(0), 3);
  EXPECT_EQ(p.missing_count(1), 0);
  EXPECT_EQ(p.observation_count(), 7u);
  EXPECT_TRUE(p.observed()(0, 2));
  EXPECT_FALSE(p.observed()(0, 1));
}

TEST(AlignToGrid, TradesInCellsZeroAndTwo) {
  const GridSpec g{0.0, 1.0, 3};
  const auto p = align_to_grid({RawSeries{"a", {{0.0, 100.0}, {1.5, 101.0}}}}, g);
  EXPECT_EQ(p.series(0).obs_idx, (std::vector<int>{0, 2}));
  EXPECT_NEAR(p.series(0).log_price[1], std::log(101.0), 1e-15);
}

TEST(AlignToGrid, LastTradeInCellWins) {
  const GridSpec g{0.0, 1.0, 2};
  const auto p = align_to_grid({RawSeries{"a", {{0.0, 1.0}, {0.2, 2.0}, {0.9, 3.0}}}}, g);
  EXPECT_EQ(p.series(0).obs_idx, (std::vector<int>{0, 1}));
  EXPECT_NEAR(p.series(0).log_price[1], std::log(3.0), 1e-15);
}

TEST(AlignToGrid, OneTradePerCellGivesFullPanel) {
  const GridSpec g{10.0, 2.0, 5};
  std::vector<RawTick> ticks;
  for (int j = 0; j <= 5; ++j) ticks.push_back({10.0 + 2.0 * j, 100.0 + j});
  const auto p = align_to_grid({RawSeries{"a", ticks}, RawSeries{"b", ticks}}, g);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(p.missing_count(i), 0);
}

TEST(AlignToGrid, IsIdempotentOnGridTimes) {
  const auto panel = testing::random_panel(3, 30, 0.5, 3);
  std::vector<RawSeries> raw;
  for (const auto& s : panel.series()) {
    RawSeries r{s.asset_id, {}};
    for (std::size_t k = 0; k < s.size(); ++k)
      r.ticks.push_back({panel.grid().time_at(s.obs_idx[k]), std::exp(s.log_price[k])});
    raw.push_back(r);
  }
  const auto again = align_to_grid(raw, panel.grid());
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(again.series(i).obs_idx, panel.series(i).obs_idx);
    for (std::size_t k = 0; k < again.series(i).size(); ++k)
      EXPECT_NEAR(again.series(i).log_price[k], panel.series(i).log_price[k], 1e-12);
  }
}

TEST(AlignToGrid, RejectsNonPositivePrice) {
  EXPECT_THROW(align_to_grid({RawSeries{"a", {{0.0, 0.0}}}}, GridSpec{0.0, 1.0, 1}), InvalidInput);
}

TEST(Poisson, RateOneMissesAboutOneOverE) {
  const int n = 10000;
  double missing = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto idx = sample_poisson_times(n, 1.0, static_cast<std::uint64_t>(rep + 1));
    missing += 1.0 - static_cast<double>(idx.size() - 1) / n;
  }
  EXPECT_NEAR(missing / 10.0, std::exp(-1.0), 0.05);
}

TEST(Mask, CountNearExpectation) {
  const auto panel = testing::random_panel(10, 1001, 1.0, 5);  // 10^4 maskable cells
  const auto m = generate_mask(panel, 0.5, 11);
  EXPECT_GE(m.count(), 4700u);
  EXPECT_LE(m.count(), 5300u);
  for (int i = 0; i < 10; ++i) EXPECT_FALSE(m(i, 0));
}

TEST(Mask, DeterministicInSeed) {
  const auto panel = testing::random_panel(4, 200, 0.7, 5);
  EXPECT_EQ(generate_mask(panel, 0.3, 9), generate_mask(panel, 0.3, 9));
  EXPECT_FALSE(generate_mask(panel, 0.3, 9) == generate_mask(panel, 0.3, 10));
}

TEST(Mask, OnlyObservedCells) {
  const auto panel = testing::random_panel(4, 200, 0.3, 5);
  const auto m = generate_mask(panel, 0.9, 2);
  const auto obs = panel.observed();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j)) EXPECT_TRUE(obs(i, j));
}

TEST(Mask, EmptyMaskIsIdentityAndMaskedCellsDisappear) {
  const auto panel = testing::random_panel(4, 100, 0.6, 8);
  EXPECT_TRUE(apply_mask(panel, MaskMatrix(4, 101)) == panel);
  const auto m = generate_mask(panel, 0.4, 3);
  const auto masked = apply_mask(panel, m);
  EXPECT_EQ(masked.observation_count() + m.count(), panel.observation_count());
  const auto obs = masked.observed();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 101; ++j)
      if (m(i, j)) EXPECT_FALSE(obs(i, j));
}

TEST(Mask, RejectsAnchorAndUnobservedCells) {
  const ObservationPanel p(unit_grid(3), {TickSeries{"a", {0, 2}, {0.0, 0.1}}});
  MaskMatrix anchor(1, 4);
  anchor.set(0, 0);
  EXPECT_THROW(apply_mask(p, anchor), InvalidInput);
  MaskMatrix absent(1, 4);
  absent.set(0, 1);
  EXPECT_THROW(apply_mask(p, absent), InvalidInput);
  EXPECT_THROW(apply_mask(p, MaskMatrix(2, 4)), InvalidInput);
}

TEST(PanelIo, RoundTrip) {
  const auto dir = testing::scratch_dir("panel_io");
  const auto panel = testing::random_panel(5, 50, 0.4, 17);
  write_panel(dir + "/p.csv", panel);
  EXPECT_TRUE(read_panel(dir + "/p.csv") == panel);

  const auto m = generate_mask(panel, 0.5, 1);
  write_mask(dir + "/m.csv", panel, m);
  EXPECT_EQ(read_mask(dir + "/m.csv", panel), m);
}

TEST(PanelIo, ParseErrorCarriesLineNumber) {
  const auto dir = testing::scratch_dir("panel_bad");
  const auto panel = testing::random_panel(2, 5, 1.0, 1);
  write_panel(dir + "/p.csv", panel);
  auto lines = csv::read_lines(dir + "/p.csv");
  lines[3] = "A1,notanumber,4.6";
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  csv::write_text(dir + "/p.csv", text);
  try {
    read_panel(dir + "/p.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(PanelIo, MissingSidecarIsIoError) {
  const auto dir = testing::scratch_dir("panel_nosidecar");
  csv::write_text(dir + "/p.csv", "asset,grid_index,log_price\nA,0,1\n");
  EXPECT_THROW(read_panel(dir + "/p.csv"), IoError);
}

TEST(Panel, SliceAndSplitDays) {
  Eigen::MatrixXd prices;
  std::vector<std::vector<int>> idx{{0, 1, 3, 4, 6}, {0, 2, 3, 5, 6}};
  prices = Eigen::MatrixXd::Random(2, 7);
  const auto p = testing::panel_from(idx, prices);
  const auto days = split_days(p, 3);
  ASSERT_EQ(days.size(), 2u);
  EXPECT_EQ(days[1].series(0).obs_idx, (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(days[1].series(1).obs_idx, (std::vector<int>{0, 2, 3}));
  EXPECT_EQ(days[1].series(1).log_price[0], prices(1, 3));
  EXPECT_THROW(split_days(p, 2), InvalidInput);
}

TEST(Panel, SelectAssets) {
  const auto p = testing::random_panel(4, 10, 0.5, 2);
  const auto s = p.select_assets({2, 0});
  EXPECT_EQ(s.series(0).asset_id, p.series(2).asset_id);
  EXPECT_EQ(s.series(1).obs_idx, p.series(0).obs_idx);
  EXPECT_THROW(p.select_assets({7}), InvalidInput);
}

}  // namespace
}  // namespace hfsync
