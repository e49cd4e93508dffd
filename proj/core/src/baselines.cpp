#include "hfsync/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "hfsync/error.hpp"

namespace hfsync {

Eigen::MatrixXd row_diff(const Eigen::MatrixXd& prices) {
  if (prices.cols() < 1) return Eigen::MatrixXd(prices.rows(), 0);
  return prices.rightCols(prices.cols() - 1) - prices.leftCols(prices.cols() - 1);
}

Eigen::MatrixXd previous_tick(const ObservationPanel& panel) {
  const int points = panel.grid().points();
  Eigen::MatrixXd out(panel.n_assets(), points);
  for (int i = 0; i < panel.n_assets(); ++i) {
    const auto& s = panel.series(i);
    std::size_t k = 0;
    for (int j = 0; j < points; ++j) {
      while (k + 1 < s.size() && s.obs_idx[k + 1] <= j) ++k;
      out(i, j) = s.log_price[k];
    }
  }
  return out;
}

Eigen::MatrixXd linear_interp(const ObservationPanel& panel) {
  const int points = panel.grid().points();
  Eigen::MatrixXd out(panel.n_assets(), points);
  for (int i = 0; i < panel.n_assets(); ++i) {
    const auto& s = panel.series(i);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const int lo = s.obs_idx[k];
      out(i, lo) = s.log_price[k];
      if (k + 1 == s.size()) {
        for (int j = lo + 1; j < points; ++j) out(i, j) = s.log_price[k];
        break;
      }
      const int hi = s.obs_idx[k + 1];
      const double slope = (s.log_price[k + 1] - s.log_price[k]) / (hi - lo);
      for (int j = lo + 1; j < hi; ++j) out(i, j) = s.log_price[k] + slope * (j - lo);
    }
  }
  return out;
}

Eigen::MatrixXd RefreshSample::returns() const { return row_diff(prices); }

RefreshSample refresh_time(const ObservationPanel& panel) {
  const int n_assets = panel.n_assets();
  // cursor[i]: position of the next observation of asset i after the last refresh
  std::vector<std::size_t> cursor(static_cast<std::size_t>(n_assets), 1);
  std::vector<int> times{0};
  while (true) {
    int next = -1;
    bool exhausted = false;
    for (int i = 0; i < n_assets; ++i) {
      const auto& s = panel.series(i);
      auto& c = cursor[static_cast<std::size_t>(i)];
      while (c < s.size() && s.obs_idx[c] <= times.back()) ++c;
      if (c >= s.size()) {
        exhausted = true;
        break;
      }
      next = std::max(next, s.obs_idx[c]);
    }
    if (exhausted) break;
    times.push_back(next);
  }
  const Eigen::MatrixXd filled = previous_tick(panel);
  RefreshSample out{times, Eigen::MatrixXd(n_assets, static_cast<Eigen::Index>(times.size()))};
  for (std::size_t k = 0; k < times.size(); ++k) out.prices.col(static_cast<Eigen::Index>(k)) = filled.col(times[k]);
  return out;
}

Eigen::MatrixXd PreAveraged::returns() const { return row_diff(block_prices); }

int default_pa_block(int n_increments) {
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_increments)))));
}

namespace {

// Averages observed prices per block of `block` points; `keep_partial`
// controls whether a trailing short block is emitted.
Eigen::MatrixXd block_averages(const ObservationPanel& panel, int block, bool keep_partial) {
  if (block < 1) throw InvalidInput("pre-averaging block must be >= 1");
  const int points = panel.grid().points();
  int n_blocks = points / block;
  if (keep_partial && points % block != 0) ++n_blocks;
  Eigen::MatrixXd out(panel.n_assets(), n_blocks);
  for (int i = 0; i < panel.n_assets(); ++i) {
    const auto& s = panel.series(i);
    std::size_t k = 0;
    for (int b = 0; b < n_blocks; ++b) {
      const int lo = b * block;
      const int hi = std::min(points, lo + block);
      double sum = 0.0;
      int count = 0;
      while (k < s.size() && s.obs_idx[k] < hi) {
        if (s.obs_idx[k] >= lo) {
          sum += s.log_price[k];
          ++count;
        }
        ++k;
      }
      // block 0 always holds the anchor, so b - 1 exists whenever count == 0
      out(i, b) = count > 0 ? sum / count : out(i, b - 1);
    }
  }
  return out;
}

}  // namespace

PreAveraged pre_average(const ObservationPanel& panel, int block) {
  return PreAveraged{block, block_averages(panel, block, false)};
}

Eigen::MatrixXd pre_average_fill(const ObservationPanel& panel, int block) {
  const Eigen::MatrixXd avg = block_averages(panel, block, true);
  const int points = panel.grid().points();
  Eigen::MatrixXd out(panel.n_assets(), points);
  for (int j = 0; j < points; ++j) out.col(j) = avg.col(j / block);
  return out;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::NN: return "NN";
    case Method::PI: return "PI";
    case Method::LI: return "LI";
    case Method::RT: return "RT";
    case Method::PA: return "PA";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Method m : {Method::NN, Method::PI, Method::LI, Method::RT, Method::PA})
    if (method_name(m) == up) return m;
  throw InvalidInput("unknown method '" + name + "' (expected nn, pi, li, rt or pa)");
}

}  // namespace hfsync
