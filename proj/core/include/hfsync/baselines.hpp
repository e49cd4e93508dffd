#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfsync/panel.hpp"

namespace hfsync {

/// Each missing cell repeats the most recent observed log-price.
Eigen::MatrixXd previous_tick(const ObservationPanel& panel);

/// Linear interpolation in log-price between observations; cells after the
/// last observation carry it forward.
Eigen::MatrixXd linear_interp(const ObservationPanel& panel);

/// Refresh-time subsample: v_1 is the first index >= 1 by which every asset
/// has traded, v_{k+1} the first by which every asset has traded after v_k.
struct RefreshSample {
  std::vector<int> times;  ///< 0, v_1, v_2, ...
  Eigen::MatrixXd prices;  ///< N x times.size(), previous-tick values
  Eigen::MatrixXd returns() const;
};
RefreshSample refresh_time(const ObservationPanel& panel);

/// Block pre-averaging over full blocks of `block` grid points (a trailing
/// partial block is dropped). A block without observations repeats the
/// previous block's average.
struct PreAveraged {
  int block = 1;
  Eigen::MatrixXd block_prices;  ///< N x n_blocks
  Eigen::MatrixXd returns() const;
};
PreAveraged pre_average(const ObservationPanel& panel, int block);

/// Default pre-averaging window ceil(sqrt(n)).
int default_pa_block(int n_increments);

/// Grid-shaped version of pre-averaging used for cell-level comparisons:
/// every grid point holds the average price of the block containing it
/// (the trailing partial block averages its own points).
Eigen::MatrixXd pre_average_fill(const ObservationPanel& panel, int block);

/// First differences along rows: N x (m+1) prices -> N x m increments.
Eigen::MatrixXd row_diff(const Eigen::MatrixXd& prices);

enum class Method { NN, PI, LI, RT, PA };

std::string method_name(Method m);
Method parse_method(const std::string& name);

}  // namespace hfsync
