#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfsync/baselines.hpp"
#include "hfsync/panel.hpp"
#include "hfsync/solver.hpp"

namespace hfsync {

struct PortfolioConfig {
  double gross_exposure = 1.0;  ///< c in ||w||_1 <= c
  int rebalance_days = 21;
  double trading_days = 252.0;
  int factor_rank = 3;          ///< rank of the PCA covariance (clamped below N)
  bool truncate_jumps = true;   ///< drop returns beyond 5 bipower deviations
  double truncation_multiplier = 5.0;

  void validate() const;
};

/// Result of the constrained minimum-variance problem.
struct MinVarianceSolution {
  Eigen::VectorXd weights;
  double objective = 0.0;  ///< w' sigma w on the (repaired) matrix
  int iterations = 0;
  bool repaired = false;   ///< diagonal loading was applied
};

/// Adds 1e-8 * trace / N to the diagonal when the smallest eigenvalue of
/// the symmetrised matrix is below 1e-10.
Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& sigma, bool* repaired = nullptr);

/// Euclidean projection onto {w : 1'w = 1, ||w||_1 <= c}.
Eigen::VectorXd project_budget_l1(const Eigen::VectorXd& y, double c);

/// min w' sigma w  s.t.  1'w = 1, ||w||_1 <= c.
MinVarianceSolution solve_min_variance(const Eigen::MatrixXd& sigma, double c);
Eigen::VectorXd min_variance_weights(const Eigen::MatrixXd& sigma, double c);

/// Synchronised intraday returns of one day under the given method, one
/// column per return. `config` is used by NN only.
Eigen::MatrixXd synchronized_day_returns(const ObservationPanel& day, Method method, const SolverConfig& config);

struct BacktestResult {
  double ar = 0.0;               ///< annualised mean return
  double sd = 0.0;               ///< annualised standard deviation
  std::optional<double> sr;      ///< AR / SD, absent when SD == 0
  std::vector<int> skipped;      ///< estimation periods whose covariance was singular
  std::vector<Eigen::VectorXd> weights;  ///< one per realised period
  std::vector<double> daily_returns;     ///< realised out-of-sample day returns
};

/// Rolling out-of-sample backtest over consecutive periods. For each pair
/// (period k, period k+1): synchronise period k, estimate the PCA factor
/// covariance, solve for weights, and realise them on the synchronised
/// intraday returns of period k+1. Each period is split into days of
/// `day_increments`; overnight moves never enter.
///
/// AR = trading_days * mean daily return, SD = sqrt(trading_days * mean
/// daily realised variance of intraday portfolio returns), SR = AR / SD.
BacktestResult backtest(const std::vector<ObservationPanel>& periods, int day_increments, Method method,
                        const PortfolioConfig& config, const SolverConfig& solver = {});

}  // namespace hfsync
