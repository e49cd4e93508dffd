#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfsync/kvtext.hpp"
#include "hfsync/panel.hpp"

namespace hfsync {

/// Square-root variance dynamics dv = kappa (theta - v) dt + s sqrt(v) dW.
struct HestonParams {
  double kappa = 3.0;
  double theta = 0.09;  ///< long-run variance (0.3^2)
  double s = 0.3;       ///< vol of variance
};

/// Factor model with stochastic volatility observed asynchronously:
///   dX = beta dV + dZ,  dV = mu_v dt + sigma_v rho^{1/2} dW,
///   dZ = sqrt(noise_scale) sigma* dW*,  corr(W*) = block rho*.
/// Time is measured in trading days; one day has `day_increments` steps.
struct DgpConfig {
  int n_assets = 100;
  int n_factors = 3;
  int days = 5;
  int day_increments = 390;
  HestonParams heston{};
  std::vector<double> factor_drift{0.05, 0.03, 0.02};
  double factor_strength = 1.0;  ///< alpha in beta'beta / N^alpha = I
  double noise_scale = 0.1;
  /// Asynchrony intensity per contiguous asset group: the expected number of
  /// grid steps per trade, so a cell is traded with probability
  /// 1 - exp(-1 / intensity). Larger values mean sparser trading.
  std::vector<double> async_intensity{1.0};
  double corr_decay = 0.6;
  int block_size = 10;
  double initial_log_price = 4.605170185988092;  ///< log(100)
  /// Every asset trades at each day's first grid point (opening print), so
  /// multi-day panels split into anchored day panels.
  bool observe_day_open = true;
  std::uint64_t seed = 1;

  void validate() const;
  int total_increments() const { return days * day_increments; }
  double step() const { return 1.0 / day_increments; }
  /// 2 kappa theta / s^2; above 1 the variance stays strictly positive.
  double feller_ratio() const { return 2.0 * heston.kappa * heston.theta / (heston.s * heston.s); }
  /// Group index of each asset (contiguous, near-equal groups).
  std::vector<int> asset_groups() const;

  KeyValueText to_kv() const;
  static DgpConfig from_kv(const KeyValueText& kv);
};

struct DgpOutput {
  ObservationPanel panel;      ///< asynchronously sampled log-prices
  Eigen::MatrixXd delta_true;  ///< N x (days * n) latent increments
  Eigen::MatrixXd pi_true;     ///< factor part beta dV
  Eigen::MatrixXd sigma_true;  ///< N x N integrated covariance
  Eigen::MatrixXd factor_paths;  ///< r x (days * n + 1), V_0 = 0
  Eigen::MatrixXd beta;          ///< N x r loadings
  Eigen::MatrixXd prices_true;   ///< N x (days * n + 1) latent log-prices
  Eigen::MatrixXd factor_variance;  ///< r x (days * n) variance used on each step
  Eigen::MatrixXd idio_variance;    ///< N x (days * n)
};

DgpOutput simulate(const DgpConfig& config);

/// Grid cells 1..n are traded independently with probability
/// 1 - exp(-rate) (at least one Poisson(rate) arrival per step). Index 0 is
/// always included.
std::vector<int> sample_poisson_times(int n, double rate, std::mt19937_64& rng);
std::vector<int> sample_poisson_times(int n, double rate, std::uint64_t seed);

/// Factor correlation diag(HH')^{-1/2} HH' diag(HH')^{-1/2} with H lower
/// triangular, h_ij = decay^{i-j}.
Eigen::MatrixXd factor_correlation(int r, double decay);

/// Block-diagonal idiosyncratic correlation with blocks decay^{|i-j|}; the
/// last block is truncated when n is not a multiple of block.
Eigen::MatrixXd idiosyncratic_correlation(int n, int block, double decay);

/// Normalises loadings so that beta'beta / N^alpha = I.
Eigen::MatrixXd normalize_loadings(const Eigen::MatrixXd& raw, double alpha);

/// Per-replication seeds derived from a base seed (SplitMix64 stream).
std::uint64_t replication_seed(std::uint64_t base, int rep);

/// Writes the truth matrices, the observed panel and a config echo into
/// `dir` (which must exist).
void write_dgp(const std::string& dir, const DgpConfig& config, const DgpOutput& out);

}  // namespace hfsync
