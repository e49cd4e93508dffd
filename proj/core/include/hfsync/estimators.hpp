#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace hfsync {

/// Rank-r factor part plus diagonal residual, with its full spectrum.
struct CovarianceEstimate {
  Eigen::MatrixXd sigma;
  int rank_used = 0;
  Eigen::VectorXd eigenvalues;  ///< nonincreasing
};

/// R R' for an N x m return matrix.
Eigen::MatrixXd realized_cov(const Eigen::MatrixXd& returns);

/// PCA factor covariance: the leading r eigenpairs of the realized
/// covariance plus the diagonal of what remains, so the diagonal of the
/// estimate equals the realized variances exactly. Requires 1 <= r < N.
CovarianceEstimate pca_factor_cov(const Eigen::MatrixXd& returns, int r);

/// Top-k eigenvalues of each group's realized covariance divided by its
/// trace (variance shares). `groups` lists asset row indices.
std::vector<Eigen::VectorXd> eigen_by_group(const Eigen::MatrixXd& returns,
                                            const std::vector<std::vector<int>>& groups, int k);

/// Splits assets into `n_groups` near-equal groups ordered from most to
/// least missing cells. Ties keep the original asset order.
std::vector<std::vector<int>> groups_by_missingness(const std::vector<int>& missing_counts, int n_groups);

/// (pi/2) sum_{j>=2} |r_j| |r_{j-1}|.
double bipower_variation(const Eigen::VectorXd& returns);

struct TruncationResult {
  Eigen::VectorXd returns;
  int truncated = 0;
};

/// Zeroes r_j when |r_j| > multiplier * sqrt(BV / m). Needs m >= 2.
TruncationResult truncate_jumps(const Eigen::VectorXd& returns, double multiplier = 5.0);

/// Rolling-window regression slope sum(r_m r_s) / sum(r_m^2) over windows
/// of k returns; entry t covers returns t .. t+k-1. Windows where the
/// market does not move have no estimate.
std::vector<std::optional<double>> spot_beta(const Eigen::VectorXd& stock, const Eigen::VectorXd& market, int k);

}  // namespace hfsync
