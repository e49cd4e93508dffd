#include "hfsync/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "hfsync/error.hpp"

namespace hfsync {

Eigen::MatrixXd realized_cov(const Eigen::MatrixXd& returns) {
  Eigen::MatrixXd s = returns * returns.transpose();
  return 0.5 * (s + s.transpose());
}

CovarianceEstimate pca_factor_cov(const Eigen::MatrixXd& returns, int r) {
  const auto n = static_cast<int>(returns.rows());
  if (r < 1 || r >= n) throw InvalidInput("PCA rank must satisfy 1 <= r < N");
  const Eigen::MatrixXd s = realized_cov(returns);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  // Eigen sorts ascending; the leading r pairs are the last r columns.
  const Eigen::MatrixXd v = es.eigenvectors().rightCols(r);
  const Eigen::VectorXd lam = es.eigenvalues().tail(r);
  const Eigen::MatrixXd low_rank = v * lam.asDiagonal() * v.transpose();

  CovarianceEstimate out;
  out.rank_used = r;
  out.sigma = low_rank;
  out.sigma.diagonal() = s.diagonal();
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spectrum(out.sigma, Eigen::EigenvaluesOnly);
  out.eigenvalues = spectrum.eigenvalues().reverse();
  return out;
}

std::vector<Eigen::VectorXd> eigen_by_group(const Eigen::MatrixXd& returns,
                                            const std::vector<std::vector<int>>& groups, int k) {
  if (k < 1) throw InvalidInput("need k >= 1 eigenvalues per group");
  std::vector<Eigen::VectorXd> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    if (static_cast<int>(g.size()) < k) throw InvalidInput("group smaller than the number of eigenvalues requested");
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(g.size()), returns.cols());
    for (std::size_t a = 0; a < g.size(); ++a) {
      if (g[a] < 0 || g[a] >= returns.rows()) throw InvalidInput("group references an unknown asset");
      sub.row(static_cast<Eigen::Index>(a)) = returns.row(g[a]);
    }
    const Eigen::MatrixXd s = realized_cov(sub);
    const double trace = s.trace();
    if (!(trace > 0.0)) throw InvalidInput("group covariance has zero trace");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
    out.push_back(es.eigenvalues().reverse().head(k) / trace);
  }
  return out;
}

std::vector<std::vector<int>> groups_by_missingness(const std::vector<int>& missing_counts, int n_groups) {
  const int n = static_cast<int>(missing_counts.size());
  if (n_groups < 1 || n_groups > n) throw InvalidInput("group count must lie in [1, N]");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return missing_counts[static_cast<std::size_t>(a)] > missing_counts[static_cast<std::size_t>(b)];
  });
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(n_groups));
  for (int pos = 0; pos < n; ++pos)
    groups[static_cast<std::size_t>(static_cast<long long>(pos) * n_groups / n)].push_back(
        order[static_cast<std::size_t>(pos)]);
  return groups;
}

double bipower_variation(const Eigen::VectorXd& returns) {
  double acc = 0.0;
  for (Eigen::Index j = 1; j < returns.size(); ++j) acc += std::abs(returns(j)) * std::abs(returns(j - 1));
  return std::numbers::pi / 2.0 * acc;
}

TruncationResult truncate_jumps(const Eigen::VectorXd& returns, double multiplier) {
  if (returns.size() < 2) throw InvalidInput("jump truncation needs at least two returns");
  if (!(multiplier > 0.0)) throw InvalidInput("truncation multiplier must be positive");
  const double threshold = multiplier * std::sqrt(bipower_variation(returns) / static_cast<double>(returns.size()));
  TruncationResult out{returns, 0};
  for (Eigen::Index j = 0; j < out.returns.size(); ++j) {
    if (std::abs(out.returns(j)) > threshold) {
      out.returns(j) = 0.0;
      ++out.truncated;
    }
  }
  return out;
}

std::vector<std::optional<double>> spot_beta(const Eigen::VectorXd& stock, const Eigen::VectorXd& market, int k) {
  if (k < 2) throw InvalidInput("spot beta window must be >= 2");
  if (stock.size() != market.size()) throw InvalidInput("stock and market returns must be aligned");
  const Eigen::Index m = stock.size();
  if (m < k) return {};
  std::vector<std::optional<double>> out;
  out.reserve(static_cast<std::size_t>(m - k + 1));
  for (Eigen::Index t = 0; t + k <= m; ++t) {
    const double cross = market.segment(t, k).dot(stock.segment(t, k));
    const double var = market.segment(t, k).squaredNorm();
    if (var > 0.0)
      out.emplace_back(cross / var);
    else
      out.emplace_back(std::nullopt);
  }
  return out;
}

}  // namespace hfsync
