#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hfsync {

/// Mean of |pi_hat - pi| / |pi| over entries with |pi| > floor.
double increment_error_l1(const Eigen::MatrixXd& pi_hat, const Eigen::MatrixXd& pi_true, double floor = 1e-12);

enum class CovNorm { Frobenius, Spectral, Max };

std::string norm_name(CovNorm n);

/// ||sigma_hat - sigma|| / ||sigma|| in the chosen norm.
double cov_error(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& sigma_true, CovNorm norm);

/// Mean and sample standard deviation (n - 1 denominator; 0 for one value).
struct SummaryStat {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};
SummaryStat summarize(const std::vector<double>& values);

/// One row of the Monte Carlo summary `scenario,method,metric,mean,sd`.
struct SummaryRow {
  std::string scenario;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
};
std::string summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace hfsync
