#include "hfsync/evalmetrics.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/SVD>

#include "hfsync/error.hpp"

namespace hfsync {

double increment_error_l1(const Eigen::MatrixXd& pi_hat, const Eigen::MatrixXd& pi_true, double floor) {
  if (pi_hat.rows() != pi_true.rows() || pi_hat.cols() != pi_true.cols())
    throw InvalidInput("increment matrices differ in shape");
  double acc = 0.0;
  std::size_t used = 0;
  for (Eigen::Index j = 0; j < pi_true.cols(); ++j)
    for (Eigen::Index i = 0; i < pi_true.rows(); ++i) {
      const double truth = pi_true(i, j);
      if (std::abs(truth) <= floor) continue;
      acc += std::abs(pi_hat(i, j) - truth) / std::abs(truth);
      ++used;
    }
  if (used == 0) throw InvalidInput("every true increment lies below the floor");
  return acc / static_cast<double>(used);
}

std::string norm_name(CovNorm n) {
  switch (n) {
    case CovNorm::Frobenius: return "frobenius";
    case CovNorm::Spectral: return "spectral";
    case CovNorm::Max: return "max";
  }
  return "?";
}

namespace {

double matrix_norm(const Eigen::MatrixXd& m, CovNorm norm) {
  switch (norm) {
    case CovNorm::Frobenius: return m.norm();
    case CovNorm::Spectral:
      return m.size() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
    case CovNorm::Max: return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  }
  return 0.0;
}

}  // namespace

double cov_error(const Eigen::MatrixXd& sigma_hat, const Eigen::MatrixXd& sigma_true, CovNorm norm) {
  if (sigma_hat.rows() != sigma_true.rows() || sigma_hat.cols() != sigma_true.cols())
    throw InvalidInput("covariance matrices differ in shape");
  const double denom = matrix_norm(sigma_true, norm);
  if (!(denom > 0.0)) throw InvalidInput("true covariance has zero norm");
  return matrix_norm(sigma_hat - sigma_true, norm) / denom;
}

SummaryStat summarize(const std::vector<double>& values) {
  SummaryStat s;
  s.count = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "scenario,method,metric,mean,sd\n";
  char buf[64];
  for (const auto& r : rows) {
    out += r.scenario + "," + r.method + "," + r.metric + ",";
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", r.mean, r.sd);
    out += buf;
  }
  return out;
}

}  // namespace hfsync
