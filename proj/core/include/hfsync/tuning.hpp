#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfsync/panel.hpp"
#include "hfsync/solver.hpp"

namespace hfsync {

/// Candidate sets for (mu, lambda), the artificial mask probabilities and
/// the number of repetitions per probability.
struct TuningGrid {
  std::vector<double> mu_candidates{0.05, 0.1, 0.2};
  std::vector<double> lambda_candidates{5e-4, 1e-3, 2e-3};
  std::vector<double> mask_probs{0.1, 0.3};
  int repetitions = 1;
  std::uint64_t seed = 1;
  double eta_ratio = 10.0;  ///< eta = eta_ratio * lambda

  void validate() const;
};

enum class ErrorKind { Absolute, Relative };

/// Absolute: ||(P_hat - P) o M||_F / ||M||_F.
/// Relative: ||(P_hat - P) o M||_F / ||P o M||_F.
/// Matrices are N x (n+1) prices; M is the mask.
double imputation_error(const Eigen::MatrixXd& p_hat, const Eigen::MatrixXd& p_true, const MaskMatrix& mask,
                        ErrorKind kind);

/// One mask/solve/score cycle. Errors are +inf when the cycle fails.
struct TuningRecord {
  double mu = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
  double mask_p = 0.0;
  int rep = 0;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

struct TuningResult {
  double mu = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
  double mean_abs_error = 0.0;
  std::vector<TuningRecord> records;  ///< candidate-major, then p, then rep
};

/// Seed of the mask used for probability index `p_index` and repetition
/// `rep`; shared by every candidate.
std::uint64_t mask_seed(const TuningGrid& grid, int p_index, int rep);

/// Runs every mask cycle of the grid for one (mu, lambda, eta). `base`
/// supplies tol, max_iter and init_rank.
std::vector<TuningRecord> evaluate_candidate(const ObservationPanel& panel, const TuningGrid& grid, double mu,
                                             double lambda, double eta, const SolverConfig& base = {});

/// Exhaustive grid search with eta tied to lambda. Returns the pair with the
/// smallest mean absolute imputation error; ties go to the smaller lambda,
/// then the smaller mu.
TuningResult select_parameters(const ObservationPanel& panel, const TuningGrid& grid, const SolverConfig& base = {},
                               int threads = 1);

/// `mu,lambda,eta,mask_p,rep,abs_error,rel_error`
std::string tuning_report_csv(const std::vector<TuningRecord>& records);

}  // namespace hfsync
