#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "hfsync/linsys.hpp"
#include "hfsync/panel.hpp"

namespace hfsync {

/// Penalties and stopping rule of the scaled ADMM.
struct SolverConfig {
  double mu = 0.1;       ///< weight of (mu/2)||Z_delta - Pi||_F^2
  double lambda = 1e-3;  ///< nuclear-norm weight on Z_pi
  double eta = 1e-2;     ///< augmented-Lagrangian penalty
  double tol = 1e-5;
  int max_iter = 500;
  int init_rank = 3;     ///< rank of the PCA warm start for Pi

  void validate() const;
};

/// The six iterates of the scaled ADMM; all N x n.
struct AdmmState {
  Eigen::MatrixXd delta;
  Eigen::MatrixXd pi;
  Eigen::MatrixXd z_delta;
  Eigen::MatrixXd z_pi;
  Eigen::MatrixXd u_delta;
  Eigen::MatrixXd u_pi;
  int iter = 0;

  static AdmmState zeros(int n_assets, int n_increments);
};

struct SyncResult {
  Eigen::MatrixXd delta_hat;
  Eigen::MatrixXd pi_hat;
  int iterations = 0;
  bool converged = false;
  std::array<double, 4> final_residuals{};  ///< the four convergence ratios
};

/// Singular value soft-threshold U diag(max(s - psi, 0)) V'.
Eigen::MatrixXd shrink(const Eigen::MatrixXd& m, double psi);

/// Best rank-r approximation (truncated SVD); r is clamped to min(N, n).
Eigen::MatrixXd low_rank_approximation(const Eigen::MatrixXd& m, int rank);

/// One pass of the closed-form updates, in the order
/// delta, pi, z_delta, z_pi, u_delta, u_pi. Pi^{k+1} uses Z_delta^k.
AdmmState admm_step(const AdmmState& state, const DurationSystem& sys, const SolverConfig& config);

/// The four relative changes/residuals compared against the tolerance:
/// ||D^{k+1}-D^k|| and ||P^{k+1}-P^k|| relative to max(1, both norms), and
/// the primal gaps ||D^k - Z_D^k||, ||P^k - Z_P^k|| taken at `prev`.
std::array<double, 4> convergence_ratios(const AdmmState& prev, const AdmmState& cur);
bool converged(const AdmmState& prev, const AdmmState& cur, double tol);

/// Relaxed objective (1/2)||A(D)-b||^2 + (mu/2)||Z_D - P||^2 + lambda ||Z_P||_*.
double relaxed_objective(const AdmmState& s, const DurationSystem& sys, const SolverConfig& config);
/// Scaled augmented Lagrangian: relaxed objective plus the two eta-weighted
/// consensus terms.
double augmented_lagrangian(const AdmmState& s, const DurationSystem& sys, const SolverConfig& config);

/// Warm start: Z_delta from first differences of the previous-tick fill,
/// Pi and Z_pi from its rank-`init_rank` reconstruction, duals zero.
AdmmState initial_state(const ObservationPanel& panel, const SolverConfig& config);

/// Runs the ADMM from the warm start until the convergence test passes or
/// max_iter is reached. Non-convergence is reported in the result.
SyncResult synchronize(const ObservationPanel& panel, const SolverConfig& config);
SyncResult synchronize(const ObservationPanel& panel, const DurationSystem& sys, const SolverConfig& config);

/// Solves each day independently and concatenates the increments.
struct MultiDaySync {
  Eigen::MatrixXd delta_hat;  ///< N x (days * day_increments)
  Eigen::MatrixXd pi_hat;
  std::vector<SyncResult> days;
  bool all_converged() const;
};
MultiDaySync synchronize_by_day(const ObservationPanel& panel, int day_increments, const SolverConfig& config);

struct DebiasResult {
  Eigen::MatrixXd delta_tilde;
  Eigen::MatrixXd pi_tilde;
  int k = 0;
  int j = 0;
};

/// Undoes the known singular-value shrinkage. For delta: add lambda to the
/// first k singular values and scale the rest by (1 + mu). For pi: add
/// lambda (1 + 1/mu) to the first J singular values. When omitted, k counts
/// singular values of delta_hat above lambda and J those of pi_hat above
/// lambda (1 + 1/mu).
DebiasResult debias(const Eigen::MatrixXd& delta_hat, const Eigen::MatrixXd& pi_hat, std::optional<int> k,
                    std::optional<int> j, const SolverConfig& config);

/// Row i: anchor log-price followed by the cumulative sum of delta row i.
Eigen::MatrixXd reconstruct_prices(const Eigen::MatrixXd& delta_hat, const ObservationPanel& panel);

}  // namespace hfsync
