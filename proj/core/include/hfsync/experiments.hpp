#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfsync/baselines.hpp"
#include "hfsync/evalmetrics.hpp"
#include "hfsync/linsys.hpp"
#include "hfsync/panel.hpp"
#include "hfsync/simulate.hpp"
#include "hfsync/solver.hpp"

namespace hfsync {

/// A named DGP configuration (one row of the covariance tables).
struct Scenario {
  std::string name;
  DgpConfig dgp;
};

/// table1-N20, table1-N50, table1-N120, table1-30s, table1-1m, table1-5m,
/// table2-async-0.5-0.5, table2-async-0.5-2, table2-async-2-2,
/// table2-alpha-0.8, table2-alpha-0.5, table2-alpha-0.2, baseline.
std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name);

/// Synchronised returns of a multi-day panel for one method, days solved
/// independently and concatenated. NN returns the full increment estimate.
struct MethodOutput {
  Method method = Method::NN;
  Eigen::MatrixXd returns;     ///< input to covariance estimation
  Eigen::MatrixXd increments;  ///< grid-level estimate of the factor increments (empty for RT)
  bool converged = true;
};
MethodOutput run_method(const ObservationPanel& panel, int day_increments, Method method, const SolverConfig& config);

/// Sums non-overlapping blocks of `stride` consecutive returns (a trailing
/// partial block is dropped).
Eigen::MatrixXd aggregate_returns(const Eigen::MatrixXd& returns, int stride);

struct MetricValue {
  std::string method;
  std::string metric;
  double value = 0.0;
};

struct ReplicationOutcome {
  int rep = 0;
  std::uint64_t seed = 0;
  bool nn_converged = true;
  std::vector<MetricValue> metrics;
};

const std::vector<Method>& all_methods();

/// Simulates one panel and scores every method: relative covariance error
/// of the PCA estimate in three norms and, for grid methods, the scaled L1
/// error of the increments against the factor part.
ReplicationOutcome run_replication(const Scenario& scenario, int rep, std::uint64_t seed, const SolverConfig& config,
                                   const std::vector<Method>& methods = all_methods());

struct MonteCarloResult {
  std::vector<ReplicationOutcome> replications;  ///< ordered by rep
  std::vector<SummaryRow> summary;               ///< method-major, fixed metric order
};

/// Replication r uses replication_seed(seed, r). Replications run on
/// `threads` workers; aggregation follows replication order so results do
/// not depend on the thread count.
MonteCarloResult run_monte_carlo(const Scenario& scenario, int reps, std::uint64_t seed, const SolverConfig& config,
                                 int threads = 1, const std::vector<Method>& methods = all_methods());

/// `rep,seed`
std::string replication_manifest_csv(const MonteCarloResult& result);
/// `rep,method,metric,value`
std::string replication_metrics_csv(const MonteCarloResult& result);

/// Mean imputation error of one method at one mask probability.
struct ImputationRow {
  double mask_p = 0.0;
  Method method = Method::NN;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

/// Masks observed prices with probability p, refills them with NN, LI and
/// PI, and scores the filled prices on the masked cells. Masks are shared
/// across methods.
std::vector<ImputationRow> imputation_study(const ObservationPanel& panel, const std::vector<double>& mask_probs,
                                            int reps, std::uint64_t seed, const SolverConfig& config);

/// | ||A(delta)||^2 - ||delta||^2 | / ||delta||^2.
double isometry_gap(const DurationSystem& sys, const Eigen::MatrixXd& delta);

/// Grouped eigenvalue shares of synchronised returns.
struct EigenRow {
  int group = 0;
  Method method = Method::NN;
  std::string frequency;
  int rank = 0;  ///< 1-based
  double value = 0.0;
};
/// Assets are grouped by missing-cell count (group 0 = most missing); each
/// stride aggregates grid returns before the eigen-decomposition.
std::vector<EigenRow> eigen_report(const ObservationPanel& panel, int day_increments, int n_groups, int k,
                                   const std::vector<int>& strides, const std::vector<Method>& methods,
                                   const SolverConfig& config);
/// `group,method,frequency,eig_rank,value`
std::string eigen_report_csv(const std::vector<EigenRow>& rows);

/// A one-factor panel with a market proxy (asset 0, always traded, unit
/// loading) and one rarely traded asset with unit loading (the last asset).
struct StaleBetaConfig {
  int n_assets = 30;
  int n_increments = 390;
  double liquid_rate = 1.5;  ///< per-step arrival rate of ordinary assets
  double stale_rate = 0.1;   ///< per-step arrival rate of the stale asset
  double noise_scale = 0.1;
  int window = 10;
  std::uint64_t seed = 1;
};

struct StaleBetaOutcome {
  int zero_windows = 0;      ///< windows in which the stale asset never traded
  int pi_zero_beta = 0;      ///< of those, PI windows with beta exactly 0
  int nn_nonzero_beta = 0;   ///< of those, NN windows with beta != 0
};
StaleBetaOutcome stale_beta_study(const StaleBetaConfig& config, const SolverConfig& solver = {});

/// `asset,t_index,beta`; windows without an estimate are left empty.
std::string spot_beta_csv(const std::vector<std::string>& assets,
                          const std::vector<std::vector<std::optional<double>>>& betas);

}  // namespace hfsync
