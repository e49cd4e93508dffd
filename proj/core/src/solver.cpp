#include "hfsync/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "hfsync/baselines.hpp"
#include "hfsync/error.hpp"

namespace hfsync {

void SolverConfig::validate() const {
  if (!(mu >= 0.0)) throw InvalidInput("mu must be >= 0");
  if (!(lambda >= 0.0)) throw InvalidInput("lambda must be >= 0");
  if (!(eta > 0.0)) throw InvalidInput("eta must be > 0");
  if (!(tol > 0.0)) throw InvalidInput("tol must be > 0");
  if (max_iter < 1) throw InvalidInput("max_iter must be >= 1");
  if (init_rank < 0) throw InvalidInput("init_rank must be >= 0");
}

AdmmState AdmmState::zeros(int n_assets, int n_increments) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n_assets, n_increments);
  return AdmmState{z, z, z, z, z, z, 0};
}

namespace {

using Svd = Eigen::BDCSVD<Eigen::MatrixXd>;

Svd thin_svd(const Eigen::MatrixXd& m) { return Svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV); }

// Recomposes U diag(values) V' using only the leading `keep` triplets.
Eigen::MatrixXd recompose(const Svd& svd, const Eigen::VectorXd& values, Eigen::Index keep) {
  if (keep == 0) return Eigen::MatrixXd::Zero(svd.matrixU().rows(), svd.matrixV().rows());
  return svd.matrixU().leftCols(keep) * values.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).transpose();
}

double nuclear_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Svd(m).singularValues().sum();
}

double ratio(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double denom = std::max({1.0, a.norm(), b.norm()});
  return (a - b).norm() / denom;
}

}  // namespace

Eigen::MatrixXd shrink(const Eigen::MatrixXd& m, double psi) {
  if (!(psi >= 0.0)) throw InvalidInput("shrink threshold must be >= 0");
  if (m.size() == 0) return m;
  const Svd svd = thin_svd(m);
  const Eigen::VectorXd s = (svd.singularValues().array() - psi).max(0.0).matrix();
  Eigen::Index keep = 0;
  while (keep < s.size() && s(keep) > 0.0) ++keep;
  return recompose(svd, s, keep);
}

Eigen::MatrixXd low_rank_approximation(const Eigen::MatrixXd& m, int rank) {
  if (rank < 0) throw InvalidInput("rank must be >= 0");
  if (m.size() == 0) return m;
  const Svd svd = thin_svd(m);
  const Eigen::Index keep = std::min<Eigen::Index>(rank, svd.singularValues().size());
  return recompose(svd, svd.singularValues(), keep);
}

AdmmState admm_step(const AdmmState& s, const DurationSystem& sys, const SolverConfig& c) {
  const double denom = c.mu + c.eta;
  AdmmState next;
  next.delta = solve_ridge(sys, s.z_delta + s.u_delta, c.eta);
  next.pi = (c.mu * s.z_delta + c.eta * s.z_pi + c.eta * s.u_pi) / denom;
  next.z_delta = (c.mu * next.pi + c.eta * next.delta - c.eta * s.u_delta) / denom;
  next.z_pi = shrink(next.pi - s.u_pi, c.lambda / c.eta);
  next.u_delta = s.u_delta + next.z_delta - next.delta;
  next.u_pi = s.u_pi + next.z_pi - next.pi;
  next.iter = s.iter + 1;
  return next;
}

std::array<double, 4> convergence_ratios(const AdmmState& prev, const AdmmState& cur) {
  return {ratio(cur.delta, prev.delta), ratio(cur.pi, prev.pi), ratio(prev.delta, prev.z_delta),
          ratio(prev.pi, prev.z_pi)};
}

bool converged(const AdmmState& prev, const AdmmState& cur, double tol) {
  const auto r = convergence_ratios(prev, cur);
  return *std::max_element(r.begin(), r.end()) < tol;
}

double relaxed_objective(const AdmmState& s, const DurationSystem& sys, const SolverConfig& c) {
  const Eigen::VectorXd resid = apply_A(sys, s.delta) - sys.b();
  return 0.5 * resid.squaredNorm() + 0.5 * c.mu * (s.z_delta - s.pi).squaredNorm() + c.lambda * nuclear_norm(s.z_pi);
}

double augmented_lagrangian(const AdmmState& s, const DurationSystem& sys, const SolverConfig& c) {
  return relaxed_objective(s, sys, c) + 0.5 * c.eta * (s.z_delta - s.delta + s.u_delta).squaredNorm() +
         0.5 * c.eta * (s.z_pi - s.pi + s.u_pi).squaredNorm();
}

AdmmState initial_state(const ObservationPanel& panel, const SolverConfig& config) {
  AdmmState s = AdmmState::zeros(panel.n_assets(), panel.n_increments());
  s.z_delta = row_diff(previous_tick(panel));
  s.delta = s.z_delta;
  s.pi = low_rank_approximation(s.z_delta, config.init_rank);
  s.z_pi = s.pi;
  return s;
}

SyncResult synchronize(const ObservationPanel& panel, const SolverConfig& config) {
  return synchronize(panel, build_system(panel), config);
}

SyncResult synchronize(const ObservationPanel& panel, const DurationSystem& sys, const SolverConfig& config) {
  config.validate();
  if (sys.n_assets() != panel.n_assets() || sys.n_increments() != panel.n_increments())
    throw InvalidInput("duration system does not match panel");
  AdmmState state = initial_state(panel, config);
  SyncResult result;
  while (state.iter < config.max_iter) {
    AdmmState next = admm_step(state, sys, config);
    result.final_residuals = convergence_ratios(state, next);
    state = std::move(next);
    const double worst = *std::max_element(result.final_residuals.begin(), result.final_residuals.end());
    if (worst < config.tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = state.iter;
  result.delta_hat = std::move(state.delta);
  result.pi_hat = std::move(state.pi);
  return result;
}

bool MultiDaySync::all_converged() const {
  return std::all_of(days.begin(), days.end(), [](const SyncResult& r) { return r.converged; });
}

MultiDaySync synchronize_by_day(const ObservationPanel& panel, int day_increments, const SolverConfig& config) {
  const auto day_panels = split_days(panel, day_increments);
  MultiDaySync out;
  out.delta_hat.resize(panel.n_assets(), panel.n_increments());
  out.pi_hat.resize(panel.n_assets(), panel.n_increments());
  for (std::size_t d = 0; d < day_panels.size(); ++d) {
    SyncResult r = synchronize(day_panels[d], config);
    const auto col = static_cast<Eigen::Index>(d) * day_increments;
    out.delta_hat.middleCols(col, day_increments) = r.delta_hat;
    out.pi_hat.middleCols(col, day_increments) = r.pi_hat;
    out.days.push_back(std::move(r));
  }
  return out;
}

DebiasResult debias(const Eigen::MatrixXd& delta_hat, const Eigen::MatrixXd& pi_hat, std::optional<int> k,
                    std::optional<int> j, const SolverConfig& config) {
  if (delta_hat.rows() != pi_hat.rows() || delta_hat.cols() != pi_hat.cols())
    throw InvalidInput("debias: delta_hat and pi_hat dimensions differ");
  const int max_rank = static_cast<int>(std::min(delta_hat.rows(), delta_hat.cols()));
  const double lambda = config.lambda;
  const double mu = config.mu;

  const Svd d_svd = thin_svd(delta_hat);
  const Svd p_svd = thin_svd(pi_hat);
  const Eigen::VectorXd& ds = d_svd.singularValues();
  const Eigen::VectorXd& ps = p_svd.singularValues();

  if (mu == 0.0 && j && *j > 0) throw InvalidInput("debias: mu = 0 leaves the pi correction undefined");
  const double pi_shift = mu > 0.0 ? lambda * (1.0 + 1.0 / mu) : 0.0;

  DebiasResult out;
  out.k = k ? *k : static_cast<int>((ds.array() > lambda).count());
  out.j = j ? *j : (mu > 0.0 ? static_cast<int>((ps.array() > pi_shift).count()) : 0);
  if (out.k < 0 || out.k > max_rank || out.j < 0 || out.j > max_rank)
    throw InvalidInput("debias: k and J must lie in [0, min(N, n)]");
  // the ordering k <= J only binds when the caller fixes both
  if (k && j && *k > *j) throw InvalidInput("debias: require k <= J");

  Eigen::VectorXd dv = ds;
  for (Eigen::Index i = 0; i < dv.size(); ++i) dv(i) = i < out.k ? dv(i) + lambda : dv(i) * (1.0 + mu);
  out.delta_tilde = recompose(d_svd, dv, dv.size());

  Eigen::VectorXd pv = ps;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(out.j, pv.size()); ++i) pv(i) += pi_shift;
  out.pi_tilde = recompose(p_svd, pv, pv.size());
  return out;
}

Eigen::MatrixXd reconstruct_prices(const Eigen::MatrixXd& delta_hat, const ObservationPanel& panel) {
  if (delta_hat.rows() != panel.n_assets() || delta_hat.cols() != panel.n_increments())
    throw InvalidInput("increment matrix does not match panel");
  Eigen::MatrixXd prices(delta_hat.rows(), delta_hat.cols() + 1);
  for (Eigen::Index i = 0; i < delta_hat.rows(); ++i) {
    double level = panel.series(static_cast<int>(i)).log_price.front();
    prices(i, 0) = level;
    for (Eigen::Index j = 0; j < delta_hat.cols(); ++j) {
      level += delta_hat(i, j);
      prices(i, j + 1) = level;
    }
  }
  return prices;
}

}  // namespace hfsync
