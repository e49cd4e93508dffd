#include "hfsync/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "hfsync/error.hpp"
#include "hfsync/estimators.hpp"

namespace hfsync {

void PortfolioConfig::validate() const {
  if (!(gross_exposure >= 1.0)) throw InvalidInput("gross exposure c must be >= 1");
  if (rebalance_days < 1) throw InvalidInput("rebalance period must be >= 1 day");
  if (!(trading_days > 0.0)) throw InvalidInput("trading days per year must be > 0");
  if (factor_rank < 1) throw InvalidInput("factor rank must be >= 1");
  if (!(truncation_multiplier > 0.0)) throw InvalidInput("truncation multiplier must be > 0");
}

Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& sigma, bool* repaired) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw InvalidInput("covariance must be square and nonempty");
  Eigen::MatrixXd s = 0.5 * (sigma + sigma.transpose());
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const bool fix = min_eig < 1e-10;
  if (fix) s.diagonal().array() += 1e-8 * s.trace() / static_cast<double>(s.rows());
  if (repaired) *repaired = fix;
  return s;
}

namespace {

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

// theta with sum_i soft(y_i - theta, tau) = 1. The sum is continuous,
// piecewise linear and nonincreasing in theta, so the root is found on the
// segment between sorted breakpoints y_i +- tau.
double budget_shift(const Eigen::VectorXd& y, double tau) {
  const auto n = y.size();
  auto g = [&](double theta) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += soft(y(i) - theta, tau);
    return s;
  };
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    knots.push_back(y(i) - tau);
    knots.push_back(y(i) + tau);
  }
  std::sort(knots.begin(), knots.end());
  // g(knots.front()) >= 0 >= g(knots.back()); find the bracketing pair
  if (g(knots.front()) <= 1.0) {
    // every coordinate is active with slope -n below the first knot
    return knots.front() - (1.0 - g(knots.front())) / static_cast<double>(n);
  }
  std::size_t lo = 0, hi = knots.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (g(knots[mid]) >= 1.0) lo = mid; else hi = mid;
  }
  const double ga = g(knots[lo]);
  const double gb = g(knots[hi]);
  if (ga == gb) return knots[lo];
  return knots[lo] + (ga - 1.0) * (knots[hi] - knots[lo]) / (ga - gb);
}

Eigen::VectorXd soft_shift(const Eigen::VectorXd& y, double theta, double tau) {
  Eigen::VectorXd w(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) w(i) = soft(y(i) - theta, tau);
  return w;
}

// Minimiser of w' sigma w over the support of `sign` subject to 1'w = 1 and,
// when `with_l1`, s'w = c. Stationarity on the support reads
// 2 sigma w + nu 1 + tau s = 0. Returns false if the KKT system is singular.
bool face_minimizer(const Eigen::MatrixXd& sigma, const std::vector<int>& sign, bool with_l1, double c,
                    Eigen::VectorXd& w, double& nu, double& tau) {
  std::vector<int> support;
  for (std::size_t i = 0; i < sign.size(); ++i)
    if (sign[i] != 0) support.push_back(static_cast<int>(i));
  const int m = static_cast<int>(support.size());
  if (m == 0) return false;
  const int k = with_l1 ? 2 : 1;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + k, m + k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + k);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) kkt(a, b) = 2.0 * sigma(support[a], support[b]);
    kkt(a, m) = kkt(m, a) = 1.0;
    if (with_l1) kkt(a, m + 1) = kkt(m + 1, a) = sign[static_cast<std::size_t>(support[a])];
  }
  rhs(m) = 1.0;
  if (with_l1) rhs(m + 1) = c;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) return false;
  w = Eigen::VectorXd::Zero(sigma.rows());
  for (int a = 0; a < m; ++a) w(support[a]) = sol(a);
  nu = sol(m);
  tau = with_l1 ? sol(m + 1) : 0.0;
  return true;
}

// Solves the face picked out by `w` and accepts it only if it satisfies
// every optimality condition of the full problem.
bool certify(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& w, double c, Eigen::VectorXd& exact) {
  const Eigen::Index n = w.size();
  const double zero_tol = 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());
  std::vector<int> sign(static_cast<std::size_t>(n));
  bool any_short = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    sign[i] = w(i) > zero_tol ? 1 : (w(i) < -zero_tol ? -1 : 0);
    any_short = any_short || sign[i] < 0;
  }
  // a long-only support has ||w||_1 = 1'w = 1, so the exposure row only
  // binds (and duplicates the budget row) when c = 1
  const bool long_only_cap = !any_short && c <= 1.0 + 1e-12;
  double nu = 0.0, tau = 0.0;
  if (!face_minimizer(sigma, sign, any_short, c, exact, nu, tau)) return false;
  const Eigen::VectorXd grad = 2.0 * (sigma * exact);
  const double scale = std::max(1.0, grad.cwiseAbs().maxCoeff() + std::abs(nu));
  const double slack = 1e-9 * scale;
  if (tau < -slack) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sign[i] != 0 && exact(i) * sign[i] < 0.0) return false;
    if (sign[i] != 0) continue;
    const double g = grad(i) + nu;
    // simplex case: nu absorbs tau and off-support gradients must not pull
    // weight below zero
    if (long_only_cap ? g < -slack : std::abs(g) > tau + slack) return false;
  }
  return std::abs(exact.sum() - 1.0) <= 1e-10 && exact.lpNorm<1>() <= c + 1e-10;
}

}  // namespace

Eigen::VectorXd project_budget_l1(const Eigen::VectorXd& y, double c) {
  if (y.size() == 0) throw InvalidInput("cannot project an empty vector");
  if (!(c >= 1.0)) throw InvalidInput("gross exposure c must be >= 1");
  const double n = static_cast<double>(y.size());
  Eigen::VectorXd w = y.array() - (y.sum() - 1.0) / n;
  if (w.lpNorm<1>() <= c) return w;
  // ||w(tau)||_1 decreases in tau; bisect until it meets c
  double lo = 0.0;
  double hi = y.cwiseAbs().maxCoeff() + 1.0;
  while (soft_shift(y, budget_shift(y, hi), hi).lpNorm<1>() > c) hi *= 2.0;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (soft_shift(y, budget_shift(y, mid), mid).lpNorm<1>() > c) lo = mid; else hi = mid;
  }
  return soft_shift(y, budget_shift(y, hi), hi);
}

MinVarianceSolution solve_min_variance(const Eigen::MatrixXd& sigma_in, double c) {
  if (!(c >= 1.0)) throw InvalidInput("gross exposure c must be >= 1");
  if (!sigma_in.allFinite()) throw InvalidInput("covariance has non-finite entries");
  MinVarianceSolution out;
  const Eigen::MatrixXd sigma = repair_psd(sigma_in, &out.repaired);
  const Eigen::Index n = sigma.rows();
  auto objective = [&](const Eigen::VectorXd& w) { return w.dot(sigma * w); };

  // unconstrained-in-L1 optimum sigma^-1 1 / (1' sigma^-1 1)
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
  Eigen::VectorXd analytic = ldlt.solve(Eigen::VectorXd::Ones(n));
  analytic /= analytic.sum();
  if (analytic.allFinite() && analytic.lpNorm<1>() <= c) {
    out.weights = analytic;
    out.objective = objective(analytic);
    return out;
  }

  // accelerated projected gradient from equal weights, checking after each
  // chunk whether the current face already yields the exact optimum
  const double lipschitz =
      2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma, Eigen::EigenvaluesOnly).eigenvalues()(n - 1);
  const double step = 1.0 / lipschitz;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd y = w;
  double t = 1.0;
  double f_w = objective(w);
  constexpr int chunk = 50;
  constexpr int max_iter = 20000;
  Eigen::VectorXd exact;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd next = project_budget_l1(y - step * 2.0 * (sigma * y), c);
    const double f_next = objective(next);
    out.iterations = it;
    if (f_next > f_w) {
      // restart the momentum when the objective goes up
      y = w;
      t = 1.0;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / t_next) * (next - w);
      w = next;
      f_w = f_next;
      t = t_next;
    }
    if (it % chunk == 0 && certify(sigma, w, c, exact)) {
      w = exact;
      break;
    }
  }
  if (std::abs(w.sum() - 1.0) > 1e-10 || w.lpNorm<1>() > c + 1e-10) w = project_budget_l1(w, c);
  out.weights = w;
  out.objective = objective(w);
  return out;
}

Eigen::VectorXd min_variance_weights(const Eigen::MatrixXd& sigma, double c) {
  return solve_min_variance(sigma, c).weights;
}

Eigen::MatrixXd synchronized_day_returns(const ObservationPanel& day, Method method, const SolverConfig& config) {
  switch (method) {
    case Method::NN: return synchronize(day, config).delta_hat;
    case Method::PI: return row_diff(previous_tick(day));
    case Method::LI: return row_diff(linear_interp(day));
    case Method::RT: return refresh_time(day).returns();
    case Method::PA: return pre_average(day, default_pa_block(day.n_increments())).returns();
  }
  throw InvalidInput("unknown synchronisation method");
}

namespace {

Eigen::MatrixXd hstack(const std::vector<Eigen::MatrixXd>& blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

Eigen::MatrixXd estimate_covariance(Eigen::MatrixXd returns, const PortfolioConfig& config) {
  if (config.truncate_jumps && returns.cols() >= 2)
    for (Eigen::Index i = 0; i < returns.rows(); ++i) {
      const Eigen::VectorXd row = returns.row(i).transpose();
      returns.row(i) = truncate_jumps(row, config.truncation_multiplier).returns.transpose();
    }
  const int n = static_cast<int>(returns.rows());
  const int rank = std::min(config.factor_rank, n - 1);
  if (rank < 1) return realized_cov(returns);
  return pca_factor_cov(returns, rank).sigma;
}

}  // namespace

BacktestResult backtest(const std::vector<ObservationPanel>& periods, int day_increments, Method method,
                        const PortfolioConfig& config, const SolverConfig& solver) {
  config.validate();
  if (periods.size() < 2) throw InvalidInput("backtest needs at least two periods");
  const int n_assets = periods.front().n_assets();
  for (const auto& p : periods)
    if (p.n_assets() != n_assets) throw InvalidInput("backtest periods disagree on the asset count");

  // synchronised returns of every period, kept per day
  std::vector<std::vector<Eigen::MatrixXd>> day_returns(periods.size());
  for (std::size_t k = 0; k < periods.size(); ++k)
    for (const auto& day : split_days(periods[k], day_increments))
      day_returns[k].push_back(synchronized_day_returns(day, method, solver));

  BacktestResult out;
  std::vector<double> day_variance;
  for (std::size_t k = 0; k + 1 < periods.size(); ++k) {
    const Eigen::MatrixXd sigma = estimate_covariance(hstack(day_returns[k], n_assets), config);
    if (!sigma.allFinite() || !(sigma.trace() > 0.0)) {
      out.skipped.push_back(static_cast<int>(k));
      continue;
    }
    const Eigen::VectorXd w = min_variance_weights(sigma, config.gross_exposure);
    out.weights.push_back(w);
    for (const auto& r : day_returns[k + 1]) {
      const Eigen::VectorXd port = r.transpose() * w;
      out.daily_returns.push_back(port.sum());
      day_variance.push_back(port.squaredNorm());
    }
  }
  if (!out.daily_returns.empty()) {
    const double days = static_cast<double>(out.daily_returns.size());
    const double mean = std::accumulate(out.daily_returns.begin(), out.daily_returns.end(), 0.0) / days;
    const double var = std::accumulate(day_variance.begin(), day_variance.end(), 0.0) / days;
    out.ar = config.trading_days * mean;
    out.sd = std::sqrt(config.trading_days * var);
  }
  if (out.sd > 0.0) out.sr = out.ar / out.sd;
  return out;
}

}  // namespace hfsync
