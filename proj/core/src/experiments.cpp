#include "hfsync/experiments.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "hfsync/error.hpp"
#include "hfsync/estimators.hpp"
#include "hfsync/kvtext.hpp"
#include "hfsync/parallel.hpp"
#include "hfsync/tuning.hpp"

namespace hfsync {

std::vector<std::string> scenario_names() {
  return {"table1-N20",           "table1-N50",         "table1-N120",      "table1-30s",
          "table1-1m",            "table1-5m",          "table2-async-0.5-0.5", "table2-async-0.5-2",
          "table2-async-2-2",     "table2-alpha-0.8",   "table2-alpha-0.5", "table2-alpha-0.2",
          "baseline"};
}

Scenario make_scenario(const std::string& name) {
  Scenario s{name, DgpConfig{}};
  auto& d = s.dgp;
  if (name == "baseline" || name == "table1-1m") return s;
  if (name == "table1-N20") d.n_assets = 20;
  else if (name == "table1-N50") d.n_assets = 50;
  else if (name == "table1-N120") d.n_assets = 120;
  else if (name == "table1-30s") d.day_increments = 780;
  else if (name == "table1-5m") d.day_increments = 78;
  else if (name == "table2-async-0.5-0.5") d.async_intensity = {0.5, 0.5};
  else if (name == "table2-async-0.5-2") d.async_intensity = {0.5, 2.0};
  else if (name == "table2-async-2-2") d.async_intensity = {2.0, 2.0};
  else if (name == "table2-alpha-0.8") d.factor_strength = 0.8;
  else if (name == "table2-alpha-0.5") d.factor_strength = 0.5;
  else if (name == "table2-alpha-0.2") d.factor_strength = 0.2;
  else throw InvalidInput("unknown scenario '" + name + "'");
  return s;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::NN, Method::PI, Method::LI, Method::RT, Method::PA};
  return methods;
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

}  // namespace

MethodOutput run_method(const ObservationPanel& panel, int day_increments, Method method, const SolverConfig& config) {
  const auto days = split_days(panel, day_increments);
  const Eigen::Index n = panel.n_assets();
  std::vector<Eigen::MatrixXd> ret;
  std::vector<Eigen::MatrixXd> inc;
  MethodOutput out;
  out.method = method;
  for (const auto& day : days) {
    switch (method) {
      case Method::NN: {
        SyncResult r = synchronize(day, config);
        out.converged = out.converged && r.converged;
        ret.push_back(std::move(r.delta_hat));
        inc.push_back(std::move(r.pi_hat));
        break;
      }
      case Method::PI:
        ret.push_back(row_diff(previous_tick(day)));
        inc.push_back(ret.back());
        break;
      case Method::LI:
        ret.push_back(row_diff(linear_interp(day)));
        inc.push_back(ret.back());
        break;
      case Method::RT: ret.push_back(refresh_time(day).returns()); break;
      case Method::PA: {
        const int block = default_pa_block(day.n_increments());
        ret.push_back(pre_average(day, block).returns());
        inc.push_back(row_diff(pre_average_fill(day, block)));
        break;
      }
    }
  }
  out.returns = hstack(ret, n);
  if (!inc.empty()) out.increments = hstack(inc, n);
  return out;
}

Eigen::MatrixXd aggregate_returns(const Eigen::MatrixXd& returns, int stride) {
  if (stride < 1) throw InvalidInput("aggregation stride must be >= 1");
  const Eigen::Index blocks = returns.cols() / stride;
  Eigen::MatrixXd out(returns.rows(), blocks);
  for (Eigen::Index b = 0; b < blocks; ++b) out.col(b) = returns.middleCols(b * stride, stride).rowwise().sum();
  return out;
}

ReplicationOutcome run_replication(const Scenario& scenario, int rep, std::uint64_t seed, const SolverConfig& config,
                                   const std::vector<Method>& methods) {
  DgpConfig dgp = scenario.dgp;
  dgp.seed = seed;
  const DgpOutput truth = simulate(dgp);
  ReplicationOutcome out;
  out.rep = rep;
  out.seed = seed;
  for (Method m : methods) {
    const MethodOutput r = run_method(truth.panel, dgp.day_increments, m, config);
    if (m == Method::NN) out.nn_converged = r.converged;
    const Eigen::MatrixXd sigma = pca_factor_cov(r.returns, dgp.n_factors).sigma;
    const std::string name = method_name(m);
    for (CovNorm norm : {CovNorm::Frobenius, CovNorm::Spectral, CovNorm::Max})
      out.metrics.push_back({name, "cov_" + norm_name(norm), cov_error(sigma, truth.sigma_true, norm)});
    if (r.increments.size() > 0)
      out.metrics.push_back({name, "increment_l1", increment_error_l1(r.increments, truth.pi_true)});
  }
  return out;
}

MonteCarloResult run_monte_carlo(const Scenario& scenario, int reps, std::uint64_t seed, const SolverConfig& config,
                                 int threads, const std::vector<Method>& methods) {
  if (reps < 1) throw InvalidInput("need at least one replication");
  MonteCarloResult out;
  out.replications.resize(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](int r) {
    out.replications[static_cast<std::size_t>(r)] =
        run_replication(scenario, r, replication_seed(seed, r), config, methods);
  });

  // key order follows the first replication, which fixes method and metric order
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<double>> values;
  for (const auto& rep : out.replications)
    for (const auto& mv : rep.metrics) {
      auto key = std::make_pair(mv.method, mv.metric);
      if (!values.count(key)) keys.push_back(key);
      values[key].push_back(mv.value);
    }
  for (const auto& key : keys) {
    const SummaryStat st = summarize(values[key]);
    out.summary.push_back({scenario.name, key.first, key.second, st.mean, st.sd});
  }
  return out;
}

std::string replication_manifest_csv(const MonteCarloResult& result) {
  std::ostringstream os;
  os << "rep,seed\n";
  for (const auto& r : result.replications) os << r.rep << ',' << r.seed << '\n';
  return os.str();
}

std::string replication_metrics_csv(const MonteCarloResult& result) {
  std::ostringstream os;
  os << "rep,method,metric,value\n";
  for (const auto& r : result.replications)
    for (const auto& m : r.metrics) os << r.rep << ',' << m.method << ',' << m.metric << ',' << format_double(m.value) << '\n';
  return os.str();
}

std::vector<ImputationRow> imputation_study(const ObservationPanel& panel, const std::vector<double>& mask_probs,
                                            int reps, std::uint64_t seed, const SolverConfig& config) {
  if (reps < 1) throw InvalidInput("need at least one repetition");
  TuningGrid grid;
  grid.mask_probs = mask_probs;
  grid.repetitions = reps;
  grid.seed = seed;
  grid.validate();
  const Eigen::MatrixXd truth = previous_tick(panel);
  std::vector<ImputationRow> out;
  for (std::size_t pi = 0; pi < mask_probs.size(); ++pi) {
    std::map<Method, std::pair<double, double>> acc;
    for (int rep = 0; rep < reps; ++rep) {
      const MaskMatrix mask = generate_mask(panel, mask_probs[pi], mask_seed(grid, static_cast<int>(pi), rep));
      const ObservationPanel held = apply_mask(panel, mask);
      const std::pair<Method, Eigen::MatrixXd> fills[] = {
          {Method::NN, reconstruct_prices(synchronize(held, config).delta_hat, held)},
          {Method::LI, linear_interp(held)},
          {Method::PI, previous_tick(held)}};
      for (const auto& [m, prices] : fills) {
        acc[m].first += imputation_error(prices, truth, mask, ErrorKind::Absolute);
        acc[m].second += imputation_error(prices, truth, mask, ErrorKind::Relative);
      }
    }
    for (Method m : {Method::NN, Method::LI, Method::PI})
      out.push_back({mask_probs[pi], m, acc[m].first / reps, acc[m].second / reps});
  }
  return out;
}

double isometry_gap(const DurationSystem& sys, const Eigen::MatrixXd& delta) {
  const double base = delta.squaredNorm();
  if (!(base > 0.0)) throw InvalidInput("isometry gap of a zero matrix is undefined");
  return std::abs(apply_A(sys, delta).squaredNorm() - base) / base;
}

std::vector<EigenRow> eigen_report(const ObservationPanel& panel, int day_increments, int n_groups, int k,
                                   const std::vector<int>& strides, const std::vector<Method>& methods,
                                   const SolverConfig& config) {
  std::vector<int> missing(static_cast<std::size_t>(panel.n_assets()));
  for (int i = 0; i < panel.n_assets(); ++i) missing[static_cast<std::size_t>(i)] = panel.missing_count(i);
  const auto groups = groups_by_missingness(missing, n_groups);
  std::vector<EigenRow> rows;
  for (Method m : methods) {
    const Eigen::MatrixXd returns = run_method(panel, day_increments, m, config).returns;
    for (int stride : strides) {
      const std::string freq = format_double(stride * panel.grid().step) + "s";
      const auto eig = eigen_by_group(aggregate_returns(returns, stride), groups, k);
      for (std::size_t g = 0; g < eig.size(); ++g)
        for (Eigen::Index r = 0; r < eig[g].size(); ++r)
          rows.push_back({static_cast<int>(g), m, freq, static_cast<int>(r) + 1, eig[g](r)});
    }
  }
  return rows;
}

std::string eigen_report_csv(const std::vector<EigenRow>& rows) {
  std::ostringstream os;
  os << "group,method,frequency,eig_rank,value\n";
  for (const auto& r : rows)
    os << r.group << ',' << method_name(r.method) << ',' << r.frequency << ',' << r.rank << ','
       << format_double(r.value) << '\n';
  return os.str();
}

StaleBetaOutcome stale_beta_study(const StaleBetaConfig& c, const SolverConfig& solver) {
  if (c.n_assets < 3 || c.n_increments < c.window || c.window < 2)
    throw InvalidInput("stale beta study needs >= 3 assets and window in [2, n]");
  if (!(c.liquid_rate > 0.0 && c.stale_rate > 0.0 && c.noise_scale >= 0.0))
    throw InvalidInput("stale beta study rates must be positive");
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> load(0.5, 1.5);
  const int n = c.n_increments;
  const double vol = 0.3 * std::sqrt(1.0 / n);

  Eigen::VectorXd beta(c.n_assets);
  for (int i = 0; i < c.n_assets; ++i) beta(i) = load(rng);
  beta(0) = 1.0;
  beta(c.n_assets - 1) = 1.0;

  Eigen::MatrixXd prices(c.n_assets, n + 1);
  prices.col(0).setConstant(std::log(100.0));
  for (int j = 1; j <= n; ++j) {
    const double f = vol * z(rng);
    for (int i = 0; i < c.n_assets; ++i)
      prices(i, j) = prices(i, j - 1) + beta(i) * f + std::sqrt(c.noise_scale) * vol * z(rng);
  }

  std::vector<TickSeries> series;
  for (int i = 0; i < c.n_assets; ++i) {
    std::vector<int> idx;
    if (i == 0) {
      for (int j = 0; j <= n; ++j) idx.push_back(j);
    } else {
      idx = sample_poisson_times(n, i == c.n_assets - 1 ? c.stale_rate : c.liquid_rate, rng);
      if (idx.back() != n) idx.push_back(n);  // closing print keeps every asset solvable
    }
    TickSeries s{"S" + std::to_string(i), idx, {}};
    for (int j : idx) s.log_price.push_back(prices(i, j));
    series.push_back(std::move(s));
  }
  const ObservationPanel panel(GridSpec{0.0, 60.0, n}, std::move(series));

  const Eigen::MatrixXd pi_ret = row_diff(previous_tick(panel));
  const Eigen::MatrixXd nn_ret = synchronize(panel, solver).delta_hat;
  const int stale = c.n_assets - 1;
  const Eigen::VectorXd market = pi_ret.row(0).transpose();
  const auto pi_beta = spot_beta(pi_ret.row(stale).transpose(), market, c.window);
  const auto nn_beta = spot_beta(nn_ret.row(stale).transpose(), nn_ret.row(0).transpose(), c.window);

  StaleBetaOutcome out;
  for (std::size_t t = 0; t < pi_beta.size(); ++t) {
    const bool flat = pi_ret.row(stale).segment(static_cast<Eigen::Index>(t), c.window).cwiseAbs().maxCoeff() == 0.0;
    if (!flat) continue;
    ++out.zero_windows;
    if (pi_beta[t] && *pi_beta[t] == 0.0) ++out.pi_zero_beta;
    if (nn_beta[t] && *nn_beta[t] != 0.0) ++out.nn_nonzero_beta;
  }
  return out;
}

std::string spot_beta_csv(const std::vector<std::string>& assets,
                          const std::vector<std::vector<std::optional<double>>>& betas) {
  if (assets.size() != betas.size()) throw InvalidInput("one beta path per asset is required");
  std::ostringstream os;
  os << "asset,t_index,beta\n";
  for (std::size_t i = 0; i < assets.size(); ++i)
    for (std::size_t t = 0; t < betas[i].size(); ++t) {
      os << assets[i] << ',' << t << ',';
      if (betas[i][t]) os << format_double(*betas[i][t]);
      os << '\n';
    }
  return os.str();
}

}  // namespace hfsync
