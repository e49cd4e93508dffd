#include "cli.hpp"

#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "hfsync/csv.hpp"
#include "hfsync/error.hpp"
#include "hfsync/estimators.hpp"
#include "hfsync/evalmetrics.hpp"
#include "hfsync/experiments.hpp"
#include "hfsync/kvtext.hpp"
#include "hfsync/portfolio.hpp"
#include "hfsync/simulate.hpp"
#include "hfsync/solver.hpp"
#include "hfsync/tuning.hpp"

namespace fs = std::filesystem;

namespace hfsync::cli {
namespace {

/// Run record written next to the outputs of every subcommand.
class Manifest {
 public:
  explicit Manifest(std::string dir) : dir_(std::move(dir)) {}

  KeyValueText& kv() { return kv_; }

  /// Writes `text` to `dir/name` and records it.
  void emit(const std::string& name, const std::string& text) {
    csv::write_text(path(name), text);
    record(name);
  }
  void record(const std::string& name) { outputs_.push_back(name); }
  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

  void write() {
    for (std::size_t i = 0; i < outputs_.size(); ++i) kv_.set("output." + std::to_string(i), outputs_[i]);
    kv_.write(path("manifest.txt"));
  }

 private:
  std::string dir_;
  KeyValueText kv_;
  std::vector<std::string> outputs_;
};

std::string join(const std::vector<std::string>& parts, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void add_solver_options(CLI::App* app, SolverConfig& c) {
  app->add_option("--mu", c.mu, "Weight of the low-rank coupling term");
  app->add_option("--lambda", c.lambda, "Nuclear-norm penalty");
  app->add_option("--eta", c.eta, "Augmented-Lagrangian penalty");
  app->add_option("--tol", c.tol, "Convergence tolerance");
  app->add_option("--max-iter", c.max_iter, "Iteration cap");
  app->add_option("--init-rank", c.init_rank, "Rank of the warm start");
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  if (out.empty()) throw InvalidInput("at least one method is required");
  return out;
}

/// Echoes every option of the subcommand (given or defaulted) into the
/// manifest under `config.`.
void echo_options(const CLI::App* app, KeyValueText& kv) {
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      value = join(opt->results());
    } else {
      value = opt->get_default_str();
    }
    kv.set("config." + name, value);
  }
}

void stamp(Manifest& m, const std::string& command) {
  m.kv().set("command", command);
  m.kv().set("hfsync_version", HFSYNC_VERSION);
  m.kv().set("eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION));
  m.kv().set("cli11_version", CLI11_VERSION);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

std::vector<ObservationPanel> split_periods(const ObservationPanel& panel, int period_increments) {
  std::vector<ObservationPanel> out;
  for (int start = 0; start + period_increments <= panel.n_increments(); start += period_increments)
    out.push_back(panel.slice(start, start + period_increments));
  return out;
}

int effective_day(const ObservationPanel& panel, int day_increments) {
  return day_increments > 0 ? day_increments : panel.n_increments();
}

// ---- subcommands -------------------------------------------------------

struct SimulateArgs {
  DgpConfig dgp;
  std::string out;
};

void cmd_simulate(const CLI::App* app, const SimulateArgs& a, std::ostream& out) {
  ensure_dir(a.out);
  const DgpOutput sim = simulate(a.dgp);
  write_dgp(a.out, a.dgp, sim);
  Manifest m(a.out);
  stamp(m, "simulate");
  m.kv().set("seed", std::to_string(a.dgp.seed));
  echo_options(app, m.kv());
  for (const char* f : {"panel.csv", "panel.csv.grid", "delta_true.csv", "pi_true.csv", "sigma_true.csv",
                        "factor_paths.csv", "beta.csv", "prices_true.csv", "dgp_config.txt"})
    m.record(f);
  m.write();
  out << "simulated " << a.dgp.n_assets << " assets x " << a.dgp.total_increments() << " increments -> " << a.out
      << "\n";
}

struct SyncArgs {
  std::string panel;
  std::string method = "nn";
  int day_increments = 0;
  SolverConfig solver;
  bool debias = false;
  int debias_k = -1;
  int debias_j = -1;
  bool dump_system = false;
  std::string out;
};

void cmd_sync(const CLI::App* app, const SyncArgs& a, std::ostream& out) {
  const ObservationPanel panel = read_panel(a.panel);
  const Method method = parse_method(a.method);
  ensure_dir(a.out);
  Manifest m(a.out);
  stamp(m, "sync");
  echo_options(app, m.kv());
  KeyValueText report;
  report.set("method", method_name(method));
  report.set("n_assets", panel.n_assets());
  report.set("n_increments", panel.n_increments());

  if (method == Method::NN) {
    const int day = effective_day(panel, a.day_increments);
    const MultiDaySync r = synchronize_by_day(panel, day, a.solver);
    m.kv().set("converged", r.all_converged());
    report.set("converged", r.all_converged());
    for (std::size_t d = 0; d < r.days.size(); ++d) {
      const std::string p = "day." + std::to_string(d) + ".";
      report.set(p + "iterations", r.days[d].iterations);
      report.set(p + "converged", r.days[d].converged);
      for (int k = 0; k < 4; ++k) report.set(p + "residual." + std::to_string(k), r.days[d].final_residuals[k]);
    }
    csv::write_matrix(m.path("delta_hat.csv"), r.delta_hat);
    m.record("delta_hat.csv");
    csv::write_matrix(m.path("pi_hat.csv"), r.pi_hat);
    m.record("pi_hat.csv");
    csv::write_matrix(m.path("prices.csv"), reconstruct_prices(r.delta_hat, panel));
    m.record("prices.csv");
    if (a.debias) {
      Eigen::MatrixXd dt(r.delta_hat.rows(), r.delta_hat.cols());
      Eigen::MatrixXd pt(r.pi_hat.rows(), r.pi_hat.cols());
      const std::optional<int> k = a.debias_k >= 0 ? std::optional<int>(a.debias_k) : std::nullopt;
      const std::optional<int> j = a.debias_j >= 0 ? std::optional<int>(a.debias_j) : std::nullopt;
      for (int c = 0; c < r.delta_hat.cols(); c += day) {
        const DebiasResult db =
            debias(r.delta_hat.middleCols(c, day), r.pi_hat.middleCols(c, day), k, j, a.solver);
        dt.middleCols(c, day) = db.delta_tilde;
        pt.middleCols(c, day) = db.pi_tilde;
        report.set("day." + std::to_string(c / day) + ".debias_k", db.k);
        report.set("day." + std::to_string(c / day) + ".debias_j", db.j);
      }
      csv::write_matrix(m.path("delta_tilde.csv"), dt);
      m.record("delta_tilde.csv");
      csv::write_matrix(m.path("pi_tilde.csv"), pt);
      m.record("pi_tilde.csv");
    }
    if (a.dump_system) {
      std::vector<std::string> ids;
      for (const auto& s : panel.series()) ids.push_back(s.asset_id);
      build_system(panel).write_csv(m.path("linsys.csv"), ids);
      m.record("linsys.csv");
    }
    out << "NN synchronisation " << (r.all_converged() ? "converged" : "did not converge") << " on "
        << r.days.size() << " block(s)\n";
  } else {
    Eigen::MatrixXd prices;
    Eigen::MatrixXd returns;
    switch (method) {
      case Method::PI: prices = previous_tick(panel); returns = row_diff(prices); break;
      case Method::LI: prices = linear_interp(panel); returns = row_diff(prices); break;
      case Method::RT: {
        const RefreshSample rs = refresh_time(panel);
        prices = rs.prices;
        returns = rs.returns();
        std::ostringstream os;
        os << "grid_index\n";
        for (int t : rs.times) os << t << '\n';
        m.emit("refresh_times.csv", os.str());
        break;
      }
      case Method::PA: {
        const PreAveraged pa = pre_average(panel, default_pa_block(effective_day(panel, a.day_increments)));
        prices = pa.block_prices;
        returns = pa.returns();
        report.set("pa_block", pa.block);
        break;
      }
      case Method::NN: break;
    }
    csv::write_matrix(m.path("prices.csv"), prices);
    m.record("prices.csv");
    csv::write_matrix(m.path("returns.csv"), returns);
    m.record("returns.csv");
    out << method_name(method) << " synchronisation written to " << a.out << "\n";
  }
  report.write(m.path("sync_report.txt"));
  m.record("sync_report.txt");
  m.write();
}

struct TuneArgs {
  std::string panel;
  TuningGrid grid;
  SolverConfig solver;
  int threads = 1;
  std::string out;
};

void cmd_tune(const CLI::App* app, const TuneArgs& a, std::ostream& out) {
  const ObservationPanel panel = read_panel(a.panel);
  ensure_dir(a.out);
  const TuningResult r = select_parameters(panel, a.grid, a.solver, a.threads);
  Manifest m(a.out);
  stamp(m, "tune");
  m.kv().set("seed", std::to_string(a.grid.seed));
  echo_options(app, m.kv());
  m.emit("tuning_report.csv", tuning_report_csv(r.records));
  KeyValueText sel;
  sel.set("mu", r.mu);
  sel.set("lambda", r.lambda);
  sel.set("eta", r.eta);
  sel.set("mean_abs_error", r.mean_abs_error);
  m.emit("selected.txt", sel.str());
  m.write();
  out << "selected mu=" << format_double(r.mu) << " lambda=" << format_double(r.lambda)
      << " eta=" << format_double(r.eta) << "\n";
}

struct EvaluateArgs {
  std::string truth;
  std::string returns;
  std::string increments;
  std::string label = "estimate";
  int rank = 3;
  std::string out;
};

void cmd_evaluate(const CLI::App* app, const EvaluateArgs& a, std::ostream& out) {
  if (a.returns.empty() && a.increments.empty())
    throw CLI::ValidationError("evaluate", "give --returns and/or --increments");
  std::ostringstream os;
  os << "method,metric,value\n";
  if (!a.returns.empty()) {
    const Eigen::MatrixXd sigma_true = csv::read_matrix((fs::path(a.truth) / "sigma_true.csv").string());
    const Eigen::MatrixXd returns = csv::read_matrix(a.returns);
    if (returns.rows() != sigma_true.rows()) throw InvalidInput("returns and truth disagree on the asset count");
    const Eigen::MatrixXd sigma = pca_factor_cov(returns, a.rank).sigma;
    for (CovNorm n : {CovNorm::Frobenius, CovNorm::Spectral, CovNorm::Max})
      os << a.label << ",cov_" << norm_name(n) << ',' << format_double(cov_error(sigma, sigma_true, n)) << '\n';
  }
  if (!a.increments.empty()) {
    const Eigen::MatrixXd pi_true = csv::read_matrix((fs::path(a.truth) / "pi_true.csv").string());
    const Eigen::MatrixXd inc = csv::read_matrix(a.increments);
    os << a.label << ",increment_l1," << format_double(increment_error_l1(inc, pi_true)) << '\n';
  }
  ensure_dir(a.out);
  Manifest m(a.out);
  stamp(m, "evaluate");
  echo_options(app, m.kv());
  m.emit("evaluation.csv", os.str());
  m.write();
  out << os.str();
}

struct EigenArgs {
  std::string panel;
  int day_increments = 0;
  int groups = 5;
  int k = 3;
  std::vector<int> strides{1};
  std::vector<std::string> methods{"nn", "pi"};
  SolverConfig solver;
  std::string out;
};

void cmd_eigen(const CLI::App* app, const EigenArgs& a, std::ostream& out) {
  const ObservationPanel panel = read_panel(a.panel);
  ensure_dir(a.out);
  const auto rows = eigen_report(panel, effective_day(panel, a.day_increments), a.groups, a.k, a.strides,
                                 parse_methods(a.methods), a.solver);
  Manifest m(a.out);
  stamp(m, "eigen");
  echo_options(app, m.kv());
  m.emit("eigen_report.csv", eigen_report_csv(rows));
  m.write();
  out << rows.size() << " eigenvalue rows written\n";
}

struct PortfolioArgs {
  std::string panel;
  int day_increments = 390;
  int period_days = 21;
  std::vector<std::string> methods{"nn", "pi", "li", "rt", "pa"};
  std::vector<double> exposures{1.0, 2.0, 3.0};
  std::string group = "all";
  int rank = 3;
  bool no_truncation = false;
  SolverConfig solver;
  std::string out;
};

void cmd_portfolio(const CLI::App* app, const PortfolioArgs& a, std::ostream& out, std::ostream& err) {
  const ObservationPanel panel = read_panel(a.panel);
  if (a.day_increments < 1 || a.period_days < 1) throw InvalidInput("day and period lengths must be positive");
  const auto periods = split_periods(panel, a.day_increments * a.period_days);
  ensure_dir(a.out);
  Manifest m(a.out);
  stamp(m, "portfolio");
  echo_options(app, m.kv());
  std::ostringstream os;
  os << "group,method,c,AR,SD,SR\n";
  int skipped = 0;
  for (Method method : parse_methods(a.methods))
    for (double c : a.exposures) {
      PortfolioConfig pc;
      pc.gross_exposure = c;
      pc.rebalance_days = a.period_days;
      pc.factor_rank = a.rank;
      pc.truncate_jumps = !a.no_truncation;
      const BacktestResult r = backtest(periods, a.day_increments, method, pc, a.solver);
      for (int k : r.skipped)
        err << "warning: " << method_name(method) << " c=" << format_double(c) << ": estimation period " << k
            << " skipped (singular covariance)\n";
      skipped += static_cast<int>(r.skipped.size());
      os << a.group << ',' << method_name(method) << ',' << format_double(c) << ',' << format_double(r.ar) << ','
         << format_double(r.sd) << ',' << (r.sr ? format_double(*r.sr) : std::string("NA")) << '\n';
    }
  m.kv().set("periods", static_cast<int>(periods.size()));
  m.kv().set("skipped_periods", skipped);
  m.emit("backtest.csv", os.str());
  m.write();
  out << "backtest over " << periods.size() << " periods written\n";
}

struct BetaArgs {
  std::string panel;
  int day_increments = 0;
  std::string method = "nn";
  std::string market;
  int window = 30;
  SolverConfig solver;
  std::string out;
};

void cmd_beta(const CLI::App* app, const BetaArgs& a, std::ostream& out) {
  const ObservationPanel panel = read_panel(a.panel);
  const Method method = parse_method(a.method);
  if (method == Method::RT || method == Method::PA)
    throw InvalidInput("spot beta needs grid-level returns (nn, pi or li)");
  int market = -1;
  for (int i = 0; i < panel.n_assets(); ++i)
    if (panel.series(i).asset_id == a.market) market = i;
  if (market < 0) throw InvalidInput("market asset '" + a.market + "' is not in the panel");
  const Eigen::MatrixXd returns = run_method(panel, effective_day(panel, a.day_increments), method, a.solver).returns;
  const Eigen::VectorXd mkt = returns.row(market).transpose();
  std::vector<std::string> ids;
  std::vector<std::vector<std::optional<double>>> betas;
  for (int i = 0; i < panel.n_assets(); ++i) {
    if (i == market) continue;
    ids.push_back(panel.series(i).asset_id);
    betas.push_back(spot_beta(returns.row(i).transpose(), mkt, a.window));
  }
  ensure_dir(a.out);
  Manifest m(a.out);
  stamp(m, "beta");
  echo_options(app, m.kv());
  m.emit("beta.csv", spot_beta_csv(ids, betas));
  m.write();
  out << "spot betas for " << ids.size() << " assets written\n";
}

struct McArgs {
  std::string scenario;
  int reps = 20;
  std::uint64_t seed = 7;
  int threads = 1;
  SolverConfig solver;
  std::string out = ".";
};

void cmd_mc(const CLI::App* app, const McArgs& a, std::ostream& out) {
  const Scenario scenario = make_scenario(a.scenario);
  ensure_dir(a.out);
  const MonteCarloResult r = run_monte_carlo(scenario, a.reps, a.seed, a.solver, a.threads);
  bool converged = true;
  for (const auto& rep : r.replications) converged = converged && rep.nn_converged;
  Manifest m(a.out);
  stamp(m, "mc");
  m.kv().set("seed", std::to_string(a.seed));
  m.kv().set("converged", converged);
  echo_options(app, m.kv());
  const KeyValueText dgp = scenario.dgp.to_kv();
  for (const auto& [k, v] : dgp.entries())
    if (k != "seed") m.kv().set("dgp." + k, v);
  m.emit("summary.csv", summary_csv(r.summary));
  m.emit("replications.csv", replication_manifest_csv(r));
  m.emit("metrics.csv", replication_metrics_csv(r));
  m.write();
  out << summary_csv(r.summary);
}

// ---- config file -------------------------------------------------------

/// Expands `--config FILE` into `--key=value` arguments placed before the
/// user's own flags; keys the user passes explicitly are skipped.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }
  if (config_path.empty() || rest.size() < 2) return rest;
  std::set<std::string> given;
  for (std::size_t i = 2; i < rest.size(); ++i)
    if (rest[i].rfind("--", 0) == 0) given.insert(rest[i].substr(2, rest[i].find('=') - 2));
  const KeyValueText kv = KeyValueText::read(config_path);
  std::vector<std::string> out{rest[0], rest[1]};
  for (const auto& [key, value] : kv.entries())
    if (!given.count(key)) out.push_back("--" + key + "=" + value);
  out.insert(out.end(), rest.begin() + 2, rest.end());
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchronise asynchronous high-frequency price panels", "hfsync"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", HFSYNC_VERSION);

  auto add_config = [](CLI::App* sub) {
    sub->add_option("--config", "Flat key=value file of defaults (flags override)");
  };

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Simulate the factor DGP and write panel + truth files");
  add_config(s_sim);
  s_sim->add_option("--out", sim.out, "Output directory")->required();
  s_sim->add_option("--n-assets", sim.dgp.n_assets);
  s_sim->add_option("--n-factors", sim.dgp.n_factors);
  s_sim->add_option("--days", sim.dgp.days);
  s_sim->add_option("--day-increments", sim.dgp.day_increments);
  s_sim->add_option("--alpha", sim.dgp.factor_strength, "Factor strength");
  s_sim->add_option("--noise-scale", sim.dgp.noise_scale);
  s_sim->add_option("--async", sim.dgp.async_intensity, "Asynchrony intensity per asset group")->delimiter(',');
  s_sim->add_option("--factor-drift", sim.dgp.factor_drift)->delimiter(',');
  s_sim->add_option("--corr-decay", sim.dgp.corr_decay);
  s_sim->add_option("--block-size", sim.dgp.block_size);
  s_sim->add_option("--seed", sim.dgp.seed);

  SyncArgs sync;
  auto* s_sync = app.add_subcommand("sync", "Synchronise a panel with NN or a baseline");
  add_config(s_sync);
  s_sync->add_option("--panel", sync.panel, "Panel CSV")->required();
  s_sync->add_option("--method", sync.method, "nn, pi, li, rt or pa");
  s_sync->add_option("--day-increments", sync.day_increments, "Solve NN per block of this many increments (0 = whole)");
  add_solver_options(s_sync, sync.solver);
  s_sync->add_flag("--debias", sync.debias, "Also write de-biased estimates");
  s_sync->add_option("--debias-k", sync.debias_k, "Leading singular values of delta to correct (-1 = auto)");
  s_sync->add_option("--debias-j", sync.debias_j, "Leading singular values of pi to correct (-1 = auto)");
  s_sync->add_flag("--dump-system", sync.dump_system, "Write the duration system as linsys.csv");
  s_sync->add_option("--out", sync.out, "Output directory")->required();

  TuneArgs tune;
  auto* s_tune = app.add_subcommand("tune", "Select (mu, lambda, eta) by artificial masking");
  add_config(s_tune);
  s_tune->add_option("--panel", tune.panel, "Panel CSV")->required();
  s_tune->add_option("--mu-grid", tune.grid.mu_candidates)->delimiter(',');
  s_tune->add_option("--lambda-grid", tune.grid.lambda_candidates)->delimiter(',');
  s_tune->add_option("--mask-probs", tune.grid.mask_probs)->delimiter(',');
  s_tune->add_option("--reps", tune.grid.repetitions);
  s_tune->add_option("--seed", tune.grid.seed);
  s_tune->add_option("--eta-ratio", tune.grid.eta_ratio);
  s_tune->add_option("--tol", tune.solver.tol);
  s_tune->add_option("--max-iter", tune.solver.max_iter);
  s_tune->add_option("--init-rank", tune.solver.init_rank);
  s_tune->add_option("--threads", tune.threads);
  s_tune->add_option("--out", tune.out, "Output directory")->required();

  EvaluateArgs ev;
  auto* s_eval = app.add_subcommand("evaluate", "Score estimates against simulated truth");
  add_config(s_eval);
  s_eval->add_option("--truth", ev.truth, "Directory written by `simulate`")->required();
  s_eval->add_option("--returns", ev.returns, "Return matrix CSV for covariance errors");
  s_eval->add_option("--increments", ev.increments, "Increment matrix CSV for the scaled L1 error");
  s_eval->add_option("--label", ev.label);
  s_eval->add_option("--rank", ev.rank);
  s_eval->add_option("--out", ev.out, "Output directory")->required();

  EigenArgs eig;
  auto* s_eig = app.add_subcommand("eigen", "Leading eigenvalue shares by missingness group");
  add_config(s_eig);
  s_eig->add_option("--panel", eig.panel)->required();
  s_eig->add_option("--day-increments", eig.day_increments);
  s_eig->add_option("--groups", eig.groups);
  s_eig->add_option("--k", eig.k);
  s_eig->add_option("--strides", eig.strides, "Aggregation strides in grid steps")->delimiter(',');
  s_eig->add_option("--methods", eig.methods)->delimiter(',');
  add_solver_options(s_eig, eig.solver);
  s_eig->add_option("--out", eig.out)->required();

  PortfolioArgs pf;
  auto* s_pf = app.add_subcommand("portfolio", "Out-of-sample minimum-variance backtest");
  add_config(s_pf);
  s_pf->add_option("--panel", pf.panel)->required();
  s_pf->add_option("--day-increments", pf.day_increments);
  s_pf->add_option("--period-days", pf.period_days);
  s_pf->add_option("--methods", pf.methods)->delimiter(',');
  s_pf->add_option("--c", pf.exposures, "Gross exposure limits")->delimiter(',');
  s_pf->add_option("--group", pf.group);
  s_pf->add_option("--rank", pf.rank);
  s_pf->add_flag("--no-truncation", pf.no_truncation);
  add_solver_options(s_pf, pf.solver);
  s_pf->add_option("--out", pf.out)->required();

  BetaArgs bt;
  auto* s_bt = app.add_subcommand("beta", "Rolling spot betas against a market asset");
  add_config(s_bt);
  s_bt->add_option("--panel", bt.panel)->required();
  s_bt->add_option("--day-increments", bt.day_increments);
  s_bt->add_option("--method", bt.method);
  s_bt->add_option("--market", bt.market, "Asset id of the market proxy")->required();
  s_bt->add_option("--window", bt.window);
  add_solver_options(s_bt, bt.solver);
  s_bt->add_option("--out", bt.out)->required();

  McArgs mc;
  auto* s_mc = app.add_subcommand("mc", "Monte Carlo run of a named scenario");
  add_config(s_mc);
  s_mc->add_option("--scenario", mc.scenario, join(scenario_names()))->required();
  s_mc->add_option("--reps", mc.reps);
  s_mc->add_option("--seed", mc.seed);
  s_mc->add_option("--threads", mc.threads, "Worker threads");
  add_solver_options(s_mc, mc.solver);
  s_mc->add_option("--out", mc.out);

  try {
    const std::vector<std::string> args = expand_config(argc, argv);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kSuccess : kUsage;
    }
    if (s_sim->parsed()) cmd_simulate(s_sim, sim, out);
    else if (s_sync->parsed()) cmd_sync(s_sync, sync, out);
    else if (s_tune->parsed()) cmd_tune(s_tune, tune, out);
    else if (s_eval->parsed()) cmd_evaluate(s_eval, ev, out);
    else if (s_eig->parsed()) cmd_eigen(s_eig, eig, out);
    else if (s_pf->parsed()) cmd_portfolio(s_pf, pf, out, err);
    else if (s_bt->parsed()) cmd_beta(s_bt, bt, out);
    else if (s_mc->parsed()) cmd_mc(s_mc, mc, out);
    return kSuccess;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    err << "invalid data: " << e.what() << "\n";
    return kInvalidData;
  } catch (const InvalidInput& e) {
    err << "invalid data: " << e.what() << "\n";
    return kInvalidData;
  }
}

}  // namespace hfsync::cli
