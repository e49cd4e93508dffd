#include "hfsync/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "hfsync/csv.hpp"
#include "hfsync/error.hpp"

namespace hfsync {
namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : csv::split(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidInput("key '" + key + "' holds a malformed number list: " + text);
    }
  }
  return out;
}

// Lower Cholesky factor of a correlation matrix.
Eigen::MatrixXd chol(const Eigen::MatrixXd& corr) {
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success) throw InvalidInput("correlation matrix is not positive definite");
  return llt.matrixL();
}

// One full-truncation Euler step of a square-root variance process.
double heston_step(double v, const HestonParams& h, double dt, double shock) {
  const double vp = std::max(v, 0.0);
  return v + h.kappa * (h.theta - vp) * dt + h.s * std::sqrt(vp * dt) * shock;
}

}  // namespace

void DgpConfig::validate() const {
  if (n_assets < 1 || n_factors < 1) throw InvalidInput("DGP needs at least one asset and one factor");
  if (days < 1 || day_increments < 1) throw InvalidInput("DGP needs days >= 1 and day_increments >= 1");
  if (!(heston.kappa > 0 && heston.theta > 0 && heston.s > 0))
    throw InvalidInput("Heston parameters must be positive");
  if (static_cast<int>(factor_drift.size()) != n_factors)
    throw InvalidInput("factor drift needs one entry per factor");
  if (!(factor_strength > 0.0 && factor_strength <= 1.0)) throw InvalidInput("factor strength must lie in (0, 1]");
  if (!(noise_scale >= 0.0)) throw InvalidInput("noise scale must be >= 0");
  if (async_intensity.empty() || static_cast<int>(async_intensity.size()) > n_assets)
    throw InvalidInput("need between 1 and N asynchrony groups");
  for (double l : async_intensity)
    if (!(l > 0.0)) throw InvalidInput("asynchrony intensities must be positive");
  if (!(corr_decay > -1.0 && corr_decay < 1.0)) throw InvalidInput("correlation decay must lie in (-1, 1)");
  if (block_size < 1) throw InvalidInput("block size must be >= 1");
}

std::vector<int> DgpConfig::asset_groups() const {
  const int groups = static_cast<int>(async_intensity.size());
  std::vector<int> out(static_cast<std::size_t>(n_assets));
  for (int i = 0; i < n_assets; ++i) out[static_cast<std::size_t>(i)] = static_cast<int>(
      static_cast<long long>(i) * groups / n_assets);
  return out;
}

KeyValueText DgpConfig::to_kv() const {
  KeyValueText kv;
  kv.set("n_assets", n_assets);
  kv.set("n_factors", n_factors);
  kv.set("days", days);
  kv.set("day_increments", day_increments);
  kv.set("kappa", heston.kappa);
  kv.set("theta", heston.theta);
  kv.set("vol_of_var", heston.s);
  kv.set("factor_drift", join(factor_drift));
  kv.set("factor_strength", factor_strength);
  kv.set("noise_scale", noise_scale);
  kv.set("async_intensity", join(async_intensity));
  kv.set("corr_decay", corr_decay);
  kv.set("block_size", block_size);
  kv.set("initial_log_price", initial_log_price);
  kv.set("observe_day_open", observe_day_open);
  kv.set("seed", std::to_string(seed));
  kv.set("feller_ratio", feller_ratio());
  return kv;
}

DgpConfig DgpConfig::from_kv(const KeyValueText& kv) {
  DgpConfig c;
  auto int_or = [&](const char* key, int& dst) {
    if (kv.contains(key)) dst = static_cast<int>(kv.require_int(key));
  };
  auto dbl_or = [&](const char* key, double& dst) {
    if (kv.contains(key)) dst = kv.require_double(key);
  };
  int_or("n_assets", c.n_assets);
  int_or("n_factors", c.n_factors);
  int_or("days", c.days);
  int_or("day_increments", c.day_increments);
  dbl_or("kappa", c.heston.kappa);
  dbl_or("theta", c.heston.theta);
  dbl_or("vol_of_var", c.heston.s);
  if (kv.contains("factor_drift")) c.factor_drift = parse_list("factor_drift", kv.require("factor_drift"));
  dbl_or("factor_strength", c.factor_strength);
  dbl_or("noise_scale", c.noise_scale);
  if (kv.contains("async_intensity"))
    c.async_intensity = parse_list("async_intensity", kv.require("async_intensity"));
  dbl_or("corr_decay", c.corr_decay);
  int_or("block_size", c.block_size);
  dbl_or("initial_log_price", c.initial_log_price);
  if (kv.contains("observe_day_open")) c.observe_day_open = kv.require("observe_day_open") == "true";
  if (kv.contains("seed")) c.seed = static_cast<std::uint64_t>(std::stoull(kv.require("seed")));
  return c;
}

Eigen::MatrixXd factor_correlation(int r, double decay) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j <= i; ++j) h(i, j) = std::pow(decay, i - j);
  const Eigen::MatrixXd hh = h * h.transpose();
  const Eigen::VectorXd scale = hh.diagonal().array().rsqrt();
  return scale.asDiagonal() * hh * scale.asDiagonal();
}

Eigen::MatrixXd idiosyncratic_correlation(int n, int block, double decay) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n, n);
  for (int start = 0; start < n; start += block) {
    const int len = std::min(block, n - start);
    for (int i = 0; i < len; ++i)
      for (int j = 0; j < len; ++j) rho(start + i, start + j) = std::pow(decay, std::abs(i - j));
  }
  return rho;
}

Eigen::MatrixXd normalize_loadings(const Eigen::MatrixXd& raw, double alpha) {
  const double scale = std::pow(static_cast<double>(raw.rows()), alpha);
  const Eigen::MatrixXd gram = raw.transpose() * raw / scale;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.eigenvalues().minCoeff() <= 0.0) throw InvalidInput("loading matrix is rank deficient");
  const Eigen::MatrixXd inv_sqrt =
      es.eigenvectors() * es.eigenvalues().array().rsqrt().matrix().asDiagonal() * es.eigenvectors().transpose();
  return raw * inv_sqrt;
}

std::uint64_t replication_seed(std::uint64_t base, int rep) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(rep) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<int> sample_poisson_times(int n, double rate, std::mt19937_64& rng) {
  if (!(rate > 0.0)) throw InvalidInput("arrival rate must be positive");
  std::vector<int> idx{0};
  std::bernoulli_distribution traded(1.0 - std::exp(-rate));
  for (int j = 1; j <= n; ++j)
    if (traded(rng)) idx.push_back(j);
  return idx;
}

std::vector<int> sample_poisson_times(int n, double rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_poisson_times(n, rate, rng);
}

DgpOutput simulate(const DgpConfig& config) {
  config.validate();
  const int n_assets = config.n_assets;
  const int r = config.n_factors;
  const int steps = config.total_increments();
  const double dt = config.step();
  const double sqrt_dt = std::sqrt(dt);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd raw(n_assets, r);
  for (int i = 0; i < n_assets; ++i) {
    raw(i, 0) = 0.25 + 1.5 * unif(rng);
    for (int l = 1; l < r; ++l) raw(i, l) = 0.5 * gauss(rng);
  }
  const Eigen::MatrixXd beta = normalize_loadings(raw, config.factor_strength);

  const Eigen::MatrixXd rho = factor_correlation(r, config.corr_decay);
  const Eigen::MatrixXd rho_star = idiosyncratic_correlation(n_assets, config.block_size, config.corr_decay);
  const Eigen::MatrixXd l_rho = chol(rho);
  const Eigen::MatrixXd l_rho_star = chol(rho_star);

  const HestonParams& h = config.heston;
  Eigen::VectorXd v_factor(r), v_idio(n_assets);
  for (int l = 0; l < r; ++l) v_factor(l) = h.theta * (0.8 + 0.4 * unif(rng));
  for (int i = 0; i < n_assets; ++i) v_idio(i) = h.theta * (0.8 + 0.4 * unif(rng));

  const Eigen::Map<const Eigen::VectorXd> drift(config.factor_drift.data(), r);
  const double noise_sd = std::sqrt(config.noise_scale);

  Eigen::MatrixXd pi_true(n_assets, steps), delta_true(n_assets, steps);
  Eigen::MatrixXd factor_paths = Eigen::MatrixXd::Zero(r, steps + 1);
  Eigen::MatrixXd factor_var(r, steps), idio_var(n_assets, steps);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n_assets, n_assets);
  Eigen::MatrixXd factor_cov_sum = Eigen::MatrixXd::Zero(r, r);

  Eigen::VectorXd z_factor(r), z_idio(n_assets);
  for (int t = 0; t < steps; ++t) {
    const Eigen::VectorXd sd_f = v_factor.cwiseMax(0.0).cwiseSqrt();
    const Eigen::VectorXd sd_i = v_idio.cwiseMax(0.0).cwiseSqrt();
    factor_var.col(t) = sd_f.cwiseAbs2();
    idio_var.col(t) = sd_i.cwiseAbs2();

    for (int l = 0; l < r; ++l) z_factor(l) = gauss(rng);
    for (int i = 0; i < n_assets; ++i) z_idio(i) = gauss(rng);

    const Eigen::VectorXd dv = drift * dt + sd_f.asDiagonal() * (l_rho * z_factor) * sqrt_dt;
    const Eigen::VectorXd dz = noise_sd * sd_i.asDiagonal() * (l_rho_star * z_idio) * sqrt_dt;
    factor_paths.col(t + 1) = factor_paths.col(t) + dv;
    pi_true.col(t) = beta * dv;
    delta_true.col(t) = pi_true.col(t) + dz;

    factor_cov_sum += sd_f.asDiagonal() * rho * sd_f.asDiagonal() * dt;
    for (int start = 0; start < n_assets; start += config.block_size) {
      const int len = std::min(config.block_size, n_assets - start);
      for (int i = start; i < start + len; ++i)
        for (int j = start; j < start + len; ++j)
          sigma(i, j) += config.noise_scale * sd_i(i) * sd_i(j) * rho_star(i, j) * dt;
    }

    for (int l = 0; l < r; ++l) v_factor(l) = heston_step(v_factor(l), h, dt, gauss(rng));
    for (int i = 0; i < n_assets; ++i) v_idio(i) = heston_step(v_idio(i), h, dt, gauss(rng));
  }
  sigma += beta * factor_cov_sum * beta.transpose();
  sigma = 0.5 * (sigma + sigma.transpose());

  Eigen::MatrixXd prices(n_assets, steps + 1);
  prices.col(0).setConstant(config.initial_log_price);
  for (int t = 0; t < steps; ++t) prices.col(t + 1) = prices.col(t) + delta_true.col(t);

  const auto groups = config.asset_groups();
  std::vector<TickSeries> series;
  series.reserve(static_cast<std::size_t>(n_assets));
  for (int i = 0; i < n_assets; ++i) {
    const double rate = 1.0 / config.async_intensity[static_cast<std::size_t>(groups[static_cast<std::size_t>(i)])];
    std::vector<int> idx = sample_poisson_times(steps, rate, rng);
    if (config.observe_day_open) {
      for (int d = 1; d < config.days; ++d) idx.push_back(d * config.day_increments);
      std::sort(idx.begin(), idx.end());
      idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    }
    TickSeries s{"A" + std::to_string(i + 1), idx, {}};
    s.log_price.reserve(idx.size());
    for (int j : idx) s.log_price.push_back(prices(i, j));
    series.push_back(std::move(s));
  }
  // Grid in seconds: a 6.5 hour session split into day_increments steps.
  GridSpec grid{0.0, 23400.0 / config.day_increments, steps};

  return DgpOutput{ObservationPanel(grid, std::move(series)), std::move(delta_true), std::move(pi_true),
                   std::move(sigma), std::move(factor_paths), beta, std::move(prices), std::move(factor_var),
                   std::move(idio_var)};
}

void write_dgp(const std::string& dir, const DgpConfig& config, const DgpOutput& out) {
  write_panel(dir + "/panel.csv", out.panel);
  csv::write_matrix(dir + "/delta_true.csv", out.delta_true);
  csv::write_matrix(dir + "/pi_true.csv", out.pi_true);
  csv::write_matrix(dir + "/sigma_true.csv", out.sigma_true);
  csv::write_matrix(dir + "/factor_paths.csv", out.factor_paths);
  csv::write_matrix(dir + "/beta.csv", out.beta);
  csv::write_matrix(dir + "/prices_true.csv", out.prices_true);
  config.to_kv().write(dir + "/dgp_config.txt");
}

}  // namespace hfsync
