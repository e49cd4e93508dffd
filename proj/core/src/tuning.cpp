#include "hfsync/tuning.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hfsync/error.hpp"
#include "hfsync/kvtext.hpp"
#include "hfsync/baselines.hpp"
#include "hfsync/parallel.hpp"
#include "hfsync/simulate.hpp"

namespace hfsync {

void TuningGrid::validate() const {
  if (mu_candidates.empty() || lambda_candidates.empty()) throw InvalidInput("tuning grid is empty");
  if (mask_probs.empty()) throw InvalidInput("tuning grid needs at least one mask probability");
  for (double m : mu_candidates)
    if (!(m > 0.0)) throw InvalidInput("mu candidates must be > 0");
  for (double l : lambda_candidates)
    if (!(l > 0.0)) throw InvalidInput("lambda candidates must be > 0");
  for (double p : mask_probs)
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("mask probabilities must lie in (0, 1)");
  if (repetitions < 1) throw InvalidInput("repetitions must be >= 1");
  if (!(eta_ratio > 0.0)) throw InvalidInput("eta ratio must be > 0");
}

double imputation_error(const Eigen::MatrixXd& p_hat, const Eigen::MatrixXd& p_true, const MaskMatrix& mask,
                        ErrorKind kind) {
  if (p_hat.rows() != p_true.rows() || p_hat.cols() != p_true.cols() || p_true.rows() != mask.rows() ||
      p_true.cols() != mask.cols())
    throw InvalidInput("imputation_error: dimensions differ");
  double num = 0.0;
  double truth = 0.0;
  std::size_t masked = 0;
  for (int i = 0; i < mask.rows(); ++i)
    for (int j = 0; j < mask.cols(); ++j) {
      if (!mask(i, j)) continue;
      const double e = p_hat(i, j) - p_true(i, j);
      num += e * e;
      truth += p_true(i, j) * p_true(i, j);
      ++masked;
    }
  if (masked == 0) throw InvalidInput("imputation_error: mask is empty");
  if (kind == ErrorKind::Absolute) return std::sqrt(num / static_cast<double>(masked));
  if (truth == 0.0) throw InvalidInput("imputation_error: masked prices are all zero");
  return std::sqrt(num / truth);
}

std::uint64_t mask_seed(const TuningGrid& grid, int p_index, int rep) {
  return replication_seed(grid.seed, p_index * grid.repetitions + rep);
}

std::vector<TuningRecord> evaluate_candidate(const ObservationPanel& panel, const TuningGrid& grid, double mu,
                                             double lambda, double eta, const SolverConfig& base) {
  grid.validate();
  SolverConfig config = base;
  config.mu = mu;
  config.lambda = lambda;
  config.eta = eta;
  config.validate();
  const Eigen::MatrixXd observed_prices = previous_tick(panel);
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<TuningRecord> out;
  for (std::size_t pi = 0; pi < grid.mask_probs.size(); ++pi) {
    for (int rep = 0; rep < grid.repetitions; ++rep) {
      TuningRecord rec{mu, lambda, eta, grid.mask_probs[pi], rep, inf, inf};
      const MaskMatrix mask = generate_mask(panel, grid.mask_probs[pi], mask_seed(grid, static_cast<int>(pi), rep));
      if (mask.count() > 0) {
        try {
          const ObservationPanel held_out = apply_mask(panel, mask);
          const SyncResult r = synchronize(held_out, config);
          const Eigen::MatrixXd prices = reconstruct_prices(r.delta_hat, held_out);
          if (prices.allFinite()) {
            rec.abs_error = imputation_error(prices, observed_prices, mask, ErrorKind::Absolute);
            rec.rel_error = imputation_error(prices, observed_prices, mask, ErrorKind::Relative);
          }
        } catch (const InvalidInput&) {
          // the masked panel is not solvable; the cycle keeps +inf
        }
      }
      out.push_back(rec);
    }
  }
  return out;
}

TuningResult select_parameters(const ObservationPanel& panel, const TuningGrid& grid, const SolverConfig& base,
                               int threads) {
  grid.validate();
  struct Candidate {
    double mu;
    double lambda;
  };
  std::vector<Candidate> candidates;
  for (double mu : grid.mu_candidates)
    for (double lambda : grid.lambda_candidates) candidates.push_back({mu, lambda});

  std::vector<std::vector<TuningRecord>> per_candidate(candidates.size());
  parallel_for(static_cast<int>(candidates.size()), threads, [&](int c) {
    const auto& cand = candidates[static_cast<std::size_t>(c)];
    per_candidate[static_cast<std::size_t>(c)] =
        evaluate_candidate(panel, grid, cand.mu, cand.lambda, grid.eta_ratio * cand.lambda, base);
  });

  TuningResult best;
  best.mean_abs_error = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double sum = 0.0;
    for (const auto& rec : per_candidate[c]) sum += rec.abs_error;
    const double mean = sum / static_cast<double>(per_candidate[c].size());
    const auto& cand = candidates[c];
    const bool better = !have_best || mean < best.mean_abs_error ||
                        (mean == best.mean_abs_error &&
                         (cand.lambda < best.lambda || (cand.lambda == best.lambda && cand.mu < best.mu)));
    if (better) {
      best.mu = cand.mu;
      best.lambda = cand.lambda;
      best.eta = grid.eta_ratio * cand.lambda;
      best.mean_abs_error = mean;
      have_best = true;
    }
    best.records.insert(best.records.end(), per_candidate[c].begin(), per_candidate[c].end());
  }
  return best;
}

std::string tuning_report_csv(const std::vector<TuningRecord>& records) {
  std::ostringstream os;
  os << "mu,lambda,eta,mask_p,rep,abs_error,rel_error\n";
  for (const auto& r : records)
    os << format_double(r.mu) << ',' << format_double(r.lambda) << ',' << format_double(r.eta) << ','
       << format_double(r.mask_p) << ',' << r.rep << ',' << format_double(r.abs_error) << ','
       << format_double(r.rel_error) << '\n';
  return os.str();
}

}  // namespace hfsync
