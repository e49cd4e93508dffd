#include "hfsync/linsys.hpp"

#include <algorithm>

#include "hfsync/csv.hpp"
#include "hfsync/error.hpp"
#include "hfsync/kvtext.hpp"

namespace hfsync {

DurationSystem::DurationSystem(int n_assets, int n_increments, std::vector<std::vector<Duration>> durations,
                               Eigen::VectorXd b)
    : n_assets_(n_assets), n_increments_(n_increments), durations_(std::move(durations)), b_(std::move(b)) {
  if (n_assets_ < 1 || n_increments_ < 1) throw InvalidInput("duration system needs N >= 1 and n >= 1");
  if (static_cast<int>(durations_.size()) != n_assets_) throw InvalidInput("one range list per asset required");
  int rows = 0;
  row_offset_.reserve(durations_.size());
  for (const auto& ranges : durations_) {
    row_offset_.push_back(rows);
    int expected_lo = 0;
    for (const auto& d : ranges) {
      if (d.lo != expected_lo) throw InvalidInput("duration ranges must be contiguous from 0");
      if (d.hi <= d.lo || d.hi > n_increments_) throw InvalidInput("duration range out of grid");
      expected_lo = d.hi;
    }
    rows += static_cast<int>(ranges.size());
  }
  if (b_.size() != rows) throw InvalidInput("b must have one entry per duration row");
}

int DurationSystem::max_duration() const {
  int m = 0;
  for (const auto& ranges : durations_)
    for (const auto& d : ranges) m = std::max(m, d.length());
  return m;
}

void DurationSystem::write_csv(const std::string& path, const std::vector<std::string>& asset_ids) const {
  std::string text = "asset,row,lo,hi,b\n";
  for (int i = 0; i < n_assets_; ++i) {
    const auto& ranges = durations(i);
    const std::string id = i < static_cast<int>(asset_ids.size()) ? asset_ids[static_cast<std::size_t>(i)]
                                                                 : std::to_string(i);
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      const int row = row_offset(i) + static_cast<int>(k);
      text += id + "," + std::to_string(row) + "," + std::to_string(ranges[k].lo) + "," +
              std::to_string(ranges[k].hi) + "," + format_double(b_(row)) + "\n";
    }
  }
  csv::write_text(path, text);
}

DurationSystem build_system(const ObservationPanel& panel) {
  std::vector<std::vector<Duration>> durations;
  durations.reserve(static_cast<std::size_t>(panel.n_assets()));
  std::vector<double> rhs;
  for (const auto& s : panel.series()) {
    if (s.size() < 2)
      throw InvalidInput("asset '" + s.asset_id + "' needs at least two observations to form a duration");
    std::vector<Duration> ranges;
    ranges.reserve(s.size() - 1);
    for (std::size_t l = 1; l < s.size(); ++l) {
      ranges.push_back({s.obs_idx[l - 1], s.obs_idx[l]});
      rhs.push_back(s.log_price[l] - s.log_price[l - 1]);
    }
    durations.push_back(std::move(ranges));
  }
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return DurationSystem(panel.n_assets(), panel.n_increments(), std::move(durations), std::move(b));
}

namespace {

void check_matrix(const DurationSystem& sys, const Eigen::MatrixXd& m) {
  if (m.rows() != sys.n_assets() || m.cols() != sys.n_increments())
    throw InvalidInput("matrix must be " + std::to_string(sys.n_assets()) + " x " +
                       std::to_string(sys.n_increments()));
}

}  // namespace

Eigen::VectorXd apply_A(const DurationSystem& sys, const Eigen::MatrixXd& delta) {
  check_matrix(sys, delta);
  Eigen::VectorXd out(sys.n_rows());
  for (int i = 0; i < sys.n_assets(); ++i) {
    int row = sys.row_offset(i);
    for (const auto& d : sys.durations(i)) {
      double acc = 0.0;
      for (int j = d.lo; j < d.hi; ++j) acc += delta(i, j);
      out(row++) = acc;
    }
  }
  return out;
}

Eigen::MatrixXd apply_At(const DurationSystem& sys, const Eigen::VectorXd& v) {
  if (v.size() != sys.n_rows()) throw InvalidInput("vector length must equal the number of duration rows");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(sys.n_assets(), sys.n_increments());
  for (int i = 0; i < sys.n_assets(); ++i) {
    int row = sys.row_offset(i);
    for (const auto& d : sys.durations(i)) {
      const double value = v(row++);
      for (int j = d.lo; j < d.hi; ++j) out(i, j) = value;
    }
  }
  return out;
}

Eigen::MatrixXd solve_ridge(const DurationSystem& sys, const Eigen::MatrixXd& w, double eta) {
  if (!(eta > 0.0)) throw InvalidInput("ridge parameter eta must be positive");
  check_matrix(sys, w);
  // x = A'b + eta W, then y = x/eta - A' [ (A x)_r / (eta (eta + len_r)) ].
  Eigen::MatrixXd x = eta * w;
  const Eigen::VectorXd& b = sys.b();
  for (int i = 0; i < sys.n_assets(); ++i) {
    int row = sys.row_offset(i);
    for (const auto& d : sys.durations(i)) {
      const double bi = b(row++);
      for (int j = d.lo; j < d.hi; ++j) x(i, j) += bi;
    }
  }
  Eigen::MatrixXd y = x / eta;
  for (int i = 0; i < sys.n_assets(); ++i) {
    for (const auto& d : sys.durations(i)) {
      double ax = 0.0;
      for (int j = d.lo; j < d.hi; ++j) ax += x(i, j);
      const double corr = ax / (eta * (eta + d.length()));
      for (int j = d.lo; j < d.hi; ++j) y(i, j) -= corr;
    }
  }
  return y;
}

}  // namespace hfsync
