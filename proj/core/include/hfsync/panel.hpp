#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hfsync {

/// Shared discrete time grid t_0, t_0 + step, ..., t_0 + count * step.
struct GridSpec {
  double t0 = 0.0;
  double step = 1.0;  ///< seconds between grid points
  int count = 1;      ///< number of increments; the grid has count + 1 points

  void validate() const;
  int points() const { return count + 1; }
  double time_at(int index) const { return t0 + step * index; }
};

/// Observed log-prices of one asset at a subset of grid indices.
struct TickSeries {
  std::string asset_id;
  std::vector<int> obs_idx;       ///< strictly increasing, obs_idx[0] == 0
  std::vector<double> log_price;  ///< natural log, same length as obs_idx

  std::size_t size() const { return obs_idx.size(); }
  int last_index() const { return obs_idx.back(); }
};

/// N asynchronously observed assets on one grid. Missing cells are simply
/// absent from each series' index list. Immutable once constructed.
class ObservationPanel {
 public:
  /// Validates every invariant; throws InvalidInput on violation.
  ObservationPanel(GridSpec grid, std::vector<TickSeries> series);

  const GridSpec& grid() const { return grid_; }
  const std::vector<TickSeries>& series() const { return series_; }
  const TickSeries& series(int asset) const { return series_.at(static_cast<std::size_t>(asset)); }

  int n_assets() const { return static_cast<int>(series_.size()); }
  int n_increments() const { return grid_.count; }

  /// Total number of observed (asset, index) cells.
  std::size_t observation_count() const;
  /// Number of grid cells in 1..n with no observation for this asset.
  int missing_count(int asset) const;

  /// Dense N x (n+1) indicator of observed cells.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> observed() const;

  /// Sub-panel covering grid indices [first, last]. Each asset must be
  /// observed at `first`; indices are re-based to start at 0.
  ObservationPanel slice(int first, int last) const;

  /// Sub-panel with the given assets in the given order.
  ObservationPanel select_assets(const std::vector<int>& assets) const;

  bool operator==(const ObservationPanel& other) const;

 private:
  GridSpec grid_;
  std::vector<TickSeries> series_;
};

/// Splits a multi-day panel into consecutive day panels of `day_increments`
/// increments each. Every asset must be observed at each day boundary.
std::vector<ObservationPanel> split_days(const ObservationPanel& panel, int day_increments);

/// One raw trade.
struct RawTick {
  double timestamp;  ///< seconds, same clock as GridSpec::t0
  double price;      ///< strictly positive
};

struct RawSeries {
  std::string asset_id;
  std::vector<RawTick> ticks;
};

/// Snaps raw trades onto the grid. Cell 0 holds trades at exactly t_0, cell
/// j >= 1 holds trades in (t_{j-1}, t_j]; the last trade in a cell wins. If
/// cell 0 is empty the first trade of the asset is carried back to it.
ObservationPanel align_to_grid(const std::vector<RawSeries>& raw, const GridSpec& grid);

/// Artificial hold-out mask over an N x (n+1) panel (true = masked).
class MaskMatrix {
 public:
  MaskMatrix(int n_assets, int n_points) : rows_(n_assets), cols_(n_points),
      bits_(static_cast<std::size_t>(n_assets) * static_cast<std::size_t>(n_points), 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool operator()(int asset, int index) const { return bits_[offset(asset, index)] != 0; }
  void set(int asset, int index, bool masked = true) { bits_[offset(asset, index)] = masked ? 1 : 0; }
  std::size_t count() const;

  bool operator==(const MaskMatrix&) const = default;

 private:
  std::size_t offset(int asset, int index) const {
    return static_cast<std::size_t>(asset) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(index);
  }

  int rows_;
  int cols_;
  std::vector<std::uint8_t> bits_;
};

/// Masks each observed, non-anchor cell independently with probability p.
MaskMatrix generate_mask(const ObservationPanel& panel, double p, std::uint64_t seed);

/// Removes masked cells from the panel. Rejects masks that touch column 0 or
/// cells the panel does not observe.
ObservationPanel apply_mask(const ObservationPanel& panel, const MaskMatrix& mask);

/// Panel CSV `asset,grid_index,log_price` plus a `<path>.grid` sidecar
/// holding `t0`, `step_seconds` and `n_increments`.
void write_panel(const std::string& path, const ObservationPanel& panel);
ObservationPanel read_panel(const std::string& path);
std::string grid_sidecar_path(const std::string& panel_path);

/// Mask CSV `asset,grid_index` listing masked cells. Assets are resolved
/// against the panel the mask belongs to.
void write_mask(const std::string& path, const ObservationPanel& panel, const MaskMatrix& mask);
MaskMatrix read_mask(const std::string& path, const ObservationPanel& panel);

}  // namespace hfsync
