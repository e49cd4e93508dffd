#include "hfsync/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "hfsync/csv.hpp"
#include "hfsync/error.hpp"
#include "hfsync/kvtext.hpp"

namespace hfsync {

void GridSpec::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("grid step must be positive");
  if (!std::isfinite(t0)) throw InvalidInput("grid t0 must be finite");
  if (count < 1) throw InvalidInput("grid must have at least one increment");
}

ObservationPanel::ObservationPanel(GridSpec grid, std::vector<TickSeries> series)
    : grid_(grid), series_(std::move(series)) {
  grid_.validate();
  if (series_.empty()) throw InvalidInput("panel needs at least one asset");
  std::unordered_set<std::string> ids;
  for (const auto& s : series_) {
    if (!ids.insert(s.asset_id).second) throw InvalidInput("duplicate asset id '" + s.asset_id + "'");
    if (s.obs_idx.size() != s.log_price.size())
      throw InvalidInput("asset '" + s.asset_id + "': index and price lists differ in length");
    if (s.obs_idx.empty() || s.obs_idx.front() != 0)
      throw InvalidInput("asset '" + s.asset_id + "': missing anchor observation at index 0");
    for (std::size_t k = 0; k < s.obs_idx.size(); ++k) {
      if (k > 0 && s.obs_idx[k] <= s.obs_idx[k - 1])
        throw InvalidInput("asset '" + s.asset_id + "': observation indices not strictly increasing");
      if (s.obs_idx[k] > grid_.count)
        throw InvalidInput("asset '" + s.asset_id + "': observation index beyond grid");
      if (!std::isfinite(s.log_price[k]))
        throw InvalidInput("asset '" + s.asset_id + "': non-finite log price");
    }
  }
}

std::size_t ObservationPanel::observation_count() const {
  std::size_t total = 0;
  for (const auto& s : series_) total += s.size();
  return total;
}

int ObservationPanel::missing_count(int asset) const {
  return grid_.count - (static_cast<int>(series(asset).size()) - 1);
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ObservationPanel::observed() const {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> obs =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n_assets(), grid_.points(), false);
  for (int i = 0; i < n_assets(); ++i)
    for (int idx : series_[static_cast<std::size_t>(i)].obs_idx) obs(i, idx) = true;
  return obs;
}

ObservationPanel ObservationPanel::slice(int first, int last) const {
  if (first < 0 || last > grid_.count || last <= first) throw InvalidInput("invalid slice bounds");
  GridSpec g{grid_.time_at(first), grid_.step, last - first};
  std::vector<TickSeries> out;
  out.reserve(series_.size());
  for (const auto& s : series_) {
    TickSeries t{s.asset_id, {}, {}};
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s.obs_idx[k] < first || s.obs_idx[k] > last) continue;
      t.obs_idx.push_back(s.obs_idx[k] - first);
      t.log_price.push_back(s.log_price[k]);
    }
    if (t.obs_idx.empty() || t.obs_idx.front() != 0)
      throw InvalidInput("asset '" + s.asset_id + "' not observed at slice start " + std::to_string(first));
    out.push_back(std::move(t));
  }
  return ObservationPanel(g, std::move(out));
}

ObservationPanel ObservationPanel::select_assets(const std::vector<int>& assets) const {
  std::vector<TickSeries> out;
  out.reserve(assets.size());
  for (int a : assets) {
    if (a < 0 || a >= n_assets()) throw InvalidInput("asset index out of range");
    out.push_back(series_[static_cast<std::size_t>(a)]);
  }
  return ObservationPanel(grid_, std::move(out));
}

bool ObservationPanel::operator==(const ObservationPanel& other) const {
  if (grid_.t0 != other.grid_.t0 || grid_.step != other.grid_.step || grid_.count != other.grid_.count)
    return false;
  if (series_.size() != other.series_.size()) return false;
  for (std::size_t i = 0; i < series_.size(); ++i) {
    const auto& a = series_[i];
    const auto& b = other.series_[i];
    if (a.asset_id != b.asset_id || a.obs_idx != b.obs_idx || a.log_price != b.log_price) return false;
  }
  return true;
}

std::vector<ObservationPanel> split_days(const ObservationPanel& panel, int day_increments) {
  if (day_increments < 1) throw InvalidInput("day length must be positive");
  if (panel.n_increments() % day_increments != 0)
    throw InvalidInput("grid length " + std::to_string(panel.n_increments()) +
                       " is not a whole number of days of " + std::to_string(day_increments));
  std::vector<ObservationPanel> days;
  for (int start = 0; start < panel.n_increments(); start += day_increments)
    days.push_back(panel.slice(start, start + day_increments));
  return days;
}

ObservationPanel align_to_grid(const std::vector<RawSeries>& raw, const GridSpec& grid) {
  grid.validate();
  const double end = grid.time_at(grid.count);
  const double slack = 1e-9 * grid.step;
  std::vector<TickSeries> series;
  series.reserve(raw.size());
  for (const auto& r : raw) {
    if (r.ticks.empty()) throw InvalidInput("asset '" + r.asset_id + "' has no trades");
    std::vector<RawTick> ticks = r.ticks;
    std::stable_sort(ticks.begin(), ticks.end(),
                     [](const RawTick& a, const RawTick& b) { return a.timestamp < b.timestamp; });
    // cell -> last log price in that cell
    std::map<int, double> cells;
    for (const auto& t : ticks) {
      if (!(t.price > 0.0) || !std::isfinite(t.price))
        throw InvalidInput("asset '" + r.asset_id + "': non-positive price");
      if (t.timestamp < grid.t0 - slack || t.timestamp > end + slack)
        throw InvalidInput("asset '" + r.asset_id + "': timestamp outside grid");
      const double offset = (t.timestamp - grid.t0) / grid.step;
      int cell = offset <= 1e-9 ? 0 : static_cast<int>(std::ceil(offset - 1e-9));
      cell = std::clamp(cell, 0, grid.count);
      cells[cell] = std::log(t.price);
    }
    TickSeries s{r.asset_id, {}, {}};
    if (cells.begin()->first != 0) {
      s.obs_idx.push_back(0);
      s.log_price.push_back(cells.begin()->second);
    }
    for (const auto& [idx, lp] : cells) {
      s.obs_idx.push_back(idx);
      s.log_price.push_back(lp);
    }
    series.push_back(std::move(s));
  }
  return ObservationPanel(grid, std::move(series));
}

std::size_t MaskMatrix::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

MaskMatrix generate_mask(const ObservationPanel& panel, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidInput("mask probability must lie in [0, 1)");
  MaskMatrix mask(panel.n_assets(), panel.grid().points());
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < panel.n_assets(); ++i) {
    const auto& idx = panel.series(i).obs_idx;
    for (std::size_t k = 1; k < idx.size(); ++k)
      if (coin(rng)) mask.set(i, idx[k]);
  }
  return mask;
}

ObservationPanel apply_mask(const ObservationPanel& panel, const MaskMatrix& mask) {
  if (mask.rows() != panel.n_assets() || mask.cols() != panel.grid().points())
    throw InvalidInput("mask dimensions do not match panel");
  const auto observed = panel.observed();
  std::vector<TickSeries> out;
  out.reserve(static_cast<std::size_t>(panel.n_assets()));
  for (int i = 0; i < panel.n_assets(); ++i) {
    if (mask(i, 0)) throw InvalidInput("mask covers the anchor of asset '" + panel.series(i).asset_id + "'");
    for (int j = 1; j < mask.cols(); ++j)
      if (mask(i, j) && !observed(i, j))
        throw InvalidInput("mask covers an unobserved cell of asset '" + panel.series(i).asset_id + "'");
    const auto& s = panel.series(i);
    TickSeries t{s.asset_id, {}, {}};
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (mask(i, s.obs_idx[k])) continue;
      t.obs_idx.push_back(s.obs_idx[k]);
      t.log_price.push_back(s.log_price[k]);
    }
    out.push_back(std::move(t));
  }
  return ObservationPanel(panel.grid(), std::move(out));
}

std::string grid_sidecar_path(const std::string& panel_path) { return panel_path + ".grid"; }

void write_panel(const std::string& path, const ObservationPanel& panel) {
  std::string text = "asset,grid_index,log_price\n";
  for (const auto& s : panel.series())
    for (std::size_t k = 0; k < s.size(); ++k)
      text += s.asset_id + "," + std::to_string(s.obs_idx[k]) + "," + format_double(s.log_price[k]) + "\n";
  csv::write_text(path, text);

  KeyValueText meta;
  meta.set("t0", panel.grid().t0);
  meta.set("step_seconds", panel.grid().step);
  meta.set("n_increments", panel.grid().count);
  meta.write(grid_sidecar_path(path));
}

ObservationPanel read_panel(const std::string& path) {
  const auto meta = KeyValueText::read(grid_sidecar_path(path));
  GridSpec grid{meta.require_double("t0"), meta.require_double("step_seconds"),
                static_cast<int>(meta.require_int("n_increments"))};

  const auto lines = csv::read_lines(path);
  if (lines.empty() || lines.front() != "asset,grid_index,log_price")
    throw ParseError(path, 1, "expected header 'asset,grid_index,log_price'");
  std::vector<TickSeries> series;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto fields = csv::split(lines[ln]);
    if (fields.size() != 3) throw ParseError(path, ln + 1, "expected 3 fields");
    if (fields[0].empty()) throw ParseError(path, ln + 1, "empty asset id");
    const long long idx = csv::parse_int(fields[1], path, ln + 1);
    const double lp = csv::parse_double(fields[2], path, ln + 1);
    if (idx < 0 || idx > grid.count) throw ParseError(path, ln + 1, "grid index out of range");
    auto [it, inserted] = slot.emplace(fields[0], series.size());
    if (inserted) series.push_back(TickSeries{fields[0], {}, {}});
    auto& s = series[it->second];
    if (!s.obs_idx.empty() && idx <= s.obs_idx.back())
      throw ParseError(path, ln + 1, "grid indices of asset '" + fields[0] + "' are not increasing");
    s.obs_idx.push_back(static_cast<int>(idx));
    s.log_price.push_back(lp);
  }
  try {
    return ObservationPanel(grid, std::move(series));
  } catch (const InvalidInput& e) {
    throw ParseError(path, lines.size(), e.what());
  }
}

void write_mask(const std::string& path, const ObservationPanel& panel, const MaskMatrix& mask) {
  std::string text = "asset,grid_index\n";
  for (int i = 0; i < mask.rows(); ++i)
    for (int j = 0; j < mask.cols(); ++j)
      if (mask(i, j)) text += panel.series(i).asset_id + "," + std::to_string(j) + "\n";
  csv::write_text(path, text);
}

MaskMatrix read_mask(const std::string& path, const ObservationPanel& panel) {
  std::unordered_map<std::string, int> row;
  for (int i = 0; i < panel.n_assets(); ++i) row[panel.series(i).asset_id] = i;
  const auto lines = csv::read_lines(path);
  if (lines.empty() || lines.front() != "asset,grid_index")
    throw ParseError(path, 1, "expected header 'asset,grid_index'");
  MaskMatrix mask(panel.n_assets(), panel.grid().points());
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto fields = csv::split(lines[ln]);
    if (fields.size() != 2) throw ParseError(path, ln + 1, "expected 2 fields");
    const auto it = row.find(fields[0]);
    if (it == row.end()) throw ParseError(path, ln + 1, "unknown asset '" + fields[0] + "'");
    const long long idx = csv::parse_int(fields[1], path, ln + 1);
    if (idx < 0 || idx >= mask.cols()) throw ParseError(path, ln + 1, "grid index out of range");
    mask.set(it->second, static_cast<int>(idx));
  }
  return mask;
}

}  // namespace hfsync
