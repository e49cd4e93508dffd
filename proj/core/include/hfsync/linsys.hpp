#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfsync/panel.hpp"

namespace hfsync {

/// Half-open range (lo, hi] of grid increments summed by one constraint row.
/// Increment j (1-based) lives in column j-1 of an N x n matrix.
struct Duration {
  int lo;
  int hi;
  int length() const { return hi - lo; }
};

/// The block-diagonal selection operator that maps a potential increment
/// matrix onto observed duration increments, plus the observed right-hand
/// side. Rows are asset-major; within an asset they follow time order.
/// The operator is held as ranges only and never materialised densely.
class DurationSystem {
 public:
  /// Validates that each asset's ranges start at 0, are contiguous and lie
  /// inside the grid, and that `b` has one entry per range.
  DurationSystem(int n_assets, int n_increments, std::vector<std::vector<Duration>> durations,
                 Eigen::VectorXd b);

  int n_assets() const { return n_assets_; }
  int n_increments() const { return n_increments_; }
  /// n* = total number of constraint rows.
  int n_rows() const { return static_cast<int>(b_.size()); }

  const std::vector<Duration>& durations(int asset) const { return durations_.at(static_cast<std::size_t>(asset)); }
  /// Index of the first row belonging to `asset`.
  int row_offset(int asset) const { return row_offset_.at(static_cast<std::size_t>(asset)); }
  const Eigen::VectorXd& b() const { return b_; }
  /// Largest diagonal entry of AA' (the longest duration).
  int max_duration() const;

  /// Debug export, header `asset,row,lo,hi,b`.
  void write_csv(const std::string& path, const std::vector<std::string>& asset_ids) const;

 private:
  int n_assets_;
  int n_increments_;
  std::vector<std::vector<Duration>> durations_;
  std::vector<int> row_offset_;
  Eigen::VectorXd b_;
};

/// One row per consecutive observation pair of each asset, with b equal to
/// the observed log-price change across the pair. Increments after an
/// asset's last observation stay unconstrained.
DurationSystem build_system(const ObservationPanel& panel);

/// A(delta): row (lo, hi] of asset i is the sum of delta(i, lo..hi-1).
Eigen::VectorXd apply_A(const DurationSystem& sys, const Eigen::MatrixXd& delta);

/// Adjoint: scatters each row value onto every increment of its range.
Eigen::MatrixXd apply_At(const DurationSystem& sys, const Eigen::VectorXd& v);

/// Solves (A'A + eta I) vec(Y') = A'b + eta vec(W') with the Woodbury
/// identity. AA' is diagonal (ranges within an asset are disjoint), so
///   (A'A + eta I)^-1 = I/eta - A' diag(1 / (eta (eta + len_r))) A
/// and the solve is linear in the total range length.
Eigen::MatrixXd solve_ridge(const DurationSystem& sys, const Eigen::MatrixXd& w, double eta);

}  // namespace hfsync
