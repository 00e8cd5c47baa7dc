#pragma once

#include <span>
#include <utility>
#include <vector>

#include "kfr/geometry.hpp"

namespace kfr {

/// Dense row-major cost matrix.
class CostMatrix {
 public:
  CostMatrix(int rows, int cols, double fill = 0.0);
  CostMatrix(int rows, int cols, std::vector<double> entries);
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int r, int c) const { return entries_[static_cast<std::size_t>(r * cols_ + c)]; }
  double& operator()(int r, int c) { return entries_[static_cast<std::size_t>(r * cols_ + c)]; }
  const std::vector<double>& entries() const { return entries_; }

  CostMatrix transposed() const;
  CostMatrix negated() const;

 private:
  int rows_;
  int cols_;
  std::vector<double> entries_;
};

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
};

/// Minimum-cost one-to-one assignment of size min(rows, cols).
/// Rectangular inputs leave the surplus rows or columns unmatched.
Assignment hungarian(const CostMatrix& costs);

/// Score in [0,1]: optimal matched-IoU sum divided by max(|pred|, |gt|).
/// `gt` must be non-empty; an empty `pred` scores 0.
double frame_alignment_score(std::span<const BBox> pred, std::span<const BBox> gt);

/// Mean frame alignment score over K keyframes. A keyframe whose GT list is
/// empty (target not visible there) contributes 0.
double alignment_reward(const std::vector<std::vector<BBox>>& detections,
                        const std::vector<std::vector<BBox>>& gt);

}  // namespace kfr
