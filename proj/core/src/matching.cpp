#include "kfr/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kfr/error.hpp"

namespace kfr {

CostMatrix::CostMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols) {
  require(rows >= 1 && cols >= 1, "cost matrix must be non-empty");
  entries_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

CostMatrix::CostMatrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  require(rows >= 1 && cols >= 1, "cost matrix must be non-empty");
  require(entries_.size() == static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
          "cost matrix entry count does not match its shape");
}

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty() && !rows.front().empty(), "cost matrix must be non-empty");
  const auto cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    require(r.size() == cols, "cost matrix rows have unequal length");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return CostMatrix(static_cast<int>(rows.size()), static_cast<int>(cols), std::move(flat));
}

CostMatrix CostMatrix::transposed() const {
  CostMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

CostMatrix CostMatrix::negated() const {
  CostMatrix n = *this;
  for (auto& e : n.entries_) e = -e;
  return n;
}

namespace {

// Shortest augmenting path with row/column potentials; requires rows <= cols.
// Returns the column matched to each row.
std::vector<int> solve_wide(const CostMatrix& a) {
  const int n = a.rows();
  const int m = a.cols();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment hungarian(const CostMatrix& costs) {
  for (double e : costs.entries()) {
    if (!std::isfinite(e)) throw PreconditionError("hungarian: non-finite cost entry");
  }
  Assignment out;
  if (costs.rows() <= costs.cols()) {
    const auto row_to_col = solve_wide(costs);
    for (int r = 0; r < costs.rows(); ++r) out.pairs.emplace_back(r, row_to_col[r]);
  } else {
    const auto col_to_row = solve_wide(costs.transposed());
    for (int c = 0; c < costs.cols(); ++c) out.pairs.emplace_back(col_to_row[c], c);
    std::sort(out.pairs.begin(), out.pairs.end());
  }
  for (const auto& [r, c] : out.pairs) out.total_cost += costs(r, c);
  return out;
}

double frame_alignment_score(std::span<const BBox> pred, std::span<const BBox> gt) {
  require(!gt.empty(), "frame_alignment_score: ground-truth box list is empty");
  if (pred.empty()) return 0.0;
  CostMatrix iou(static_cast<int>(pred.size()), static_cast<int>(gt.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      iou(static_cast<int>(i), static_cast<int>(j)) = box_iou(pred[i], gt[j]);
    }
  }
  const auto match = hungarian(iou.negated());
  double matched = 0.0;
  for (const auto& [r, c] : match.pairs) matched += iou(r, c);
  return matched / static_cast<double>(std::max(pred.size(), gt.size()));
}

double alignment_reward(const std::vector<std::vector<BBox>>& detections,
                        const std::vector<std::vector<BBox>>& gt) {
  require(!detections.empty(), "alignment_reward: K must be at least 1");
  require(detections.size() == gt.size(), "alignment_reward: one GT list per keyframe required");
  double sum = 0.0;
  for (std::size_t k = 0; k < detections.size(); ++k) {
    if (gt[k].empty()) continue;
    sum += frame_alignment_score(detections[k], gt[k]);
  }
  return sum / static_cast<double>(detections.size());
}

}  // namespace kfr
