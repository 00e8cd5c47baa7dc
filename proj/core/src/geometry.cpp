#include "kfr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "kfr/error.hpp"

namespace kfr {

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  require(width > 0 && height > 0, "mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

void validate_box(const BBox& b) {
  if (!std::isfinite(b.x1) || !std::isfinite(b.y1) || !std::isfinite(b.x2) ||
      !std::isfinite(b.y2)) {
    throw PreconditionError("box has non-finite coordinates");
  }
  if (!(b.x1 < b.x2) || !(b.y1 < b.y2)) {
    throw PreconditionError("degenerate box: require x1 < x2 and y1 < y2");
  }
}

void validate_box_in_grid(const BBox& b, int width, int height) {
  validate_box(b);
  if (b.x1 < 0.0 || b.y1 < 0.0 || b.x2 > width || b.y2 > height) {
    throw PreconditionError("box lies outside the grid");
  }
}

void validate_sequence(const MaskSequence& seq) {
  require(!seq.empty(), "mask sequence is empty");
  for (const auto& m : seq) {
    require(!m.empty_grid(), "mask sequence holds an unsized mask");
    require(m.same_shape(seq.front()), "mask sequence has mixed dimensions");
  }
}

double box_iou(const BBox& a, const BBox& b) {
  validate_box(a);
  validate_box(b);
  const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = iw * ih;
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  require(a.same_shape(b), "mask_iou: dimension mismatch");
  std::int64_t inter = 0;
  std::int64_t uni = 0;
  const auto& ab = a.bits();
  const auto& bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    inter += (ab[i] & bb[i]);
    uni += (ab[i] | bb[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::int64_t mask_area(const BinaryMask& m) {
  return std::accumulate(m.bits().begin(), m.bits().end(), std::int64_t{0});
}

BinaryMask box_to_mask(const BBox& b, int width, int height) {
  validate_box_in_grid(b, width, height);
  BinaryMask m(width, height);
  // cell (x, y) is covered when its center (x + 0.5, y + 0.5) is inside
  const int x0 = std::max(0, static_cast<int>(std::ceil(b.x1 - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(b.y1 - 0.5)));
  const int x1 = std::min(width, static_cast<int>(std::ceil(b.x2 - 0.5)));
  const int y1 = std::min(height, static_cast<int>(std::ceil(b.y2 - 0.5)));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) m.set(x, y);
  }
  return m;
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  require(a.same_shape(b), "mask_union: dimension mismatch");
  BinaryMask out = a;
  for (std::size_t i = 0; i < out.bits().size(); ++i) out.bits()[i] |= b.bits()[i];
  return out;
}

BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  require(a.same_shape(b), "mask_intersection: dimension mismatch");
  BinaryMask out = a;
  for (std::size_t i = 0; i < out.bits().size(); ++i) out.bits()[i] &= b.bits()[i];
  return out;
}

BBox mask_bounds(const BinaryMask& m) {
  int minx = m.width(), miny = m.height(), maxx = -1, maxy = -1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      minx = std::min(minx, x);
      miny = std::min(miny, y);
      maxx = std::max(maxx, x);
      maxy = std::max(maxy, y);
    }
  }
  if (maxx < 0) return BBox{};
  return BBox{double(minx), double(miny), double(maxx + 1), double(maxy + 1)};
}

std::vector<int> depth_map(const BinaryMask& m) {
  const int w = m.width();
  const int h = m.height();
  std::vector<int> depth(static_cast<std::size_t>(w) * h, 0);
  std::deque<int> queue;
  auto idx = [w](int x, int y) { return y * w + x; };
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y)) continue;
      bool edge = false;
      for (int k = 0; k < 4 && !edge; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        edge = nx < 0 || ny < 0 || nx >= w || ny >= h || !m.at(nx, ny);
      }
      if (edge) {
        depth[idx(x, y)] = 1;
        queue.push_back(idx(x, y));
      }
    }
  }
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    const int x = i % w, y = i / w;
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx[k], ny = y + dy[k];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      const int j = idx(nx, ny);
      if (m.at(nx, ny) && depth[j] == 0) {
        depth[j] = depth[i] + 1;
        queue.push_back(j);
      }
    }
  }
  return depth;
}

BinaryMask erode_to_ratio(const BinaryMask& m, double ratio) {
  require(std::isfinite(ratio), "erode_to_ratio: ratio must be finite");
  ratio = std::clamp(ratio, 0.0, 1.0);
  const auto area = mask_area(m);
  const auto keep = static_cast<std::int64_t>(std::llround(ratio * static_cast<double>(area)));
  if (keep >= area) return m;
  BinaryMask out(m.width(), m.height());
  if (keep <= 0) return out;

  const auto depth = depth_map(m);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(area));
  for (int i = 0; i < static_cast<int>(depth.size()); ++i) {
    if (depth[i] > 0) order.push_back(i);
  }
  // deepest first, then raster order; the first `keep` survive
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return depth[a] > depth[b]; });
  for (std::int64_t k = 0; k < keep; ++k) out.bits()[static_cast<std::size_t>(order[k])] = 1;
  return out;
}

BinaryMask boundary(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  const auto depth = depth_map(m);
  for (std::size_t i = 0; i < depth.size(); ++i) out.bits()[i] = depth[i] == 1 ? 1 : 0;
  return out;
}

BinaryMask dilate(const BinaryMask& m, int radius) {
  require(radius >= 0, "dilate: radius must be non-negative");
  if (radius == 0) return m;
  const int w = m.width();
  const int h = m.height();
  // separable: rows then columns
  BinaryMask rows(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m.at(x, y)) continue;
      for (int xx = std::max(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) rows.set(xx, y);
    }
  }
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!rows.at(x, y)) continue;
      for (int yy = std::max(0, y - radius); yy <= std::min(h - 1, y + radius); ++yy) out.set(x, yy);
    }
  }
  return out;
}

}  // namespace kfr
