#pragma once

#include <cstdint>
#include <vector>

namespace kfr {

/// Axis-aligned box in grid pixels. (x1, y1) is inclusive, (x2, y2) exclusive.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const { return x1 < x2 && y1 < y2; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Dense row-major bit grid.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty_grid() const { return bits_.empty(); }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::vector<std::uint8_t>& bits() { return bits_; }

  bool same_shape(const BinaryMask& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// One mask per frame, all with identical dimensions.
using MaskSequence = std::vector<BinaryMask>;

/// Throws PreconditionError unless the box is non-degenerate.
void validate_box(const BBox& b);

/// Throws PreconditionError unless the box is non-degenerate and inside
/// [0, width] x [0, height].
void validate_box_in_grid(const BBox& b, int width, int height);

/// Throws PreconditionError unless the sequence is non-empty and uniform.
void validate_sequence(const MaskSequence& seq);

double box_iou(const BBox& a, const BBox& b);

/// Empty-vs-empty is 1.0.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

std::int64_t mask_area(const BinaryMask& m);

/// Sets every cell whose center lies inside the box. For integer boxes this
/// is exactly the cells [x1, x2) x [y1, y2).
BinaryMask box_to_mask(const BBox& b, int width, int height);

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b);

/// Tight integer bounding box of the set bits; invalid (all zero) if empty.
BBox mask_bounds(const BinaryMask& m);

/// Per-pixel 4-connected distance to the nearest unset pixel or grid edge.
/// Unset pixels get 0; pixels on the boundary get 1.
std::vector<int> depth_map(const BinaryMask& m);

/// Removes boundary layers of `m` until exactly round(ratio * area) pixels
/// remain. Shallow pixels go first, ties in raster order, so the result is a
/// subset of `m` and IoU(result, m) = kept / area.
BinaryMask erode_to_ratio(const BinaryMask& m, double ratio);

/// Set pixels with at least one unset 4-neighbour, or on the grid border.
BinaryMask boundary(const BinaryMask& m);

/// Chebyshev (square structuring element) dilation.
BinaryMask dilate(const BinaryMask& m, int radius);

}  // namespace kfr
