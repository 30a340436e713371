#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace sliceforge {

/// Integer rectangle (micrometres in the layout stage).
struct IRect {
  std::int64_t x = 0, y = 0, w = 0, h = 0;

  std::int64_t right() const noexcept { return x + w; }
  std::int64_t bottom() const noexcept { return y + h; }
  bool contains(const IRect &o) const noexcept {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
  }
  bool overlaps(const IRect &o) const noexcept {
    return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
  }
  bool operator==(const IRect &) const = default;
};

struct PackedRect {
  std::size_t item = 0; // index into the request list
  IRect rect;
  bool rotated = false;
};

/// Maximal-rectangles bin with the best-short-side-fit rule: each placement
/// minimizes min(w_free - w, h_free - h), ties broken by the long side
/// leftover. 90 degree rotation is allowed.
class MaxRectsBin {
public:
  explicit MaxRectsBin(IRect bounds);

  /// Places one item of size (w, h); nullopt when it fits nowhere.
  std::optional<PackedRect> insert(std::int64_t w, std::int64_t h, std::size_t item = 0);

  /// Repeatedly places the best-scoring remaining item (ties: earliest in
  /// `sizes`) until none fits. Returns the placements; `remaining` receives
  /// the indices that did not fit, in input order.
  std::vector<PackedRect>
  insert_all(const std::vector<std::pair<std::int64_t, std::int64_t>> &sizes,
             const std::vector<std::size_t> &items,
             std::vector<std::size_t> &remaining);

  const std::vector<IRect> &free_rects() const noexcept { return free_; }
  const IRect &bounds() const noexcept { return bounds_; }

private:
  struct Score {
    std::int64_t short_side;
    std::int64_t long_side;
  };
  std::optional<std::pair<PackedRect, Score>> find_position(std::int64_t w,
                                                            std::int64_t h) const;
  void place(const IRect &node);
  bool split_free(const IRect &free, const IRect &used);
  void prune();

  IRect bounds_;
  std::vector<IRect> free_;
  std::vector<IRect> new_free_;
};

} // namespace sliceforge
