#include "sliceforge/maxrects.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace sliceforge {

MaxRectsBin::MaxRectsBin(IRect bounds) : bounds_(bounds) {
  if (bounds.w > 0 && bounds.h > 0)
    free_.push_back(bounds);
}

std::optional<std::pair<PackedRect, MaxRectsBin::Score>>
MaxRectsBin::find_position(std::int64_t w, std::int64_t h) const {
  std::optional<std::pair<PackedRect, Score>> best;
  auto consider = [&](const IRect &f, std::int64_t rw, std::int64_t rh, bool rotated) {
    if (f.w < rw || f.h < rh)
      return;
    const std::int64_t lw = f.w - rw, lh = f.h - rh;
    const Score s{std::min(lw, lh), std::max(lw, lh)};
    if (!best || s.short_side < best->second.short_side ||
        (s.short_side == best->second.short_side && s.long_side < best->second.long_side))
      best = {{0, {f.x, f.y, rw, rh}, rotated}, s};
  };
  for (const auto &f : free_) {
    consider(f, w, h, false);
    if (w != h)
      consider(f, h, w, true);
  }
  return best;
}

std::optional<PackedRect> MaxRectsBin::insert(std::int64_t w, std::int64_t h,
                                              std::size_t item) {
  auto pos = find_position(w, h);
  if (!pos)
    return std::nullopt;
  place(pos->first.rect);
  pos->first.item = item;
  return pos->first;
}

std::vector<PackedRect>
MaxRectsBin::insert_all(const std::vector<std::pair<std::int64_t, std::int64_t>> &sizes,
                        const std::vector<std::size_t> &items,
                        std::vector<std::size_t> &remaining) {
  std::vector<PackedRect> placed;
  remaining = items;
  while (!remaining.empty()) {
    std::optional<std::pair<PackedRect, Score>> best;
    std::size_t best_at = 0;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      const auto &[w, h] = sizes[remaining[r]];
      auto pos = find_position(w, h);
      if (!pos)
        continue;
      if (!best || pos->second.short_side < best->second.short_side ||
          (pos->second.short_side == best->second.short_side &&
           pos->second.long_side < best->second.long_side)) {
        best = pos;
        best_at = r;
      }
    }
    if (!best)
      break;
    place(best->first.rect);
    best->first.item = remaining[best_at];
    placed.push_back(best->first);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_at));
  }
  return placed;
}

void MaxRectsBin::place(const IRect &node) {
  new_free_.clear();
  for (std::size_t i = 0; i < free_.size();) {
    if (split_free(free_[i], node)) {
      free_[i] = free_.back();
      free_.pop_back();
    } else {
      ++i;
    }
  }
  prune();
}

bool MaxRectsBin::split_free(const IRect &f, const IRect &used) {
  if (!f.overlaps(used))
    return false;
  if (used.x > f.x)
    new_free_.push_back({f.x, f.y, used.x - f.x, f.h});
  if (used.right() < f.right())
    new_free_.push_back({used.right(), f.y, f.right() - used.right(), f.h});
  if (used.y > f.y)
    new_free_.push_back({f.x, f.y, f.w, used.y - f.y});
  if (used.bottom() < f.bottom())
    new_free_.push_back({f.x, used.bottom(), f.w, f.bottom() - used.bottom()});
  return true;
}

void MaxRectsBin::prune() {
  // Drop new rects contained in another new rect or in a surviving old one.
  for (std::size_t i = 0; i < new_free_.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < new_free_.size() && !drop; ++j)
      if (i != j && new_free_[j].contains(new_free_[i]) &&
          (new_free_[i] != new_free_[j] || j < i))
        drop = true;
    for (const auto &f : free_)
      if (!drop && f.contains(new_free_[i]))
        drop = true;
    if (!drop)
      free_.push_back(new_free_[i]);
  }
  new_free_.clear();
  // A new rect lies inside the old rect it was split from, so it can never
  // contain a surviving old rect.
  // Keep a canonical order so results do not depend on erase patterns.
  std::sort(free_.begin(), free_.end(), [](const IRect &a, const IRect &b) {
    return std::tie(a.y, a.x, a.w, a.h) < std::tie(b.y, b.x, b.w, b.h);
  });
}

} // namespace sliceforge
