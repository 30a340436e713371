#include <random>

#include "doctest.h"
#include "sliceforge/maxrects.hpp"

using namespace sliceforge;

TEST_CASE("four quarters tile a square exactly") {
  MaxRectsBin bin({0, 0, 100, 100});
  for (int i = 0; i < 4; ++i)
    CHECK(bin.insert(50, 50, i).has_value());
  CHECK_FALSE(bin.insert(1, 1).has_value());
  CHECK(bin.free_rects().empty());
}

TEST_CASE("a strip is rotated when only the rotation fits") {
  MaxRectsBin bin({10, 20, 10, 100});
  const auto p = bin.insert(100, 10, 3);
  REQUIRE(p);
  CHECK(p->rotated);
  CHECK(p->item == 3);
  CHECK(p->rect == IRect{10, 20, 10, 100});
}

TEST_CASE("best short side fit picks the tightest free rectangle") {
  MaxRectsBin bin({0, 0, 100, 100});
  REQUIRE(bin.insert(60, 100)); // leaves a 40 x 100 column
  const auto p = bin.insert(38, 20);
  REQUIRE(p);
  CHECK(p->rect.x == 60);
  CHECK(p->rect.w == 38);
  CHECK_FALSE(p->rotated);
}

TEST_CASE("random insertions never overlap and stay in bounds") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> side(1, 40);
  for (int trial = 0; trial < 40; ++trial) {
    const IRect bounds{5, 7, 120, 90};
    MaxRectsBin bin(bounds);
    std::vector<std::pair<std::int64_t, std::int64_t>> sizes;
    std::vector<std::size_t> items;
    for (std::size_t i = 0; i < 30; ++i) {
      sizes.push_back({side(rng), side(rng)});
      items.push_back(i);
    }
    std::vector<std::size_t> remaining;
    const auto placed = bin.insert_all(sizes, items, remaining);
    CHECK(placed.size() + remaining.size() == sizes.size());
    for (std::size_t a = 0; a < placed.size(); ++a) {
      const auto &r = placed[a].rect;
      CHECK(bounds.contains(r));
      const auto [w, h] = sizes[placed[a].item];
      CHECK(((r.w == w && r.h == h && !placed[a].rotated) ||
             (r.w == h && r.h == w && placed[a].rotated)));
      for (std::size_t b = a + 1; b < placed.size(); ++b)
        CHECK_FALSE(r.overlaps(placed[b].rect));
    }
    // Free rectangles are maximal: none contains another and none meets a
    // placement.
    const auto &free = bin.free_rects();
    for (std::size_t a = 0; a < free.size(); ++a) {
      for (const auto &p : placed)
        CHECK_FALSE(free[a].overlaps(p.rect));
      for (std::size_t b = 0; b < free.size(); ++b)
        if (a != b)
          CHECK_FALSE(free[a].contains(free[b]));
    }
  }
}
