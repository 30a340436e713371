#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sliceforge/error.hpp"
#include "sliceforge/octree.hpp"

using namespace sliceforge;

namespace {

std::vector<oracle::RawSlice> as_raw(const std::vector<Slice> &slices) {
  std::vector<oracle::RawSlice> out;
  for (const auto &s : slices)
    out.push_back({index(s.normal), s.plane, s.extent.u0, s.extent.v0, s.extent.u1,
                   s.extent.v1});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Slice> slice_volume(const LabelVolume &v, int level, SlicingPlanes p = {}) {
  const Octree t = build_octree(v, level);
  return unify_slices(extract_slices(t.root, p), p);
}

} // namespace

TEST_CASE("fully featured volume gives 2, 6 and 14 slices at L = 1, 2, 3") {
  const auto labels = quantize(fixture::checker_volume(16), fixture::two_bin_tf());
  CHECK(slice_volume(labels, 1).size() == 2);
  CHECK(slice_volume(labels, 2).size() == 6);
  CHECK(slice_volume(labels, 3).size() == 14);
  CHECK(build_octree(labels, 1).node_count == 1);
  CHECK(build_octree(labels, 2).node_count == 9);
  CHECK(build_octree(labels, 3).node_count == 73);
}

TEST_CASE("octree and slices match the brute-force reference on random volumes") {
  std::mt19937_64 rng(7);
  const std::vector<std::pair<SlicingPlanes, std::array<int, 2>>> pairs = {
      {{Axis::X, Axis::Y}, {0, 1}}, {{Axis::X, Axis::Z}, {0, 2}}, {{Axis::Y, Axis::Z}, {1, 2}}};
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> dim(5, 23), cell(1, 6), lv(1, 4);
    const Dims d{dim(rng), dim(rng), dim(rng)};
    const auto v = fixture::blocky_labels(d, cell(rng), 3, rng);
    const int level = lv(rng);
    const auto &[planes, normals] = pairs[trial % 3];
    CAPTURE(trial);
    CHECK(build_octree(v, level).node_count == oracle::node_count(v, level));
    CHECK(as_raw(slice_volume(v, level, planes)) == oracle::slices(v, level, normals));
  }
}

TEST_CASE("nodes are numbered in preorder with octant bit order x, y, z") {
  const auto labels = quantize(fixture::checker_volume(8), fixture::two_bin_tf());
  const Octree t = build_octree(labels, 3);
  REQUIRE(t.root.children.size() == 8);
  CHECK(t.root.children[0].id == 1);
  CHECK(t.root.children[0].children[7].id == 9);
  CHECK(t.root.children[1].id == 10);
  const Box3 &b = t.root.children[5].bounds; // x-high, z-high
  CHECK(b.lo == std::array<int, 3>{4, 0, 4});
  CHECK(b.hi == std::array<int, 3>{8, 4, 8});
  int count = 0;
  for_each_node(t.root, [&](const OctreeNode &) { ++count; });
  CHECK(count == t.node_count);
}

TEST_CASE("single-label and empty volumes do not subdivide") {
  const auto one = fixture::label_volume({4, 4, 4}, std::vector<std::uint16_t>(64, 1));
  const Octree t1 = build_octree(one, 3);
  CHECK(t1.root.is_leaf());
  CHECK(t1.warnings.empty());
  const auto none = fixture::label_volume({4, 4, 4}, std::vector<std::uint16_t>(64, 0));
  const Octree t0 = build_octree(none, 3);
  CHECK(t0.root.is_leaf());
  CHECK(t0.warnings.size() == 1);
  CHECK_THROWS_AS(build_octree(one, 0), ValidationError);
}

TEST_CASE("a one-voxel-thin axis stops subdivision") {
  std::vector<std::uint16_t> v(9);
  for (int i = 0; i < 9; ++i)
    v[i] = static_cast<std::uint16_t>(1 + i % 2);
  const Octree t = build_octree(fixture::label_volume({3, 3, 1}, v), 3);
  CHECK(t.root.distinct_labels.size() == 2);
  CHECK(t.root.is_leaf());
}

TEST_CASE("unification merges edge contact but not corner contact") {
  const SlicingPlanes p;
  using fixture::make_slice;
  const auto corner = unify_slices(
      {make_slice(0, Axis::X, 4, {0, 0, 2, 2}, {1}), make_slice(1, Axis::X, 4, {2, 2, 4, 4}, {2})},
      p);
  CHECK(corner.size() == 2);
  const auto edge = unify_slices(
      {make_slice(0, Axis::X, 4, {0, 0, 2, 2}, {1}), make_slice(1, Axis::X, 4, {2, 0, 4, 2}, {2})},
      p);
  REQUIRE(edge.size() == 1);
  CHECK(edge[0].extent == Rect2i{0, 0, 4, 2});
  CHECK(edge[0].source_nodes == std::vector<int>{1, 2});
  // The merged box of the first two now overlaps the third: fixed point.
  const auto chain = unify_slices({make_slice(0, Axis::Y, 1, {0, 0, 2, 2}, {1}),
                                   make_slice(1, Axis::Y, 1, {2, 0, 4, 4}, {2}),
                                   make_slice(2, Axis::Y, 1, {0, 3, 1, 4}, {3})},
                                  p);
  REQUIRE(chain.size() == 1);
  CHECK(chain[0].extent == Rect2i{0, 0, 4, 4});
  // Different planes never merge.
  CHECK(unify_slices({make_slice(0, Axis::X, 4, {0, 0, 2, 2}), make_slice(1, Axis::X, 5, {0, 0, 2, 2})},
                     p)
            .size() == 2);
}

TEST_CASE("unified ids do not depend on input order") {
  const auto labels = quantize(fixture::checker_volume(16), fixture::two_bin_tf());
  const SlicingPlanes p;
  auto raw = extract_slices(build_octree(labels, 3).root, p);
  const auto a = unify_slices(raw, p);
  std::reverse(raw.begin(), raw.end());
  const auto b = unify_slices(raw, p);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].plane == b[i].plane);
    CHECK(a[i].extent == b[i].extent);
  }
}

TEST_CASE("octree cuts list three planes per internal node") {
  const auto labels = quantize(fixture::checker_volume(8), fixture::two_bin_tf());
  const Octree t = build_octree(labels, 2);
  const auto cuts = octree_cuts(t.root);
  REQUIRE(cuts.size() == 3);
  for (const auto &c : cuts)
    CHECK(c.plane == 4);
  CHECK_THROWS_AS(validate(SlicingPlanes{Axis::Z, Axis::Z}), ValidationError);
}
