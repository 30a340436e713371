#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sliceforge/geometry.hpp"
#include "sliceforge/volume.hpp"

namespace sliceforge {

struct OctreeNode {
  int id = 0;
  Box3 bounds;
  int level = 1; // root = 1
  std::vector<std::uint16_t> distinct_labels; // sorted, nonzero only
  std::vector<OctreeNode> children;           // empty or exactly 8

  bool is_leaf() const noexcept { return children.empty(); }
};

struct Octree {
  OctreeNode root;
  int max_level = 1;
  int node_count = 1;
  std::vector<std::string> warnings;
};

/// A node subdivides iff it holds >= 2 distinct visible labels, its level is
/// below `max_level`, and every axis is at least two voxels wide. Children are
/// split at the floor midpoint and numbered in preorder (x-high bit 0, y-high
/// bit 1, z-high bit 2).
Octree build_octree(const LabelVolume &labels, int max_level);

/// Visit every node in preorder.
template <class F> void for_each_node(const OctreeNode &node, F &&f) {
  f(node);
  for (const auto &c : node.children)
    for_each_node(c, f);
}

/// The two slicing plane families, identified by normal axis. `first`
/// receives the top-half slot of up-down hinges.
struct SlicingPlanes {
  Axis first = Axis::X;
  Axis second = Axis::Y;

  /// The in-plane axis shared by both families; hinge segments run along it.
  Axis hinge_axis() const noexcept { return third_axis(first, second); }
  int family_index(Axis normal) const noexcept { return normal == first ? 0 : 1; }
};

/// Throws ValidationError unless the families differ.
void validate(const SlicingPlanes &planes);

struct Slice {
  int id = 0;
  Axis normal = Axis::X;
  int plane = 0;      // voxel-boundary index along the normal
  Rect2i extent;      // in in_plane_axes(normal) coordinates
  std::vector<int> source_nodes;

  Axis u_axis() const noexcept { return in_plane_axes(normal).first; }
  Axis v_axis() const noexcept { return in_plane_axes(normal).second; }
  /// Lo/hi of the extent along an in-plane axis.
  int lo_along(Axis a) const noexcept { return a == u_axis() ? extent.u0 : extent.v0; }
  int hi_along(Axis a) const noexcept { return a == u_axis() ? extent.u1 : extent.v1; }
};

/// One slice per plane family at each node's floor-midpoint plane, for every
/// node of the tree. Planes coinciding with the node's own bounding planes
/// are dropped.
std::vector<Slice> extract_slices(const OctreeNode &root,
                                  const SlicingPlanes &planes);

/// Groups slices by (family, plane) and replaces every edge-connected
/// component with its bounding rectangle, repeating until no two rectangles
/// on a plane are connected. Ids are reassigned in (family order, plane,
/// v0, u0) order so the result is independent of input order.
std::vector<Slice> unify_slices(const std::vector<Slice> &raw,
                                const SlicingPlanes &planes);

/// Split planes of an internal node, for instruction schematics.
struct OctreeCut {
  int node = 0;
  int level = 1;
  Axis normal = Axis::X;
  int plane = 0;
  Box3 bounds;
};

std::vector<OctreeCut> octree_cuts(const OctreeNode &root);

} // namespace sliceforge
