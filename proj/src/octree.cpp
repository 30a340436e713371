#include "sliceforge/octree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "sliceforge/error.hpp"

namespace sliceforge {

namespace {

std::vector<std::uint16_t> scan_labels(const LabelVolume &labels, const Box3 &b,
                                       std::vector<std::uint8_t> &seen) {
  std::fill(seen.begin(), seen.end(), 0);
  std::vector<std::uint16_t> found;
  const auto &data = labels.labels();
  for (int z = b.lo[2]; z < b.hi[2]; ++z) {
    for (int y = b.lo[1]; y < b.hi[1]; ++y) {
      const std::size_t row = labels.offset(0, y, z);
      for (int x = b.lo[0]; x < b.hi[0]; ++x) {
        const std::uint16_t l = data[row + x];
        if (l != 0 && !seen[l]) {
          seen[l] = 1;
          found.push_back(l);
        }
      }
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

void subdivide(const LabelVolume &labels, OctreeNode &node, int max_level,
               int &next_id, std::vector<std::uint8_t> &seen) {
  node.distinct_labels = scan_labels(labels, node.bounds, seen);
  const bool splittable = node.bounds.extent(Axis::X) >= 2 &&
                          node.bounds.extent(Axis::Y) >= 2 &&
                          node.bounds.extent(Axis::Z) >= 2;
  if (node.distinct_labels.size() < 2 || node.level >= max_level || !splittable)
    return;

  node.children.resize(8);
  for (int octant = 0; octant < 8; ++octant) {
    OctreeNode &child = node.children[octant];
    child.level = node.level + 1;
    for (int a = 0; a < 3; ++a) {
      const Axis ax = axis_from_index(a);
      const bool high = (octant >> a) & 1;
      child.bounds.lo[a] = high ? node.bounds.mid(ax) : node.bounds.lo[a];
      child.bounds.hi[a] = high ? node.bounds.hi[a] : node.bounds.mid(ax);
    }
  }
  for (auto &child : node.children) {
    child.id = next_id++;
    subdivide(labels, child, max_level, next_id, seen);
  }
}

void emit(const OctreeNode &node, const SlicingPlanes &planes,
          std::vector<Slice> &out) {
  for (Axis normal : {planes.first, planes.second}) {
    const int plane = node.bounds.mid(normal);
    if (plane <= node.bounds.lo_of(normal) || plane >= node.bounds.hi_of(normal))
      continue;
    const auto [u, v] = in_plane_axes(normal);
    Slice s;
    s.id = static_cast<int>(out.size());
    s.normal = normal;
    s.plane = plane;
    s.extent = {node.bounds.lo_of(u), node.bounds.lo_of(v), node.bounds.hi_of(u),
                node.bounds.hi_of(v)};
    s.source_nodes = {node.id};
    out.push_back(std::move(s));
  }
  for (const auto &c : node.children)
    emit(c, planes, out);
}

} // namespace

Octree build_octree(const LabelVolume &labels, int max_level) {
  if (max_level < 1)
    throw ValidationError("octree level L must be >= 1", "octree");
  Octree tree;
  tree.max_level = max_level;
  const auto &d = labels.dims();
  tree.root.bounds = {{0, 0, 0}, {d.x, d.y, d.z}};
  tree.root.level = 1;
  tree.root.id = 0;
  int next_id = 1;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(labels.max_label()) + 1);
  subdivide(labels, tree.root, max_level, next_id, seen);
  tree.node_count = next_id;
  if (tree.root.distinct_labels.empty())
    tree.warnings.emplace_back("volume has no visible voxels: nothing to slice");
  return tree;
}

void validate(const SlicingPlanes &planes) {
  if (planes.first == planes.second)
    throw ValidationError("slicing orientations must be two different plane "
                          "families");
}

std::vector<Slice> extract_slices(const OctreeNode &root,
                                  const SlicingPlanes &planes) {
  validate(planes);
  std::vector<Slice> out;
  emit(root, planes, out);
  return out;
}

std::vector<Slice> unify_slices(const std::vector<Slice> &raw,
                                const SlicingPlanes &planes) {
  // (family index, plane) -> slices on that plane
  std::map<std::pair<int, int>, std::vector<Slice>> groups;
  for (const auto &s : raw)
    groups[{planes.family_index(s.normal), s.plane}].push_back(s);

  std::vector<Slice> merged;
  for (auto &[key, group] : groups) {
    std::vector<Slice> rects = group;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < rects.size() && !changed; ++i) {
        for (std::size_t j = i + 1; j < rects.size(); ++j) {
          if (!edge_connected(rects[i].extent, rects[j].extent))
            continue;
          rects[i].extent = bounding_union(rects[i].extent, rects[j].extent);
          auto &src = rects[i].source_nodes;
          src.insert(src.end(), rects[j].source_nodes.begin(),
                     rects[j].source_nodes.end());
          rects.erase(rects.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
      }
    }
    for (auto &r : rects) {
      std::sort(r.source_nodes.begin(), r.source_nodes.end());
      r.source_nodes.erase(std::unique(r.source_nodes.begin(), r.source_nodes.end()),
                           r.source_nodes.end());
      merged.push_back(std::move(r));
    }
  }

  std::sort(merged.begin(), merged.end(), [&](const Slice &a, const Slice &b) {
    return std::make_tuple(planes.family_index(a.normal), a.plane, a.extent.v0,
                           a.extent.u0, a.extent.v1, a.extent.u1) <
           std::make_tuple(planes.family_index(b.normal), b.plane, b.extent.v0,
                           b.extent.u0, b.extent.v1, b.extent.u1);
  });
  for (std::size_t i = 0; i < merged.size(); ++i)
    merged[i].id = static_cast<int>(i);
  return merged;
}

std::vector<OctreeCut> octree_cuts(const OctreeNode &root) {
  std::vector<OctreeCut> cuts;
  for_each_node(root, [&](const OctreeNode &n) {
    if (n.is_leaf())
      return;
    for (int a = 0; a < 3; ++a) {
      const Axis ax = axis_from_index(a);
      cuts.push_back({n.id, n.level, ax, n.bounds.mid(ax), n.bounds});
    }
  });
  return cuts;
}

} // namespace sliceforge
