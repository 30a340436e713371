#pragma once
// Synthetic inputs shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "sliceforge/hinge.hpp"
#include "sliceforge/mesh.hpp"
#include "sliceforge/octree.hpp"
#include "sliceforge/order.hpp"
#include "sliceforge/volume.hpp"

namespace fixture {

using namespace sliceforge;

/// Two-bin transfer function: intensity 1 red at 0.5 opacity, 2 yellow opaque.
inline TransferFunction two_bin_tf() {
  return TransferFunction({{0.5, 1.5, {1, 0, 0}, 0.5}, {1.5, 2.5, {1, 1, 0}, 1.0}});
}

/// Checkerboard of intensities 1 and 2: every box of two or more voxels holds
/// both labels, so the octree subdivides everywhere.
inline ScalarVolume checker_volume(int n) {
  std::vector<float> s(static_cast<std::size_t>(n) * n * n);
  std::size_t i = 0;
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        s[i++] = static_cast<float>(1 + (x + y + z) % 2);
  return ScalarVolume({n, n, n}, {1, 1, 1}, {0, 0, 0}, std::move(s));
}

inline LabelVolume label_volume(Dims d, const std::vector<std::uint16_t> &labels) {
  return LabelVolume(d, {1, 1, 1}, {0, 0, 0}, labels);
}

/// Two-label checkerboard confined to the low octant, empty elsewhere: only
/// that octant subdivides, which yields cut-through hinges and stoppers.
inline LabelVolume octant_object(int n) {
  std::vector<std::uint16_t> v(static_cast<std::size_t>(n) * n * n, 0);
  std::size_t i = 0;
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x, ++i)
        if (x < n / 2 && y < n / 2 && z < n / 2)
          v[i] = static_cast<std::uint16_t>(1 + (x + y + z) % 2);
  return LabelVolume({n, n, n}, {1, 1, 1}, {0, 0, 0}, v);
}

inline LabelVolume random_labels(Dims d, int max_label, double background,
                                 std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> l(1, max_label);
  std::vector<std::uint16_t> v(d.count());
  for (auto &x : v)
    x = u(rng) < background ? 0 : static_cast<std::uint16_t>(l(rng));
  return label_volume(d, v);
}

/// Blocky random labels: constant over cells of `cell` voxels, so deeper
/// octree levels see uniform regions.
inline LabelVolume blocky_labels(Dims d, int cell, int max_label, std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> l(0, max_label);
  const int cx = (d.x + cell - 1) / cell, cy = (d.y + cell - 1) / cell,
            cz = (d.z + cell - 1) / cell;
  std::vector<int> cells(static_cast<std::size_t>(cx) * cy * cz);
  for (auto &c : cells)
    c = l(rng);
  std::vector<std::uint16_t> v(d.count());
  std::size_t i = 0;
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x)
        v[i++] = static_cast<std::uint16_t>(
            cells[(x / cell) + cx * ((y / cell) + cy * (z / cell))]);
  return label_volume(d, v);
}

/// UV sphere with outward-facing triangles.
inline TriangleMesh sphere(Vec3d c, double r, int stacks = 24, int sectors = 48) {
  TriangleMesh m;
  const double pi = std::numbers::pi;
  m.vertices.push_back({c[0], c[1], c[2] + r});
  for (int i = 1; i < stacks; ++i) {
    const double phi = pi * i / stacks;
    for (int j = 0; j < sectors; ++j) {
      const double th = 2 * pi * j / sectors;
      m.vertices.push_back({c[0] + r * std::sin(phi) * std::cos(th),
                            c[1] + r * std::sin(phi) * std::sin(th),
                            c[2] + r * std::cos(phi)});
    }
  }
  m.vertices.push_back({c[0], c[1], c[2] - r});
  const int south = static_cast<int>(m.vertices.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * sectors + (j % sectors); };
  for (int j = 0; j < sectors; ++j)
    m.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i < stacks - 1; ++i)
    for (int j = 0; j < sectors; ++j) {
      m.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      m.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  for (int j = 0; j < sectors; ++j)
    m.triangles.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
  return m;
}

inline TriangleMesh box(Vec3d lo, Vec3d hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.push_back({(i & 1) ? hi[0] : lo[0], (i & 2) ? hi[1] : lo[1],
                          (i & 4) ? hi[2] : lo[2]});
  const int f[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                       {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto &q : f) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

/// Four concentric spheres at 0.9 / 0.65 / 0.4 / 0.2 of a unit half-extent.
inline MeshSet nested_spheres() {
  MeshSet s;
  int i = 0;
  for (double r : {0.9, 0.65, 0.4, 0.2}) {
    s.meshes.push_back(sphere({0, 0, 0}, r));
    s.meshes.back().name = "shell" + std::to_string(i++);
  }
  return s;
}

inline Slice make_slice(int id, Axis normal, int plane, Rect2i e, std::vector<int> src = {}) {
  Slice s;
  s.id = id;
  s.normal = normal;
  s.plane = plane;
  s.extent = e;
  s.source_nodes = std::move(src);
  return s;
}

/// Random order problem: n hinges with ids 0..n-1, backbone 0, random weights
/// and random acyclic triples that never precede the backbone.
inline OrderProblem random_problem(int n, std::mt19937_64 &rng, int max_triples = 4) {
  OrderProblem p;
  std::uniform_real_distribution<double> w(0.0, 2.0);
  for (int i = 0; i < n; ++i) {
    p.hinge_ids.push_back(i);
    p.w_distance[i] = w(rng);
  }
  p.backbone = 0;
  p.big_m = n + 1;
  if (n >= 4) {
    std::uniform_int_distribution<int> pick(1, n - 1);
    std::uniform_int_distribution<int> count(0, max_triples);
    const int t = count(rng);
    for (int c = 0; c < t; ++c) {
      int j = pick(rng), i = pick(rng), k = pick(rng);
      // Respect a hidden topological order (ids ascending) to stay acyclic.
      if (!(j < i && j < k))
        continue;
      p.triples.push_back({i, j, k, 0});
    }
  }
  return p;
}

/// Random set of unified-looking slices for packing tests.
inline std::vector<Slice> random_slices(int n, std::mt19937_64 &rng, int max_side = 60) {
  std::uniform_int_distribution<int> side(4, max_side);
  std::uniform_int_distribution<int> fam(0, 1);
  std::vector<Slice> out;
  for (int i = 0; i < n; ++i) {
    const int w = side(rng), h = side(rng);
    out.push_back(make_slice(i, fam(rng) ? Axis::X : Axis::Y, side(rng) / 2,
                             {0, 0, w, h}, {i}));
  }
  return out;
}

} // namespace fixture
