#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "sliceforge/volume.hpp"

namespace sliceforge {

struct TriangleMesh {
  std::string name;
  std::vector<Vec3d> vertices;               // mm
  std::vector<std::array<int, 3>> triangles; // 0-based vertex indices
};

struct MeshSet {
  std::vector<TriangleMesh> meshes;
};

/// Reads the v/f subset of ASCII OBJ. Faces with more than three vertices are
/// fan-triangulated; texture/normal references are ignored.
TriangleMesh load_obj(const std::filesystem::path &path);
void save_obj(const TriangleMesh &mesh, const std::filesystem::path &path);

/// Throws ValidationError on out-of-range indices or empty meshes.
void validate(const MeshSet &set);

/// Ray-parity containment of a point in a closed mesh, majority vote over
/// the three axis-aligned rays.
bool contains_point(const TriangleMesh &mesh, const Vec3d &p);

struct Voxelization {
  ScalarVolume volume;
  TransferFunction tf;
  /// Nesting rank per mesh (0 = outermost); innermost mesh has rank N-1.
  std::vector<int> depth_rank;
  int degenerate_triangles = 0;
};

/// Maps each mesh to intensity (index + 1); a voxel takes the innermost
/// containing mesh. The grid covers the meshes' bounding box plus one voxel of
/// padding on every side. The generated transfer function has one bin per mesh
/// with opacity 0.35 + 0.65 * rank / (N - 1) and golden-ratio hues.
Voxelization voxelize_meshes(const MeshSet &meshes,
                             std::array<int, 3> resolution);

/// Palette hue (degrees) for mesh `i` of `n`. The n hues are evenly spaced
/// and handed out in golden-ratio order: mesh i takes the slot given by the
/// rank of frac(i / phi) among the n values, so any two meshes differ by at
/// least 360/n degrees and consecutive meshes land far apart.
double palette_hue(int i, int n) noexcept;

} // namespace sliceforge
