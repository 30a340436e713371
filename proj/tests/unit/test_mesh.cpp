#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "sliceforge/error.hpp"
#include "sliceforge/mesh.hpp"

using namespace sliceforge;
namespace fs = std::filesystem;

TEST_CASE("OBJ loader fan-triangulates and resolves negative indices") {
  const fs::path p = fs::temp_directory_path() / "sliceforge-quad.obj";
  {
    std::ofstream out(p);
    out << "o quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 3/1 4/1\nf -4 -3 -2\n";
  }
  const TriangleMesh m = load_obj(p);
  CHECK(m.name == "quad");
  CHECK(m.vertices.size() == 4);
  REQUIRE(m.triangles.size() == 3);
  CHECK(m.triangles[0] == std::array<int, 3>{0, 1, 2});
  CHECK(m.triangles[1] == std::array<int, 3>{0, 2, 3});
  CHECK(m.triangles[2] == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("mesh validation rejects bad indices") {
  MeshSet s;
  TriangleMesh m = fixture::box({0, 0, 0}, {1, 1, 1});
  m.triangles.push_back({0, 1, 99});
  s.meshes.push_back(m);
  CHECK_THROWS_AS(validate(s), ValidationError);
  CHECK_THROWS_AS(validate(MeshSet{}), ValidationError);
}

TEST_CASE("point containment for a box") {
  const auto b = fixture::box({0, 0, 0}, {2, 2, 2});
  CHECK(contains_point(b, {1, 1, 1}));
  CHECK(contains_point(b, {0.1, 1.9, 0.5}));
  CHECK_FALSE(contains_point(b, {3, 1, 1}));
  CHECK_FALSE(contains_point(b, {1, -0.5, 1}));
}

TEST_CASE("voxelized sphere volume matches the analytic volume") {
  MeshSet s;
  s.meshes.push_back(fixture::sphere({0, 0, 0}, 1.0, 48, 96));
  const Voxelization v = voxelize_meshes(s, {64, 64, 64});
  double inside = 0;
  for (float x : v.volume.scalars())
    inside += x == 1.0f;
  const auto &sp = v.volume.spacing();
  const double measured = inside * sp[0] * sp[1] * sp[2];
  const double exact = 4.0 / 3.0 * std::numbers::pi;
  CHECK(std::fabs(measured - exact) / exact < 0.03);
  // One voxel of padding: the boundary layers are empty.
  const auto &d = v.volume.dims();
  for (int y = 0; y < d.y; ++y)
    for (int z = 0; z < d.z; ++z) {
      CHECK(v.volume.at(0, y, z) == 0.0f);
      CHECK(v.volume.at(d.x - 1, y, z) == 0.0f);
    }
  CHECK(v.tf.bins().size() == 1);
  CHECK(v.tf.bins()[0].opacity == 1.0);
}

TEST_CASE("nested meshes take the innermost intensity and ranked opacity") {
  const Voxelization v = voxelize_meshes(fixture::nested_spheres(), {48, 48, 48});
  CHECK(v.depth_rank == std::vector<int>{0, 1, 2, 3});
  const auto &d = v.volume.dims();
  CHECK(v.volume.at(d.x / 2, d.y / 2, d.z / 2) == 4.0f);
  CHECK(v.volume.at(1, 1, 1) == 0.0f); // corner lies outside the outer shell
  CHECK(v.volume.at(2, d.y / 2, d.z / 2) == 1.0f);
  REQUIRE(v.tf.bins().size() == 4);
  CHECK(v.tf.bins()[0].opacity == doctest::Approx(0.35));
  CHECK(v.tf.bins()[3].opacity == doctest::Approx(1.0));
  CHECK(v.tf.bins()[1].lo == doctest::Approx(1.5));
  CHECK(v.tf.bins()[1].hi == doctest::Approx(2.5));
}

TEST_CASE("voxelization rejects tiny grids") {
  MeshSet s;
  s.meshes.push_back(fixture::box({0, 0, 0}, {1, 1, 1}));
  CHECK_THROWS_AS(voxelize_meshes(s, {4, 16, 16}), ValidationError);
}

TEST_CASE("palette hues are evenly spaced in golden-ratio order") {
  CHECK(palette_hue(0, 1) == 0.0);
  // frac(i / phi) for i = 0..3 is 0, .618, .236, .854: ranks 0, 2, 1, 3.
  CHECK(palette_hue(0, 4) == 0.0);
  CHECK(palette_hue(1, 4) == 180.0);
  CHECK(palette_hue(2, 4) == 90.0);
  CHECK(palette_hue(3, 4) == 270.0);
  for (int n = 2; n <= 64; ++n) {
    std::vector<double> hues;
    for (int i = 0; i < n; ++i)
      hues.push_back(palette_hue(i, n));
    std::sort(hues.begin(), hues.end());
    CAPTURE(n);
    for (int i = 0; i < n; ++i) {
      // A permutation of the n evenly spaced slots.
      CHECK(hues[i] == doctest::Approx(360.0 * i / n));
    }
    for (int i = 0; i + 1 < n && n >= 3; ++i) {
      double d = std::fabs(palette_hue(i, n) - palette_hue(i + 1, n));
      d = std::min(d, 360.0 - d);
      CHECK(d >= 360.0 / (2 * n));
    }
  }
}
