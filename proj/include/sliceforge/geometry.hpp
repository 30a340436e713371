#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

namespace sliceforge {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr int index(Axis a) noexcept { return static_cast<int>(a); }
inline constexpr Axis axis_from_index(int i) noexcept {
  return static_cast<Axis>(i);
}

/// The axis orthogonal to both `a` and `b` (which must differ).
inline constexpr Axis third_axis(Axis a, Axis b) noexcept {
  return axis_from_index(3 - index(a) - index(b));
}

/// In-plane axes (u, v) of a plane family identified by its normal, in
/// increasing axis order. For the z-containing families v is the up axis.
inline constexpr std::pair<Axis, Axis> in_plane_axes(Axis normal) noexcept {
  switch (normal) {
  case Axis::X:
    return {Axis::Y, Axis::Z};
  case Axis::Y:
    return {Axis::X, Axis::Z};
  case Axis::Z:
    break;
  }
  return {Axis::X, Axis::Y};
}

/// Plane family name ("yz", "xz", "xy") for a normal axis.
std::string plane_family_name(Axis normal);
/// Inverse of plane_family_name; throws ValidationError on unknown names.
Axis plane_family_from_name(const std::string &name);

struct Dims {
  int x = 0, y = 0, z = 0;

  int operator[](Axis a) const noexcept {
    return a == Axis::X ? x : (a == Axis::Y ? y : z);
  }
  std::size_t count() const noexcept {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
           static_cast<std::size_t>(z);
  }
  bool operator==(const Dims &) const = default;
};

/// Integer voxel box, inclusive lo and exclusive hi per axis.
struct Box3 {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};

  int lo_of(Axis a) const noexcept { return lo[index(a)]; }
  int hi_of(Axis a) const noexcept { return hi[index(a)]; }
  int extent(Axis a) const noexcept { return hi[index(a)] - lo[index(a)]; }
  /// Floor midpoint along an axis.
  int mid(Axis a) const noexcept { return lo_of(a) + extent(a) / 2; }
  std::size_t voxel_count() const noexcept {
    return static_cast<std::size_t>(extent(Axis::X)) * extent(Axis::Y) *
           extent(Axis::Z);
  }
  bool operator==(const Box3 &) const = default;
};

/// Axis-aligned integer rectangle in a plane's (u, v) coordinates.
struct Rect2i {
  int u0 = 0, v0 = 0, u1 = 0, v1 = 0;

  int width() const noexcept { return u1 - u0; }
  int height() const noexcept { return v1 - v0; }
  std::int64_t area() const noexcept {
    return static_cast<std::int64_t>(width()) * height();
  }
  bool empty() const noexcept { return u1 <= u0 || v1 <= v0; }
  bool operator==(const Rect2i &) const = default;
};

/// True when two closed rectangles overlap with positive area or share an
/// edge segment of positive length. Corner-only contact does not count.
inline bool edge_connected(const Rect2i &a, const Rect2i &b) noexcept {
  const int du = std::min(a.u1, b.u1) - std::max(a.u0, b.u0);
  const int dv = std::min(a.v1, b.v1) - std::max(a.v0, b.v0);
  return (du > 0 && dv >= 0) || (du >= 0 && dv > 0);
}

inline Rect2i bounding_union(const Rect2i &a, const Rect2i &b) noexcept {
  return {std::min(a.u0, b.u0), std::min(a.v0, b.v0), std::max(a.u1, b.u1),
          std::max(a.v1, b.v1)};
}

} // namespace sliceforge
