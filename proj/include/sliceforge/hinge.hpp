#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sliceforge/octree.hpp"

namespace sliceforge {

enum class HingeKind { UpDown, CutThrough };
enum class SlotKind { TopHalf, BottomHalf, FullWindow, None };

std::string to_string(HingeKind k);
std::string to_string(SlotKind k);
HingeKind hinge_kind_from_string(const std::string &s);
SlotKind slot_kind_from_string(const std::string &s);

/// Intersection segment of two perpendicular slices, with its slot design.
///
/// The segment runs along the planes' shared axis (the hinge axis). On
/// `slice_a` it sits at in-plane coordinate `pos_on_a` (which equals
/// slice_b's plane), and symmetrically for `slice_b`.
struct Hinge {
  int id = 0;
  int slice_a = 0; // first plane family
  int slice_b = 0; // second plane family
  int pos_on_a = 0;
  int pos_on_b = 0;
  int seg_lo = 0;
  int seg_hi = 0;
  HingeKind kind = HingeKind::UpDown;
  SlotKind slot_a = SlotKind::TopHalf;
  SlotKind slot_b = SlotKind::BottomHalf;
  std::optional<int> stopper_on;

  int length() const noexcept { return seg_hi - seg_lo; }
  bool touches(int slice) const noexcept { return slice == slice_a || slice == slice_b; }
  int other(int slice) const noexcept { return slice == slice_a ? slice_b : slice_a; }
  int position_on(int slice) const noexcept {
    return slice == slice_a ? pos_on_a : pos_on_b;
  }
  SlotKind slot_on(int slice) const noexcept {
    return slice == slice_a ? slot_a : slot_b;
  }
};

/// Cut-through hinge `j` on `host_slice` lies strictly between up-down
/// hinges `i` and `k`; j must be assembled before both.
struct PrecedenceTriple {
  int i = 0;
  int j = 0;
  int k = 0;
  int host_slice = 0;
  bool operator==(const PrecedenceTriple &) const = default;
};

/// One hinge per perpendicular slice pair whose rectangles meet along a
/// segment of positive length. Equal extents along the hinge axis give an
/// up-down hinge; otherwise the slice with the longer extent (ties: lower id)
/// carries a full window and the other a none slot. A stopper is added when
/// the none slot lies on the small slice's boundary edge.
///
/// Ids are assigned in (slice_a plane, position on slice_a, segment start)
/// order; `slices` must be unified and indexed by id.
std::vector<Hinge> compute_hinges(const std::vector<Slice> &slices,
                                  const SlicingPlanes &planes);

/// Hinge joining the two root-node slices: longest segment, then larger
/// combined slice area, then smaller id. Throws InfeasibleError if the root
/// slices do not meet.
int find_backbone(const std::vector<Hinge> &hinges,
                  const std::vector<Slice> &slices, int root_node = 0);

/// For every slice, each cut-through hinge with its none slot on that slice is
/// paired with the nearest up-down hinges strictly on either side.
std::vector<PrecedenceTriple> collect_triples(const std::vector<Hinge> &hinges,
                                              const std::vector<Slice> &slices);

/// Integer 3D line of a hinge: fixed coordinates on both slice normals plus
/// the segment along the hinge axis. Coordinates are indexed by axis.
struct HingeLine {
  std::array<int, 3> fixed{0, 0, 0}; // unused entry for the hinge axis is 0
  Axis axis = Axis::Z;
  int lo = 0, hi = 0;
  bool operator==(const HingeLine &) const = default;
};

HingeLine hinge_line(const Hinge &h, const std::vector<Slice> &slices);

} // namespace sliceforge
