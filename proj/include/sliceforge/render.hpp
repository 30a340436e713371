#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sliceforge/hinge.hpp"
#include "sliceforge/layout.hpp"
#include "sliceforge/octree.hpp"
#include "sliceforge/order.hpp"
#include "sliceforge/volume.hpp"

namespace sliceforge {

struct RgbaF {
  double r = 0, g = 0, b = 0, a = 0;
  bool operator==(const RgbaF &) const = default;
};

/// Printed content of one slice: the label volume sampled on the slice
/// plane. Pixels are stored as labels plus a palette so large slices stay
/// compact; row 0 is the top of the slice (high v).
struct SliceRaster {
  int slice = 0;
  int width = 0;
  int height = 0;
  double px_per_mm = 4.0;
  std::vector<std::uint16_t> labels; // row-major
  std::vector<RgbaF> palette;        // palette[label]; palette[0] transparent

  const RgbaF &pixel(int col, int row) const {
    return palette[labels[static_cast<std::size_t>(row) * width + col]];
  }
  /// 8-bit RGBA bytes, row-major.
  std::vector<std::uint8_t> rgba8() const;
};

/// Nearest-neighbour sampling of the voxel layer just above the slice plane
/// (the last layer for a plane on the upper boundary). Raster size is the
/// slice extent times `scale` (mm per voxel) times `px_per_mm`, rounded up.
SliceRaster rasterize_slice(const LabelVolume &labels, const TransferFunction &tf,
                            const Slice &slice, double scale, double px_per_mm);

/// Minimal PNG (8-bit RGBA, zlib-compressed, no filtering).
std::string encode_png(int width, int height, const std::vector<std::uint8_t> &rgba);
std::string base64_encode(const std::string &bytes);

/// One slot cut on one slice, in model (voxel) coordinates. Along the hinge
/// axis the span is kept in doubled coordinates so the up-down split point
/// at a half voxel stays an integer.
struct SlotCut {
  int hinge = 0;
  int slice = 0;
  SlotKind kind = SlotKind::None;
  Axis along = Axis::Z;  // hinge axis
  Axis across = Axis::X; // in-plane axis the slot position is measured on
  int pos = 0;           // model coordinate along `across`
  int span_lo2 = 0;      // 2x model coordinate along `along`
  int span_hi2 = 0;
  int seg_lo = 0;        // full hinge segment
  int seg_hi = 0;
};

/// Cuts for every hinge slot that removes material (none slots emit no cut).
std::vector<SlotCut> slot_cuts(const std::vector<Hinge> &hinges,
                               const std::vector<Slice> &slices);

/// 3D segment a slot cut belongs to, reconstructed from the slice it sits on.
HingeLine inverse_map(const SlotCut &cut, const std::vector<Slice> &slices);

/// Stopper tab protruding one slot width beyond the small slice's edge.
struct StopperTab {
  int hinge = 0;
  int slice = 0;
  Axis across = Axis::X; // edge normal within the slice plane
  int edge = 0;          // model coordinate of the edge
  int outward = 1;       // +1 beyond the hi edge, -1 beyond the lo edge
  int seg_lo = 0;
  int seg_hi = 0;
};

std::vector<StopperTab> stopper_tabs(const std::vector<Hinge> &hinges,
                                     const std::vector<Slice> &slices);

/// Maps model coordinates of a placed slice to page millimetres.
struct SliceFrame {
  Placement placement;
  Rect2i extent;
  double scale = 1.0;

  std::array<double, 2> to_page(double u, double v) const;
  std::array<double, 2> to_model(double x_mm, double y_mm) const;
};

struct MmRect {
  double x = 0, y = 0, w = 0, h = 0;
  bool intersects(const MmRect &o) const noexcept {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
};

struct LabelPlacement {
  int slice = 0;
  int number = 0; // 1-based assembly order
  MmRect on_slice;
  MmRect on_frame;
  bool collided = false;
};

struct RenderOptions {
  double slot_width_mm = 1.0;
  double px_per_mm = 4.0;
  bool perforate = false;
};

/// A slot as drawn: the clipped rectangle plus its centre line end points
/// (model span lo and hi) in page millimetres.
struct EmittedSlot {
  SlotCut cut;
  int page = 0;
  MmRect rect;
  std::array<double, 2> line_lo{0, 0};
  std::array<double, 2> line_hi{0, 0};
  double width_mm = 0;
};

struct PageSet {
  std::vector<std::string> svgs; // index = page
  std::vector<LabelPlacement> labels;
  std::vector<EmittedSlot> slots;
  std::vector<std::string> warnings;
};

/// One SVG per used sheet: art layer (embedded rasters), cut layer (outlines
/// with stopper tabs, slot rectangles) and label layer (order numbers on the
/// slice and on the frame beside it). `rasters` may be empty.
PageSet emit_pages(const PageLayout &layout, const std::vector<SliceRaster> &rasters,
                   const std::vector<Slice> &slices, const std::vector<Hinge> &hinges,
                   const std::vector<int> &slice_order, const RenderOptions &options);

struct InstructionStep {
  int step = 0;
  int hinge = 0;
  int inserted = 0; // slice order numbers (1-based)
  int into = 0;
  HingeKind kind = HingeKind::UpDown;
  std::optional<int> stopper; // slice order number carrying the tab
  std::string text;
};

std::vector<InstructionStep> instruction_steps(const AssemblyPlan &plan,
                                               const std::vector<Hinge> &hinges,
                                               const std::vector<int> &slice_order);

/// Step list plus a view down the hinge axis showing every slice as a line
/// labelled with its order number and the octree cuts as dashed lines.
std::string emit_instructions(const std::vector<InstructionStep> &steps,
                              const std::vector<Slice> &slices,
                              const std::vector<int> &slice_order,
                              const std::vector<OctreeCut> &cuts,
                              const SlicingPlanes &planes, const Dims &dims);

struct StabilityReport {
  std::array<Axis, 2> axes{Axis::X, Axis::Y}; // horizontal axes
  std::array<double, 2> net_torque{0, 0};     // voxel^3
  std::array<double, 2> tolerance{0, 0};
  double min_slot_width_mm = 0;
  bool slot_width_flagged = false;
  int stopper_count = 0;
  bool balanced = true;
  std::vector<std::string> notes;
};

/// Torque of slice areas about the vertical axis through the volume center,
/// one component per horizontal axis. Balanced when every component is within
/// 5% of total area times the half extent along that axis.
StabilityReport stability_check(const std::vector<Slice> &slices,
                                const SlicingPlanes &planes, const Dims &dims,
                                double slot_width_mm, int stopper_count,
                                double min_slot_width_mm = 1.0);

} // namespace sliceforge
