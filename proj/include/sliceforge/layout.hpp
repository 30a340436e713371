#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sliceforge/maxrects.hpp"
#include "sliceforge/octree.hpp"

namespace sliceforge {

using Vec4d = std::array<double, 4>;
using Vec2d = std::array<double, 2>;

/// Slice center in normalized volume coordinates plus normalized assembly
/// position, all in [0, 1].
struct FeatureVector {
  int slice = 0;
  Vec4d v{0, 0, 0, 0};
};

std::vector<FeatureVector> build_vectors(const std::vector<Slice> &slices,
                                         const std::vector<int> &slice_order,
                                         const Dims &dims);

struct PcaResult {
  Vec4d mean{0, 0, 0, 0};
  std::array<Vec4d, 2> basis{};    // orthonormal, decreasing variance
  Vec2d variance{0, 0};
  std::vector<Vec2d> points;       // projections, in input order
};

/// Projection of the centered vectors onto the top two covariance
/// eigenvectors. Directions without variance get zero projections.
PcaResult pca_2d(const std::vector<FeatureVector> &vectors);

struct ClusterModel {
  int k = 1;
  std::vector<Vec2d> centroids;
  std::vector<int> assignment;  // per input point
  std::vector<double> wcss;     // wcss[k-1] for every k evaluated
};

/// Lloyd's k-means from a farthest-point start. The first center is drawn
/// with `seed`; the rest are successive farthest points (ties: lowest index).
ClusterModel kmeans(const std::vector<Vec2d> &points, int k, std::uint64_t seed,
                    int max_iterations = 100);

/// Runs k-means for k = 1..min(k_max, n) and keeps the smallest k whose
/// marginal WCSS gain (W_k - W_{k+1}) / W_1 drops below `gain_threshold`.
ClusterModel kmeans_elbow(const std::vector<Vec2d> &points, int k_max,
                          std::uint64_t seed, double gain_threshold = 0.10);

double wcss(const std::vector<Vec2d> &points, const std::vector<Vec2d> &centroids,
            const std::vector<int> &assignment);

struct PageSize {
  std::string name = "A4";
  double width_mm = 210.0;
  double height_mm = 297.0;
};

/// "A4", "A3" or "<W>x<H>" in millimetres.
PageSize parse_page_size(const std::string &text);

struct Partition {
  int cluster = 0;
  IRect rect; // micrometres, page coordinates
};

/// kd-split of `area` among clusters listed in `cluster_order`; each cluster
/// gets one leaf whose share of the area equals its share of `cluster_areas`.
/// Cuts alternate axes, starting across the longer side.
std::vector<Partition> partition_page(const IRect &area,
                                      const std::vector<int> &cluster_order,
                                      const std::vector<double> &cluster_areas);

struct LayoutOptions {
  PageSize page;
  int sheets = 1;
  double margin_mm = 5.0;
  double gutter_mm = 4.0;
  double slot_width_mm = 1.0;
  int k_max = 6;
  std::uint64_t seed = 0;
};

struct Placement {
  int slice = 0;
  int page = 0;
  int cluster = 0;
  IRect footprint;     // micrometres, includes padding
  bool rotated = false;
  double x_mm = 0;     // slice rectangle origin on the page (top-left)
  double y_mm = 0;
  double width_mm = 0; // as drawn on the page (after rotation)
  double height_mm = 0;
};

struct PageLayout {
  PageSize page;
  int sheets = 1;      // sheets used
  double margin_mm = 5.0;
  double gutter_mm = 4.0;
  double scale = 1.0;  // mm per voxel, shared by every slice
  double min_scale = 0.0;
  ClusterModel clusters;
  std::vector<Partition> partitions; // same on every sheet
  std::vector<Placement> placements;
};

/// Padding around a slice footprint: half the gutter, plus room for stopper
/// tabs when the slice carries one.
double slice_padding_mm(const LayoutOptions &opt, bool has_stopper);

/// Packs every slice at the largest single scale (found by bisection to
/// 0.5%) for which MaxRects-BSSF fits all slices into their cluster's
/// partition across the available sheets. Throws InfeasibleError when even
/// the minimum legible scale does not fit.
PageLayout pack(const std::vector<Slice> &slices,
                const std::vector<int> &slice_order,
                const std::vector<int> &stopper_slices, const Dims &dims,
                const LayoutOptions &options);

/// Tries one scale with fixed clusters and partitions. Exposed for tests.
bool pack_at_scale(const std::vector<Slice> &slices,
                   const std::vector<int> &slice_order,
                   const std::vector<int> &stopper_slices,
                   const LayoutOptions &options, PageLayout &layout, double scale);

/// Lowest scale considered legible: every slice's shorter side spans at least
/// four slot widths.
double minimum_legible_scale(const std::vector<Slice> &slices,
                             const LayoutOptions &options);

} // namespace sliceforge
