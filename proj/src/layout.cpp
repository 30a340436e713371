#include "sliceforge/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>

#include <Eigen/Dense>

#include "sliceforge/error.hpp"

namespace sliceforge {

namespace {

constexpr const char *kStage = "pack";
constexpr double kUmPerMm = 1000.0;

double sq_dist(const Vec2d &a, const Vec2d &b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

int nearest(const Vec2d &p, const std::vector<Vec2d> &centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

void split(const IRect &area, std::span<const int> clusters,
           const std::vector<double> &areas, int depth, bool first_vertical,
           std::vector<Partition> &out) {
  if (clusters.size() == 1) {
    out.push_back({clusters[0], area});
    return;
  }
  const std::size_t half = clusters.size() / 2;
  double left = 0, total = 0;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    total += areas[clusters[i]];
    if (i < half)
      left += areas[clusters[i]];
  }
  const double frac = total > 0 ? left / total : 0.5;
  const bool vertical = (depth % 2 == 0) == first_vertical;
  IRect a = area, b = area;
  if (vertical) {
    const std::int64_t cut = std::llround(static_cast<double>(area.w) * frac);
    a.w = cut;
    b.x = area.x + cut;
    b.w = area.w - cut;
  } else {
    const std::int64_t cut = std::llround(static_cast<double>(area.h) * frac);
    a.h = cut;
    b.y = area.y + cut;
    b.h = area.h - cut;
  }
  split(a, clusters.subspan(0, half), areas, depth + 1, first_vertical, out);
  split(b, clusters.subspan(half), areas, depth + 1, first_vertical, out);
}

std::int64_t to_um_ceil(double mm) {
  return static_cast<std::int64_t>(std::ceil(mm * kUmPerMm - 1e-6));
}

} // namespace

std::vector<FeatureVector> build_vectors(const std::vector<Slice> &slices,
                                         const std::vector<int> &slice_order,
                                         const Dims &dims) {
  std::map<int, int> position;
  for (std::size_t i = 0; i < slice_order.size(); ++i)
    position[slice_order[i]] = static_cast<int>(i);
  const double denom = slice_order.size() > 1 ? static_cast<double>(slice_order.size() - 1) : 1.0;

  std::vector<FeatureVector> out;
  for (const auto &s : slices) {
    auto it = position.find(s.id);
    if (it == position.end())
      throw ValidationError("slice " + std::to_string(s.id) +
                                " is missing from the slice order",
                            kStage);
    std::array<double, 3> center{};
    center[index(s.normal)] = s.plane;
    center[index(s.u_axis())] = 0.5 * (s.extent.u0 + s.extent.u1);
    center[index(s.v_axis())] = 0.5 * (s.extent.v0 + s.extent.v1);
    FeatureVector f;
    f.slice = s.id;
    for (int a = 0; a < 3; ++a)
      f.v[a] = center[a] / dims[axis_from_index(a)];
    f.v[3] = slice_order.size() > 1 ? it->second / denom : 0.0;
    out.push_back(f);
  }
  return out;
}

PcaResult pca_2d(const std::vector<FeatureVector> &vectors) {
  PcaResult r;
  const std::size_t n = vectors.size();
  if (n == 0)
    throw ValidationError("PCA needs at least one vector", kStage);

  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const auto &f : vectors)
    mean += Eigen::Vector4d(f.v[0], f.v[1], f.v[2], f.v[3]);
  mean /= static_cast<double>(n);
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  for (const auto &f : vectors) {
    const Eigen::Vector4d d = Eigen::Vector4d(f.v[0], f.v[1], f.v[2], f.v[3]) - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(cov);
  // Eigenvalues ascend; the top two are columns 3 and 2.
  const double trace = std::max(cov.trace(), 0.0);
  const double tiny = 1e-12 * std::max(1.0, trace);
  for (int c = 0; c < 2; ++c) {
    Eigen::Vector4d e = eig.eigenvectors().col(3 - c);
    int big = 0;
    for (int i = 1; i < 4; ++i)
      if (std::fabs(e[i]) > std::fabs(e[big]) + 1e-12)
        big = i;
    if (e[big] < 0)
      e = -e;
    for (int i = 0; i < 4; ++i)
      r.basis[c][i] = e[i];
    r.variance[c] = std::max(eig.eigenvalues()[3 - c], 0.0);
  }
  for (int i = 0; i < 4; ++i)
    r.mean[i] = mean[i];

  for (const auto &f : vectors) {
    Vec2d p{0, 0};
    for (int c = 0; c < 2; ++c) {
      if (r.variance[c] <= tiny)
        continue;
      double dot = 0;
      for (int i = 0; i < 4; ++i)
        dot += (f.v[i] - r.mean[i]) * r.basis[c][i];
      p[c] = dot;
    }
    r.points.push_back(p);
  }
  return r;
}

double wcss(const std::vector<Vec2d> &points, const std::vector<Vec2d> &centroids,
            const std::vector<int> &assignment) {
  double total = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    total += sq_dist(points[i], centroids[assignment[i]]);
  return total;
}

ClusterModel kmeans(const std::vector<Vec2d> &points, int k, std::uint64_t seed,
                    int max_iterations) {
  const int n = static_cast<int>(points.size());
  if (n == 0 || k < 1)
    throw ValidationError("k-means needs points and k >= 1", kStage);
  k = std::min(k, n);

  std::mt19937_64 rng(seed);
  std::vector<int> centers{static_cast<int>(rng() % static_cast<std::uint64_t>(n))};
  std::vector<double> dmin(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    const Vec2d &last = points[centers.back()];
    int far = 0;
    for (int i = 0; i < n; ++i) {
      dmin[i] = std::min(dmin[i], sq_dist(points[i], last));
      if (dmin[i] > dmin[far])
        far = i;
    }
    centers.push_back(far);
  }

  ClusterModel m;
  m.k = k;
  for (int c : centers)
    m.centroids.push_back(points[c]);
  m.assignment.assign(n, -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int c = nearest(points[i], m.centroids);
      changed = changed || c != m.assignment[i];
      m.assignment[i] = c;
    }
    if (!changed)
      break;
    std::vector<Vec2d> sum(k, Vec2d{0, 0});
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      sum[m.assignment[i]][0] += points[i][0];
      sum[m.assignment[i]][1] += points[i][1];
      ++count[m.assignment[i]];
    }
    for (int c = 0; c < k; ++c)
      if (count[c] > 0)
        m.centroids[c] = {sum[c][0] / count[c], sum[c][1] / count[c]};
  }
  for (int i = 0; i < n; ++i)
    m.assignment[i] = nearest(points[i], m.centroids);
  m.wcss.assign(k, 0.0);
  m.wcss[k - 1] = wcss(points, m.centroids, m.assignment);
  return m;
}

ClusterModel kmeans_elbow(const std::vector<Vec2d> &points, int k_max,
                          std::uint64_t seed, double gain_threshold) {
  if (k_max < 1)
    throw ValidationError("k_max must be >= 1", kStage);
  if (points.empty())
    throw ValidationError("k-means needs at least one point", kStage);
  const int kk = std::min<int>(k_max, static_cast<int>(points.size()));
  std::vector<ClusterModel> models;
  std::vector<double> w;
  for (int k = 1; k <= kk; ++k) {
    models.push_back(kmeans(points, k, seed));
    w.push_back(models.back().wcss[k - 1]);
  }
  int chosen = kk;
  if (w[0] <= 0.0) {
    chosen = 1;
  } else {
    for (int k = 1; k < kk; ++k) {
      if ((w[k - 1] - w[k]) / w[0] < gain_threshold) {
        chosen = k;
        break;
      }
    }
  }
  ClusterModel m = models[chosen - 1];
  m.wcss = w;
  return m;
}

PageSize parse_page_size(const std::string &text) {
  if (text == "A4" || text == "a4")
    return {"A4", 210.0, 297.0};
  if (text == "A3" || text == "a3")
    return {"A3", 297.0, 420.0};
  const auto x = text.find_first_of("xX");
  if (x != std::string::npos) {
    try {
      std::size_t used_w = 0, used_h = 0;
      const double w = std::stod(text.substr(0, x), &used_w);
      const double h = std::stod(text.substr(x + 1), &used_h);
      if (used_w == x && used_h == text.size() - x - 1 && w > 0 && h > 0)
        return {text, w, h};
    } catch (const std::exception &) {
    }
  }
  throw ValidationError("page must be A4, A3 or <W>x<H> in mm, got '" + text + "'");
}

std::vector<Partition> partition_page(const IRect &area,
                                      const std::vector<int> &cluster_order,
                                      const std::vector<double> &cluster_areas) {
  if (cluster_order.empty())
    throw ValidationError("page partition needs at least one cluster", kStage);
  std::vector<Partition> out;
  split(area, std::span<const int>(cluster_order), cluster_areas, 0,
        area.w >= area.h, out);
  return out;
}

double slice_padding_mm(const LayoutOptions &opt, bool has_stopper) {
  return 0.5 * opt.gutter_mm + (has_stopper ? opt.slot_width_mm : 0.0);
}

double minimum_legible_scale(const std::vector<Slice> &slices,
                             const LayoutOptions &options) {
  int shortest = std::numeric_limits<int>::max();
  for (const auto &s : slices)
    shortest = std::min({shortest, s.extent.width(), s.extent.height()});
  return 4.0 * options.slot_width_mm / std::max(shortest, 1);
}

bool pack_at_scale(const std::vector<Slice> &slices,
                   const std::vector<int> &slice_order,
                   const std::vector<int> &stopper_slices,
                   const LayoutOptions &options, PageLayout &layout, double scale) {
  const std::set<int> stoppers(stopper_slices.begin(), stopper_slices.end());
  std::map<int, int> cluster_of;
  for (std::size_t i = 0; i < slices.size(); ++i)
    cluster_of[slices[i].id] = layout.clusters.assignment[i];
  std::map<int, const Slice *> by_id;
  for (const auto &s : slices)
    by_id[s.id] = &s;

  std::vector<std::pair<std::int64_t, std::int64_t>> sizes(slice_order.size());
  std::vector<double> pads(slice_order.size());
  for (std::size_t i = 0; i < slice_order.size(); ++i) {
    const Slice &s = *by_id.at(slice_order[i]);
    pads[i] = slice_padding_mm(options, stoppers.count(s.id) > 0);
    sizes[i] = {to_um_ceil(s.extent.width() * scale + 2 * pads[i]),
                to_um_ceil(s.extent.height() * scale + 2 * pads[i])};
  }

  std::vector<Placement> placements;
  for (const auto &part : layout.partitions) {
    std::vector<std::size_t> items;
    for (std::size_t i = 0; i < slice_order.size(); ++i)
      if (cluster_of.at(slice_order[i]) == part.cluster)
        items.push_back(i);
    for (int sheet = 0; sheet < options.sheets && !items.empty(); ++sheet) {
      MaxRectsBin bin(part.rect);
      std::vector<std::size_t> remaining;
      for (const auto &p : bin.insert_all(sizes, items, remaining)) {
        const Slice &s = *by_id.at(slice_order[p.item]);
        Placement pl;
        pl.slice = s.id;
        pl.page = sheet;
        pl.cluster = part.cluster;
        pl.footprint = p.rect;
        pl.rotated = p.rotated;
        pl.x_mm = p.rect.x / kUmPerMm + pads[p.item];
        pl.y_mm = p.rect.y / kUmPerMm + pads[p.item];
        const double w = s.extent.width() * scale, h = s.extent.height() * scale;
        pl.width_mm = p.rotated ? h : w;
        pl.height_mm = p.rotated ? w : h;
        placements.push_back(pl);
      }
      items = std::move(remaining);
    }
    if (!items.empty())
      return false;
  }

  std::sort(placements.begin(), placements.end(),
            [](const Placement &a, const Placement &b) { return a.slice < b.slice; });
  layout.placements = std::move(placements);
  layout.scale = scale;
  int used = 1;
  for (const auto &p : layout.placements)
    used = std::max(used, p.page + 1);
  layout.sheets = used;
  return true;
}

PageLayout pack(const std::vector<Slice> &slices,
                const std::vector<int> &slice_order,
                const std::vector<int> &stopper_slices, const Dims &dims,
                const LayoutOptions &options) {
  if (slices.empty())
    throw ValidationError("nothing to pack", kStage);
  if (options.sheets < 1)
    throw ValidationError("sheets must be >= 1", kStage);
  if (!(options.slot_width_mm > 0))
    throw ValidationError("slot width must be > 0", kStage);

  PageLayout layout;
  layout.page = options.page;
  layout.margin_mm = options.margin_mm;
  layout.gutter_mm = options.gutter_mm;

  const auto vectors = build_vectors(slices, slice_order, dims);
  const PcaResult pca = pca_2d(vectors);
  layout.clusters = kmeans_elbow(pca.points, options.k_max, options.seed);

  std::vector<double> cluster_area(layout.clusters.k, 0.0);
  for (std::size_t i = 0; i < slices.size(); ++i)
    cluster_area[layout.clusters.assignment[i]] +=
        static_cast<double>(slices[i].extent.area());
  std::vector<int> cluster_order(layout.clusters.k);
  std::iota(cluster_order.begin(), cluster_order.end(), 0);
  std::stable_sort(cluster_order.begin(), cluster_order.end(), [&](int a, int b) {
    return layout.clusters.centroids[a][0] < layout.clusters.centroids[b][0];
  });

  const double pw = options.page.width_mm - 2 * options.margin_mm;
  const double ph = options.page.height_mm - 2 * options.margin_mm;
  if (pw <= 0 || ph <= 0)
    throw ValidationError("page margins leave no printable area", kStage);
  const IRect printable{std::llround(options.margin_mm * kUmPerMm),
                        std::llround(options.margin_mm * kUmPerMm),
                        std::llround(pw * kUmPerMm), std::llround(ph * kUmPerMm)};
  layout.partitions = partition_page(printable, cluster_order, cluster_area);

  const double s_min = minimum_legible_scale(slices, options);
  layout.min_scale = s_min;
  auto fits = [&](double s) {
    PageLayout probe = layout;
    return pack_at_scale(slices, slice_order, stopper_slices, options, probe, s);
  };
  if (!fits(s_min)) {
    throw InfeasibleError(
        "slices do not fit even at the minimum legible scale (" +
            std::to_string(s_min) + " mm/voxel)",
        kStage,
        "use a larger page or more sheets (--sheets " +
            std::to_string(options.sheets + 1) + ")");
  }

  double total_area = 0;
  for (const auto &s : slices)
    total_area += static_cast<double>(s.extent.area());
  const double s_cap = std::sqrt(options.sheets * pw * ph / total_area);

  double lo = s_min;
  if (fits(s_cap)) {
    lo = s_cap;
  } else {
    for (int round = 0; round < 64; ++round) {
      double hi = s_cap;
      while (hi / lo > 1.005) {
        const double mid = std::sqrt(lo * hi);
        if (fits(mid))
          lo = mid;
        else
          hi = mid;
      }
      // Packing is not monotone in scale; keep climbing while a 1% larger
      // scale still fits.
      if (lo * 1.01 < s_cap && fits(lo * 1.01))
        lo *= 1.01;
      else
        break;
    }
  }
  pack_at_scale(slices, slice_order, stopper_slices, options, layout, lo);
  return layout;
}

} // namespace sliceforge
