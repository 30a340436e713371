#include "sliceforge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "sliceforge/error.hpp"

namespace sliceforge {

namespace {

constexpr const char *kStage = "voxelize";

// Column offsets (fractions of a voxel) that keep axis rays off mesh edges
// and vertices lying on voxel-center lattices.
constexpr double kJitterB = 1.7320508e-5;
constexpr double kJitterC = 2.2360679e-5;

struct Projected {
  double b0, c0, b1, c1, b2, c2;
};

/// Sorted ray-hit coordinates along `axis` for every column of a grid.
/// Columns are indexed (ib + nb * ic) over the two remaining axes.
class ColumnHits {
public:
  ColumnHits(int nb, int nc) : nb_(nb), hits_(static_cast<std::size_t>(nb) * nc) {}
  std::vector<double> &at(int ib, int ic) {
    return hits_[static_cast<std::size_t>(ib) + static_cast<std::size_t>(nb_) * ic];
  }
  void sort() {
    for (auto &h : hits_)
      std::sort(h.begin(), h.end());
  }

private:
  int nb_;
  std::vector<std::vector<double>> hits_;
};

bool degenerate(const Vec3d &p0, const Vec3d &p1, const Vec3d &p2) {
  const Vec3d e1{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
  const Vec3d e2{p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
  const Vec3d n{e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
                e1[0] * e2[1] - e1[1] * e2[0]};
  const double area2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
  const double scale = e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2] +
                       e2[0] * e2[0] + e2[1] * e2[1] + e2[2] * e2[2];
  return area2 <= 1e-24 * scale * scale || scale == 0.0;
}

/// Hit parameter along `a` of the ray at (pb, pc) through a triangle, or NaN.
double ray_hit(const Vec3d &p0, const Vec3d &p1, const Vec3d &p2, int a, int b,
               int c, double pb, double pc) {
  const double d0 = (p1[b] - p0[b]) * (pc - p0[c]) - (p1[c] - p0[c]) * (pb - p0[b]);
  const double d1 = (p2[b] - p1[b]) * (pc - p1[c]) - (p2[c] - p1[c]) * (pb - p1[b]);
  const double d2 = (p0[b] - p2[b]) * (pc - p2[c]) - (p0[c] - p2[c]) * (pb - p2[b]);
  const bool neg = d0 < 0 || d1 < 0 || d2 < 0;
  const bool pos = d0 > 0 || d1 > 0 || d2 > 0;
  if (neg && pos)
    return std::numeric_limits<double>::quiet_NaN();
  const double sum = d0 + d1 + d2;
  if (sum == 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  // d_i are barycentric weights of the opposite vertices.
  return (d1 * p0[a] + d2 * p1[a] + d0 * p2[a]) / sum;
}

/// Inside flags per voxel of a grid for one mesh using rays along `a`.
void cast_axis(const TriangleMesh &mesh, const Dims &dims, const Vec3d &origin,
               const Vec3d &spacing, int a, std::vector<std::uint8_t> &votes,
               int &degenerate_count, bool count_degenerate) {
  const int b = (a + 1) % 3;
  const int c = (a + 2) % 3;
  const int n[3] = {dims.x, dims.y, dims.z};
  ColumnHits hits(n[b], n[c]);

  auto column_coord = [&](int axis, int i, double jitter) {
    return origin[axis] + (i + jitter) * spacing[axis];
  };

  for (const auto &tri : mesh.triangles) {
    const Vec3d &p0 = mesh.vertices[tri[0]];
    const Vec3d &p1 = mesh.vertices[tri[1]];
    const Vec3d &p2 = mesh.vertices[tri[2]];
    if (degenerate(p0, p1, p2)) {
      if (count_degenerate)
        ++degenerate_count;
      continue;
    }
    const double bmin = std::min({p0[b], p1[b], p2[b]});
    const double bmax = std::max({p0[b], p1[b], p2[b]});
    const double cmin = std::min({p0[c], p1[c], p2[c]});
    const double cmax = std::max({p0[c], p1[c], p2[c]});
    const int ib0 = std::max(0, static_cast<int>(std::floor((bmin - origin[b]) / spacing[b])) - 1);
    const int ib1 = std::min(n[b] - 1, static_cast<int>(std::ceil((bmax - origin[b]) / spacing[b])) + 1);
    const int ic0 = std::max(0, static_cast<int>(std::floor((cmin - origin[c]) / spacing[c])) - 1);
    const int ic1 = std::min(n[c] - 1, static_cast<int>(std::ceil((cmax - origin[c]) / spacing[c])) + 1);
    for (int ic = ic0; ic <= ic1; ++ic) {
      const double pc = column_coord(c, ic, kJitterC);
      if (pc < cmin || pc > cmax)
        continue;
      for (int ib = ib0; ib <= ib1; ++ib) {
        const double pb = column_coord(b, ib, kJitterB);
        if (pb < bmin || pb > bmax)
          continue;
        const double t = ray_hit(p0, p1, p2, a, b, c, pb, pc);
        if (!std::isnan(t))
          hits.at(ib, ic).push_back(t);
      }
    }
  }
  hits.sort();

  int idx[3];
  for (int ic = 0; ic < n[c]; ++ic) {
    for (int ib = 0; ib < n[b]; ++ib) {
      const auto &h = hits.at(ib, ic);
      if (h.empty())
        continue;
      std::size_t crossed = 0;
      idx[b] = ib;
      idx[c] = ic;
      for (int ia = 0; ia < n[a]; ++ia) {
        const double t = origin[a] + ia * spacing[a];
        while (crossed < h.size() && h[crossed] < t)
          ++crossed;
        if (crossed % 2 == 1) {
          idx[a] = ia;
          const std::size_t off = static_cast<std::size_t>(idx[0]) +
                                  static_cast<std::size_t>(n[0]) *
                                      (static_cast<std::size_t>(idx[1]) +
                                       static_cast<std::size_t>(n[1]) * idx[2]);
          ++votes[off];
        }
      }
    }
  }
}

int parity_along(const TriangleMesh &mesh, const Vec3d &p, int a) {
  const int b = (a + 1) % 3;
  const int c = (a + 2) % 3;
  const double pb = p[b] + kJitterB * 1e-3;
  const double pc = p[c] + kJitterC * 1e-3;
  int crossings = 0;
  for (const auto &tri : mesh.triangles) {
    const Vec3d &p0 = mesh.vertices[tri[0]];
    const Vec3d &p1 = mesh.vertices[tri[1]];
    const Vec3d &p2 = mesh.vertices[tri[2]];
    if (degenerate(p0, p1, p2))
      continue;
    const double t = ray_hit(p0, p1, p2, a, b, c, pb, pc);
    if (!std::isnan(t) && t < p[a])
      ++crossings;
  }
  return crossings % 2;
}

Vec3d centroid(const TriangleMesh &m) {
  Vec3d s{0, 0, 0};
  for (const auto &v : m.vertices)
    for (int k = 0; k < 3; ++k)
      s[k] += v[k];
  for (int k = 0; k < 3; ++k)
    s[k] /= static_cast<double>(m.vertices.size());
  return s;
}

} // namespace

TriangleMesh load_obj(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string(), kStage);
  TriangleMesh mesh;
  mesh.name = path.stem().string();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag))
      continue;
    if (tag == "v") {
      Vec3d v;
      if (!(ls >> v[0] >> v[1] >> v[2]))
        throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": malformed vertex",
                              kStage);
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string tok;
      while (ls >> tok) {
        const int raw = std::stoi(tok.substr(0, tok.find('/')));
        const int vi = raw < 0 ? static_cast<int>(mesh.vertices.size()) + raw : raw - 1;
        face.push_back(vi);
      }
      if (face.size() < 3)
        throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": face with fewer than 3 vertices",
                              kStage);
      for (std::size_t k = 1; k + 1 < face.size(); ++k)
        mesh.triangles.push_back({face[0], face[k], face[k + 1]});
    } else if (tag == "o" || tag == "g") {
      std::string name;
      if (ls >> name)
        mesh.name = name;
    }
  }
  return mesh;
}

void save_obj(const TriangleMesh &mesh, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << "o " << mesh.name << "\n";
  out.precision(17);
  for (const auto &v : mesh.vertices)
    out << "v " << v[0] << " " << v[1] << " " << v[2] << "\n";
  for (const auto &t : mesh.triangles)
    out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

void validate(const MeshSet &set) {
  if (set.meshes.empty())
    throw ValidationError("mesh set is empty", kStage);
  for (const auto &m : set.meshes) {
    if (m.vertices.empty() || m.triangles.empty())
      throw ValidationError("mesh '" + m.name + "' is empty", kStage);
    const int nv = static_cast<int>(m.vertices.size());
    for (const auto &t : m.triangles)
      for (int i : t)
        if (i < 0 || i >= nv)
          throw ValidationError("mesh '" + m.name +
                                    "' has a triangle index out of range",
                                kStage);
  }
}

bool contains_point(const TriangleMesh &mesh, const Vec3d &p) {
  const int votes = parity_along(mesh, p, 0) + parity_along(mesh, p, 1) +
                    parity_along(mesh, p, 2);
  return votes >= 2;
}

double palette_hue(int i, int n) noexcept {
  if (n <= 1 || i < 0 || i >= n)
    return 0.0;
  const double step = (std::sqrt(5.0) - 1.0) / 2.0;
  auto frac = [&](int k) {
    const double f = k * step;
    return f - std::floor(f);
  };
  const double mine = frac(i);
  int rank = 0;
  for (int k = 0; k < n; ++k)
    rank += frac(k) < mine;
  return 360.0 * rank / n;
}

Voxelization voxelize_meshes(const MeshSet &set, std::array<int, 3> resolution) {
  validate(set);
  for (int r : resolution)
    if (r < 8)
      throw ValidationError("voxelization resolution must be >= 8 per axis",
                            kStage);

  Vec3d lo{std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Vec3d hi{-lo[0], -lo[1], -lo[2]};
  for (const auto &m : set.meshes)
    for (const auto &v : m.vertices)
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }

  const Dims dims{resolution[0], resolution[1], resolution[2]};
  Vec3d spacing, origin;
  for (int k = 0; k < 3; ++k) {
    double extent = hi[k] - lo[k];
    if (extent <= 0)
      extent = 1.0;
    spacing[k] = extent / (resolution[k] - 2);
    origin[k] = lo[k] - 0.5 * spacing[k];
  }

  const int n = static_cast<int>(set.meshes.size());

  // Nesting depth: number of other meshes containing a majority of probe
  // vertices of this mesh.
  std::vector<int> depth(n, 0);
  for (int i = 0; i < n; ++i) {
    const auto &mi = set.meshes[i];
    const std::size_t nv = mi.vertices.size();
    const std::size_t probes[3] = {0, nv / 3, (2 * nv) / 3};
    for (int j = 0; j < n; ++j) {
      if (i == j)
        continue;
      int inside = 0;
      for (std::size_t p : probes)
        inside += contains_point(set.meshes[j], mi.vertices[p]) ? 1 : 0;
      if (inside >= 2)
        ++depth[i];
    }
  }
  Vec3d center;
  for (int k = 0; k < 3; ++k)
    center[k] = origin[k] + 0.5 * (resolution[k] - 1) * spacing[k];
  std::vector<double> center_dist(n);
  for (int i = 0; i < n; ++i) {
    const Vec3d c = centroid(set.meshes[i]);
    center_dist[i] = std::hypot(c[0] - center[0], c[1] - center[1], c[2] - center[2]);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (depth[a] != depth[b])
      return depth[a] < depth[b];
    if (center_dist[a] != center_dist[b])
      return center_dist[a] > center_dist[b];
    return a < b;
  });
  std::vector<int> rank(n);
  for (int r = 0; r < n; ++r)
    rank[order[r]] = r;

  Voxelization out;
  out.depth_rank = rank;

  std::vector<float> scalars(dims.count(), 0.0f);
  std::vector<int> best_rank(dims.count(), -1);
  std::vector<std::uint8_t> votes(dims.count());
  for (int i = 0; i < n; ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (int a = 0; a < 3; ++a)
      cast_axis(set.meshes[i], dims, origin, spacing, a, votes,
                out.degenerate_triangles, a == 0);
    for (std::size_t v = 0; v < votes.size(); ++v) {
      if (votes[v] >= 2 && rank[i] > best_rank[v]) {
        best_rank[v] = rank[i];
        scalars[v] = static_cast<float>(i + 1);
      }
    }
  }

  std::vector<TfBin> bins;
  for (int i = 0; i < n; ++i) {
    TfBin bin;
    bin.lo = i + 0.5;
    bin.hi = i + 1.5;
    bin.opacity = n == 1 ? 1.0 : 0.35 + 0.65 * rank[i] / static_cast<double>(n - 1);
    bin.color = hsv_to_rgb(palette_hue(i, n), 0.65, 0.95);
    bins.push_back(bin);
  }
  out.tf = TransferFunction(std::move(bins));
  out.volume = ScalarVolume(dims, spacing, origin, std::move(scalars));
  return out;
}

} // namespace sliceforge
