#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sliceforge/error.hpp"
#include "sliceforge/layout.hpp"

using namespace sliceforge;

namespace {

std::vector<FeatureVector> random_vectors(int n, std::mt19937_64 &rng) {
  std::normal_distribution<double> g(0, 1);
  std::vector<FeatureVector> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].slice = i;
    const double t = g(rng);
    out[i].v = {0.5 + 0.3 * t, 0.5 + 0.1 * g(rng), 0.5 - 0.2 * t + 0.05 * g(rng),
                0.02 * g(rng)};
  }
  return out;
}

double dot(const Vec4d &a, const Vec4d &b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

} // namespace

TEST_CASE("feature vectors normalize slice centres and assembly position") {
  using fixture::make_slice;
  const std::vector<Slice> s = {make_slice(0, Axis::X, 4, {0, 0, 8, 4}),
                                make_slice(1, Axis::Y, 2, {2, 4, 6, 8})};
  const auto v = build_vectors(s, {1, 0}, {8, 8, 8});
  REQUIRE(v.size() == 2);
  CHECK(v[0].v == Vec4d{0.5, 0.5, 0.25, 1.0});
  CHECK(v[1].v == Vec4d{0.5, 0.25, 0.75, 0.0});
  CHECK_THROWS_AS(build_vectors(s, {1}, {8, 8, 8}), ValidationError);
}

TEST_CASE("PCA basis matches a Jacobi eigen-decomposition") {
  std::mt19937_64 rng(2);
  const auto vecs = random_vectors(50, rng);
  const PcaResult r = pca_2d(vecs);

  std::array<std::array<double, 4>, 4> cov{};
  for (const auto &f : vecs)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        cov[a][b] += (f.v[a] - r.mean[a]) * (f.v[b] - r.mean[b]) / vecs.size();
  const auto [vals, rows] = oracle::jacobi4(cov);

  for (int c = 0; c < 2; ++c) {
    CHECK(r.variance[c] == doctest::Approx(vals[c]).epsilon(1e-9));
    CHECK(std::fabs(dot(r.basis[c], Vec4d{rows[c][0], rows[c][1], rows[c][2], rows[c][3]})) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(std::fabs(dot(r.basis[0], r.basis[0]) - 1) < 1e-9);
  CHECK(std::fabs(dot(r.basis[1], r.basis[1]) - 1) < 1e-9);
  CHECK(std::fabs(dot(r.basis[0], r.basis[1])) < 1e-9);
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    Vec4d d;
    for (int a = 0; a < 4; ++a)
      d[a] = vecs[i].v[a] - r.mean[a];
    CHECK(r.points[i][0] == doctest::Approx(dot(d, r.basis[0])));
    CHECK(r.points[i][1] == doctest::Approx(dot(d, r.basis[1])));
  }
}

TEST_CASE("PCA of identical vectors projects to the origin") {
  std::vector<FeatureVector> v(3);
  for (auto &f : v)
    f.v = {0.2, 0.4, 0.6, 0.8};
  const PcaResult r = pca_2d(v);
  for (const auto &p : r.points)
    CHECK(p == Vec2d{0, 0});
}

TEST_CASE("k-means ends at a fixed point of Lloyd's update") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec2d> pts(60);
  for (auto &p : pts)
    p = {u(rng), u(rng)};
  for (int k = 1; k <= 5; ++k) {
    const ClusterModel m = kmeans(pts, k, 42);
    REQUIRE(static_cast<int>(m.centroids.size()) == k);
    std::vector<Vec2d> sum(k, {0, 0});
    std::vector<int> count(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const int a = m.assignment[i];
      for (int c = 0; c < k; ++c) {
        const double da = std::hypot(pts[i][0] - m.centroids[a][0], pts[i][1] - m.centroids[a][1]);
        const double dc = std::hypot(pts[i][0] - m.centroids[c][0], pts[i][1] - m.centroids[c][1]);
        CHECK(da <= dc + 1e-12);
      }
      sum[a][0] += pts[i][0];
      sum[a][1] += pts[i][1];
      ++count[a];
    }
    for (int c = 0; c < k; ++c) {
      REQUIRE(count[c] > 0);
      CHECK(m.centroids[c][0] == doctest::Approx(sum[c][0] / count[c]));
      CHECK(m.centroids[c][1] == doctest::Approx(sum[c][1] / count[c]));
    }
  }
}

TEST_CASE("k-means is reproducible for a seed") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Vec2d> pts(40);
  for (auto &p : pts)
    p = {u(rng), u(rng)};
  CHECK(kmeans(pts, 3, 7).assignment == kmeans(pts, 3, 7).assignment);
}

TEST_CASE("the elbow finds two well separated blobs") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0, 0.05);
  std::vector<Vec2d> pts;
  for (int i = 0; i < 20; ++i)
    pts.push_back({-1 + g(rng), g(rng)});
  for (int i = 0; i < 20; ++i)
    pts.push_back({1 + g(rng), g(rng)});
  const ClusterModel m = kmeans_elbow(pts, 6, 0);
  CHECK(m.k == 2);
  CHECK(m.wcss.size() == 6);
  CHECK(m.assignment[0] != m.assignment[39]);
  // A single point cannot be split.
  CHECK(kmeans_elbow({{0.5, 0.5}}, 6, 0).k == 1);
}

TEST_CASE("page sizes parse presets and custom sizes") {
  CHECK(parse_page_size("A4").width_mm == 210);
  CHECK(parse_page_size("A3").height_mm == 420);
  const auto c = parse_page_size("300x150.5");
  CHECK(c.width_mm == 300);
  CHECK(c.height_mm == 150.5);
  CHECK_THROWS_AS(parse_page_size("letter"), ValidationError);
  CHECK_THROWS_AS(parse_page_size("0x100"), ValidationError);
}

TEST_CASE("partitions split the page in proportion to cluster area") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.1, 5);
  for (int k = 1; k <= 6; ++k) {
    std::vector<int> order(k);
    std::vector<double> areas(k);
    for (int c = 0; c < k; ++c) {
      order[c] = k - 1 - c;
      areas[c] = u(rng);
    }
    const IRect page{5000, 5000, 200000, 287000};
    const auto parts = partition_page(page, order, areas);
    REQUIRE(static_cast<int>(parts.size()) == k);
    double total = 0;
    for (double a : areas)
      total += a;
    double covered = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      CHECK(page.contains(parts[i].rect));
      const double share = static_cast<double>(parts[i].rect.w) * parts[i].rect.h /
                           (static_cast<double>(page.w) * page.h);
      CHECK(std::fabs(share - areas[parts[i].cluster] / total) < 0.01);
      covered += share;
      for (std::size_t j = i + 1; j < parts.size(); ++j)
        CHECK_FALSE(parts[i].rect.overlaps(parts[j].rect));
    }
    CHECK(covered == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("packing places every slice inside its cluster's partition at a maximal scale") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto slices = fixture::random_slices(12, rng, 30);
    std::vector<int> order(slices.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = static_cast<int>(order.size() - 1 - i);
    LayoutOptions opt;
    opt.seed = trial;
    const std::vector<int> stoppers = {0, 3};
    const PageLayout l = pack(slices, order, stoppers, {64, 64, 64}, opt);
    REQUIRE(l.placements.size() == slices.size());
    CHECK(l.scale >= l.min_scale);
    for (std::size_t a = 0; a < l.placements.size(); ++a) {
      const auto &p = l.placements[a];
      CHECK(p.slice == static_cast<int>(a));
      bool inside = false;
      for (const auto &part : l.partitions)
        inside = inside || (part.cluster == p.cluster && part.rect.contains(p.footprint));
      CHECK(inside);
      for (std::size_t b = a + 1; b < l.placements.size(); ++b)
        if (l.placements[b].page == p.page)
          CHECK_FALSE(p.footprint.overlaps(l.placements[b].footprint));
    }
    PageLayout probe = l;
    CHECK_FALSE(pack_at_scale(slices, order, stoppers, opt, probe, l.scale * 1.01));
  }
}

TEST_CASE("packing fails with a hint when even the legible scale overflows") {
  std::vector<Slice> slices;
  for (int i = 0; i < 40; ++i)
    slices.push_back(fixture::make_slice(i, Axis::X, i, {0, 0, 2, 2}, {i}));
  std::vector<int> order(40);
  std::iota(order.begin(), order.end(), 0);
  LayoutOptions opt;
  opt.page = parse_page_size("40x40");
  opt.slot_width_mm = 2;
  try {
    pack(slices, order, {}, {64, 64, 64}, opt);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError &e) {
    CHECK(e.hint().find("--sheets 2") != std::string::npos);
  }
}

TEST_CASE("more sheets never shrink the scale") {
  std::mt19937_64 rng(8);
  const auto slices = fixture::random_slices(16, rng, 80);
  std::vector<int> order(slices.size());
  std::iota(order.begin(), order.end(), 0);
  LayoutOptions one, two;
  two.sheets = 2;
  const double s1 = pack(slices, order, {}, {64, 64, 64}, one).scale;
  const PageLayout l2 = pack(slices, order, {}, {64, 64, 64}, two);
  CHECK(l2.scale >= s1 * 0.995);
  CHECK(l2.sheets <= 2);
}
