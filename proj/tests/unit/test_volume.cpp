#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "sliceforge/error.hpp"
#include "sliceforge/volume.hpp"

using namespace sliceforge;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "sliceforge-unit";
  fs::create_directories(dir);
  return dir / name;
}
} // namespace

TEST_CASE("transfer function bins are half-open and labels rank visible bins") {
  TransferFunction tf({{0, 10, {0, 0, 0}, 0.0}, {10, 20, {1, 0, 0}, 0.4}, {20, 30, {0, 1, 0}, 1.0}});
  CHECK(tf.visible_count() == 2);
  CHECK(tf.label(5) == 0);      // opacity-0 bin is background
  CHECK(tf.label(10) == 1);     // lo is inclusive
  CHECK(tf.label(19.999) == 1);
  CHECK(tf.label(20) == 2);     // hi is exclusive
  CHECK(tf.label(30) == 0);
  CHECK(tf.label(-1) == 0);
  CHECK(tf.opacity(15) == doctest::Approx(0.4));
  CHECK(tf.bin_for_label(2).color == Rgb{0, 1, 0});
  CHECK(importance(15, tf) == doctest::Approx(6.0));
  CHECK(importance(5, tf) == 0.0);
}

TEST_CASE("transfer function rejects overlap, bad ranges and colors") {
  CHECK_THROWS_AS(TransferFunction({{0, 10, {}, 1}, {5, 20, {}, 1}}), ValidationError);
  CHECK_THROWS_AS(TransferFunction({{10, 10, {}, 1}}), ValidationError);
  CHECK_THROWS_AS(TransferFunction({{0, 1, {}, 1.5}}), ValidationError);
  CHECK_THROWS_AS(TransferFunction({{0, 1, {2, 0, 0}, 1}}), ValidationError);
}

TEST_CASE("scalar volume validates length and finiteness") {
  CHECK_THROWS_WITH_AS(ScalarVolume({2, 2, 2}, {1, 1, 1}, {0, 0, 0}, std::vector<float>(7)),
                       "expected 8 scalars, got 7", ValidationError);
  std::vector<float> v(8, 0.f);
  v[3] = std::nanf("");
  CHECK_THROWS_AS(ScalarVolume({2, 2, 2}, {1, 1, 1}, {0, 0, 0}, v), ValidationError);
  CHECK_THROWS_AS(ScalarVolume({2, 2, 2}, {0, 1, 1}, {0, 0, 0}, std::vector<float>(8)),
                  ValidationError);
}

TEST_CASE("quantize labels every voxel through the transfer function") {
  const auto vol = fixture::checker_volume(4);
  const auto labels = quantize(vol, fixture::two_bin_tf());
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        CHECK(labels.at(x, y, z) == 1 + (x + y + z) % 2);
  CHECK(labels.max_label() == 2);
}

TEST_CASE("raw volumes round-trip for every dtype") {
  std::vector<float> s;
  for (int i = 0; i < 24; ++i)
    s.push_back(static_cast<float>(i * 3));
  const ScalarVolume v({2, 3, 4}, {0.5, 1, 2}, {1, 2, 3}, s);
  for (ScalarType t : {ScalarType::U8, ScalarType::U16, ScalarType::F32}) {
    const auto raw = scratch("v-" + scalar_type_name(t) + ".raw");
    const auto hdr = scratch("v-" + scalar_type_name(t) + ".json");
    save_volume(v, t, raw, hdr);
    CHECK(fs::file_size(raw) == 24 * scalar_width(t));
    const ScalarVolume back = load_volume(raw, hdr);
    CHECK(back.dims() == v.dims());
    CHECK(back.spacing() == v.spacing());
    CHECK(back.scalars() == v.scalars());
  }
}

TEST_CASE("load_volume reports size mismatches and missing header fields") {
  const auto raw = scratch("short.raw");
  const auto hdr = scratch("short.json");
  {
    std::ofstream(hdr) << R"({"dims":[4,4,4],"spacing_mm":[1,1,1],"origin_mm":[0,0,0],"dtype":"u8"})";
    std::ofstream(raw, std::ios::binary) << std::string(60, '\0');
  }
  try {
    load_volume(raw, hdr);
    FAIL("expected a size error");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("expected 64 scalars (64 bytes), got 60 bytes") !=
          std::string::npos);
  }
  {
    std::ofstream(hdr) << R"({"dims":[4,4,4]})";
  }
  try {
    read_volume_header(hdr);
    FAIL("expected a header error");
  } catch (const ValidationError &e) {
    const std::string msg = e.what();
    CHECK(msg.find("spacing_mm") != std::string::npos);
    CHECK(msg.find("origin_mm") != std::string::npos);
    CHECK(msg.find("dtype") != std::string::npos);
  }
  CHECK_THROWS_AS(load_volume(scratch("absent.raw"), scratch("absent.json")), IoError);
}

TEST_CASE("transfer functions round-trip through JSON") {
  const auto path = scratch("tf.json");
  save_transfer_function(fixture::two_bin_tf(), path);
  const auto tf = load_transfer_function(path);
  REQUIRE(tf.bins().size() == 2);
  CHECK(tf.bins()[1].color == Rgb{1, 1, 0});
  CHECK(tf.bins()[0].opacity == 0.5);
}

TEST_CASE("plane family names") {
  CHECK(plane_family_from_name("yz") == Axis::X);
  CHECK(plane_family_from_name("sagittal") == Axis::Y);
  CHECK(plane_family_from_name("axial") == Axis::Z);
  CHECK(plane_family_name(Axis::Y) == "xz");
  CHECK_THROWS_AS(plane_family_from_name("diagonal"), ValidationError);
}

TEST_CASE("hsv conversion hits the primaries") {
  CHECK(hsv_to_rgb(0, 1, 1) == Rgb{1, 0, 0});
  CHECK(hsv_to_rgb(120, 1, 1) == Rgb{0, 1, 0});
  CHECK(hsv_to_rgb(240, 1, 1) == Rgb{0, 0, 1});
  const Rgb grey = hsv_to_rgb(77, 0, 0.5);
  CHECK(grey.r == doctest::Approx(0.5));
  CHECK(grey.g == doctest::Approx(0.5));
}
