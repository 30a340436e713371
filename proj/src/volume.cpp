#include "sliceforge/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "sliceforge/error.hpp"

namespace sliceforge {

using nlohmann::json;

namespace {

constexpr const char *kIngest = "ingest";

json read_json_file(const std::filesystem::path &path, const char *stage) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string(), stage);
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ValidationError(path.string() + ": malformed JSON (" + e.what() + ")",
                          stage);
  }
}

Vec3d read_vec3(const json &j, const char *key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3)
    throw ValidationError(std::string("header field '") + key +
                              "' must be an array of 3 numbers",
                          kIngest);
  return {j[key][0].get<double>(), j[key][1].get<double>(),
          j[key][2].get<double>()};
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

} // namespace

std::string plane_family_name(Axis normal) {
  switch (normal) {
  case Axis::X:
    return "yz";
  case Axis::Y:
    return "xz";
  case Axis::Z:
    break;
  }
  return "xy";
}

Axis plane_family_from_name(const std::string &name) {
  if (name == "yz" || name == "coronal")
    return Axis::X;
  if (name == "xz" || name == "sagittal")
    return Axis::Y;
  if (name == "xy" || name == "axial")
    return Axis::Z;
  throw ValidationError("unknown plane family '" + name +
                        "' (expected yz, xz or xy)");
}

// ---------------------------------------------------------------------------

ScalarVolume::ScalarVolume(Dims dims, Vec3d spacing, Vec3d origin,
                           std::vector<float> scalars)
    : dims_(dims), spacing_(spacing), origin_(origin),
      scalars_(std::move(scalars)) {
  if (dims_.x < 1 || dims_.y < 1 || dims_.z < 1)
    throw ValidationError("volume dims must each be >= 1", kIngest);
  for (double s : spacing_)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ValidationError("volume spacing must be strictly positive",
                            kIngest);
  if (scalars_.size() != dims_.count()) {
    std::ostringstream msg;
    msg << "expected " << dims_.count() << " scalars, got " << scalars_.size();
    throw ValidationError(msg.str(), kIngest);
  }
  for (std::size_t i = 0; i < scalars_.size(); ++i)
    if (!std::isfinite(scalars_[i]))
      throw ValidationError("non-finite intensity at scalar index " +
                                std::to_string(i),
                            kIngest);
}

TransferFunction::TransferFunction(std::vector<TfBin> bins)
    : bins_(std::move(bins)) {
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    const auto &b = bins_[i];
    if (!(b.lo < b.hi))
      throw ValidationError("transfer-function bin " + std::to_string(i) +
                            " has lo >= hi");
    if (!in_unit(b.opacity))
      throw ValidationError("transfer-function bin " + std::to_string(i) +
                            " opacity outside [0,1]");
    if (!in_unit(b.color.r) || !in_unit(b.color.g) || !in_unit(b.color.b))
      throw ValidationError("transfer-function bin " + std::to_string(i) +
                            " color outside [0,1]");
    if (i > 0 && b.lo < bins_[i - 1].hi)
      throw ValidationError("transfer-function bins must be sorted and "
                            "non-overlapping (bin " +
                            std::to_string(i) + ")");
  }
  bin_label_.assign(bins_.size(), 0);
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    if (bins_[i].opacity > 0.0) {
      visible_.push_back(i);
      bin_label_[i] = static_cast<std::uint16_t>(visible_.size());
    }
  }
}

std::optional<std::size_t>
TransferFunction::find_bin(double intensity) const noexcept {
  auto it = std::upper_bound(
      bins_.begin(), bins_.end(), intensity,
      [](double v, const TfBin &b) { return v < b.lo; });
  if (it == bins_.begin())
    return std::nullopt;
  --it;
  if (intensity >= it->lo && intensity < it->hi)
    return static_cast<std::size_t>(it - bins_.begin());
  return std::nullopt;
}

double TransferFunction::opacity(double intensity) const noexcept {
  auto bin = find_bin(intensity);
  return bin ? bins_[*bin].opacity : 0.0;
}

std::uint16_t TransferFunction::label(double intensity) const noexcept {
  auto bin = find_bin(intensity);
  return bin ? bin_label_[*bin] : 0;
}

const TfBin &TransferFunction::bin_for_label(std::uint16_t label) const {
  if (label == 0 || label > visible_.size())
    throw ValidationError("label " + std::to_string(label) +
                          " has no visible transfer-function bin");
  return bins_[visible_[label - 1]];
}

LabelVolume::LabelVolume(Dims dims, Vec3d spacing, Vec3d origin,
                         std::vector<std::uint16_t> labels)
    : dims_(dims), spacing_(spacing), origin_(origin),
      labels_(std::move(labels)) {
  if (labels_.size() != dims_.count())
    throw ValidationError("label volume length does not match dims");
  if (!labels_.empty())
    max_label_ = *std::max_element(labels_.begin(), labels_.end());
}

// ---------------------------------------------------------------------------

std::size_t scalar_width(ScalarType t) noexcept {
  switch (t) {
  case ScalarType::U8:
    return 1;
  case ScalarType::U16:
    return 2;
  case ScalarType::F32:
    return 4;
  }
  return 0;
}

std::string scalar_type_name(ScalarType t) {
  switch (t) {
  case ScalarType::U8:
    return "u8";
  case ScalarType::U16:
    return "u16";
  case ScalarType::F32:
    return "f32";
  }
  return "?";
}

VolumeHeader read_volume_header(const std::filesystem::path &header) {
  const json j = read_json_file(header, kIngest);
  std::vector<std::string> missing;
  for (const char *key : {"dims", "spacing_mm", "origin_mm", "dtype"})
    if (!j.contains(key))
      missing.emplace_back(key);
  if (!missing.empty()) {
    std::string msg = header.string() + ": missing header fields:";
    for (const auto &m : missing)
      msg += " " + m;
    throw ValidationError(msg, kIngest);
  }

  VolumeHeader h;
  const Vec3d d = read_vec3(j, "dims");
  for (double v : d)
    if (v < 1 || v != std::floor(v))
      throw ValidationError("header dims must be positive integers", kIngest);
  h.dims = {static_cast<int>(d[0]), static_cast<int>(d[1]),
            static_cast<int>(d[2])};
  h.spacing = read_vec3(j, "spacing_mm");
  h.origin = read_vec3(j, "origin_mm");

  const auto dtype = j["dtype"].get<std::string>();
  if (dtype == "u8")
    h.dtype = ScalarType::U8;
  else if (dtype == "u16")
    h.dtype = ScalarType::U16;
  else if (dtype == "f32")
    h.dtype = ScalarType::F32;
  else
    throw ValidationError("unsupported dtype '" + dtype + "'", kIngest);

  if (j.contains("endianness") && j["endianness"].get<std::string>() != "little")
    throw ValidationError("only little-endian volumes are supported", kIngest);
  return h;
}

ScalarVolume load_volume(const std::filesystem::path &data,
                         const std::filesystem::path &header) {
  const VolumeHeader h = read_volume_header(header);

  std::ifstream in(data, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + data.string(), kIngest);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  const std::size_t width = scalar_width(h.dtype);
  const std::size_t expected = h.dims.count();
  if (bytes.size() != expected * width) {
    std::ostringstream msg;
    msg << data.string() << ": expected " << expected << " scalars ("
        << expected * width << " bytes), got " << bytes.size() << " bytes";
    if (bytes.size() % width == 0)
      msg << " (" << bytes.size() / width << " scalars)";
    throw ValidationError(msg.str(), kIngest);
  }

  std::vector<float> scalars(expected);
  const unsigned char *p = bytes.data();
  for (std::size_t i = 0; i < expected; ++i, p += width) {
    switch (h.dtype) {
    case ScalarType::U8:
      scalars[i] = static_cast<float>(p[0]);
      break;
    case ScalarType::U16:
      scalars[i] = static_cast<float>(static_cast<std::uint16_t>(p[0] | (p[1] << 8)));
      break;
    case ScalarType::F32: {
      const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                                 (static_cast<std::uint32_t>(p[1]) << 8) |
                                 (static_cast<std::uint32_t>(p[2]) << 16) |
                                 (static_cast<std::uint32_t>(p[3]) << 24);
      scalars[i] = std::bit_cast<float>(bits);
      if (!std::isfinite(scalars[i]))
        throw ValidationError(data.string() +
                                  ": non-finite intensity at scalar index " +
                                  std::to_string(i),
                              kIngest);
      break;
    }
    }
  }
  return ScalarVolume(h.dims, h.spacing, h.origin, std::move(scalars));
}

void save_volume(const ScalarVolume &volume, ScalarType dtype,
                 const std::filesystem::path &data,
                 const std::filesystem::path &header) {
  std::ofstream out(data, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + data.string());
  std::vector<unsigned char> bytes;
  bytes.reserve(volume.scalars().size() * scalar_width(dtype));
  for (float v : volume.scalars()) {
    switch (dtype) {
    case ScalarType::U8:
      bytes.push_back(static_cast<unsigned char>(
          std::clamp(std::lround(v), 0L, 255L)));
      break;
    case ScalarType::U16: {
      const auto u = static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, 65535L));
      bytes.push_back(static_cast<unsigned char>(u & 0xff));
      bytes.push_back(static_cast<unsigned char>(u >> 8));
      break;
    }
    case ScalarType::F32: {
      const auto bits = std::bit_cast<std::uint32_t>(v);
      for (int s = 0; s < 32; s += 8)
        bytes.push_back(static_cast<unsigned char>((bits >> s) & 0xff));
      break;
    }
    }
  }
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));

  const auto &d = volume.dims();
  json h = {{"dims", {d.x, d.y, d.z}},
            {"spacing_mm", volume.spacing()},
            {"origin_mm", volume.origin()},
            {"dtype", scalar_type_name(dtype)},
            {"endianness", "little"}};
  std::ofstream hout(header);
  if (!hout)
    throw IoError("cannot write " + header.string());
  hout << h.dump(2) << "\n";
}

namespace {

TransferFunction tf_from_json(const json &j, const std::string &source) {
  if (!j.contains("bins") || !j["bins"].is_array())
    throw ValidationError(source + ": missing 'bins' array",
                          "transfer-function");
  std::vector<TfBin> bins;
  for (const auto &b : j["bins"]) {
    std::vector<std::string> missing;
    for (const char *key : {"lo", "hi", "rgb", "opacity"})
      if (!b.contains(key))
        missing.emplace_back(key);
    if (!missing.empty()) {
      std::string msg = source + ": bin missing fields:";
      for (const auto &m : missing)
        msg += " " + m;
      throw ValidationError(msg, "transfer-function");
    }
    TfBin bin;
    bin.lo = b["lo"].get<double>();
    bin.hi = b["hi"].get<double>();
    bin.color = {b["rgb"].at(0).get<double>(), b["rgb"].at(1).get<double>(),
                 b["rgb"].at(2).get<double>()};
    bin.opacity = b["opacity"].get<double>();
    bins.push_back(bin);
  }
  return TransferFunction(std::move(bins));
}

json tf_to_json(const TransferFunction &tf) {
  json bins = json::array();
  for (const auto &b : tf.bins())
    bins.push_back({{"lo", b.lo},
                    {"hi", b.hi},
                    {"rgb", {b.color.r, b.color.g, b.color.b}},
                    {"opacity", b.opacity}});
  return {{"bins", bins}};
}

} // namespace

TransferFunction load_transfer_function(const std::filesystem::path &path) {
  return tf_from_json(read_json_file(path, "transfer-function"), path.string());
}

TransferFunction parse_transfer_function(const std::string &text, const std::string &source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw ValidationError(source + ": " + e.what(), "transfer-function");
  }
  return tf_from_json(j, source);
}

std::string transfer_function_json(const TransferFunction &tf) {
  return tf_to_json(tf).dump(2);
}

void save_transfer_function(const TransferFunction &tf,
                            const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << tf_to_json(tf).dump(2) << "\n";
}

LabelVolume quantize(const ScalarVolume &volume, const TransferFunction &tf) {
  const auto &s = volume.scalars();
  std::vector<std::uint16_t> labels(s.size());
  // Runs of equal intensity are common (background, mesh-derived volumes).
  float last = 0;
  std::uint16_t last_label = tf.label(0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == 0 || s[i] != last) {
      last = s[i];
      last_label = tf.label(last);
    }
    labels[i] = last_label;
  }
  return LabelVolume(volume.dims(), volume.spacing(), volume.origin(),
                     std::move(labels));
}

double importance(double intensity, const TransferFunction &tf) noexcept {
  const double a = tf.opacity(intensity);
  return a == 0.0 ? 0.0 : intensity * a;
}

Rgb hsv_to_rgb(double hue_deg, double saturation, double value) noexcept {
  const double h = std::fmod(std::fmod(hue_deg, 360.0) + 360.0, 360.0) / 60.0;
  const double c = value * saturation;
  const double x = c * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
  const double m = value - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
  case 0: r = c; g = x; break;
  case 1: r = x; g = c; break;
  case 2: g = c; b = x; break;
  case 3: g = x; b = c; break;
  case 4: r = x; b = c; break;
  default: r = c; b = x; break;
  }
  return {r + m, g + m, b + m};
}

} // namespace sliceforge
