#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sliceforge/geometry.hpp"

namespace sliceforge {

using Vec3d = std::array<double, 3>;

struct Rgb {
  double r = 0, g = 0, b = 0;
  bool operator==(const Rgb &) const = default;
};

/// Dense scalar grid, x fastest. Immutable once constructed.
class ScalarVolume {
public:
  ScalarVolume() = default;
  /// Validates the invariants (length, positive spacing, finite values) and
  /// throws ValidationError on violation.
  ScalarVolume(Dims dims, Vec3d spacing, Vec3d origin,
               std::vector<float> scalars);

  const Dims &dims() const noexcept { return dims_; }
  const Vec3d &spacing() const noexcept { return spacing_; }
  const Vec3d &origin() const noexcept { return origin_; }
  const std::vector<float> &scalars() const noexcept { return scalars_; }

  std::size_t offset(int x, int y, int z) const noexcept {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_.x) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims_.y) * static_cast<std::size_t>(z));
  }
  float at(int x, int y, int z) const noexcept { return scalars_[offset(x, y, z)]; }

private:
  Dims dims_;
  Vec3d spacing_{1, 1, 1};
  Vec3d origin_{0, 0, 0};
  std::vector<float> scalars_;
};

/// One transfer-function bin over the half-open intensity range [lo, hi).
struct TfBin {
  double lo = 0;
  double hi = 0;
  Rgb color;
  double opacity = 0;
};

/// Quantized intensity to (color, opacity) map. Intensities matching no bin
/// are background (opacity 0).
class TransferFunction {
public:
  TransferFunction() = default;
  /// Throws ValidationError if bins overlap, are unsorted, or carry
  /// out-of-range colors/opacities.
  explicit TransferFunction(std::vector<TfBin> bins);

  const std::vector<TfBin> &bins() const noexcept { return bins_; }

  /// Index into bins() of the bin containing `intensity`, if any.
  std::optional<std::size_t> find_bin(double intensity) const noexcept;
  double opacity(double intensity) const noexcept;
  /// 0 for background or opacity-0 bins, otherwise the 1-based rank of the
  /// matching bin among bins with opacity > 0.
  std::uint16_t label(double intensity) const noexcept;
  /// Number of bins with opacity > 0.
  std::size_t visible_count() const noexcept { return visible_.size(); }
  /// Bin for a nonzero label.
  const TfBin &bin_for_label(std::uint16_t label) const;

private:
  std::vector<TfBin> bins_;
  std::vector<std::size_t> visible_;      // label-1 -> bin index
  std::vector<std::uint16_t> bin_label_;  // bin index -> label
};

class LabelVolume {
public:
  LabelVolume() = default;
  LabelVolume(Dims dims, Vec3d spacing, Vec3d origin,
              std::vector<std::uint16_t> labels);

  const Dims &dims() const noexcept { return dims_; }
  const Vec3d &spacing() const noexcept { return spacing_; }
  const Vec3d &origin() const noexcept { return origin_; }
  const std::vector<std::uint16_t> &labels() const noexcept { return labels_; }
  std::uint16_t max_label() const noexcept { return max_label_; }

  std::size_t offset(int x, int y, int z) const noexcept {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_.x) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims_.y) * static_cast<std::size_t>(z));
  }
  std::uint16_t at(int x, int y, int z) const noexcept {
    return labels_[offset(x, y, z)];
  }

private:
  Dims dims_;
  Vec3d spacing_{1, 1, 1};
  Vec3d origin_{0, 0, 0};
  std::vector<std::uint16_t> labels_;
  std::uint16_t max_label_ = 0;
};

enum class ScalarType { U8, U16, F32 };

struct VolumeHeader {
  Dims dims;
  Vec3d spacing{1, 1, 1};
  Vec3d origin{0, 0, 0};
  ScalarType dtype = ScalarType::F32;
};

std::size_t scalar_width(ScalarType t) noexcept;
std::string scalar_type_name(ScalarType t);

VolumeHeader read_volume_header(const std::filesystem::path &header);
ScalarVolume load_volume(const std::filesystem::path &data,
                         const std::filesystem::path &header);
/// Writes raw little-endian data plus the JSON sidecar. Values are converted
/// to `dtype` (rounded and clamped for integer types).
void save_volume(const ScalarVolume &volume, ScalarType dtype,
                 const std::filesystem::path &data,
                 const std::filesystem::path &header);

TransferFunction load_transfer_function(const std::filesystem::path &path);
void save_transfer_function(const TransferFunction &tf,
                            const std::filesystem::path &path);
/// In-memory forms of the transfer-function JSON ({"bins": [...]});
/// `source` names the input in error messages.
TransferFunction parse_transfer_function(const std::string &text,
                                         const std::string &source = "transfer function");
std::string transfer_function_json(const TransferFunction &tf);

LabelVolume quantize(const ScalarVolume &volume, const TransferFunction &tf);

/// Intensity scaled by its visibility factor (the bin opacity).
double importance(double intensity, const TransferFunction &tf) noexcept;

/// Fully-saturated-ish HSV to RGB, hue in degrees.
Rgb hsv_to_rgb(double hue_deg, double saturation, double value) noexcept;

} // namespace sliceforge
