#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sliceforge/artifact.hpp"
#include "sliceforge/error.hpp"
#include "sliceforge/mesh.hpp"
#include "sliceforge/volume.hpp"

namespace sliceforge {

enum class InputKind { Volume, Meshes };

struct BuildConfig {
  InputKind kind = InputKind::Volume;
  std::filesystem::path input;  // raw volume
  std::filesystem::path header; // volume sidecar
  std::string tf;               // transfer-function path, or "auto" for meshes
  std::vector<std::filesystem::path> meshes;
  int resolution = 128;         // voxels per axis for mesh input
  int level = 3;
  SlicingPlanes planes;         // default: the two z-containing families
  std::string page = "A4";
  int sheets = 1;
  double slot_width_mm = 1.0;
  double dpi = 4.0;             // raster pixels per mm
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  bool perforate = false;
  int exact_threshold = 16;
  int k_max = 6;
};

/// Throws ValidationError for inconsistent settings.
void validate(const BuildConfig &config);

/// JSON config file form; unknown keys are rejected so typos surface.
BuildConfig config_from_json(const json &j);
/// Echo of every setting except the output directory.
json config_echo(const BuildConfig &config);

struct LoadedModel {
  LabelVolume labels;
  TransferFunction tf;
  std::vector<std::string> warnings;
};

/// Ingest and quantize: reads a raw volume with its transfer function, or
/// voxelizes meshes with a generated one.
LoadedModel load_model(const BuildConfig &config);

SliceArtifact stage_slice(const LabelVolume &labels, int level, const SlicingPlanes &planes);
HingeArtifact stage_hinge(const SliceArtifact &slices);
PlanArtifact stage_order(const HingeArtifact &hinges, int exact_threshold = 16);
LayoutArtifact stage_pack(const HingeArtifact &hinges, const PlanArtifact &plan,
                          const LayoutOptions &options);

LayoutOptions layout_options(const BuildConfig &config);

struct ExportResult {
  json manifest;
  StabilityReport stability;
  std::vector<std::filesystem::path> pages;
  std::vector<std::string> warnings;
};

/// Writes pages/page-<n>.svg, instructions.svg, manifest.json and
/// stability.json under `out`.
ExportResult stage_export(const LoadedModel &model, const HingeArtifact &hinges,
                          const PlanArtifact &plan, const LayoutArtifact &layout,
                          const RenderOptions &render, const json &options_echo,
                          std::uint64_t seed, const std::filesystem::path &out);

struct BuildSummary {
  int slices = 0;
  int hinges = 0;
  int clusters = 0;
  double scale = 0;
  int pages = 0;
  bool balanced = true;
  bool exact = true;
  std::vector<std::string> warnings;

  std::string text() const;
};

/// Full pipeline, equal to running the stages in sequence.
BuildSummary run_build(const BuildConfig &config);

/// Parses a stage artifact, turning JSON type errors into ValidationError.
template <class F> auto parse_artifact(const json &j, const std::string &what, F &&parse) {
  try {
    return parse(j);
  } catch (const json::exception &e) {
    throw ValidationError(what + ": " + e.what());
  }
}

} // namespace sliceforge
