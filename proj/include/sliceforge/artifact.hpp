#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"
#include "sliceforge/hinge.hpp"
#include "sliceforge/layout.hpp"
#include "sliceforge/octree.hpp"
#include "sliceforge/order.hpp"
#include "sliceforge/render.hpp"

namespace sliceforge {

using nlohmann::json;

inline constexpr const char *kVersion = "0.1.0";

/// Output of the slice stage: the unified slices plus the model context later
/// stages need.
struct SliceArtifact {
  Dims dims;
  Vec3d spacing{1, 1, 1};
  SlicingPlanes planes;
  int level = 3;
  int node_count = 1;
  std::vector<Slice> slices;
  std::vector<OctreeCut> cuts;
  std::vector<std::string> warnings;
};

struct HingeArtifact {
  SliceArtifact model;
  std::vector<Hinge> hinges;
  int backbone = 0;
  std::vector<PrecedenceTriple> triples;
};

struct PlanArtifact {
  OrderProblem problem;
  AssemblyPlan plan;
  VerificationReport report;
};

struct LayoutArtifact {
  PageLayout layout;
  double slot_width_mm = 1.0;
  std::uint64_t seed = 0;
  std::vector<int> stopper_slices;
};

/// Throws ValidationError naming every key of `fields` absent from `j`.
void require_fields(const json &j, std::initializer_list<const char *> fields,
                    const std::string &what);

void to_json(json &j, const Dims &d);
void from_json(const json &j, Dims &d);
void to_json(json &j, const Box3 &b);
void from_json(const json &j, Box3 &b);
void to_json(json &j, const Slice &s);
void from_json(const json &j, Slice &s);
void to_json(json &j, const OctreeCut &c);
void from_json(const json &j, OctreeCut &c);
void to_json(json &j, const Hinge &h);
void from_json(const json &j, Hinge &h);
void to_json(json &j, const PrecedenceTriple &t);
void from_json(const json &j, PrecedenceTriple &t);
void to_json(json &j, const IRect &r);
void from_json(const json &j, IRect &r);
void to_json(json &j, const Placement &p);
void from_json(const json &j, Placement &p);
void to_json(json &j, const StabilityReport &r);

/// Order problem as {hinge_ids, backbone, triples, w_distance, big_m};
/// big_m defaults to n + 1 when absent.
json to_json(const OrderProblem &p);
OrderProblem order_problem_from_json(const json &j);

json to_json(const SliceArtifact &a);
json to_json(const HingeArtifact &a);
json to_json(const PlanArtifact &a);
json to_json(const LayoutArtifact &a);

SliceArtifact slice_artifact_from_json(const json &j);
HingeArtifact hinge_artifact_from_json(const json &j);
PlanArtifact plan_artifact_from_json(const json &j);
LayoutArtifact layout_artifact_from_json(const json &j);

json read_json(const std::filesystem::path &path, const std::string &stage);
void write_json(const json &j, const std::filesystem::path &path);
void write_text(const std::string &text, const std::filesystem::path &path);

} // namespace sliceforge
