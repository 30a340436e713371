#include "sliceforge/artifact.hpp"

#include <fstream>

#include "sliceforge/error.hpp"

namespace sliceforge {

namespace {

std::string axis_name(Axis a) { return std::string(1, "xyz"[index(a)]); }

Axis axis_from_name(const std::string &s) {
  if (s == "x")
    return Axis::X;
  if (s == "y")
    return Axis::Y;
  if (s == "z")
    return Axis::Z;
  throw ValidationError("unknown axis '" + s + "'");
}

void require_kind(const json &j, const char *kind) {
  require_fields(j, {"kind"}, std::string(kind) + " artifact");
  if (j.at("kind") != kind)
    throw ValidationError("expected a '" + std::string(kind) + "' artifact, got '" +
                          j.at("kind").dump() + "'");
}

json planes_json(const SlicingPlanes &p) {
  return json::array({plane_family_name(p.first), plane_family_name(p.second)});
}

SlicingPlanes planes_from(const json &j) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("orientations must list two plane families");
  SlicingPlanes p{plane_family_from_name(j[0].get<std::string>()),
                  plane_family_from_name(j[1].get<std::string>())};
  validate(p);
  return p;
}

template <class T> json list(const std::vector<T> &v) {
  json a = json::array();
  for (const auto &x : v)
    a.push_back(json(x));
  return a;
}

template <class T> std::vector<T> list_of(const json &j, const char *key) {
  std::vector<T> out;
  for (const auto &x : j.at(key))
    out.push_back(x.get<T>());
  return out;
}

} // namespace

void require_fields(const json &j, std::initializer_list<const char *> fields,
                    const std::string &what) {
  if (!j.is_object())
    throw ValidationError(what + " must be a JSON object");
  std::string missing;
  for (const char *f : fields)
    if (!j.contains(f))
      missing += std::string(missing.empty() ? "" : ", ") + f;
  if (!missing.empty())
    throw ValidationError(what + " is missing fields: " + missing);
}

void to_json(json &j, const Dims &d) { j = json::array({d.x, d.y, d.z}); }

void from_json(const json &j, Dims &d) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError("dims must be an array of 3 integers");
  d = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

void to_json(json &j, const Box3 &b) { j = {{"lo", b.lo}, {"hi", b.hi}}; }

void from_json(const json &j, Box3 &b) {
  require_fields(j, {"lo", "hi"}, "box");
  b.lo = j.at("lo").get<std::array<int, 3>>();
  b.hi = j.at("hi").get<std::array<int, 3>>();
}

void to_json(json &j, const Slice &s) {
  j = {{"id", s.id},
       {"family", plane_family_name(s.normal)},
       {"plane", s.plane},
       {"extent", {s.extent.u0, s.extent.v0, s.extent.u1, s.extent.v1}},
       {"source_nodes", s.source_nodes}};
}

void from_json(const json &j, Slice &s) {
  require_fields(j, {"id", "family", "plane", "extent", "source_nodes"}, "slice");
  s.id = j.at("id").get<int>();
  s.normal = plane_family_from_name(j.at("family").get<std::string>());
  s.plane = j.at("plane").get<int>();
  const auto e = j.at("extent").get<std::array<int, 4>>();
  s.extent = {e[0], e[1], e[2], e[3]};
  if (s.extent.empty())
    throw ValidationError("slice " + std::to_string(s.id) + " has an empty extent");
  s.source_nodes = j.at("source_nodes").get<std::vector<int>>();
}

void to_json(json &j, const OctreeCut &c) {
  j = {{"node", c.node},
       {"level", c.level},
       {"normal", axis_name(c.normal)},
       {"plane", c.plane},
       {"bounds", c.bounds}};
}

void from_json(const json &j, OctreeCut &c) {
  require_fields(j, {"node", "level", "normal", "plane", "bounds"}, "octree cut");
  c.node = j.at("node").get<int>();
  c.level = j.at("level").get<int>();
  c.normal = axis_from_name(j.at("normal").get<std::string>());
  c.plane = j.at("plane").get<int>();
  c.bounds = j.at("bounds").get<Box3>();
}

void to_json(json &j, const Hinge &h) {
  j = {{"id", h.id},
       {"slice_a", h.slice_a},
       {"slice_b", h.slice_b},
       {"pos_on_a", h.pos_on_a},
       {"pos_on_b", h.pos_on_b},
       {"segment", {h.seg_lo, h.seg_hi}},
       {"kind", to_string(h.kind)},
       {"slot_a", to_string(h.slot_a)},
       {"slot_b", to_string(h.slot_b)},
       {"stopper_on", h.stopper_on ? json(*h.stopper_on) : json(nullptr)}};
}

void from_json(const json &j, Hinge &h) {
  require_fields(j, {"id", "slice_a", "slice_b", "pos_on_a", "pos_on_b", "segment",
                     "kind", "slot_a", "slot_b", "stopper_on"},
                 "hinge");
  h.id = j.at("id").get<int>();
  h.slice_a = j.at("slice_a").get<int>();
  h.slice_b = j.at("slice_b").get<int>();
  h.pos_on_a = j.at("pos_on_a").get<int>();
  h.pos_on_b = j.at("pos_on_b").get<int>();
  const auto seg = j.at("segment").get<std::array<int, 2>>();
  h.seg_lo = seg[0];
  h.seg_hi = seg[1];
  h.kind = hinge_kind_from_string(j.at("kind").get<std::string>());
  h.slot_a = slot_kind_from_string(j.at("slot_a").get<std::string>());
  h.slot_b = slot_kind_from_string(j.at("slot_b").get<std::string>());
  if (j.at("stopper_on").is_null())
    h.stopper_on.reset();
  else
    h.stopper_on = j.at("stopper_on").get<int>();
}

void to_json(json &j, const PrecedenceTriple &t) {
  j = {{"i", t.i}, {"j", t.j}, {"k", t.k}, {"host_slice", t.host_slice}};
}

void from_json(const json &j, PrecedenceTriple &t) {
  require_fields(j, {"i", "j", "k", "host_slice"}, "triple");
  t = {j.at("i").get<int>(), j.at("j").get<int>(), j.at("k").get<int>(),
       j.at("host_slice").get<int>()};
}

void to_json(json &j, const IRect &r) { j = json::array({r.x, r.y, r.w, r.h}); }

void from_json(const json &j, IRect &r) {
  const auto v = j.get<std::array<std::int64_t, 4>>();
  r = {v[0], v[1], v[2], v[3]};
}

void to_json(json &j, const Placement &p) {
  j = {{"slice", p.slice},   {"page", p.page},         {"cluster", p.cluster},
       {"footprint_um", p.footprint}, {"rotated", p.rotated}, {"x_mm", p.x_mm},
       {"y_mm", p.y_mm},     {"width_mm", p.width_mm}, {"height_mm", p.height_mm}};
}

void from_json(const json &j, Placement &p) {
  require_fields(j, {"slice", "page", "cluster", "footprint_um", "rotated", "x_mm", "y_mm",
                     "width_mm", "height_mm"},
                 "placement");
  p.slice = j.at("slice").get<int>();
  p.page = j.at("page").get<int>();
  p.cluster = j.at("cluster").get<int>();
  p.footprint = j.at("footprint_um").get<IRect>();
  p.rotated = j.at("rotated").get<bool>();
  p.x_mm = j.at("x_mm").get<double>();
  p.y_mm = j.at("y_mm").get<double>();
  p.width_mm = j.at("width_mm").get<double>();
  p.height_mm = j.at("height_mm").get<double>();
}

void to_json(json &j, const StabilityReport &r) {
  j = {{"axes", {axis_name(r.axes[0]), axis_name(r.axes[1])}},
       {"net_torque", r.net_torque},
       {"tolerance", r.tolerance},
       {"min_slot_width_mm", r.min_slot_width_mm},
       {"slot_width_flagged", r.slot_width_flagged},
       {"stopper_count", r.stopper_count},
       {"balanced", r.balanced},
       {"notes", r.notes}};
}

json to_json(const SliceArtifact &a) {
  return {{"kind", "slices"},
          {"version", kVersion},
          {"dims", a.dims},
          {"spacing_mm", a.spacing},
          {"orientations", planes_json(a.planes)},
          {"level", a.level},
          {"node_count", a.node_count},
          {"slices", list(a.slices)},
          {"octree_cuts", list(a.cuts)},
          {"warnings", a.warnings}};
}

SliceArtifact slice_artifact_from_json(const json &j) {
  require_kind(j, "slices");
  require_fields(j, {"dims", "spacing_mm", "orientations", "level", "node_count", "slices",
                     "octree_cuts", "warnings"},
                 "slices artifact");
  SliceArtifact a;
  a.dims = j.at("dims").get<Dims>();
  a.spacing = j.at("spacing_mm").get<Vec3d>();
  a.planes = planes_from(j.at("orientations"));
  a.level = j.at("level").get<int>();
  a.node_count = j.at("node_count").get<int>();
  a.slices = list_of<Slice>(j, "slices");
  for (std::size_t i = 0; i < a.slices.size(); ++i)
    if (a.slices[i].id != static_cast<int>(i))
      throw ValidationError("slice ids must be 0..n-1 in order");
  a.cuts = list_of<OctreeCut>(j, "octree_cuts");
  a.warnings = j.at("warnings").get<std::vector<std::string>>();
  return a;
}

json to_json(const HingeArtifact &a) {
  json j = to_json(a.model);
  j["kind"] = "hinges";
  j["hinges"] = list(a.hinges);
  j["backbone"] = a.backbone;
  j["triples"] = list(a.triples);
  return j;
}

HingeArtifact hinge_artifact_from_json(const json &j) {
  require_kind(j, "hinges");
  require_fields(j, {"hinges", "backbone", "triples"}, "hinges artifact");
  json inner = j;
  inner["kind"] = "slices";
  HingeArtifact a;
  a.model = slice_artifact_from_json(inner);
  a.hinges = list_of<Hinge>(j, "hinges");
  const int n = static_cast<int>(a.model.slices.size());
  for (std::size_t i = 0; i < a.hinges.size(); ++i) {
    const Hinge &h = a.hinges[i];
    if (h.id != static_cast<int>(i))
      throw ValidationError("hinge ids must be 0..n-1 in order");
    if (h.slice_a < 0 || h.slice_a >= n || h.slice_b < 0 || h.slice_b >= n)
      throw ValidationError("hinge " + std::to_string(h.id) + " references an unknown slice");
  }
  a.backbone = j.at("backbone").get<int>();
  a.triples = list_of<PrecedenceTriple>(j, "triples");
  return a;
}

json to_json(const OrderProblem &p) {
  json w = json::object();
  for (const auto &[id, v] : p.w_distance)
    w[std::to_string(id)] = v;
  return {{"hinge_ids", p.hinge_ids},
          {"backbone", p.backbone},
          {"triples", list(p.triples)},
          {"w_distance", w},
          {"big_m", p.big_m}};
}

OrderProblem order_problem_from_json(const json &p) {
  require_fields(p, {"hinge_ids", "backbone", "triples", "w_distance"}, "order problem");
  OrderProblem o;
  o.hinge_ids = p.at("hinge_ids").get<std::vector<int>>();
  o.backbone = p.at("backbone").get<int>();
  o.triples = list_of<PrecedenceTriple>(p, "triples");
  for (const auto &[k, v] : p.at("w_distance").items())
    o.w_distance[std::stoi(k)] = v.get<double>();
  o.big_m = p.value("big_m", static_cast<int>(o.hinge_ids.size()) + 1);
  return o;
}

json to_json(const PlanArtifact &a) {
  json pos = json::object();
  for (const auto &[id, p] : a.plan.position)
    pos[std::to_string(id)] = p;
  return {{"kind", "plan"},
          {"version", kVersion},
          {"hinge_order", a.plan.hinge_order},
          {"positions", pos},
          {"slice_order", a.plan.slice_order},
          {"objective", a.plan.objective},
          {"exact", a.plan.exact},
          {"warnings", a.plan.warnings},
          {"problem", to_json(a.problem)},
          {"verification",
           {{"bijection", a.report.bijection_ok},
            {"precedence", a.report.precedence_ok},
            {"backbone", a.report.backbone_ok},
            {"passed", a.report.passed()},
            {"summary", a.report.summary()}}}};
}

PlanArtifact plan_artifact_from_json(const json &j) {
  require_kind(j, "plan");
  require_fields(j, {"hinge_order", "slice_order", "objective", "exact", "warnings", "problem"},
                 "plan artifact");
  PlanArtifact a;
  a.problem = order_problem_from_json(j.at("problem"));
  a.plan.hinge_order = j.at("hinge_order").get<std::vector<int>>();
  for (std::size_t i = 0; i < a.plan.hinge_order.size(); ++i)
    a.plan.position[a.plan.hinge_order[i]] = static_cast<int>(i);
  a.plan.slice_order = j.at("slice_order").get<std::vector<int>>();
  a.plan.objective = j.at("objective").get<double>();
  a.plan.exact = j.at("exact").get<bool>();
  a.plan.warnings = j.at("warnings").get<std::vector<std::string>>();
  a.report = verify_plan(a.plan, a.problem);
  return a;
}

json to_json(const LayoutArtifact &a) {
  const PageLayout &l = a.layout;
  json clusters = {{"k", l.clusters.k},
                   {"centroids", l.clusters.centroids},
                   {"assignment", l.clusters.assignment},
                   {"wcss", l.clusters.wcss}};
  json parts = json::array();
  for (const auto &p : l.partitions)
    parts.push_back({{"cluster", p.cluster}, {"rect_um", p.rect}});
  return {{"kind", "layout"},
          {"version", kVersion},
          {"page", {{"name", l.page.name}, {"width_mm", l.page.width_mm},
                    {"height_mm", l.page.height_mm}}},
          {"sheets", l.sheets},
          {"margin_mm", l.margin_mm},
          {"gutter_mm", l.gutter_mm},
          {"scale_mm_per_voxel", l.scale},
          {"min_scale_mm_per_voxel", l.min_scale},
          {"slot_width_mm", a.slot_width_mm},
          {"seed", a.seed},
          {"stopper_slices", a.stopper_slices},
          {"clusters", clusters},
          {"partitions", parts},
          {"placements", list(l.placements)}};
}

LayoutArtifact layout_artifact_from_json(const json &j) {
  require_kind(j, "layout");
  require_fields(j, {"page", "sheets", "margin_mm", "gutter_mm", "scale_mm_per_voxel",
                     "min_scale_mm_per_voxel", "slot_width_mm", "seed", "stopper_slices",
                     "clusters", "partitions", "placements"},
                 "layout artifact");
  LayoutArtifact a;
  PageLayout &l = a.layout;
  const json &page = j.at("page");
  require_fields(page, {"name", "width_mm", "height_mm"}, "layout page");
  l.page = {page.at("name").get<std::string>(), page.at("width_mm").get<double>(),
            page.at("height_mm").get<double>()};
  l.sheets = j.at("sheets").get<int>();
  l.margin_mm = j.at("margin_mm").get<double>();
  l.gutter_mm = j.at("gutter_mm").get<double>();
  l.scale = j.at("scale_mm_per_voxel").get<double>();
  l.min_scale = j.at("min_scale_mm_per_voxel").get<double>();
  a.slot_width_mm = j.at("slot_width_mm").get<double>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.stopper_slices = j.at("stopper_slices").get<std::vector<int>>();
  const json &c = j.at("clusters");
  require_fields(c, {"k", "centroids", "assignment", "wcss"}, "layout clusters");
  l.clusters.k = c.at("k").get<int>();
  l.clusters.centroids = c.at("centroids").get<std::vector<Vec2d>>();
  l.clusters.assignment = c.at("assignment").get<std::vector<int>>();
  l.clusters.wcss = c.at("wcss").get<std::vector<double>>();
  for (const auto &p : j.at("partitions")) {
    require_fields(p, {"cluster", "rect_um"}, "partition");
    l.partitions.push_back({p.at("cluster").get<int>(), p.at("rect_um").get<IRect>()});
  }
  l.placements = list_of<Placement>(j, "placements");
  return a;
}

json read_json(const std::filesystem::path &path, const std::string &stage) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string(), stage);
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ValidationError(path.string() + ": malformed JSON (" + e.what() + ")", stage);
  }
}

void write_text(const std::string &text, const std::filesystem::path &path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << text;
  if (!out)
    throw IoError("write failed for " + path.string());
}

void write_json(const json &j, const std::filesystem::path &path) {
  write_text(j.dump(2) + "\n", path);
}

} // namespace sliceforge
