#include "sliceforge/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "sliceforge/error.hpp"

namespace sliceforge {

namespace {

/// Runs `fn`, attaching `stage` to errors raised without one.
template <class F> auto in_stage(const char *stage, F &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    if (!e.stage().empty())
      throw;
    switch (e.kind()) {
    case ErrorKind::Validation:
      throw ValidationError(e.what(), stage, e.hint());
    case ErrorKind::Infeasible:
      throw InfeasibleError(e.what(), stage, e.hint());
    case ErrorKind::Io:
      break;
    }
    throw IoError(e.what(), stage);
  }
}

bool is_auto(const std::string &tf) { return tf.empty() || tf == "auto"; }

json strip_kind(json j) {
  j.erase("kind");
  j.erase("version");
  return j;
}

} // namespace

void validate(const BuildConfig &c) {
  const std::string stage = "config";
  if (c.level < 1)
    throw ValidationError("level must be >= 1", stage);
  if (c.sheets < 1)
    throw ValidationError("sheets must be >= 1", stage);
  if (!(c.slot_width_mm > 0))
    throw ValidationError("slot width must be > 0", stage);
  if (!(c.dpi > 0))
    throw ValidationError("raster density must be > 0", stage);
  if (c.k_max < 1)
    throw ValidationError("k_max must be >= 1", stage);
  if (c.exact_threshold < 0)
    throw ValidationError("exact threshold must be >= 0", stage);
  validate(c.planes);
  parse_page_size(c.page);
  if (c.kind == InputKind::Volume) {
    if (c.input.empty() || c.header.empty())
      throw ValidationError("volume input needs --input and --header", stage);
    if (is_auto(c.tf))
      throw ValidationError("volume input needs an explicit transfer function", stage,
                            "pass --tf <bins.json>; 'auto' is only available for meshes");
  } else {
    if (c.meshes.empty())
      throw ValidationError("mesh input needs at least one mesh", stage);
    if (c.resolution < 8)
      throw ValidationError("mesh resolution must be >= 8", stage);
  }
}

BuildConfig config_from_json(const json &j) {
  static const std::set<std::string> known = {
      "kind",  "input", "header", "tf",   "meshes", "resolution",      "level", "orientations",
      "page",  "sheets", "slot_width_mm", "dpi",    "seed",            "out",   "perforate",
      "exact_threshold", "k_max"};
  if (!j.is_object())
    throw ValidationError("config must be a JSON object", "config");
  for (const auto &[k, v] : j.items())
    if (!known.count(k))
      throw ValidationError("unknown config key '" + k + "'", "config");
  try {
    BuildConfig c;
    if (j.contains("meshes")) {
      c.kind = InputKind::Meshes;
      for (const auto &m : j.at("meshes"))
        c.meshes.emplace_back(m.get<std::string>());
    }
    if (j.contains("kind")) {
      const auto k = j.at("kind").get<std::string>();
      if (k != "volume" && k != "meshes")
        throw ValidationError("kind must be 'volume' or 'meshes'", "config");
      c.kind = k == "volume" ? InputKind::Volume : InputKind::Meshes;
    }
    if (j.contains("input"))
      c.input = j.at("input").get<std::string>();
    if (j.contains("header"))
      c.header = j.at("header").get<std::string>();
    c.tf = j.value("tf", c.kind == InputKind::Meshes ? std::string("auto") : std::string());
    c.resolution = j.value("resolution", c.resolution);
    c.level = j.value("level", c.level);
    if (j.contains("orientations")) {
      const auto &o = j.at("orientations");
      if (!o.is_array() || o.size() != 2)
        throw ValidationError("orientations must list two plane families", "config");
      c.planes = {plane_family_from_name(o[0].get<std::string>()),
                  plane_family_from_name(o[1].get<std::string>())};
    }
    c.page = j.value("page", c.page);
    c.sheets = j.value("sheets", c.sheets);
    c.slot_width_mm = j.value("slot_width_mm", c.slot_width_mm);
    c.dpi = j.value("dpi", c.dpi);
    c.seed = j.value("seed", c.seed);
    if (j.contains("out"))
      c.out = j.at("out").get<std::string>();
    c.perforate = j.value("perforate", c.perforate);
    c.exact_threshold = j.value("exact_threshold", c.exact_threshold);
    c.k_max = j.value("k_max", c.k_max);
    return c;
  } catch (const json::exception &e) {
    throw ValidationError(std::string("config: ") + e.what(), "config");
  }
}

json config_echo(const BuildConfig &c) {
  json meshes = json::array();
  for (const auto &m : c.meshes)
    meshes.push_back(m.generic_string());
  json j = {{"kind", c.kind == InputKind::Volume ? "volume" : "meshes"},
            {"tf", c.tf},
            {"level", c.level},
            {"orientations",
             {plane_family_name(c.planes.first), plane_family_name(c.planes.second)}},
            {"page", c.page},
            {"sheets", c.sheets},
            {"slot_width_mm", c.slot_width_mm},
            {"dpi", c.dpi},
            {"seed", c.seed},
            {"perforate", c.perforate},
            {"exact_threshold", c.exact_threshold},
            {"k_max", c.k_max}};
  if (c.kind == InputKind::Volume) {
    j["input"] = c.input.generic_string();
    j["header"] = c.header.generic_string();
  } else {
    j["meshes"] = meshes;
    j["resolution"] = c.resolution;
  }
  return j;
}

LoadedModel load_model(const BuildConfig &config) {
  return in_stage("ingest", [&] {
    LoadedModel m;
    if (config.kind == InputKind::Volume) {
      const ScalarVolume volume = load_volume(config.input, config.header);
      m.tf = load_transfer_function(config.tf);
      m.labels = quantize(volume, m.tf);
      return m;
    }
    MeshSet set;
    for (const auto &p : config.meshes)
      set.meshes.push_back(load_obj(p));
    const int r = config.resolution;
    Voxelization vox = voxelize_meshes(set, {r, r, r});
    if (vox.degenerate_triangles > 0)
      m.warnings.push_back(std::to_string(vox.degenerate_triangles) +
                           " degenerate triangles were skipped");
    m.tf = is_auto(config.tf) ? vox.tf : load_transfer_function(config.tf);
    m.labels = quantize(vox.volume, m.tf);
    return m;
  });
}

SliceArtifact stage_slice(const LabelVolume &labels, int level, const SlicingPlanes &planes) {
  return in_stage("octree", [&] {
    const auto &data = labels.labels();
    if (data.empty() ||
        std::all_of(data.begin(), data.end(), [&](auto l) { return l == data.front(); }))
      throw ValidationError(
          "every voxel carries the same label", "octree",
          "nothing to slice: adjust the transfer function so at least one structure "
          "stands out from the background");
    const Octree tree = build_octree(labels, level);
    SliceArtifact a;
    a.dims = labels.dims();
    a.spacing = labels.spacing();
    a.planes = planes;
    a.level = level;
    a.node_count = tree.node_count;
    a.slices = unify_slices(extract_slices(tree.root, planes), planes);
    if (a.slices.empty())
      throw ValidationError("the volume is too thin to slice", "octree",
                            "nothing to slice: every axis needs at least two voxels");
    a.cuts = octree_cuts(tree.root);
    a.warnings = tree.warnings;
    return a;
  });
}

HingeArtifact stage_hinge(const SliceArtifact &slices) {
  return in_stage("hinge", [&] {
    HingeArtifact a;
    a.model = slices;
    a.hinges = compute_hinges(slices.slices, slices.planes);
    a.backbone = find_backbone(a.hinges, slices.slices);
    a.triples = collect_triples(a.hinges, slices.slices);
    return a;
  });
}

PlanArtifact stage_order(const HingeArtifact &h, int exact_threshold) {
  return in_stage("order", [&] {
    PlanArtifact a;
    a.problem = make_order_problem(h.hinges, h.model.slices, h.model.dims, h.backbone,
                                   h.triples);
    a.plan = solve_order(a.problem, exact_threshold);
    a.plan.slice_order = derive_slice_order(a.plan, h.hinges, h.model.slices, &a.plan.warnings);
    a.report = verify_plan(a.plan, a.problem);
    if (!a.report.passed())
      throw InfeasibleError("assembly plan failed verification: " + a.report.summary(),
                            "order");
    return a;
  });
}

LayoutArtifact stage_pack(const HingeArtifact &h, const PlanArtifact &plan,
                          const LayoutOptions &options) {
  return in_stage("pack", [&] {
    if (!plan.report.passed())
      throw ValidationError("assembly plan fails verification: " + plan.report.summary(), "",
                            "re-run the order stage");
    std::set<int> stoppers;
    for (const auto &hinge : h.hinges)
      if (hinge.stopper_on)
        stoppers.insert(*hinge.stopper_on);
    LayoutArtifact a;
    a.stopper_slices.assign(stoppers.begin(), stoppers.end());
    a.slot_width_mm = options.slot_width_mm;
    a.seed = options.seed;
    a.layout = pack(h.model.slices, plan.plan.slice_order, a.stopper_slices, h.model.dims,
                    options);
    return a;
  });
}

LayoutOptions layout_options(const BuildConfig &config) {
  LayoutOptions o;
  o.page = parse_page_size(config.page);
  o.sheets = config.sheets;
  o.slot_width_mm = config.slot_width_mm;
  o.k_max = config.k_max;
  o.seed = config.seed;
  return o;
}

ExportResult stage_export(const LoadedModel &model, const HingeArtifact &h,
                          const PlanArtifact &plan, const LayoutArtifact &layout,
                          const RenderOptions &render, const json &options_echo,
                          std::uint64_t seed, const std::filesystem::path &out) {
  return in_stage("export", [&] {
    const auto &slices = h.model.slices;
    if (!(model.labels.dims() == h.model.dims))
      throw ValidationError("volume dimensions do not match the hinges artifact");
    if (!plan.report.passed())
      throw ValidationError("assembly plan fails verification: " + plan.report.summary());
    const double scale = layout.layout.scale;

    std::vector<SliceRaster> rasters;
    rasters.reserve(slices.size());
    for (const auto &s : slices)
      rasters.push_back(rasterize_slice(model.labels, model.tf, s, scale, render.px_per_mm));

    const PageSet pages = emit_pages(layout.layout, rasters, slices, h.hinges,
                                     plan.plan.slice_order, render);
    const auto steps = instruction_steps(plan.plan, h.hinges, plan.plan.slice_order);
    const std::string instructions = emit_instructions(
        steps, slices, plan.plan.slice_order, h.model.cuts, h.model.planes, h.model.dims);

    ExportResult r;
    r.stability = stability_check(slices, h.model.planes, h.model.dims, render.slot_width_mm,
                                  static_cast<int>(layout.stopper_slices.size()));
    r.warnings = model.warnings;
    for (const auto *list : {&h.model.warnings, &plan.plan.warnings, &pages.warnings})
      r.warnings.insert(r.warnings.end(), list->begin(), list->end());

    json page_list = json::array();
    for (std::size_t p = 0; p < pages.svgs.size(); ++p) {
      const std::string rel = "pages/page-" + std::to_string(p + 1) + ".svg";
      write_text(pages.svgs[p], out / rel);
      r.pages.push_back(out / rel);
      json ids = json::array();
      for (const auto &pl : layout.layout.placements)
        if (pl.page == static_cast<int>(p))
          ids.push_back(pl.slice);
      page_list.push_back({{"page", p + 1}, {"file", rel}, {"slices", ids}});
    }
    write_text(instructions, out / "instructions.svg");

    json step_list = json::array();
    for (const auto &s : steps)
      step_list.push_back({{"step", s.step}, {"hinge", s.hinge}, {"text", s.text}});
    json labels = json::array();
    for (const auto &l : pages.labels)
      labels.push_back({{"slice", l.slice},
                        {"number", l.number},
                        {"on_slice_mm", {l.on_slice.x, l.on_slice.y, l.on_slice.w, l.on_slice.h}},
                        {"on_frame_mm", {l.on_frame.x, l.on_frame.y, l.on_frame.w, l.on_frame.h}},
                        {"collided", l.collided}});

    json stability = r.stability;
    json m = {{"version", kVersion},
              {"seed", seed},
              {"options", options_echo},
              {"model",
               {{"dims", h.model.dims},
                {"spacing_mm", h.model.spacing},
                {"orientations",
                 {plane_family_name(h.model.planes.first),
                  plane_family_name(h.model.planes.second)}},
                {"level", h.model.level},
                {"node_count", h.model.node_count}}},
              {"slices", to_json(h).at("slices")},
              {"slice_count", slices.size()},
              {"hinges", to_json(h).at("hinges")},
              {"hinge_count", h.hinges.size()},
              {"backbone", h.backbone},
              {"triples", to_json(h).at("triples")},
              {"plan", strip_kind(to_json(plan))},
              {"layout", strip_kind(to_json(layout))},
              {"stability", stability},
              {"pages", page_list},
              {"instructions", {{"file", "instructions.svg"}, {"steps", step_list}}},
              {"labels", labels},
              {"warnings", r.warnings}};
    write_json(m, out / "manifest.json");
    write_json(stability, out / "stability.json");
    r.manifest = std::move(m);
    return r;
  });
}

std::string BuildSummary::text() const {
  char scale_buf[32];
  std::snprintf(scale_buf, sizeof scale_buf, "%.4f", scale);
  std::ostringstream out;
  out << "slices: " << slices << "\nhinges: " << hinges << (exact ? " (exact order)" : " (heuristic order)")
      << "\nclusters: " << clusters << "\nscale: " << scale_buf << " mm/voxel\npages: " << pages
      << "\nbalanced: " << (balanced ? "yes" : "no") << "\n";
  for (const auto &w : warnings)
    out << "warning: " << w << "\n";
  return out.str();
}

BuildSummary run_build(const BuildConfig &config) {
  validate(config);
  const LoadedModel model = load_model(config);
  const SliceArtifact slices = stage_slice(model.labels, config.level, config.planes);
  const HingeArtifact hinges = stage_hinge(slices);
  const PlanArtifact plan = stage_order(hinges, config.exact_threshold);
  const LayoutArtifact layout = stage_pack(hinges, plan, layout_options(config));

  std::filesystem::create_directories(config.out);
  write_json(to_json(slices), config.out / "slices.json");
  write_json(to_json(hinges), config.out / "hinges.json");
  write_json(to_json(plan), config.out / "plan.json");
  write_json(to_json(layout), config.out / "layout.json");

  RenderOptions render;
  render.slot_width_mm = config.slot_width_mm;
  render.px_per_mm = config.dpi;
  render.perforate = config.perforate;
  const ExportResult ex = stage_export(model, hinges, plan, layout, render,
                                       config_echo(config), config.seed, config.out);

  BuildSummary s;
  s.slices = static_cast<int>(slices.slices.size());
  s.hinges = static_cast<int>(hinges.hinges.size());
  s.clusters = layout.layout.clusters.k;
  s.scale = layout.layout.scale;
  s.pages = static_cast<int>(ex.pages.size());
  s.balanced = ex.stability.balanced;
  s.exact = plan.plan.exact;
  s.warnings = ex.warnings;
  return s;
}

} // namespace sliceforge
