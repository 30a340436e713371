#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sliceforge/error.hpp"
#include "sliceforge/pipeline.hpp"

using namespace sliceforge;
namespace fs = std::filesystem;

namespace {

struct VolumeFlags {
  std::string input, header, tf;
  std::vector<std::string> meshes;
  int resolution = 128;
  CLI::Option *tf_opt = nullptr;

  void add(CLI::App *app) {
    app->add_option("--input", input, "raw scalar volume");
    app->add_option("--header", header, "volume header JSON");
    tf_opt = app->add_option("--tf", tf, "transfer function JSON, or 'auto' for meshes");
    app->add_option("--meshes", meshes, "closed OBJ meshes (instead of a volume)")
        ->delimiter(',');
    app->add_option("--resolution", resolution, "voxels per axis for mesh input");
  }

  void apply(BuildConfig &c) const {
    if (!meshes.empty()) {
      c.kind = InputKind::Meshes;
      c.meshes.assign(meshes.begin(), meshes.end());
      c.tf = tf.empty() ? "auto" : tf;
    } else {
      c.kind = InputKind::Volume;
      c.input = input;
      c.header = header;
      c.tf = tf;
    }
    c.resolution = resolution;
  }
};

SlicingPlanes parse_orientations(const std::string &s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw ValidationError("--orientations takes two families, e.g. yz,xz", "config");
  return {plane_family_from_name(s.substr(0, comma)),
          plane_family_from_name(s.substr(comma + 1))};
}

template <class T> T load(const fs::path &path, const char *what, T (*parse)(const json &)) {
  const json j = read_json(path, what);
  return parse_artifact(j, path.string(), parse);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"sliceforge: turn a labelled volume into printable sliceform pages"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "random seed (k-means initialization)");

  // build
  auto *build = app.add_subcommand("build", "run the whole pipeline");
  std::string config_path, orientations, page = "A4", out_dir = "out";
  BuildConfig defaults;
  int level = defaults.level, sheets = defaults.sheets, exact = defaults.exact_threshold,
      k_max = defaults.k_max;
  double slot = defaults.slot_width_mm, dpi = defaults.dpi;
  bool perforate = false;
  VolumeFlags build_vol;
  build->add_option("--config", config_path, "JSON config; flags override it");
  build_vol.add(build);
  build->add_option("--level", level, "octree level L (>= 1)");
  build->add_option("--orientations", orientations, "two plane families, e.g. yz,xz");
  build->add_option("--page", page, "A4, A3 or <W>x<H> in mm");
  build->add_option("--sheets", sheets, "number of sheets");
  build->add_option("--slot-width", slot, "slot width in mm");
  build->add_option("--dpi", dpi, "raster pixels per mm");
  build->add_option("--seed", seed, "random seed");
  build->add_option("--out", out_dir, "output directory");
  build->add_flag("--perforate", perforate, "dash cut paths for perforation");
  build->add_option("--exact-threshold", exact, "largest hinge count solved exactly");
  build->add_option("--k-max", k_max, "largest cluster count tried");

  // slice
  auto *slice = app.add_subcommand("slice", "octree slicing of a volume");
  VolumeFlags slice_vol;
  slice_vol.add(slice);
  std::string slice_out = "slices.json";
  slice->add_option("--level", level, "octree level L (>= 1)");
  slice->add_option("--orientations", orientations, "two plane families, e.g. yz,xz");
  slice->add_option("--out", slice_out, "slices artifact");
  slice->add_option("--seed", seed, "random seed");

  // hinge
  auto *hinge = app.add_subcommand("hinge", "hinges, backbone and precedence triples");
  std::string hinge_in, hinge_out = "hinges.json";
  hinge->add_option("--in", hinge_in, "slices artifact")->required();
  hinge->add_option("--out", hinge_out, "hinges artifact");
  hinge->add_option("--seed", seed, "random seed");

  // order
  auto *order = app.add_subcommand("order", "optimal assembly order");
  std::string order_in, order_out = "plan.json", lp_out;
  order->add_option("--in", order_in, "hinges artifact")->required();
  order->add_option("--out", order_out, "plan artifact");
  order->add_option("--lp", lp_out, "also write the mixed-integer form as CPLEX LP");
  order->add_option("--exact-threshold", exact, "largest hinge count solved exactly");
  order->add_option("--seed", seed, "random seed");

  // pack
  auto *packc = app.add_subcommand("pack", "page layout");
  std::string pack_in, pack_plan, pack_out = "layout.json";
  packc->add_option("--in", pack_in, "hinges artifact")->required();
  packc->add_option("--plan", pack_plan, "plan artifact")->required();
  packc->add_option("--out", pack_out, "layout artifact");
  packc->add_option("--page", page, "A4, A3 or <W>x<H> in mm");
  packc->add_option("--sheets", sheets, "number of sheets");
  packc->add_option("--slot-width", slot, "slot width in mm");
  packc->add_option("--k-max", k_max, "largest cluster count tried");
  packc->add_option("--seed", seed, "random seed");

  // export
  auto *exportc = app.add_subcommand("export", "pages, instructions, manifest");
  std::string ex_in, ex_hinges, ex_plan;
  VolumeFlags ex_vol;
  exportc->add_option("--in", ex_in, "layout artifact")->required();
  exportc->add_option("--hinges", ex_hinges, "hinges artifact")->required();
  exportc->add_option("--plan", ex_plan, "plan artifact")->required();
  ex_vol.add(exportc);
  exportc->add_option("--dpi", dpi, "raster pixels per mm");
  exportc->add_flag("--perforate", perforate, "dash cut paths for perforation");
  exportc->add_option("--out", out_dir, "output directory");
  exportc->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*build) {
      BuildConfig c;
      if (!config_path.empty())
        c = config_from_json(read_json(config_path, "config"));
      auto given = [&](const char *name) { return build->count(name) > 0; };
      if (given("--input") || given("--meshes") || given("--header"))
        build_vol.apply(c);
      else if (given("--tf"))
        c.tf = build_vol.tf;
      if (given("--resolution"))
        c.resolution = build_vol.resolution;
      if (given("--level"))
        c.level = level;
      if (given("--orientations"))
        c.planes = parse_orientations(orientations);
      if (given("--page"))
        c.page = page;
      if (given("--sheets"))
        c.sheets = sheets;
      if (given("--slot-width"))
        c.slot_width_mm = slot;
      if (given("--dpi"))
        c.dpi = dpi;
      if (given("--seed") || app.count("--seed"))
        c.seed = seed;
      if (given("--out") || config_path.empty())
        c.out = out_dir;
      if (given("--perforate"))
        c.perforate = perforate;
      if (given("--exact-threshold"))
        c.exact_threshold = exact;
      if (given("--k-max"))
        c.k_max = k_max;
      std::cout << run_build(c).text();
      std::cout << "output: " << c.out.string() << "\n";
      return 0;
    }

    if (*slice) {
      BuildConfig c;
      slice_vol.apply(c);
      c.level = level;
      if (!orientations.empty())
        c.planes = parse_orientations(orientations);
      validate(c);
      const LoadedModel m = load_model(c);
      const SliceArtifact a = stage_slice(m.labels, c.level, c.planes);
      write_json(to_json(a), slice_out);
      std::cout << "slices: " << a.slices.size() << "\n";
      return 0;
    }

    if (*hinge) {
      const auto s = load(hinge_in, "hinge", &slice_artifact_from_json);
      const HingeArtifact a = stage_hinge(s);
      write_json(to_json(a), hinge_out);
      std::cout << "hinges: " << a.hinges.size() << " (backbone " << a.backbone << ", "
                << a.triples.size() << " triples)\n";
      return 0;
    }

    if (*order) {
      const auto h = load(order_in, "order", &hinge_artifact_from_json);
      const PlanArtifact p = stage_order(h, exact);
      write_json(to_json(p), order_out);
      if (!lp_out.empty())
        write_text(to_lp(p.problem), lp_out);
      std::cout << "objective: " << p.plan.objective
                << (p.plan.exact ? " (exact)" : " (heuristic)") << "\n"
                << p.report.summary() << "\n";
      return 0;
    }

    if (*packc) {
      const auto h = load(pack_in, "pack", &hinge_artifact_from_json);
      const auto p = load(pack_plan, "pack", &plan_artifact_from_json);
      BuildConfig c;
      c.page = page;
      c.sheets = sheets;
      c.slot_width_mm = slot;
      c.k_max = k_max;
      c.seed = seed;
      const LayoutArtifact l = stage_pack(h, p, layout_options(c));
      write_json(to_json(l), pack_out);
      std::cout << "scale: " << l.layout.scale << " mm/voxel, clusters: "
                << l.layout.clusters.k << ", sheets: " << l.layout.sheets << "\n";
      return 0;
    }

    if (*exportc) {
      const auto l = load(ex_in, "export", &layout_artifact_from_json);
      const auto h = load(ex_hinges, "export", &hinge_artifact_from_json);
      const auto p = load(ex_plan, "export", &plan_artifact_from_json);
      BuildConfig c;
      ex_vol.apply(c);
      c.slot_width_mm = l.slot_width_mm;
      c.dpi = dpi;
      c.perforate = perforate;
      c.seed = l.seed;
      validate(c);
      const LoadedModel m = load_model(c);
      RenderOptions r;
      r.slot_width_mm = l.slot_width_mm;
      r.px_per_mm = dpi;
      r.perforate = perforate;
      const ExportResult ex = stage_export(m, h, p, l, r, config_echo(c), l.seed, out_dir);
      std::cout << "pages: " << ex.pages.size() << ", balanced: "
                << (ex.stability.balanced ? "yes" : "no") << "\n";
      for (const auto &w : ex.warnings)
        std::cout << "warning: " << w << "\n";
      return 0;
    }
  } catch (const Error &e) {
    std::cerr << "error";
    if (!e.stage().empty())
      std::cerr << " [" << e.stage() << "]";
    std::cerr << ": " << e.what() << "\n";
    if (!e.hint().empty())
      std::cerr << "hint: " << e.hint() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::Io);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
