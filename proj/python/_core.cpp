#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sliceforge/pipeline.hpp"

namespace py = pybind11;
using namespace sliceforge;

namespace {

// Python-facing functions exchange JSON text; the package wrapper turns it
// into dicts.

json parse(const std::string &text, const std::string &what) {
  try {
    return json::parse(text);
  } catch (const json::exception &e) {
    throw ValidationError(what + ": " + e.what());
  }
}

SlicingPlanes planes_of(const std::pair<std::string, std::string> &o) {
  SlicingPlanes p{plane_family_from_name(o.first), plane_family_from_name(o.second)};
  validate(p);
  return p;
}

Dims dims_of(const py::buffer_info &info) {
  if (info.ndim != 3)
    throw ValidationError("volume arrays must be 3-dimensional, indexed [z, y, x]");
  return {static_cast<int>(info.shape[2]), static_cast<int>(info.shape[1]),
          static_cast<int>(info.shape[0])};
}

std::string slice_labels(py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast> labels,
                         int level, std::pair<std::string, std::string> orientations,
                         Vec3d spacing) {
  const auto info = labels.request();
  const Dims d = dims_of(info);
  const auto *p = static_cast<const std::uint16_t *>(info.ptr);
  LabelVolume v(d, spacing, {0, 0, 0}, std::vector<std::uint16_t>(p, p + d.count()));
  const SlicingPlanes planes = planes_of(orientations);
  py::gil_scoped_release release;
  return to_json(stage_slice(v, level, planes)).dump();
}

std::string slice_volume(py::array_t<float, py::array::c_style | py::array::forcecast> scalars,
                         const std::string &tf_json, int level,
                         std::pair<std::string, std::string> orientations, Vec3d spacing) {
  const auto info = scalars.request();
  const Dims d = dims_of(info);
  const auto *p = static_cast<const float *>(info.ptr);
  ScalarVolume v(d, spacing, {0, 0, 0}, std::vector<float>(p, p + d.count()));
  const TransferFunction tf = parse_transfer_function(tf_json);
  const SlicingPlanes planes = planes_of(orientations);
  py::gil_scoped_release release;
  return to_json(stage_slice(quantize(v, tf), level, planes)).dump();
}

std::string plan_json(const AssemblyPlan &plan) {
  return json{{"hinge_order", plan.hinge_order},
              {"objective", plan.objective},
              {"exact", plan.exact},
              {"warnings", plan.warnings}}
      .dump();
}

AssemblyPlan plan_of(const std::vector<int> &order) {
  AssemblyPlan p;
  p.hinge_order = order;
  for (std::size_t i = 0; i < order.size(); ++i)
    p.position[order[i]] = static_cast<int>(i);
  return p;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "sliceforge native core";

  static py::exception<Error> base(m, "SliceforgeError");
  static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
  static py::exception<InfeasibleError> infeasible(m, "InfeasibleError", base.ptr());
  static py::exception<IoError> io(m, "IoError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const Error &e) {
      std::string msg = e.what();
      if (!e.stage().empty())
        msg = "[" + e.stage() + "] " + msg;
      if (!e.hint().empty())
        msg += " (hint: " + e.hint() + ")";
      switch (e.kind()) {
      case ErrorKind::Validation:
        py::set_error(validation, msg.c_str());
        return;
      case ErrorKind::Infeasible:
        py::set_error(infeasible, msg.c_str());
        return;
      case ErrorKind::Io:
        py::set_error(io, msg.c_str());
        return;
      }
    }
  });

  m.def("version", [] { return std::string(kVersion); });

  m.def(
      "build",
      [](const std::string &config) {
        const BuildConfig c = config_from_json(parse(config, "config"));
        py::gil_scoped_release release;
        const BuildSummary s = run_build(c);
        return json{{"slices", s.slices},     {"hinges", s.hinges}, {"clusters", s.clusters},
                    {"scale", s.scale},       {"pages", s.pages},   {"balanced", s.balanced},
                    {"exact", s.exact},       {"warnings", s.warnings}}
            .dump();
      },
      py::arg("config"));

  m.def("slice_labels", &slice_labels, py::arg("labels"), py::arg("level") = 3,
        py::arg("orientations") = std::make_pair(std::string("yz"), std::string("xz")),
        py::arg("spacing") = Vec3d{1, 1, 1});
  m.def("slice_volume", &slice_volume, py::arg("scalars"), py::arg("tf"), py::arg("level") = 3,
        py::arg("orientations") = std::make_pair(std::string("yz"), std::string("xz")),
        py::arg("spacing") = Vec3d{1, 1, 1});

  m.def(
      "hinge",
      [](const std::string &slices) {
        const auto a = parse_artifact(parse(slices, "slices"), "slices", &slice_artifact_from_json);
        return to_json(stage_hinge(a)).dump();
      },
      py::arg("slices"));

  m.def(
      "order",
      [](const std::string &hinges, int exact_threshold) {
        const auto a = parse_artifact(parse(hinges, "hinges"), "hinges", &hinge_artifact_from_json);
        return to_json(stage_order(a, exact_threshold)).dump();
      },
      py::arg("hinges"), py::arg("exact_threshold") = 16);

  m.def(
      "pack",
      [](const std::string &hinges, const std::string &plan, const std::string &page, int sheets,
         double slot_width_mm, int k_max, std::uint64_t seed) {
        const auto h = parse_artifact(parse(hinges, "hinges"), "hinges", &hinge_artifact_from_json);
        const auto p = parse_artifact(parse(plan, "plan"), "plan", &plan_artifact_from_json);
        BuildConfig c;
        c.page = page;
        c.sheets = sheets;
        c.slot_width_mm = slot_width_mm;
        c.k_max = k_max;
        c.seed = seed;
        return to_json(stage_pack(h, p, layout_options(c))).dump();
      },
      py::arg("hinges"), py::arg("plan"), py::arg("page") = "A4", py::arg("sheets") = 1,
      py::arg("slot_width_mm") = 1.0, py::arg("k_max") = 6, py::arg("seed") = 0);

  m.def(
      "solve_order",
      [](const std::string &problem, int exact_threshold) {
        const OrderProblem p =
            parse_artifact(parse(problem, "problem"), "problem", &order_problem_from_json);
        return plan_json(solve_order(p, exact_threshold));
      },
      py::arg("problem"), py::arg("exact_threshold") = 16);

  m.def(
      "verify_plan",
      [](const std::vector<int> &hinge_order, const std::string &problem) {
        const OrderProblem p =
            parse_artifact(parse(problem, "problem"), "problem", &order_problem_from_json);
        const VerificationReport r = verify_plan(plan_of(hinge_order), p);
        json violations = json::array();
        for (const auto &t : r.precedence_violations)
          violations.push_back({t.i, t.j, t.k});
        return json{{"passed", r.passed()},
                    {"bijection", r.bijection_ok},
                    {"bijection_offenders", r.bijection_offenders},
                    {"precedence", r.precedence_ok},
                    {"precedence_violations", violations},
                    {"backbone", r.backbone_ok},
                    {"backbone_position", r.backbone_position},
                    {"objective", r.objective},
                    {"summary", r.summary()}}
            .dump();
      },
      py::arg("hinge_order"), py::arg("problem"));

  m.def(
      "to_lp",
      [](const std::string &problem) {
        return to_lp(parse_artifact(parse(problem, "problem"), "problem", &order_problem_from_json));
      },
      py::arg("problem"));
}
