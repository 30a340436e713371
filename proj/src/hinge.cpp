#include "sliceforge/hinge.hpp"

#include <algorithm>
#include <tuple>

#include "sliceforge/error.hpp"

namespace sliceforge {

std::string to_string(HingeKind k) {
  return k == HingeKind::UpDown ? "up-down" : "cut-through";
}

std::string to_string(SlotKind k) {
  switch (k) {
  case SlotKind::TopHalf:
    return "top-half";
  case SlotKind::BottomHalf:
    return "bottom-half";
  case SlotKind::FullWindow:
    return "full-window";
  case SlotKind::None:
    break;
  }
  return "none";
}

HingeKind hinge_kind_from_string(const std::string &s) {
  if (s == "up-down")
    return HingeKind::UpDown;
  if (s == "cut-through")
    return HingeKind::CutThrough;
  throw ValidationError("unknown hinge kind '" + s + "'");
}

SlotKind slot_kind_from_string(const std::string &s) {
  if (s == "top-half")
    return SlotKind::TopHalf;
  if (s == "bottom-half")
    return SlotKind::BottomHalf;
  if (s == "full-window")
    return SlotKind::FullWindow;
  if (s == "none")
    return SlotKind::None;
  throw ValidationError("unknown slot kind '" + s + "'");
}

std::vector<Hinge> compute_hinges(const std::vector<Slice> &slices,
                                  const SlicingPlanes &planes) {
  validate(planes);
  const Axis c = planes.hinge_axis();
  std::vector<Hinge> hinges;
  for (const auto &a : slices) {
    if (a.normal != planes.first)
      continue;
    for (const auto &b : slices) {
      if (b.normal != planes.second)
        continue;
      // a's plane must cross b's extent and vice versa (boundary contact
      // included).
      if (a.plane < b.lo_along(a.normal) || a.plane > b.hi_along(a.normal))
        continue;
      if (b.plane < a.lo_along(b.normal) || b.plane > a.hi_along(b.normal))
        continue;
      const int lo = std::max(a.lo_along(c), b.lo_along(c));
      const int hi = std::min(a.hi_along(c), b.hi_along(c));
      if (hi <= lo)
        continue;

      Hinge h;
      h.slice_a = a.id;
      h.slice_b = b.id;
      h.pos_on_a = b.plane;
      h.pos_on_b = a.plane;
      h.seg_lo = lo;
      h.seg_hi = hi;

      const int a_lo = a.lo_along(c), a_hi = a.hi_along(c);
      const int b_lo = b.lo_along(c), b_hi = b.hi_along(c);
      if (a_lo == b_lo && a_hi == b_hi) {
        h.kind = HingeKind::UpDown;
        h.slot_a = SlotKind::TopHalf;
        h.slot_b = SlotKind::BottomHalf;
      } else {
        h.kind = HingeKind::CutThrough;
        const int a_len = a_hi - a_lo, b_len = b_hi - b_lo;
        const bool a_big = a_len > b_len || (a_len == b_len && a.id < b.id);
        const Slice &small = a_big ? b : a;
        const Slice &big = a_big ? a : b;
        h.slot_a = a_big ? SlotKind::FullWindow : SlotKind::None;
        h.slot_b = a_big ? SlotKind::None : SlotKind::FullWindow;
        // The none slot sits on `small` at big's plane along big's normal.
        if (big.plane == small.lo_along(big.normal) ||
            big.plane == small.hi_along(big.normal))
          h.stopper_on = small.id;
      }
      hinges.push_back(h);
    }
  }

  std::sort(hinges.begin(), hinges.end(), [&](const Hinge &x, const Hinge &y) {
    return std::make_tuple(slices[x.slice_a].plane, x.pos_on_a, x.seg_lo,
                           x.slice_a, x.slice_b) <
           std::make_tuple(slices[y.slice_a].plane, y.pos_on_a, y.seg_lo,
                           y.slice_a, y.slice_b);
  });
  for (std::size_t i = 0; i < hinges.size(); ++i)
    hinges[i].id = static_cast<int>(i);
  return hinges;
}

int find_backbone(const std::vector<Hinge> &hinges,
                  const std::vector<Slice> &slices, int root_node) {
  if (hinges.empty())
    throw InfeasibleError("model has no hinges", "hinge",
                          "increase the octree level or check the volume");
  auto is_root = [&](int slice) {
    const auto &src = slices.at(slice).source_nodes;
    return std::find(src.begin(), src.end(), root_node) != src.end();
  };
  const Hinge *best = nullptr;
  auto area = [&](const Hinge &h) {
    return slices[h.slice_a].extent.area() + slices[h.slice_b].extent.area();
  };
  for (const auto &h : hinges) {
    if (!is_root(h.slice_a) || !is_root(h.slice_b))
      continue;
    if (!best || h.length() > best->length() ||
        (h.length() == best->length() && area(h) > area(*best)) ||
        (h.length() == best->length() && area(h) == area(*best) && h.id < best->id))
      best = &h;
  }
  if (!best)
    throw InfeasibleError("no hinge joins the two root slices; the model "
                          "cannot be stabilized",
                          "hinge");
  return best->id;
}

std::vector<PrecedenceTriple> collect_triples(const std::vector<Hinge> &hinges,
                                              const std::vector<Slice> &slices) {
  std::vector<PrecedenceTriple> triples;
  for (const auto &s : slices) {
    std::vector<const Hinge *> on;
    for (const auto &h : hinges)
      if (h.touches(s.id))
        on.push_back(&h);
    for (const Hinge *j : on) {
      if (j->kind != HingeKind::CutThrough || j->slot_on(s.id) != SlotKind::None)
        continue;
      const int pj = j->position_on(s.id);
      std::optional<int> left_pos, right_pos;
      for (const Hinge *h : on) {
        if (h->kind != HingeKind::UpDown)
          continue;
        const int p = h->position_on(s.id);
        if (p < pj && (!left_pos || p > *left_pos))
          left_pos = p;
        if (p > pj && (!right_pos || p < *right_pos))
          right_pos = p;
      }
      if (!left_pos || !right_pos)
        continue;
      for (const Hinge *i : on) {
        if (i->kind != HingeKind::UpDown || i->position_on(s.id) != *left_pos)
          continue;
        for (const Hinge *k : on) {
          if (k->kind != HingeKind::UpDown || k->position_on(s.id) != *right_pos)
            continue;
          triples.push_back({i->id, j->id, k->id, s.id});
        }
      }
    }
  }
  std::sort(triples.begin(), triples.end(), [](const auto &x, const auto &y) {
    return std::tie(x.j, x.i, x.k, x.host_slice) < std::tie(y.j, y.i, y.k, y.host_slice);
  });
  return triples;
}

HingeLine hinge_line(const Hinge &h, const std::vector<Slice> &slices) {
  const Slice &a = slices.at(h.slice_a);
  const Slice &b = slices.at(h.slice_b);
  HingeLine line;
  line.axis = third_axis(a.normal, b.normal);
  line.fixed[index(a.normal)] = a.plane;
  line.fixed[index(b.normal)] = b.plane;
  line.lo = h.seg_lo;
  line.hi = h.seg_hi;
  return line;
}

} // namespace sliceforge
