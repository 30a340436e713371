#include "sliceforge/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <zlib.h>

#include "sliceforge/error.hpp"

namespace sliceforge {

namespace {

constexpr const char *kStage = "export";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000")
    s = "0.000";
  return s;
}

std::uint8_t to_byte(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

void put_be32(std::string &out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string &out, const char *type, const std::string &data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  const auto crc = crc32(0L, reinterpret_cast<const Bytef *>(body.data()),
                         static_cast<uInt>(body.size()));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

std::string escape_xml(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

std::string svg_open(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" "
         "xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" width=\"" +
         num(w) + "mm\" height=\"" + num(h) + "mm\" viewBox=\"0 0 " + num(w) + " " +
         num(h) + "\">\n";
}

/// Model-space rectangle [u0,u1] x [v0,v1] to an axis-aligned page rectangle.
MmRect page_rect(const SliceFrame &f, double u0, double v0, double u1, double v1) {
  const auto a = f.to_page(u0, v0);
  const auto b = f.to_page(u1, v1);
  return {std::min(a[0], b[0]), std::min(a[1], b[1]), std::fabs(a[0] - b[0]),
          std::fabs(a[1] - b[1])};
}

bool inside(const MmRect &inner, const MmRect &outer) {
  return inner.x >= outer.x - 1e-9 && inner.y >= outer.y - 1e-9 &&
         inner.x + inner.w <= outer.x + outer.w + 1e-9 &&
         inner.y + inner.h <= outer.y + outer.h + 1e-9;
}

MmRect grow(const MmRect &r, double d) {
  return {r.x - d, r.y - d, r.w + 2 * d, r.h + 2 * d};
}

struct TabSpan {
  double t0, t1, depth;
};

/// Outline of a slice rectangle with stopper tabs, counter-clockwise in model
/// (u, v) coordinates.
std::vector<std::array<double, 2>> outline(const Slice &s, const std::vector<StopperTab> &tabs,
                                           double tab_depth) {
  const Rect2i &e = s.extent;
  // Edges: 0 bottom (v=v0, u up), 1 right (u=u1, v up), 2 top (v=v1, u down),
  // 3 left (u=u0, v down).
  std::array<std::vector<TabSpan>, 4> on_edge;
  for (const auto &t : tabs) {
    if (t.slice != s.id)
      continue;
    const double len = t.seg_hi - t.seg_lo;
    double t0 = t.seg_lo + tab_depth, t1 = t.seg_hi - tab_depth;
    if (t1 - t0 < len / 3.0) {
      t0 = t.seg_lo + len / 3.0;
      t1 = t.seg_hi - len / 3.0;
    }
    const bool across_u = t.across == s.u_axis();
    int edge;
    if (across_u)
      edge = t.outward > 0 ? 1 : 3;
    else
      edge = t.outward > 0 ? 2 : 0;
    on_edge[edge].push_back({t0, t1, tab_depth});
  }
  for (int i = 0; i < 4; ++i) {
    auto &v = on_edge[i];
    std::sort(v.begin(), v.end(), [](const TabSpan &a, const TabSpan &b) { return a.t0 < b.t0; });
    if (i >= 2)
      std::reverse(v.begin(), v.end());
  }

  std::vector<std::array<double, 2>> pts;
  pts.push_back({double(e.u0), double(e.v0)});
  for (const auto &t : on_edge[0]) {
    pts.push_back({t.t0, double(e.v0)});
    pts.push_back({t.t0, e.v0 - t.depth});
    pts.push_back({t.t1, e.v0 - t.depth});
    pts.push_back({t.t1, double(e.v0)});
  }
  pts.push_back({double(e.u1), double(e.v0)});
  for (const auto &t : on_edge[1]) {
    pts.push_back({double(e.u1), t.t0});
    pts.push_back({e.u1 + t.depth, t.t0});
    pts.push_back({e.u1 + t.depth, t.t1});
    pts.push_back({double(e.u1), t.t1});
  }
  pts.push_back({double(e.u1), double(e.v1)});
  for (const auto &t : on_edge[2]) {
    pts.push_back({t.t1, double(e.v1)});
    pts.push_back({t.t1, e.v1 + t.depth});
    pts.push_back({t.t0, e.v1 + t.depth});
    pts.push_back({t.t0, double(e.v1)});
  }
  pts.push_back({double(e.u0), double(e.v1)});
  for (const auto &t : on_edge[3]) {
    pts.push_back({double(e.u0), t.t1});
    pts.push_back({e.u0 - t.depth, t.t1});
    pts.push_back({e.u0 - t.depth, t.t0});
    pts.push_back({double(e.u0), t.t0});
  }
  return pts;
}

/// Model-space bounds of a slot cut: across the slot position by the slot
/// width, along the hinge axis over the cut span, clipped to the slice.
std::array<double, 4> slot_model_rect(const SlotCut &c, const Slice &s, double half_w) {
  double a0 = c.pos - half_w, a1 = c.pos + half_w;
  a0 = std::max<double>(a0, s.lo_along(c.across));
  a1 = std::min<double>(a1, s.hi_along(c.across));
  const double t0 = c.span_lo2 / 2.0, t1 = c.span_hi2 / 2.0;
  if (c.across == s.u_axis())
    return {a0, t0, a1, t1};
  return {t0, a0, t1, a1};
}

} // namespace

std::vector<std::uint8_t> SliceRaster::rgba8() const {
  std::vector<std::array<std::uint8_t, 4>> lut;
  for (const auto &c : palette)
    lut.push_back({to_byte(c.r), to_byte(c.g), to_byte(c.b), to_byte(c.a)});
  std::vector<std::uint8_t> out;
  out.reserve(labels.size() * 4);
  for (auto l : labels)
    out.insert(out.end(), lut[l].begin(), lut[l].end());
  return out;
}

SliceRaster rasterize_slice(const LabelVolume &labels, const TransferFunction &tf,
                            const Slice &slice, double scale, double px_per_mm) {
  const Dims &d = labels.dims();
  const Axis n = slice.normal, ua = slice.u_axis(), va = slice.v_axis();
  if (slice.plane < 0 || slice.plane > d[n])
    throw ValidationError("slice " + std::to_string(slice.id) + " plane " +
                              std::to_string(slice.plane) + " lies outside the volume",
                          kStage);
  const Rect2i &e = slice.extent;
  if (e.empty() || e.u0 < 0 || e.v0 < 0 || e.u1 > d[ua] || e.v1 > d[va])
    throw ValidationError("slice " + std::to_string(slice.id) +
                              " extent lies outside the volume",
                          kStage);
  if (!(scale > 0) || !(px_per_mm > 0))
    throw ValidationError("raster scale and density must be positive", kStage);

  SliceRaster r;
  r.slice = slice.id;
  r.px_per_mm = px_per_mm;
  const double ppv = scale * px_per_mm;
  r.width = std::max(1, static_cast<int>(std::ceil(e.width() * ppv - 1e-9)));
  r.height = std::max(1, static_cast<int>(std::ceil(e.height() * ppv - 1e-9)));

  r.palette.assign(static_cast<std::size_t>(labels.max_label()) + 1, RgbaF{});
  for (std::uint16_t l = 1; l <= labels.max_label(); ++l) {
    if (l > tf.visible_count())
      throw ValidationError("label " + std::to_string(l) +
                                " has no visible transfer-function bin",
                            kStage);
    const TfBin &b = tf.bin_for_label(l);
    r.palette[l] = {b.color.r, b.color.g, b.color.b, b.opacity};
  }

  std::vector<int> iu(r.width), iv(r.height);
  for (int c = 0; c < r.width; ++c)
    iu[c] = std::clamp(static_cast<int>(std::floor(e.u0 + (c + 0.5) / ppv)), e.u0, e.u1 - 1);
  for (int row = 0; row < r.height; ++row)
    iv[row] = std::clamp(static_cast<int>(std::floor(e.v1 - (row + 0.5) / ppv)), e.v0, e.v1 - 1);

  const int layer = std::min(slice.plane, d[n] - 1);
  r.labels.resize(static_cast<std::size_t>(r.width) * r.height);
  std::array<int, 3> p{};
  p[index(n)] = layer;
  for (int row = 0; row < r.height; ++row) {
    p[index(va)] = iv[row];
    for (int c = 0; c < r.width; ++c) {
      p[index(ua)] = iu[c];
      r.labels[static_cast<std::size_t>(row) * r.width + c] = labels.at(p[0], p[1], p[2]);
    }
  }
  return r;
}

std::string encode_png(int width, int height, const std::vector<std::uint8_t> &rgba) {
  if (width <= 0 || height <= 0 ||
      rgba.size() != static_cast<std::size_t>(width) * height * 4)
    throw ValidationError("PNG buffer does not match its dimensions", kStage);
  std::string raw;
  raw.reserve(rgba.size() + height);
  for (int y = 0; y < height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char *>(rgba.data()) +
                   static_cast<std::size_t>(y) * width * 4,
               static_cast<std::size_t>(width) * 4);
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::string z(len, '\0');
  if (compress2(reinterpret_cast<Bytef *>(z.data()), &len,
                reinterpret_cast<const Bytef *>(raw.data()),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw IoError("zlib compression failed", kStage);
  z.resize(len);

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(width));
  put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr += std::string("\x08\x06\x00\x00\x00", 5);
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", z);
  put_chunk(png, "IEND", "");
  return png;
}

std::string base64_encode(const std::string &bytes) {
  static const char *tbl =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (std::uint8_t(bytes[i]) << 16) |
                            (std::uint8_t(bytes[i + 1]) << 8) | std::uint8_t(bytes[i + 2]);
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += tbl[(v >> 6) & 63];
    out += tbl[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t v = std::uint8_t(bytes[i]) << 16;
    if (rest == 2)
      v |= std::uint8_t(bytes[i + 1]) << 8;
    out += tbl[(v >> 18) & 63];
    out += tbl[(v >> 12) & 63];
    out += rest == 2 ? tbl[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<SlotCut> slot_cuts(const std::vector<Hinge> &hinges,
                               const std::vector<Slice> &slices) {
  std::vector<SlotCut> cuts;
  for (const auto &h : hinges) {
    const Slice &a = slices.at(h.slice_a);
    const Slice &b = slices.at(h.slice_b);
    const Axis along = third_axis(a.normal, b.normal);
    for (const Slice *s : {&a, &b}) {
      const SlotKind kind = h.slot_on(s->id);
      if (kind == SlotKind::None)
        continue;
      SlotCut c;
      c.hinge = h.id;
      c.slice = s->id;
      c.kind = kind;
      c.along = along;
      c.across = s == &a ? b.normal : a.normal;
      c.pos = h.position_on(s->id);
      c.seg_lo = h.seg_lo;
      c.seg_hi = h.seg_hi;
      switch (kind) {
      case SlotKind::TopHalf:
        c.span_lo2 = h.seg_lo + h.seg_hi;
        c.span_hi2 = 2 * h.seg_hi;
        break;
      case SlotKind::BottomHalf:
        c.span_lo2 = 2 * h.seg_lo;
        c.span_hi2 = h.seg_lo + h.seg_hi;
        break;
      default:
        c.span_lo2 = 2 * h.seg_lo;
        c.span_hi2 = 2 * h.seg_hi;
      }
      cuts.push_back(c);
    }
  }
  return cuts;
}

HingeLine inverse_map(const SlotCut &cut, const std::vector<Slice> &slices) {
  const Slice &s = slices.at(cut.slice);
  HingeLine line;
  line.axis = cut.along;
  line.fixed[index(s.normal)] = s.plane;
  line.fixed[index(cut.across)] = cut.pos;
  // Up-down halves meet at the segment midpoint; either half determines the
  // whole segment from its span and the half it covers.
  switch (cut.kind) {
  case SlotKind::TopHalf:
    line.hi = cut.span_hi2 / 2;
    line.lo = cut.span_lo2 - line.hi;
    break;
  case SlotKind::BottomHalf:
    line.lo = cut.span_lo2 / 2;
    line.hi = cut.span_hi2 - line.lo;
    break;
  default:
    line.lo = cut.span_lo2 / 2;
    line.hi = cut.span_hi2 / 2;
  }
  return line;
}

std::vector<StopperTab> stopper_tabs(const std::vector<Hinge> &hinges,
                                     const std::vector<Slice> &slices) {
  std::vector<StopperTab> tabs;
  for (const auto &h : hinges) {
    if (!h.stopper_on)
      continue;
    const Slice &small = slices.at(*h.stopper_on);
    const Slice &big = slices.at(h.other(small.id));
    StopperTab t;
    t.hinge = h.id;
    t.slice = small.id;
    t.across = big.normal;
    t.edge = big.plane;
    t.outward = big.plane == small.hi_along(big.normal) ? 1 : -1;
    t.seg_lo = h.seg_lo;
    t.seg_hi = h.seg_hi;
    tabs.push_back(t);
  }
  return tabs;
}

std::array<double, 2> SliceFrame::to_page(double u, double v) const {
  const double lx = (u - extent.u0) * scale;
  const double ly = (extent.v1 - v) * scale;
  if (!placement.rotated)
    return {placement.x_mm + lx, placement.y_mm + ly};
  return {placement.x_mm + extent.height() * scale - ly, placement.y_mm + lx};
}

std::array<double, 2> SliceFrame::to_model(double x_mm, double y_mm) const {
  double lx, ly;
  if (!placement.rotated) {
    lx = x_mm - placement.x_mm;
    ly = y_mm - placement.y_mm;
  } else {
    lx = y_mm - placement.y_mm;
    ly = placement.x_mm + extent.height() * scale - x_mm;
  }
  return {extent.u0 + lx / scale, extent.v1 - ly / scale};
}

PageSet emit_pages(const PageLayout &layout, const std::vector<SliceRaster> &rasters,
                   const std::vector<Slice> &slices, const std::vector<Hinge> &hinges,
                   const std::vector<int> &slice_order, const RenderOptions &options) {
  if (!(options.slot_width_mm > 0))
    throw ValidationError("slot width must be positive", kStage);
  PageSet out;
  std::map<int, int> number;
  for (std::size_t i = 0; i < slice_order.size(); ++i)
    number[slice_order[i]] = static_cast<int>(i) + 1;
  std::map<int, const SliceRaster *> raster_of;
  for (const auto &r : rasters)
    raster_of[r.slice] = &r;

  std::set<int> placed;
  for (const auto &p : layout.placements) {
    if (!placed.insert(p.slice).second)
      throw ValidationError("slice " + std::to_string(p.slice) + " is placed twice", kStage);
    if (p.slice < 0 || p.slice >= static_cast<int>(slices.size()))
      throw ValidationError("layout references unknown slice " + std::to_string(p.slice),
                            kStage);
  }
  if (placed.size() != slices.size())
    throw ValidationError("layout places " + std::to_string(placed.size()) + " of " +
                              std::to_string(slices.size()) + " slices",
                          kStage);

  const auto cuts = slot_cuts(hinges, slices);
  const auto tabs = stopper_tabs(hinges, slices);
  const double scale = layout.scale;
  const double half_w = options.slot_width_mm / 2.0 / scale;
  const std::string dash = options.perforate ? " stroke-dasharray=\"2 1\"" : "";

  for (int page = 0; page < layout.sheets; ++page) {
    std::ostringstream art, cut, label;
    for (const auto &p : layout.placements) {
      if (p.page != page)
        continue;
      const Slice &s = slices[p.slice];
      const SliceFrame frame{p, s.extent, scale};
      const double ws = s.extent.width() * scale, hs = s.extent.height() * scale;
      const MmRect body{p.x_mm, p.y_mm, p.width_mm, p.height_mm};

      if (auto it = raster_of.find(s.id); it != raster_of.end()) {
        const SliceRaster &r = *it->second;
        const std::string png = encode_png(r.width, r.height, r.rgba8());
        std::string transform = "translate(" + num(p.x_mm) + "," + num(p.y_mm) + ")";
        if (p.rotated)
          transform = "translate(" + num(p.x_mm + hs) + "," + num(p.y_mm) + ") rotate(90)";
        art << "<image id=\"raster-" << s.id << "\" x=\"0\" y=\"0\" width=\"" << num(ws)
            << "\" height=\"" << num(hs) << "\" preserveAspectRatio=\"none\" transform=\""
            << transform << "\" xlink:href=\"data:image/png;base64," << base64_encode(png)
            << "\"/>\n";
      }

      const auto poly = outline(s, tabs, options.slot_width_mm / scale);
      cut << "<path id=\"outline-" << s.id << "\" d=\"";
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto q = frame.to_page(poly[i][0], poly[i][1]);
        cut << (i == 0 ? "M" : " L") << num(q[0]) << " " << num(q[1]);
      }
      cut << " Z\"" << dash << "/>\n";

      std::vector<MmRect> slot_rects;
      for (const auto &c : cuts) {
        if (c.slice != s.id)
          continue;
        const auto m = slot_model_rect(c, s, half_w);
        const MmRect r = page_rect(frame, m[0], m[1], m[2], m[3]);
        slot_rects.push_back(r);
        EmittedSlot e;
        e.cut = c;
        e.page = page;
        e.rect = r;
        e.width_mm = options.slot_width_mm;
        if (c.across == s.u_axis()) {
          e.line_lo = frame.to_page(c.pos, c.span_lo2 / 2.0);
          e.line_hi = frame.to_page(c.pos, c.span_hi2 / 2.0);
        } else {
          e.line_lo = frame.to_page(c.span_lo2 / 2.0, c.pos);
          e.line_hi = frame.to_page(c.span_hi2 / 2.0, c.pos);
        }
        out.slots.push_back(e);
        cut << "<rect id=\"slot-" << c.hinge << "-" << c.slice << "\" class=\""
            << to_string(c.kind) << "\" x=\"" << num(r.x) << "\" y=\"" << num(r.y)
            << "\" width=\"" << num(r.w) << "\" height=\"" << num(r.h) << "\"" << dash
            << "/>\n";
      }

      // Order number on the slice, avoiding slot cuts.
      const int n = number.count(s.id) ? number.at(s.id) : 0;
      const std::string text = std::to_string(n);
      const double font = std::clamp(0.3 * std::min(p.width_mm, p.height_mm), 1.5, 5.0);
      const double bw = 0.6 * font * static_cast<double>(text.size()) + 0.2, bh = font;
      const double inset = 0.5;
      const MmRect usable = grow(body, -inset);
      std::vector<MmRect> candidates;
      for (int step = 0; step < 5; ++step) {
        const double dx = step * 0.1 * std::max(0.0, usable.w - bw);
        const double dy = step * 0.1 * std::max(0.0, usable.h - bh);
        candidates.push_back({usable.x + dx, usable.y + dy, bw, bh});
        candidates.push_back({usable.x + usable.w - bw - dx, usable.y + dy, bw, bh});
        candidates.push_back({usable.x + dx, usable.y + usable.h - bh - dy, bw, bh});
        candidates.push_back({usable.x + usable.w - bw - dx, usable.y + usable.h - bh - dy, bw, bh});
      }
      LabelPlacement lp;
      lp.slice = s.id;
      lp.number = n;
      lp.collided = true;
      lp.on_slice = candidates.front();
      for (const auto &cand : candidates) {
        if (!inside(cand, usable))
          continue;
        bool clear = true;
        for (const auto &r : slot_rects)
          clear = clear && !cand.intersects(grow(r, 0.3));
        if (clear) {
          lp.on_slice = cand;
          lp.collided = false;
          break;
        }
      }
      if (lp.collided)
        out.warnings.push_back("order label of slice " + std::to_string(s.id) +
                               " overlaps a cut path");

      // Frame label in the gutter just above the slice (below if a tab is in
      // the way).
      const double fh = std::min(font, std::max(0.8, layout.gutter_mm / 2.0 - 0.4));
      const double fw = 0.6 * fh * static_cast<double>(text.size()) + 0.2;
      MmRect above{p.x_mm, p.y_mm - fh - 0.2, fw, fh};
      MmRect below{p.x_mm, p.y_mm + p.height_mm + 0.2, fw, fh};
      std::vector<MmRect> tab_rects;
      for (const auto &t : tabs) {
        if (t.slice != s.id)
          continue;
        const double d = options.slot_width_mm / scale;
        const double e0 = t.outward > 0 ? t.edge : t.edge - d;
        const double e1 = t.outward > 0 ? t.edge + d : t.edge;
        tab_rects.push_back(t.across == s.u_axis()
                                ? page_rect(frame, e0, t.seg_lo, e1, t.seg_hi)
                                : page_rect(frame, t.seg_lo, e0, t.seg_hi, e1));
      }
      lp.on_frame = above;
      for (const auto &r : tab_rects)
        if (above.intersects(r))
          lp.on_frame = below;
      out.labels.push_back(lp);

      label << "<text class=\"on-slice\" x=\"" << num(lp.on_slice.x + 0.1) << "\" y=\""
            << num(lp.on_slice.y + 0.85 * bh) << "\" font-size=\"" << num(font) << "\">"
            << text << "</text>\n";
      label << "<text class=\"on-frame\" x=\"" << num(lp.on_frame.x + 0.1) << "\" y=\""
            << num(lp.on_frame.y + 0.85 * fh) << "\" font-size=\"" << num(fh) << "\">"
            << text << "</text>\n";
    }

    std::ostringstream svg;
    svg << svg_open(layout.page.width_mm, layout.page.height_mm);
    svg << "<g id=\"art\">\n" << art.str() << "</g>\n";
    svg << "<g id=\"cut\" fill=\"none\" stroke=\"#ff0000\" stroke-width=\"0.1\">\n"
        << cut.str() << "</g>\n";
    svg << "<g id=\"label\" font-family=\"sans-serif\" fill=\"#000000\">\n"
        << label.str() << "</g>\n";
    svg << "</svg>\n";
    out.svgs.push_back(svg.str());
  }
  return out;
}

std::vector<InstructionStep> instruction_steps(const AssemblyPlan &plan,
                                               const std::vector<Hinge> &hinges,
                                               const std::vector<int> &slice_order) {
  std::map<int, int> number;
  for (std::size_t i = 0; i < slice_order.size(); ++i)
    number[slice_order[i]] = static_cast<int>(i) + 1;
  std::map<int, const Hinge *> by_id;
  for (const auto &h : hinges)
    by_id[h.id] = &h;

  std::vector<InstructionStep> steps;
  for (std::size_t i = 0; i < plan.hinge_order.size(); ++i) {
    const Hinge &h = *by_id.at(plan.hinge_order[i]);
    InstructionStep st;
    st.step = static_cast<int>(i) + 1;
    st.hinge = h.id;
    const int na = number.at(h.slice_a), nb = number.at(h.slice_b);
    st.inserted = std::max(na, nb);
    st.into = std::min(na, nb);
    st.kind = h.kind;
    if (h.stopper_on)
      st.stopper = number.at(*h.stopper_on);
    st.text = "stitch slice " + std::to_string(st.inserted) + " into slice " +
              std::to_string(st.into) + " (" + to_string(h.kind) + ")";
    if (st.stopper)
      st.text += ", stopper tab on slice " + std::to_string(*st.stopper);
    steps.push_back(st);
  }
  return steps;
}

std::string emit_instructions(const std::vector<InstructionStep> &steps,
                              const std::vector<Slice> &slices,
                              const std::vector<int> &slice_order,
                              const std::vector<OctreeCut> &cuts,
                              const SlicingPlanes &planes, const Dims &dims) {
  std::map<int, int> number;
  for (std::size_t i = 0; i < slice_order.size(); ++i)
    number[slice_order[i]] = static_cast<int>(i) + 1;

  const double width = 210.0, line = 5.0, top = 20.0;
  std::set<int> level_planes;
  for (const auto &c : cuts)
    if (c.normal == planes.hinge_axis())
      level_planes.insert(c.plane);
  std::vector<std::string> level_cuts;
  for (int p : level_planes)
    level_cuts.push_back(std::to_string(p));
  const double list_h = top + line * static_cast<double>(steps.size() + 3);
  const double view = 150.0;
  const double height = std::max(297.0, list_h + view + 40.0);

  std::ostringstream svg;
  svg << svg_open(width, height);
  svg << "<g id=\"steps\" font-family=\"sans-serif\" font-size=\"3.5\" fill=\"#000000\">\n";
  svg << "<text x=\"15\" y=\"12\" font-size=\"6\">Assembly instructions</text>\n";
  double y = top;
  for (const auto &st : steps) {
    svg << "<text x=\"15\" y=\"" << num(y) << "\">" << st.step << ". "
        << escape_xml(st.text) << "</text>\n";
    y += line;
  }
  if (!level_cuts.empty()) {
    std::string joined;
    for (const auto &s : level_cuts)
      joined += (joined.empty() ? "" : ", ") + s;
    svg << "<text x=\"15\" y=\"" << num(y) << "\">octree cuts across the view axis at "
        << escape_xml(joined) << "</text>\n";
    y += line;
  }
  svg << "</g>\n";

  // View down the hinge axis: horizontal = first normal, vertical = second.
  const Axis ha = planes.first, va = planes.second;
  const double extent = std::max(dims[ha], dims[va]);
  const double k = view / std::max(extent, 1.0);
  const double ox = (width - dims[ha] * k) / 2.0, oy = y + 10.0;
  auto px = [&](double h) { return ox + h * k; };
  auto py = [&](double v) { return oy + (dims[va] - v) * k; };

  svg << "<g id=\"schematic\" fill=\"none\" stroke-width=\"0.3\">\n";
  svg << "<rect x=\"" << num(px(0)) << "\" y=\"" << num(py(dims[va])) << "\" width=\""
      << num(dims[ha] * k) << "\" height=\"" << num(dims[va] * k)
      << "\" stroke=\"#999999\"/>\n";
  for (const auto &c : cuts) {
    if (c.normal == ha)
      svg << "<line class=\"octree-cut\" x1=\"" << num(px(c.plane)) << "\" y1=\""
          << num(py(c.bounds.lo_of(va))) << "\" x2=\"" << num(px(c.plane)) << "\" y2=\""
          << num(py(c.bounds.hi_of(va))) << "\" stroke=\"#3366cc\" stroke-dasharray=\"1.5 1\"/>\n";
    else if (c.normal == va)
      svg << "<line class=\"octree-cut\" x1=\"" << num(px(c.bounds.lo_of(ha))) << "\" y1=\""
          << num(py(c.plane)) << "\" x2=\"" << num(px(c.bounds.hi_of(ha))) << "\" y2=\""
          << num(py(c.plane)) << "\" stroke=\"#3366cc\" stroke-dasharray=\"1.5 1\"/>\n";
  }
  std::ostringstream tags;
  for (const auto &s : slices) {
    const int n = number.count(s.id) ? number.at(s.id) : 0;
    double x1, y1, x2, y2;
    if (s.normal == ha) {
      x1 = x2 = px(s.plane);
      y1 = py(s.lo_along(va));
      y2 = py(s.hi_along(va));
    } else {
      y1 = y2 = py(s.plane);
      x1 = px(s.lo_along(ha));
      x2 = px(s.hi_along(ha));
    }
    svg << "<line class=\"slice\" x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\""
        << num(x2) << "\" y2=\"" << num(y2) << "\" stroke=\"#000000\"/>\n";
    const double tx = s.normal == ha ? x1 + 0.8 : x1 + 0.8 + 3.0 * ((n - 1) % 3);
    const double ty = s.normal == ha ? y2 + 3.5 + 3.0 * ((n - 1) % 3) : y1 - 0.8;
    tags << "<text x=\"" << num(tx) << "\" y=\"" << num(ty) << "\">" << n << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<g id=\"order\" font-family=\"sans-serif\" font-size=\"2.5\" fill=\"#cc0000\">\n"
      << tags.str() << "</g>\n";
  svg << "</svg>\n";
  return svg.str();
}

StabilityReport stability_check(const std::vector<Slice> &slices,
                                const SlicingPlanes &planes, const Dims &dims,
                                double slot_width_mm, int stopper_count,
                                double min_slot_width_mm) {
  StabilityReport r;
  r.axes = {planes.first, planes.second};
  double total = 0;
  for (const auto &s : slices) {
    const double area = static_cast<double>(s.extent.area());
    total += area;
    for (int i = 0; i < 2; ++i) {
      const Axis a = r.axes[i];
      const double centroid =
          s.normal == a ? s.plane : 0.5 * (s.lo_along(a) + s.hi_along(a));
      r.net_torque[i] += area * (centroid - dims[a] / 2.0);
    }
  }
  r.balanced = true;
  for (int i = 0; i < 2; ++i) {
    r.tolerance[i] = 0.05 * total * dims[r.axes[i]] / 2.0;
    if (std::fabs(r.net_torque[i]) > r.tolerance[i])
      r.balanced = false;
  }
  r.min_slot_width_mm = slot_width_mm;
  r.slot_width_flagged = slot_width_mm < min_slot_width_mm;
  r.stopper_count = stopper_count;
  if (!r.balanced)
    r.notes.push_back("model is not weight-balanced; consider adding empty slices "
                      "at the bottom on the light side");
  if (r.slot_width_flagged)
    r.notes.push_back("slot width " + num(slot_width_mm) + " mm is below the " +
                      num(min_slot_width_mm) + " mm minimum");
  return r;
}

} // namespace sliceforge
