#include "widthlab/render.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace widthlab {

namespace {

constexpr std::size_t kMaxWidthGeodesics = 8;

struct Layer {
  std::string style;
  std::vector<std::vector<Vec2>> lines;
  bool closed = false;
};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

std::vector<Vec2> picture(const SurfaceChart& s, const std::vector<Vec2>& working) {
  std::vector<Vec2> out;
  out.reserve(working.size());
  for (const Vec2& x : working) out.push_back(s.picture(x));
  return out;
}

}  // namespace

std::string render_svg(const BoundaryGeodesics& g, const DistanceField& f, const WidthResult& w,
                       const std::vector<FreeBoundaryGeodesic>& fbg, int frames, const std::string& title) {
  const BoundaryCurve& c = g.curve();
  const SurfaceChart& s = c.surface();
  const double L = c.length();

  Layer curve{"fill=\"none\" stroke=\"#222\" stroke-width=\"2\"", {}, !c.deck().norm()};
  std::vector<Vec2> loop = c.working_samples();
  if (c.deck().norm() > 0) loop.push_back(loop.front() + c.deck());
  curve.lines.push_back(picture(s, loop));

  Layer sweep{"fill=\"none\" stroke=\"#9aa\" stroke-width=\"1\"", {}, false};
  const auto& lift = w.optimal.lift;
  for (int j = 1; j <= frames && lift.size() > 2; ++j) {
    const std::size_t k = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * static_cast<double>(lift.size() - 1) / (frames + 1)));
    const PairPoint pp = f.pair(static_cast<int>(lift[k].first % f.n), static_cast<int>(lift[k].second % f.n));
    if (pp.is_singleton) continue;
    const auto ks = g.minimizers(pp.s1, pp.s2);
    if (!ks.empty()) sweep.lines.push_back(picture(s, g.path(pp.s1, pp.s2, ks.front()).working));
  }

  Layer width{"fill=\"none\" stroke=\"#c22\" stroke-width=\"2.5\"", {}, false};
  if (!w.argmax_pair.is_singleton) {
    // A continuous family of minimizers is thinned to a few representatives.
    const auto ks = g.minimizers(w.argmax_pair.s1, w.argmax_pair.s2);
    const std::size_t stride = (ks.size() + kMaxWidthGeodesics - 1) / kMaxWidthGeodesics;
    for (std::size_t i = 0; i < ks.size(); i += stride)
      width.lines.push_back(picture(s, g.path(w.argmax_pair.s1, w.argmax_pair.s2, ks[i]).working));
  }

  Layer normals{"fill=\"none\" stroke=\"#26c\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"", {}, false};
  for (const auto& fb : fbg) normals.lines.push_back(picture(s, fb.path.working));

  const std::vector<const Layer*> layers = {&curve, &sweep, &normals, &width};
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const Layer* l : layers)
    for (const auto& line : l->lines)
      for (const Vec2& p : line) {
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
      }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double scale = 560.0 / span, pad = 40.0;
  const double width_px = (x1 - x0) * scale + 2 * pad, height_px = (y1 - y0) * scale + 2 * pad + 24;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.0f", width_px) << "\" height=\""
      << fmt("%.0f", height_px) << "\" viewBox=\"0 0 " << fmt("%.0f", width_px) << ' ' << fmt("%.0f", height_px)
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << pad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title
      << "  S = " << fmt("%.9g", w.S) << "  L = " << fmt("%.9g", L) << "</text>\n";
  for (const Layer* l : layers) {
    for (const auto& line : l->lines) {
      out << '<' << (l->closed ? "polygon" : "polyline") << " points=\"";
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (i) out << ' ';
        out << fmt("%.2f", (line[i].x() - x0) * scale + pad) << ','
            << fmt("%.2f", (y1 - line[i].y()) * scale + pad + 24);
      }
      out << "\" " << l->style << "/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace widthlab
