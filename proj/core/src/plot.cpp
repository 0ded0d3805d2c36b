#include "capspec/plot.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "capspec/numerics.hpp"

namespace capspec {

namespace {

struct Range {
  double lo = 0.0, hi = 1.0;
  void grow(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

} // namespace

void write_svg_plot(std::ostream& os, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series) {
  const double W = 800, H = 500, ml = 70, mr = 20, mt = 40, mb = 50;

  bool first = true;
  Range xr, yr;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        xr.lo = xr.hi = x;
        yr.lo = yr.hi = y;
        first = false;
      }
      xr.grow(x);
      yr.grow(y);
    }
  if (first) {
    xr = {0.0, 1.0};
    yr = {0.0, 1.0};
  }
  if (xr.hi == xr.lo) xr.hi = xr.lo + 1.0;
  if (yr.hi == yr.lo) yr.hi = yr.lo + 1.0;
  const double ypad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= ypad;
  yr.hi += ypad;

  auto px = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - yr.lo) / (yr.hi - yr.lo) * (H - mt - mb); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
        "width=\"800\" height=\"500\">\n";
  os << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
     << "</text>\n";

  // axes box
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr)
     << "\" height=\"" << (H - mt - mb)
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const double xs = nice_step(xr.hi - xr.lo), ys = nice_step(yr.hi - yr.lo);
  for (double x = std::ceil(xr.lo / xs) * xs; x <= xr.hi + 1e-12; x += xs) {
    os << "<line x1=\"" << fmt_sig(px(x), 6) << "\" y1=\"" << (H - mb) << "\" x2=\""
       << fmt_sig(px(x), 6) << "\" y2=\"" << (H - mb + 5)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt_sig(px(x), 6) << "\" y=\"" << (H - mb + 18)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_sig(x, 4) << "</text>\n";
  }
  for (double y = std::ceil(yr.lo / ys) * ys; y <= yr.hi + 1e-12; y += ys) {
    os << "<line x1=\"" << (ml - 5) << "\" y1=\"" << fmt_sig(py(y), 6) << "\" x2=\"" << ml
       << "\" y2=\"" << fmt_sig(py(y), 6) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (ml - 8) << "\" y=\"" << fmt_sig(py(y) + 4, 6)
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt_sig(y, 4) << "</text>\n";
  }
  os << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << (H - 10)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
  os << "<text x=\"18\" y=\"" << (mt + (H - mt - mb) / 2)
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << (mt + (H - mt - mb) / 2) << ")\">" << ylabel << "</text>\n";

  for (const auto& s : series) {
    if (s.points.empty()) continue;
    os << "<path fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" d=\"";
    for (size_t i = 0; i < s.points.size(); ++i)
      os << (i ? "L" : "M") << fmt_sig(px(s.points[i].first), 7) << " "
         << fmt_sig(py(s.points[i].second), 7);
    os << "\"/>\n";
  }

  double ly = mt + 16;
  for (const auto& s : series) {
    os << "<line x1=\"" << (W - mr - 150) << "\" y1=\"" << ly << "\" x2=\""
       << (W - mr - 120) << "\" y2=\"" << ly << "\" stroke=\"" << s.color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << (W - mr - 114) << "\" y=\"" << (ly + 4)
       << "\" font-size=\"12\">" << s.label << "</text>\n";
    ly += 18;
  }
  os << "</svg>\n";
}

} // namespace capspec
