#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tmfa/constants.hpp"
#include "tmfa/io.hpp"

namespace tmfa {

// ---------------------------------------------------------------------------
// Minimal SVG line plots. The CSVs are the contract; these exist so a run
// can be eyeballed without leaving the output directory.
// ---------------------------------------------------------------------------

struct SvgSeries {
  std::string label;
  std::string color = "#1f6feb";
  std::vector<double> x, y;
};

namespace svg_detail {

inline std::string num(double v) { return fmt_num(std::round(v * 100.0) / 100.0); }

inline void span(const std::vector<SvgSeries>& series, bool use_y, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto& s : series)
    for (double v : use_y ? s.y : s.x) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
}

}  // namespace svg_detail

/// Cartesian chart of one or more series; axes are autoscaled and labeled
/// with their end values only.
inline std::string svg_chart(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<SvgSeries>& series) {
  const double w = 900, h = 520, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0, x1, y0, y1;
  svg_detail::span(series, false, x0, x1);
  svg_detail::span(series, true, y0, y1);
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - y0) / (y1 - y0) * (h - mt - mb); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_detail::num(w) +
                  "\" height=\"" + svg_detail::num(h) + "\" font-family=\"sans-serif\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + svg_detail::num(w / 2) + "\" y=\"24\" text-anchor=\"middle\">" + title +
       "</text>\n";
  s += "<rect x=\"" + svg_detail::num(ml) + "\" y=\"" + svg_detail::num(mt) + "\" width=\"" +
       svg_detail::num(w - ml - mr) + "\" height=\"" + svg_detail::num(h - mt - mb) +
       "\" fill=\"none\" stroke=\"#888\"/>\n";
  s += "<text x=\"" + svg_detail::num(w / 2) + "\" y=\"" + svg_detail::num(h - 12) +
       "\" text-anchor=\"middle\" font-size=\"12\">" + x_label + " [" + fmt_num(x0) + " .. " +
       fmt_num(x1) + "]</text>\n";
  s += "<text x=\"16\" y=\"" + svg_detail::num(h / 2) + "\" font-size=\"12\" transform=\"rotate(-90 16 " +
       svg_detail::num(h / 2) + ")\" text-anchor=\"middle\">" + y_label + " [" + fmt_num(y0) +
       " .. " + fmt_num(y1) + "]</text>\n";

  double legend_y = mt + 16;
  for (const auto& ser : series) {
    std::string pts;
    for (size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.y[i])) continue;
      pts += svg_detail::num(px(ser.x[i])) + "," + svg_detail::num(py(ser.y[i])) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"1.5\" points=\"" +
         pts + "\"/>\n";
    s += "<text x=\"" + svg_detail::num(ml + 10) + "\" y=\"" + svg_detail::num(legend_y) +
         "\" font-size=\"12\" fill=\"" + ser.color + "\">" + ser.label + "</text>\n";
    legend_y += 16;
  }
  return s + "</svg>\n";
}

/// Polar cut plot; angles in degrees, radii in dB clipped to a floor so
/// nulls stay inside the chart.
inline std::string svg_polar(const std::string& title, const std::vector<SvgSeries>& series,
                             double floor_db = -40.0) {
  const double w = 560, h = 560, cx = w / 2, cy = h / 2 + 10, r_max = 230;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    for (double v : s.y) top = std::max(top, v);
  auto radius = [&](double db) {
    return r_max * std::clamp((db - (top + floor_db)) / (-floor_db), 0.0, 1.0);
  };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_detail::num(w) +
                  "\" height=\"" + svg_detail::num(h) + "\" font-family=\"sans-serif\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + svg_detail::num(cx) + "\" y=\"24\" text-anchor=\"middle\">" + title +
       "</text>\n";
  for (int ring = 1; ring <= 4; ++ring)
    s += "<circle cx=\"" + svg_detail::num(cx) + "\" cy=\"" + svg_detail::num(cy) + "\" r=\"" +
         svg_detail::num(r_max * ring / 4.0) + "\" fill=\"none\" stroke=\"#ddd\"/>\n";

  double legend_y = 44;
  for (const auto& ser : series) {
    std::string pts;
    for (size_t i = 0; i < ser.x.size(); ++i) {
      const double a = deg_to_rad(ser.x[i] - 90.0);
      const double r = radius(ser.y[i]);
      pts += svg_detail::num(cx + r * std::cos(a)) + "," + svg_detail::num(cy + r * std::sin(a)) +
             " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"1.5\" points=\"" +
         pts + "\"/>\n";
    s += "<text x=\"16\" y=\"" + svg_detail::num(legend_y) + "\" font-size=\"12\" fill=\"" +
         ser.color + "\">" + ser.label + "</text>\n";
    legend_y += 16;
  }
  return s + "</svg>\n";
}

}  // namespace tmfa
