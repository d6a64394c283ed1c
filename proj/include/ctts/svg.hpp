#pragma once

// Minimal static SVG charts for sweep trade-off curves and adjusted survival
// curves. No interactivity, no external assets.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace ctts::svg {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool step = false;     // draw as a right-continuous step curve
  bool markers = false;  // draw a dot per point
  // optional shaded band (same x as points)
  std::vector<double> band_low, band_high;
};

struct Chart {
  std::string title;
  std::string x_label, y_label;
  std::optional<std::pair<double, double>> x_range, y_range;
  std::vector<Series> series;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline void render(const Chart& chart, std::ostream& out) {
  constexpr double W = 640, H = 420, L = 60, R = 150, T = 40, B = 50;
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : chart.series)
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  if (chart.x_range) std::tie(x0, x1) = *chart.x_range;
  if (chart.y_range) std::tie(y0, y1) = *chart.y_range;
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << detail::escape(chart.title) << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    out << "<text x=\"" << detail::num(px(xv)) << "\" y=\"" << H - B + 15 << "\" text-anchor=\"middle\">" << detail::num(xv) << "</text>\n";
    out << "<text x=\"" << L - 5 << "\" y=\"" << detail::num(py(yv) + 4) << "\" text-anchor=\"end\">" << detail::num(yv) << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << detail::escape(chart.x_label) << "</text>\n";
  out << "<text x=\"15\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << (T + H - B) / 2 << ")\">"
      << detail::escape(chart.y_label) << "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    const char* color = palette[i % std::size(palette)];
    if (!s.band_low.empty() && s.band_low.size() == s.points.size()) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t k = 0; k < s.points.size(); ++k)
        out << detail::num(px(s.points[k].first)) << ',' << detail::num(py(s.band_high[k])) << ' ';
      for (std::size_t k = s.points.size(); k-- > 0;)
        out << detail::num(px(s.points[k].first)) << ',' << detail::num(py(s.band_low[k])) << ' ';
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      const auto& [x, y] = s.points[k];
      if (s.step && k > 0) out << detail::num(px(x)) << ',' << detail::num(py(s.points[k - 1].second)) << ' ';
      out << detail::num(px(x)) << ',' << detail::num(py(y)) << ' ';
    }
    out << "\"/>\n";
    if (s.markers)
      for (const auto& [x, y] : s.points)
        out << "<circle cx=\"" << detail::num(px(x)) << "\" cy=\"" << detail::num(py(y)) << "\" r=\"2\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 15 * (i + 1) << "\" fill=\"" << color << "\">" << detail::escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace ctts::svg
