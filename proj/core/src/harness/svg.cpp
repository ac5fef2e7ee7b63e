#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bdl/harness.hpp"

namespace bdl::harness {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string px(double v) { return fmt("%.2f", v); }

std::string tick_label(double v) {
  if (v == 0.0) return "0";
  return fmt("%.4g", v);
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;  // in transformed units

  static bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }
  double transform(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (transform(v) - lo) / (hi - lo); }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis a{log};
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values) {
    if (!Axis::usable(v, log)) continue;
    lo = std::min(lo, a.transform(v));
    hi = std::max(hi, a.transform(v));
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
    const double pad = log ? 0.5 : std::max(0.5, 0.1 * std::abs(lo));
    lo -= pad;
    hi += pad;
  } else if (!log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  } else {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

// Tick positions in data units.
std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  if (a.log) {
    const int step = std::max(1, static_cast<int>(std::ceil((a.hi - a.lo) / 8.0)));
    for (int e = static_cast<int>(std::ceil(a.lo)); e <= static_cast<int>(std::floor(a.hi)); e += step) {
      out.push_back(std::pow(10.0, e));
    }
    return out;
  }
  const double raw = (a.hi - a.lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  for (double t = std::ceil(a.lo / step) * step; t <= a.hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

}  // namespace

SvgImage emit_svg(const std::vector<Series>& series, const PlotStyle& style) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  if (xs.empty()) throw InvalidArgument("emit_svg: no data points");
  if (style.width < 200 || style.height < 150) throw InvalidArgument("emit_svg: canvas too small");

  const Axis ax = make_axis(xs, style.log_x);
  const Axis ay = make_axis(ys, style.log_y);
  const double left = 70, right = 150, top = 36, bottom = 52;
  const double pw = style.width - left - right, ph = style.height - top - bottom;
  const auto X = [&](double x) { return left + ax.frac(x) * pw; };
  const auto Y = [&](double y) { return top + (1.0 - ay.frac(y)) * ph; };

  SvgImage img;
  std::string& o = img.text;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
       "\" height=\"" + std::to_string(style.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty()) {
    o += "<text x=\"" + px(left + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" +
         xml_escape(style.title) + "</text>\n";
  }
  o += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(pw) + "\" height=\"" + px(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(ax)) {
    const double x = X(t);
    o += "<line x1=\"" + px(x) + "\" y1=\"" + px(top + ph) + "\" x2=\"" + px(x) + "\" y2=\"" + px(top + ph + 5) +
         "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + px(x) + "\" y=\"" + px(top + ph + 17) + "\" text-anchor=\"middle\">" + tick_label(t) +
         "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = Y(t);
    o += "<line x1=\"" + px(left - 5) + "\" y1=\"" + px(y) + "\" x2=\"" + px(left) + "\" y2=\"" + px(y) +
         "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + px(left - 8) + "\" y=\"" + px(y + 4) + "\" text-anchor=\"end\">" + tick_label(t) +
         "</text>\n";
  }
  if (!style.x_label.empty()) {
    o += "<text x=\"" + px(left + pw / 2) + "\" y=\"" + px(style.height - 12.0) + "\" text-anchor=\"middle\">" +
         xml_escape(style.x_label) + (style.log_x ? " (log)" : "") + "</text>\n";
  }
  if (!style.y_label.empty()) {
    o += "<text transform=\"translate(16," + px(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         xml_escape(style.y_label) + (style.log_y ? " (log)" : "") + "</text>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const std::string color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (const auto& [x, y] : series[k].points) {
      if (!Axis::usable(x, style.log_x)) continue;
      if (!Axis::usable(y, style.log_y)) {
        // Clipped marker: downward triangle on the bottom axis.
        const double cx = X(x), cy = top + ph;
        o += "<path d=\"M" + px(cx - 4) + "," + px(cy - 8) + " L" + px(cx + 4) + "," + px(cy - 8) + " L" + px(cx) +
             "," + px(cy) + " Z\" fill=\"" + color + "\"/>\n";
        ++img.clipped_markers;
        continue;
      }
      if (!pts.empty()) pts.push_back(' ');
      pts += px(X(x)) + "," + px(Y(y));
    }
    if (!pts.empty()) {
      o += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    const double ly = top + 12 + 16.0 * k;
    o += "<line x1=\"" + px(left + pw + 10) + "\" y1=\"" + px(ly) + "\" x2=\"" + px(left + pw + 30) + "\" y2=\"" +
         px(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + px(left + pw + 35) + "\" y=\"" + px(ly + 4) + "\">" + xml_escape(series[k].label) +
         "</text>\n";
  }
  o += "</svg>\n";
  return img;
}

}  // namespace bdl::harness
