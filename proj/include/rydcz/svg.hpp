#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace rydcz {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;  // circles instead of a line
  std::string dash;      // stroke-dasharray, empty = solid
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool log_x = false, log_y = false;
  std::vector<Series> series;
  double width = 640, height = 420;
};

namespace svg_detail {

inline std::string num(double x, int prec = 2) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, prec);
  return std::string(buf, r.ptr);
}

inline std::string tick_label(double v) {
  char buf[64];
  const double a = std::abs(v);
  auto r = (a != 0 && (a < 1e-3 || a >= 1e4)) ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 0)
                                               : std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, r.ptr);
}

inline std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * span ? 0 : v);
  return t;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    return (a - lo) / (hi - lo);
  }

  std::vector<double> ticks() const {
    if (!log) return linear_ticks(lo, hi);
    std::vector<double> t;
    const int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8)));
    for (int e = static_cast<int>(std::ceil(lo)); e <= static_cast<int>(std::floor(hi)); e += step) t.push_back(std::pow(10.0, e));
    return t;
  }
};

inline Axis make_axis(const std::vector<const std::vector<double>*>& data, bool log) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* v : data)
    for (double x : *v) {
      if (!std::isfinite(x) || (log && x <= 0)) continue;
      const double a = log ? std::log10(x) : x;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1;
  } else {
    if (hi <= lo) {
      const double d = lo == 0 ? 1 : std::abs(lo) * 0.1;
      lo -= d;
      hi += d;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, log};
}

inline const char* palette(std::size_t i) {
  static const char* c[] = {"#000000", "#1f5fbf", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#5d6d7e"};
  return c[i % 7];
}

}  // namespace svg_detail

// self-contained SVG 1.1 line plot; non-finite points (and non-positive ones
// on log axes) break the polyline
inline std::string render_svg(const PlotSpec& spec) {
  using namespace svg_detail;
  std::vector<const std::vector<double>*> xs, ys;
  for (const auto& s : spec.series) {
    xs.push_back(&s.x);
    ys.push_back(&s.y);
  }
  const Axis ax = make_axis(xs, spec.log_x), ay = make_axis(ys, spec.log_y);
  const double W = spec.width, H = spec.height;
  const double left = 78, right = 20, top = 34, bottom = 52;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double v) { return left + pw * ax.map(v); };
  auto py = [&](double v) { return top + ph * (1 - ay.map(v)); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(W, 0) << "\" height=\"" << num(H, 0)
    << "\" viewBox=\"0 0 " << num(W, 0) << ' ' << num(H, 0) << "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << num(W, 0) << "\" height=\"" << num(H, 0) << "\" fill=\"#ffffff\"/>\n";
  if (!spec.title.empty())
    o << "<text x=\"" << num(left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
      << "</text>\n";

  for (double t : ax.ticks()) {
    const double x = px(t);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(top) << "\" x2=\"" << num(x) << "\" y2=\"" << num(top + ph)
      << "\" stroke=\"#e5e5e5\"/>\n"
      << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">" << tick_label(t)
      << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + pw) << "\" y2=\"" << num(y)
      << "\" stroke=\"#e5e5e5\"/>\n"
      << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"#000000\"/>\n";
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"middle\">" << escape(spec.xlabel)
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num(top + ph / 2) << ")\">" << escape(spec.ylabel) << "</text>\n";

  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const Series& s = spec.series[k];
    const char* col = palette(k);
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.markers) {
      for (std::size_t i = 0; i < n; ++i)
        if (usable(s.x[i], s.y[i]))
          o << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"2.5\" fill=\"none\" stroke=\""
            << col << "\"/>\n";
      continue;
    }
    std::string pts;
    auto flush = [&] {
      if (pts.empty()) return;
      o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\"";
      if (!s.dash.empty()) o << " stroke-dasharray=\"" << s.dash << "\"";
      o << " points=\"" << pts << "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (!usable(s.x[i], s.y[i])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += num(px(s.x[i])) + ',' + num(py(s.y[i]));
    }
    flush();
  }

  // legend
  double ly = top + 14;
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const Series& s = spec.series[k];
    if (s.label.empty()) continue;
    const double lx = left + pw - 150;
    if (s.markers)
      o << "<circle cx=\"" << num(lx + 11) << "\" cy=\"" << num(ly - 4) << "\" r=\"2.5\" fill=\"none\" stroke=\"" << palette(k)
        << "\"/>\n";
    else
      o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 22) << "\" y2=\"" << num(ly - 4)
        << "\" stroke=\"" << palette(k) << "\" stroke-width=\"1.5\""
        << (s.dash.empty() ? std::string() : " stroke-dasharray=\"" + s.dash + "\"") << "/>\n";
    o << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
    ly += 16;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace rydcz
