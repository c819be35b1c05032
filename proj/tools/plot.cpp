#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nlgeom::cli {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;

  double map(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (map(v) - lo) / (hi - lo); }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

Axis fit(bool log, const std::vector<Series>& series, bool useX) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const double v = useX ? s.x[i] : s.y[i];
      if (!a.usable(v) || !a.usable(useX ? s.y[i] : s.x[i])) continue;
      lo = std::min(lo, a.map(v));
      hi = std::max(hi, a.map(v));
    }
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) {
    const double pad = log ? 0.5 : std::max(1e-12, std::abs(lo) * 0.1 + 1e-3);
    lo -= pad;
    hi += pad;
  } else if (!log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace

std::string renderSvg(const PlotSpec& spec) {
  const Axis ax = fit(spec.logX, spec.series, true);
  const Axis ay = fit(spec.logY, spec.series, false);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.frac(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.frac(v)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    const double xv = ax.lo + t * (ax.hi - ax.lo), yv = ay.lo + t * (ay.hi - ay.lo);
    const double gx = kLeft + t * pw, gy = kTop + (1.0 - t) * ph;
    o << "<line x1=\"" << gx << "\" y1=\"" << kTop << "\" x2=\"" << gx << "\" y2=\"" << kTop + ph
      << "\" stroke=\"#ddd\"/>\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << gy << "\" x2=\"" << kLeft + pw << "\" y2=\"" << gy
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << gx << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
      << num(ax.log ? std::pow(10.0, xv) : xv) << "</text>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
      << num(ay.log ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
    << escape(spec.xLabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << kTop + ph / 2 << ")\">" << escape(spec.yLabel) << "</text>\n";

  int legend = 0;
  for (const auto& s : spec.series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      pts << px(s.x[i]) << "," << py(s.y[i]) << " ";
      if (s.markers) {
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << s.color
          << "\"/>\n";
      }
    }
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"" << pts.str() << "\""
      << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
    const double ly = kTop + 14 + 16 * legend++;
    o << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw - 130 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << s.color << "\"" << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
    o << "<text x=\"" << kLeft + pw - 125 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace nlgeom::cli
