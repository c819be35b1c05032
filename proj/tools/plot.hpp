#pragma once

#include <string>
#include <vector>

namespace nlgeom::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool markers = true;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string xLabel;
  std::string yLabel;
  bool logX = false;
  bool logY = false;
  std::vector<Series> series;
};

/// Static SVG line plot. Non-finite points, and non-positive ones on log axes, are skipped.
std::string renderSvg(const PlotSpec& spec);

}  // namespace nlgeom::cli
