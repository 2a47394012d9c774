#pragma once

#include <string>
#include <vector>

namespace ymm {

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  bool line = true;      // polyline, else markers only
  bool markers = false;
  std::vector<bool> flagged;  // drawn as hollow squares when set
};

/// Static line plot on linear axes with a legend.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  SvgPlot& add(SvgSeries s);
  /// Complete standalone SVG document. Non-finite points are skipped.
  std::string render(int width = 720, int height = 480) const;

 private:
  std::string title_, xlabel_, ylabel_;
  std::vector<SvgSeries> series_;
};

/// Escapes &, <, >, " for XML text and attributes.
std::string xml_escape(const std::string& s);

}  // namespace ymm
