// svg.hpp — minimal static line charts (axes, ticks, legend, one polyline
// per series), no charting dependency.

#pragma once

#include <string>
#include <vector>

namespace piston::cli {

struct SvgSeries {
  std::string label;
  std::vector<double> y;
};

/// Renders x against every series; writes an 860x520 SVG document.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::vector<double>& x,
                              const std::vector<SvgSeries>& series);

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::vector<double>& x,
                      const std::vector<SvgSeries>& series);

}  // namespace piston::cli
