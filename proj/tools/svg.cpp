#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace piston::cli {

namespace {

constexpr double kWidth = 860, kHeight = 520;
constexpr double kLeft = 80, kRight = 820, kTop = 40, kBottom = 470;

const char* kPalette[] = {"#1f77b4", "#d62728", "#7a3fb5", "#2ca02c",
                          "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::vector<double>& x,
                              const std::vector<SvgSeries>& series) {
  double xmin = x.front(), xmax = x.back();
  double ymin = 0.0, ymax = 0.0;
  bool first = true;
  for (const auto& s : series)
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      if (first) {
        ymin = ymax = v;
        first = false;
      }
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (ymin == ymax) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  if (xmin == xmax) xmax = xmin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto sx = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * (kRight - kLeft); };
  auto sy = [&](double v) { return kBottom - (v - ymin) / (ymax - ymin) * (kBottom - kTop); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1=\"" << sx(xv) << "\" y1=\"" << kBottom << "\" x2=\"" << sx(xv)
        << "\" y2=\"" << kBottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(xv) << "\" y=\"" << kBottom + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xv)
        << "</text>\n";
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << kLeft
        << "\" y2=\"" << sy(yv) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
      << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      out << fmt(sx(x[i])) << "," << fmt(sy(series[s].y[i])) << " ";
    }
    out << "\"/>\n";
    const double ly = kTop + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << kRight - 150 << "\" y1=\"" << ly << "\" x2=\"" << kRight - 120
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kRight - 114 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::vector<double>& x,
                      const std::vector<SvgSeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << render_line_chart(title, x_label, x, series);
}

}  // namespace piston::cli
