#include "piston/timeseries.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace piston {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void TimeSeriesTable::add_column(const std::string& name, std::vector<double> data) {
  if (data.size() != time.size())
    throw std::invalid_argument("column '" + name + "' length does not match time axis");
  columns.push_back(name);
  values.push_back(std::move(data));
}

namespace {

void emit_metadata(std::ostringstream& out, const std::map<std::string, std::string>& meta) {
  for (const auto& [key, value] : meta) out << "# " << key << ": " << value << "\n";
}

std::string table_csv(const std::string& axis_name, const std::vector<double>& axis,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& values,
                      const std::map<std::string, std::string>& meta) {
  std::ostringstream out;
  emit_metadata(out, meta);
  out << axis_name;
  for (const auto& c : columns) out << "," << c;
  out << "\n";
  for (std::size_t r = 0; r < axis.size(); ++r) {
    out << format_g17(axis[r]);
    for (const auto& col : values) out << "," << format_g17(col[r]);
    out << "\n";
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace

std::string to_csv(const TimeSeriesTable& table) {
  return table_csv("time", table.time, table.columns, table.values, table.metadata);
}

void write_csv(const std::string& path, const TimeSeriesTable& table) {
  write_file(path, to_csv(table));
}

std::string to_csv(const SweepResult& sweep) {
  return table_csv(sweep.axis, sweep.axis_values, sweep.columns, sweep.values,
                   sweep.metadata);
}

void write_csv(const std::string& path, const SweepResult& sweep) {
  write_file(path, to_csv(sweep));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope needs at least two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_slope requires positive samples");
    const double lx = std::log10(x[i]);
    const double ly = std::log10(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace piston
