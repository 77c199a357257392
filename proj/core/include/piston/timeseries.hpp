// timeseries.hpp — deterministic tabular output shared by the CLI and the
// test suites. CSV layout: '# key: value' metadata lines (keys sorted), one
// header row, then data rows with floats printed at 17 significant digits so
// identical runs are byte-identical and round-trips are lossless.

#pragma once

#include <map>
#include <string>
#include <vector>

namespace piston {

struct TimeSeriesTable {
  std::vector<double> time;                      // strictly increasing
  std::vector<std::string> columns;              // observable names
  std::vector<std::vector<double>> values;       // values[col][row]
  std::map<std::string, std::string> metadata;   // scenario hash, engine, ...

  void add_column(const std::string& name, std::vector<double> data);
};

std::string to_csv(const TimeSeriesTable& table);
void write_csv(const std::string& path, const TimeSeriesTable& table);

/// One axis value per row plus named scalar summaries.
struct SweepResult {
  std::string axis;                              // theta | mean_n | g | n_th
  std::vector<double> axis_values;               // strictly monotone
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;       // values[col][row]
  std::map<std::string, std::string> metadata;
};

std::string to_csv(const SweepResult& sweep);
void write_csv(const std::string& path, const SweepResult& sweep);

std::string format_g17(double v);

/// Least-squares slope of log10(y) vs log10(x); pairs with y <= 0 are an error.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace piston
