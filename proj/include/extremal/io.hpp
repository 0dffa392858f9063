#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "extremal/density.hpp"
#include "extremal/kargmin.hpp"

namespace extremal {

/// Decimal form with 17 significant digits, so doubles round-trip exactly.
std::string format_double(double value);

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Comma-separated text with '#' metadata comments and one header row.
class CsvWriter {
 public:
  CsvWriter& comment(std::string_view key, std::string_view value);
  CsvWriter& header(const std::vector<std::string>& columns);
  CsvWriter& row(const std::vector<std::string>& cells);
  CsvWriter& row(const std::vector<double>& cells);

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

/// Density grid as CSV: one column per grid axis (cell centers), then value.
std::string density_grid_csv(const DensityGrid& grid,
                             const std::vector<std::pair<std::string, std::string>>& metadata);

/// One row per argmin location: replicate, rank, coordinates, value.
std::string records_csv(const std::vector<KArgminRecord>& records, int dim,
                        const std::vector<std::pair<std::string, std::string>>& metadata);

/// One row per point: replicate, coordinates, value.
std::string points_csv(const std::vector<SampleFunction>& functions, int dim,
                       const std::vector<std::pair<std::string, std::string>>& metadata);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 800;
  int height = 500;
};

/// Polyline plot on a fixed viewport, deterministic bytes for identical input.
std::string svg_line_plot(const PlotSpec& spec);

/// Step outline of a histogram with equal bins on [lower, upper].
PlotSeries histogram_series(std::string label, const std::vector<double>& densities, double lower,
                            double upper);

}  // namespace extremal
