#include "extremal/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "extremal/errors.hpp"

namespace extremal {

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CsvWriter& CsvWriter::comment(std::string_view key, std::string_view value) {
  text_ += fmt::format("# {}: {}\n", key, value);
  return *this;
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& columns) {
  return row(columns);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

CsvWriter& CsvWriter::row(const std::vector<double>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(cells[i]);
  }
  text_ += '\n';
  return *this;
}

namespace {

void add_metadata(CsvWriter& csv, const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) csv.comment(k, v);
}

std::vector<std::string> coordinate_columns(int dim) {
  return dim == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
}

}  // namespace

std::string density_grid_csv(const DensityGrid& grid,
                             const std::vector<std::pair<std::string, std::string>>& metadata) {
  CsvWriter csv;
  add_metadata(csv, metadata);
  csv.comment("density_kind", to_string(grid.kind));
  csv.comment("values", "cell-averaged density at the listed cell centers");
  std::vector<std::string> columns;
  for (std::size_t a = 0; a < grid.axes.size(); ++a) columns.push_back(fmt::format("c{}", a));
  columns.emplace_back("density");
  csv.header(columns);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto row = grid.cell_center(i);
    row.push_back(grid.values[i]);
    csv.row(row);
  }
  return csv.str();
}

std::string records_csv(const std::vector<KArgminRecord>& records, int dim,
                        const std::vector<std::pair<std::string, std::string>>& metadata) {
  CsvWriter csv;
  add_metadata(csv, metadata);
  csv.comment("rows", "one row per argmin location; rank i repeats when M_i has ties");
  std::vector<std::string> columns{"replicate", "rank"};
  for (auto& c : coordinate_columns(dim)) columns.push_back(c);
  columns.emplace_back("value");
  csv.header(columns);
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t i = 0; i < records[r].size(); ++i) {
      const auto& entry = records[r][i];
      for (const auto& x : entry.argmins) {
        std::vector<std::string> cells{std::to_string(r), std::to_string(i + 1),
                                       format_double(x[0])};
        if (dim == 2) cells.push_back(format_double(x[1]));
        cells.push_back(format_double(entry.value));
        csv.row(cells);
      }
    }
  }
  return csv.str();
}

std::string points_csv(const std::vector<SampleFunction>& functions, int dim,
                       const std::vector<std::pair<std::string, std::string>>& metadata) {
  CsvWriter csv;
  add_metadata(csv, metadata);
  std::vector<std::string> columns{"replicate"};
  for (auto& c : coordinate_columns(dim)) columns.push_back(c);
  columns.emplace_back("value");
  csv.header(columns);
  for (std::size_t r = 0; r < functions.size(); ++r) {
    const auto& f = functions[r];
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::vector<std::string> cells{std::to_string(r), format_double(f.points[i][0])};
      if (dim == 2) cells.push_back(format_double(f.points[i][1]));
      cells.push_back(format_double(f.values[i]));
      csv.row(cells);
    }
  }
  return csv.str();
}

PlotSeries histogram_series(std::string label, const std::vector<double>& densities, double lower,
                            double upper) {
  PlotSeries s;
  s.label = std::move(label);
  const double w = (upper - lower) / static_cast<double>(densities.size());
  for (std::size_t b = 0; b < densities.size(); ++b) {
    const double left = lower + w * static_cast<double>(b);
    s.x.push_back(left);
    s.y.push_back(densities[b]);
    s.x.push_back(left + w);
    s.y.push_back(densities[b]);
  }
  return s;
}

std::string svg_line_plot(const PlotSpec& spec) {
  const double margin_left = 70;
  const double margin_right = 170;
  const double margin_top = 40;
  const double margin_bottom = 55;
  const double plot_w = spec.width - margin_left - margin_right;
  const double plot_h = spec.height - margin_top - margin_bottom;

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymax = 0.0;
  for (const auto& s : spec.series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      if (std::isfinite(v)) ymax = std::max(ymax, v);
    }
  }
  if (!(xmax > xmin)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.05;

  auto px = [&](double x) { return margin_left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return margin_top + plot_h - y / ymax * plot_h; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      spec.width, spec.height, spec.width, spec.height);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", spec.width,
                     spec.height);
  out += fmt::format(
      "<text x=\"{:.2f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
      "text-anchor=\"middle\">{}</text>\n",
      margin_left + plot_w / 2, spec.title);
  out += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      margin_left, margin_top, plot_w, plot_h);

  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 5.0;
    const double yv = ymax * t / 5.0;
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"middle\">{:.3g}</text>\n",
        px(xv), margin_top + plot_h + 16, xv);
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"end\">{:.3g}</text>\n",
        margin_left - 6, py(yv) + 4, yv);
  }
  out += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"13\" "
      "text-anchor=\"middle\">{}</text>\n",
      margin_left + plot_w / 2, spec.height - 12.0, spec.x_label);
  out += fmt::format(
      "<text x=\"16\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"13\" "
      "text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">{}</text>\n",
      margin_top + plot_h / 2, margin_top + plot_h / 2, spec.y_label);

  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    std::string points;
    for (std::size_t p = 0; p < s.x.size(); ++p) {
      const double y = std::isfinite(s.y[p]) ? std::min(s.y[p], ymax) : ymax;
      points += fmt::format("{}{:.2f},{:.2f}", p ? " " : "", px(s.x[p]), py(y));
    }
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{} points=\"{}\"/>\n", s.color,
        s.dashed ? " stroke-dasharray=\"5,3\"" : "", points);
    const double ly = margin_top + 14 + 18.0 * static_cast<double>(i);
    const double lx = margin_left + plot_w + 12;
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"2\"{}/>\n",
        lx, ly, lx + 22, ly, s.color, s.dashed ? " stroke-dasharray=\"5,3\"" : "");
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
        lx + 28, ly + 4, s.label);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace extremal
