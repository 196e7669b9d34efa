#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gwshift/common.hpp"

namespace gwshift::io {

/// Shortest round-trippable decimal for doubles; identical inputs give
/// byte-identical artifacts.
std::string format_double(double v);

struct CsvWriter {
  explicit CsvWriter(std::vector<std::string> columns) : header(std::move(columns)) {}
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  void write(const std::filesystem::path& path) const;
};

// -- minimal static SVG rendering -------------------------------------------

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::vector<double> x, y;
};

struct LinePlotSpec {
  std::string title, x_label, y_label;
  int width = 720, height = 480;
  bool log_y = false;
};

void write_line_plot(const std::filesystem::path& path, const LinePlotSpec& spec,
                     const std::vector<Series>& series);

struct Marker {
  double x = 0.0, y = 0.0;
  std::string color = "#ffffff";
  std::string label;
};

struct HeatmapSpec {
  std::string title, x_label, y_label;
  int width = 760, height = 520;
  std::vector<double> x_edges, y_edges;  // sizes nx+1, ny+1
  // values[i*ny + j] for column i, row j; NaN renders grey
  std::vector<double> values;
  bool log_scale = false;
  std::vector<Marker> markers;
};

void write_heatmap(const std::filesystem::path& path, const HeatmapSpec& spec);

}  // namespace gwshift::io
