#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kdvb/reference.hpp"
#include "kdvb/solver.hpp"

namespace kdvb::io {

// Snapshot table with header `x,u`, 17 significant digits.
void write_snapshot_csv(std::ostream& os, const Grid1D& grid,
                        std::span<const double> u);
void write_snapshot_csv(const std::filesystem::path& path, const Grid1D& grid,
                        std::span<const double> u);

// Reads a two-column `x,u` table.
std::vector<std::pair<double, double>> read_xy_csv(
    const std::filesystem::path& path);

// Formats a double with 17 significant digits (round-trips through strtod).
std::string format17(double v);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string x_label, y_label;
  bool log_x = false, log_y = false;
};

// Minimal standalone SVG line plot.
void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec,
                    std::span<const Series> series);

}  // namespace kdvb::io
