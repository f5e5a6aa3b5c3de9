#include "kdvb/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kdvb::io {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot_csv(std::ostream& os, const Grid1D& grid,
                        std::span<const double> u) {
  os << "x,u\n";
  for (std::size_t j = 0; j < u.size(); ++j)
    os << format17(grid.node(j)) << ',' << format17(u[j]) << '\n';
}

void write_snapshot_csv(const std::filesystem::path& path, const Grid1D& grid,
                        std::span<const double> u) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_snapshot_csv(os, grid, u);
}

std::vector<std::pair<double, double>> read_xy_csv(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (!line.empty() && !(std::isdigit(line[0]) || line[0] == '-' ||
                             line[0] == '+' || line[0] == '.'))
        continue;  // header
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed row in " + path.string());
    rows.emplace_back(std::stod(line.substr(0, comma)),
                      std::stod(line.substr(comma + 1)));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in " + path.string());
  return rows;
}

namespace {

struct Mapper {
  double lo, hi;
  double pix0, pix1;
  bool log_scale;

  double operator()(double v) const {
    double t = log_scale ? std::log10(v) : v;
    double a = log_scale ? std::log10(lo) : lo;
    double b = log_scale ? std::log10(hi) : hi;
    if (b <= a) b = a + 1.0;
    return pix0 + (t - a) / (b - a) * (pix1 - pix0);
  }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec,
                    std::span<const Series> series) {
  if (series.empty())
    throw std::invalid_argument("write_svg_plot: no series to draw");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (double v : s.x) {
      if (spec.log_x && !(v > 0.0)) continue;
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      if (spec.log_y && !(v > 0.0)) continue;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(xmax >= xmin) || !(ymax >= ymin))
    throw std::invalid_argument("write_svg_plot: no finite data in range");
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }

  constexpr double W = 720, H = 480, ml = 80, mr = 20, mt = 24, mb = 56;
  Mapper mx{xmin, xmax, ml, W - mr, spec.log_x};
  Mapper my{ymin, ymax, H - mb, mt, spec.log_y};

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
     << "\" height=\"" << H - mt - mb
     << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // Axis tick labels at the range ends.
  auto tick = [&](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };
  os << "<text x=\"" << ml << "\" y=\"" << H - mb + 18
     << "\" font-size=\"12\">" << tick(xmin) << "</text>\n";
  os << "<text x=\"" << W - mr - 40 << "\" y=\"" << H - mb + 18
     << "\" font-size=\"12\">" << tick(xmax) << "</text>\n";
  os << "<text x=\"" << ml - 6 << "\" y=\"" << H - mb
     << "\" font-size=\"12\" text-anchor=\"end\">" << tick(ymin)
     << "</text>\n";
  os << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 12
     << "\" font-size=\"12\" text-anchor=\"end\">" << tick(ymax)
     << "</text>\n";

  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 14
     << "\" font-size=\"14\" text-anchor=\"middle\">" << spec.x_label
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
     << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (mt + H - mb) / 2 << ")\">" << spec.y_label << "</text>\n";

  std::size_t ci = 0;
  double legend_y = mt + 16;
  for (const auto& s : series) {
    const char* color = kPalette[ci % (sizeof kPalette / sizeof *kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (spec.log_x && !(s.x[i] > 0.0)) continue;
      if (spec.log_y && !(s.y[i] > 0.0)) continue;
      os << mx(s.x[i]) << ',' << my(s.y[i]) << ' ';
    }
    os << "\"/>\n";
    if (!s.label.empty()) {
      os << "<text x=\"" << ml + 10 << "\" y=\"" << legend_y
         << "\" font-size=\"12\" fill=\"" << color << "\">" << s.label
         << "</text>\n";
      legend_y += 16;
    }
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace kdvb::io
