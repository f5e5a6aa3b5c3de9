#include "kdvb/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kdvb/io.hpp"

namespace kdvb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
}

std::size_t parse_size(const std::string& v, const std::string& key) {
  const double d = parse_double(v, key);
  if (d < 0 || d != std::floor(d))
    throw std::invalid_argument("config: bad count for " + key + ": " + v);
  return static_cast<std::size_t>(d);
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(item, key));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "flux") cfg.flux.kind = val;
    else if (key == "flux_m") cfg.flux.m = parse_double(val, key);
    else if (key == "flux_c1") cfg.flux.c1 = parse_double(val, key);
    else if (key == "flux_table") cfg.flux.table_file = val;
    else if (key == "viscosity") cfg.viscosity.kind = val;
    else if (key == "viscosity_r") cfg.viscosity.r = parse_double(val, key);
    else if (key == "viscosity_c2") cfg.viscosity.c2 = parse_double(val, key);
    else if (key == "viscosity_c3") cfg.viscosity.c3 = parse_double(val, key);
    else if (key == "viscosity_c4") cfg.viscosity.c4 = parse_double(val, key);
    else if (key == "viscosity_c5") cfg.viscosity.c5 = parse_double(val, key);
    else if (key == "viscosity_threshold")
      cfg.viscosity.threshold = parse_double(val, key);
    else if (key == "viscosity_table") cfg.viscosity.table_file = val;
    else if (key == "initial") cfg.initial.kind = val;
    else if (key == "amplitude") cfg.initial.amplitude = parse_double(val, key);
    else if (key == "periods") cfg.initial.periods = parse_double(val, key);
    else if (key == "u_left") cfg.initial.u_left = parse_double(val, key);
    else if (key == "u_right") cfg.initial.u_right = parse_double(val, key);
    else if (key == "width") cfg.initial.width = parse_double(val, key);
    else if (key == "initial_file") cfg.initial.file = val;
    else if (key == "x_left") cfg.x_left = parse_double(val, key);
    else if (key == "x_right") cfg.x_right = parse_double(val, key);
    else if (key == "cells") cfg.cells = parse_size(val, key);
    else if (key == "final_time") cfg.final_time = parse_double(val, key);
    else if (key == "epsilon") cfg.epsilon = parse_double(val, key);
    else if (key == "delta") cfg.delta = parse_double(val, key);
    else if (key == "snapshot_times") cfg.snapshot_times = parse_list(val, key);
    else if (key == "snapshot_count") cfg.snapshot_count = parse_size(val, key);
    else if (key == "entropy_production")
      cfg.entropy_production = parse_bool(val, key);
    else if (key == "young_histogram")
      cfg.young_histogram = parse_bool(val, key);
    else if (key == "hats_x") cfg.hats_x = parse_size(val, key);
    else if (key == "hats_t") cfg.hats_t = parse_size(val, key);
    else if (key == "young_cells_x") cfg.young_cells_x = parse_size(val, key);
    else if (key == "young_cells_t") cfg.young_cells_t = parse_size(val, key);
    else if (key == "young_bins") cfg.young_bins = parse_size(val, key);
    else if (key == "k_count") cfg.k_count = parse_size(val, key);
    else if (key == "seed")
      cfg.seed = static_cast<unsigned long long>(parse_double(val, key));
    else if (key == "output_dir") cfg.output_dir = val;
    else if (key == "override_resolution")
      cfg.override_resolution = parse_bool(val, key);
    else if (key == "godunov_fallback")
      cfg.godunov_fallback = parse_bool(val, key);
    else if (key == "safety") cfg.safety = parse_double(val, key);
    else if (key == "reference_refinement")
      cfg.reference_refinement = parse_size(val, key);
    else if (key == "workers") cfg.workers = parse_size(val, key);
    else if (key == "assumption_range")
      cfg.assumption_range = parse_double(val, key);
    else if (key == "assumption_samples")
      cfg.assumption_samples = parse_size(val, key);
    else
      throw std::invalid_argument("config: unknown key: " + key);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is)
    throw std::invalid_argument("config: cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.x_right > cfg.x_left))
    throw std::invalid_argument("config: x_right must exceed x_left");
  if (cfg.cells < 16)
    throw std::invalid_argument("config: need at least 16 cells");
  if (!(cfg.final_time > 0.0))
    throw std::invalid_argument("config: final_time must be positive");
  if (cfg.epsilon < 0.0 || cfg.delta < 0.0)
    throw std::invalid_argument("config: epsilon and delta must be >= 0");
  if (!(cfg.safety > 0.0 && cfg.safety <= 1.0))
    throw std::invalid_argument("config: safety must be in (0, 1]");
  if (cfg.reference_refinement == 0)
    throw std::invalid_argument("config: reference_refinement must be >= 1");
  if (cfg.epsilon == 0.0 && cfg.delta == 0.0 && !cfg.godunov_fallback)
    throw std::invalid_argument(
        "config: epsilon = delta = 0 requires godunov_fallback = true");

  const double h = (cfg.x_right - cfg.x_left) / static_cast<double>(cfg.cells);
  if (!cfg.override_resolution && !cfg.godunov_fallback) {
    double limit = std::numeric_limits<double>::infinity();
    if (cfg.epsilon > 0.0) limit = std::min(limit, cfg.epsilon);
    if (cfg.delta > 0.0) limit = std::min(limit, std::sqrt(cfg.delta));
    limit /= 4.0;
    if (h > limit) {
      std::ostringstream os;
      os << "config: resolution rule violated: h = " << h
         << " exceeds min(epsilon, sqrt(delta))/4 = " << limit
         << "; refine the grid or set override_resolution = true";
      throw std::invalid_argument(os.str());
    }
  }

  for (double t : cfg.snapshot_times)
    if (!(t > 0.0) || t > cfg.final_time * (1.0 + 1e-12))
      throw std::invalid_argument(
          "config: snapshot times must lie in (0, final_time]");
}

FluxModel build_flux(const FluxSpec& spec) {
  if (spec.kind == "burgers") return FluxModel::burgers();
  if (spec.kind == "power") return FluxModel::power(spec.m, spec.c1);
  if (spec.kind == "zero") return FluxModel::zero();
  if (spec.kind == "table") {
    const auto rows = io::read_xy_csv(spec.table_file);
    std::vector<double> u, f;
    for (const auto& [x, y] : rows) {
      u.push_back(x);
      f.push_back(y);
    }
    return FluxModel::table(std::move(u), std::move(f), spec.m, spec.c1);
  }
  throw std::invalid_argument("config: unknown flux kind: " + spec.kind);
}

ViscosityModel build_viscosity(const ViscositySpec& spec) {
  ViscosityModel::Constants c{spec.c2, spec.c3, spec.c4, spec.c5,
                              spec.threshold};
  if (spec.kind == "vonneumann" || spec.kind == "von-neumann")
    return ViscosityModel::von_neumann(c);
  if (spec.kind == "linear") return ViscosityModel::linear(c);
  if (spec.kind == "power") return ViscosityModel::power(spec.r, c);
  if (spec.kind == "table") {
    const auto rows = io::read_xy_csv(spec.table_file);
    std::vector<double> lam, b;
    for (const auto& [x, y] : rows) {
      lam.push_back(x);
      b.push_back(y);
    }
    return ViscosityModel::table(std::move(lam), std::move(b), spec.r, c);
  }
  throw std::invalid_argument("config: unknown viscosity kind: " + spec.kind);
}

SimState build_initial_state(const ExperimentConfig& cfg) {
  SimState state;
  state.grid = make_grid(cfg.x_left, cfg.x_right, cfg.cells);
  state.t = 0.0;
  state.u.resize(cfg.cells);
  const double length = state.grid.length();
  const double mid = 0.5 * (cfg.x_left + cfg.x_right);
  const auto& init = cfg.initial;

  if (init.kind == "sine") {
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t j = 0; j < cfg.cells; ++j)
      state.u[j] = init.amplitude *
                   std::sin(two_pi * init.periods *
                            (state.grid.node(j) - cfg.x_left) / length);
  } else if (init.kind == "riemann") {
    for (std::size_t j = 0; j < cfg.cells; ++j)
      state.u[j] = state.grid.node(j) < mid ? init.u_left : init.u_right;
  } else if (init.kind == "gaussian" || init.kind == "gaussian-bump") {
    if (!(init.width > 0.0))
      throw std::invalid_argument("config: gaussian width must be positive");
    for (std::size_t j = 0; j < cfg.cells; ++j) {
      const double z = (state.grid.node(j) - mid) / init.width;
      state.u[j] = init.amplitude * std::exp(-z * z);
    }
  } else if (init.kind == "from-file") {
    const auto rows = io::read_xy_csv(init.file);
    for (std::size_t j = 0; j < cfg.cells; ++j) {
      const double x = state.grid.node(j);
      auto it = std::lower_bound(
          rows.begin(), rows.end(), x,
          [](const auto& row, double v) { return row.first < v; });
      if (it == rows.begin())
        state.u[j] = rows.front().second;
      else if (it == rows.end())
        state.u[j] = rows.back().second;
      else {
        const auto& [x1, y1] = *it;
        const auto& [x0, y0] = *(it - 1);
        const double w = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
        state.u[j] = (1.0 - w) * y0 + w * y1;
      }
    }
  } else {
    throw std::invalid_argument("config: unknown initial data kind: " +
                                init.kind);
  }
  return state;
}

std::vector<double> resolve_snapshot_times(const ExperimentConfig& cfg) {
  if (!cfg.snapshot_times.empty()) {
    auto times = cfg.snapshot_times;
    std::sort(times.begin(), times.end());
    return times;
  }
  std::vector<double> times;
  const std::size_t count = std::max<std::size_t>(1, cfg.snapshot_count);
  times.reserve(count);
  for (std::size_t i = 1; i < count; ++i)
    times.push_back(cfg.final_time * static_cast<double>(i) /
                    static_cast<double>(count));
  times.push_back(cfg.final_time);
  return times;
}

}  // namespace kdvb
