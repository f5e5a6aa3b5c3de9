#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "kdvb/models.hpp"
#include "kdvb/solver.hpp"

namespace kdvb {

struct FluxSpec {
  std::string kind = "burgers";  // burgers | power | table | zero
  double m = 2.0;
  double c1 = 1.0;
  std::string table_file;
};

struct ViscositySpec {
  std::string kind = "vonneumann";  // vonneumann | power | linear | table
  double r = 1.0;
  double c2 = 1.0, c3 = 1.0, c4 = 1.0, c5 = 1.0;
  double threshold = 1.0;  // N in (B1)/(B2)
  std::string table_file;
};

struct InitialSpec {
  std::string kind = "sine";  // sine | riemann | gaussian | from-file
  double amplitude = 1.0;
  double periods = 1.0;
  double u_left = 1.0;
  double u_right = 0.0;
  double width = 0.5;
  std::string file;
};

struct ExperimentConfig {
  FluxSpec flux;
  ViscositySpec viscosity;
  InitialSpec initial;

  double x_left = 0.0;
  double x_right = 6.283185307179586;
  std::size_t cells = 256;
  double final_time = 1.0;
  double epsilon = 0.0;
  double delta = 0.0;

  std::vector<double> snapshot_times;  // empty: snapshot_count evenly spaced
  std::size_t snapshot_count = 32;

  bool entropy_production = true;
  bool young_histogram = true;
  std::size_t hats_x = 12, hats_t = 6;
  std::size_t young_cells_x = 16, young_cells_t = 8, young_bins = 64;
  std::size_t k_count = 33;

  unsigned long long seed = 0;  // reserved for sampling-based diagnostics
  std::string output_dir;
  bool override_resolution = false;
  bool godunov_fallback = false;
  double safety = 0.4;
  std::size_t reference_refinement = 4;
  std::size_t workers = 0;  // 0: hardware concurrency

  double assumption_range = 10.0;
  std::size_t assumption_samples = 10000;
};

// Parses a `key = value` file (# starts a comment). Unknown keys are
// rejected so typos fail loudly.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

// Throws std::invalid_argument on contract violations, including the
// resolution rule h <= min(epsilon, sqrt(delta))/4 for positive parameters
// unless override_resolution is set, and epsilon = delta = 0 without the
// godunov_fallback flag.
void validate(const ExperimentConfig& config);

FluxModel build_flux(const FluxSpec& spec);
ViscosityModel build_viscosity(const ViscositySpec& spec);
SimState build_initial_state(const ExperimentConfig& config);
std::vector<double> resolve_snapshot_times(const ExperimentConfig& config);

}  // namespace kdvb
