#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "kdvb/models.hpp"
#include "kdvb/reference.hpp"
#include "kdvb/solver.hpp"

namespace kdvb {

// (sum |u_j|^q h)^{1/q}; pass q = infinity for max|u_j|. Requires q >= 1.
double lq_norm(const SimState& state, double q);

// sum_j |u_{j+1} - u_j| with periodic wrap.
double total_variation(const SimState& state);

// sum_j |a_j - b(x_j)| h with b conservatively averaged onto a's grid.
// Requires matching domains, commensurate grids, and equal times within a
// dt-scale tolerance.
double l1_distance(const SimState& a, const ReferenceSolution& b);

struct EntropyProductionOptions {
  std::size_t hats_x = 12;  // lattice intervals in x; hats sit at interior nodes
  std::size_t hats_t = 6;   // lattice intervals in t
};

// Per-k positive part of the Kruzkov entropy production, measured by pairing
// the space-time field (|u-k|, Q_k(u)) against nonnegative tensor-product
// hat test functions:
//   A(k, phi) = int int (|u-k| dphi/dt + Q_k(u) dphi/dx) dx dt,
//   P+(k) = max(0, -min_phi A(k, phi)) / ||phi||_L1.
// An entropy solution has A >= 0 for every phi >= 0, so P+ vanishes up to
// quadrature error; oscillatory wakes produce O(1) values.
struct EntropyProductionReport {
  std::vector<double> k_grid;
  std::vector<double> positive_production;

  double max_production() const;
  void write_csv(std::ostream& os) const;  // header: k,production
};

EntropyProductionReport entropy_production(const Trajectory& traj,
                                           const FluxModel& flux,
                                           std::span<const double> k_grid,
                                           EntropyProductionOptions options = {});

struct SpaceTimeWindow {
  double x0 = 0.0, x1 = 0.0, t0 = 0.0, t1 = 0.0;
};

// Empirical surrogate of the Young measure: value histograms over macro-cells
// of a space-time window. Each cell's histogram has total mass one. Spatial
// cells are equal-width; time cells are rank-based groups of the in-window
// snapshot times (snapshots are sparse, and an equal-width boundary that
// rounds onto a snapshot time would leave cells empty).
struct YoungHistogram {
  std::size_t cells_x = 0, cells_t = 0, bins = 0;
  double value_min = 0.0, value_max = 0.0;
  std::vector<double> mass;       // cells_x * cells_t * bins
  std::vector<double> cell_mean;  // cells_x * cells_t
  std::vector<double> cell_var;   // cells_x * cells_t

  double mass_at(std::size_t ix, std::size_t it, std::size_t b) const {
    return mass[(it * cells_x + ix) * bins + b];
  }
  void write_csv(std::ostream& os) const;  // header: cell_x,cell_t,bin,mass
};

YoungHistogram young_histogram(const Trajectory& traj, SpaceTimeWindow window,
                               std::size_t cells_x, std::size_t cells_t,
                               std::size_t bins);

// Mean over macro-cells of the per-cell standard deviation, normalized by
// the global value range. Zero exactly when every cell is a single occupied
// bin (the Dirac case).
double concentration_metric(const YoungHistogram& hist);

// Least-squares slope of log(sup-norm) against log(1/delta) over a family of
// runs. Requires at least three (delta, sup) pairs.
double sup_scaling_fit(std::span<const std::pair<double, double>> runs);

}  // namespace kdvb
