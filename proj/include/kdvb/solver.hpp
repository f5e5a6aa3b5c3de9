#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvb/models.hpp"

namespace kdvb {

// Uniform periodic grid with nodes x_j = x_left + j h, j = 0..cells-1;
// x_right is identified with x_left.
struct Grid1D {
  double x_left = 0.0;
  double x_right = 1.0;
  std::size_t cells = 0;

  double spacing() const {
    return (x_right - x_left) / static_cast<double>(cells);
  }
  double length() const { return x_right - x_left; }
  double node(std::size_t j) const {
    return x_left + spacing() * static_cast<double>(j);
  }
  bool compatible(const Grid1D& other) const;
};

Grid1D make_grid(double x_left, double x_right, std::size_t cells);

// Diffusion strength epsilon and dispersion strength delta. Either may be
// zero (pure dispersion or pure pseudo-viscosity).
struct RegularizationParams {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct SimState {
  Grid1D grid;
  std::vector<double> u;
  double t = 0.0;
};

// Running space-time dissipation integrals, recorded at every snapshot time:
//   viscous        = int_0^t int beta(u_x) u_x dx ds
//   parabolic      = int_0^t int u_xx^2 beta'(u_x) dx ds
//   flux_weighted  = int_0^t int f'(u) beta(u_x) u_x dx ds
struct DissipationRecord {
  double time = 0.0;
  double viscous = 0.0;
  double parabolic = 0.0;
  double flux_weighted = 0.0;
};

struct Trajectory {
  SimState initial_state;
  std::vector<SimState> snapshots;          // requested times plus final time
  std::vector<DissipationRecord> records;   // parallel to snapshots

  double dissipation = 0.0;                 // final viscous integral
  double parabolic_dissipation = 0.0;
  double flux_weighted_dissipation = 0.0;

  const SimState& final_state() const { return snapshots.back(); }
  // Initial state followed by the snapshots; the space-time sample set used
  // by the diagnostics.
  std::vector<const SimState*> all_states() const;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double time, std::size_t node, std::string what)
      : std::runtime_error(std::move(what)), time_(time), node_(node) {}

  double time() const { return time_; }
  std::size_t node() const { return node_; }

  // Partial trajectory up to the last completed snapshot, attached by
  // integrate() before rethrowing.
  bool has_partial() const { return has_partial_; }
  const Trajectory& partial() const { return partial_; }
  void attach_partial(Trajectory t) {
    partial_ = std::move(t);
    has_partial_ = true;
  }

 private:
  double time_;
  std::size_t node_;
  Trajectory partial_;
  bool has_partial_ = false;
};

// Semidiscrete right-hand side of
//   u_t = -f(u)_x + eps (beta(u_x))_x - delta u_xxx
// with second-order centered stencils: conservative flux average
// (f_{j+1}-f_{j-1})/2h, face-slope viscosity (beta(l_{j+1/2}) -
// beta(l_{j-1/2}))/h with l_{j+1/2} = (u_{j+1}-u_j)/h, and the five-point
// third difference (-u_{j-2}+2u_{j-1}-2u_{j+1}+u_{j+2})/(2h^3).
std::vector<double> semidiscrete_rhs(const SimState& state,
                                     const RegularizationParams& params,
                                     const FluxModel& flux,
                                     const ViscosityModel& visc);

// Largest stable explicit step:
//   safety * min( h/max|f'(u)|, h^2/(2 eps max beta'(l)), h^3/(4 delta) )
// dropping each term whose coefficient vanishes. When no term is active the
// remaining output interval `horizon` is returned (throws std::domain_error
// if the horizon was not provided).
double stable_timestep(const SimState& state,
                       const RegularizationParams& params,
                       const FluxModel& flux, const ViscosityModel& visc,
                       double safety,
                       double horizon = std::numeric_limits<double>::quiet_NaN());

// One strong-stability-preserving three-stage Runge-Kutta step. All three
// stencils are in discrete divergence form, so total mass sum(u_j) h is
// conserved to roundoff per step. Caller guarantees dt within the stable
// step bound.
SimState advance(const SimState& state, double dt,
                 const RegularizationParams& params, const FluxModel& flux,
                 const ViscosityModel& visc);

// Integrates to time T, emitting snapshots exactly at the requested times
// (steps are shortened to land on them) and always at T. Dissipation
// integrals accumulate with a midpoint rule using the half-step RK stage.
// On blow-up, throws BlowUpError carrying the partial trajectory.
Trajectory integrate(const SimState& initial, double T,
                     const RegularizationParams& params, const FluxModel& flux,
                     const ViscosityModel& visc,
                     std::span<const double> snapshot_times, double safety = 0.4);

// Residual of the first energy identity,
//   R = int u^2(T) + 2 eps int int beta(u_x) u_x - int u_0^2,
// which the continuum equation satisfies exactly.
double energy_balance(const Trajectory& traj,
                      const RegularizationParams& params);

// Residual of the second energy identity,
//   [d/2 int u_x^2(T) - int F(u(T))] - [d/2 int u_0x^2 - int F(u_0)]
//   + eps*delta int int u_xx^2 beta'(u_x) - eps int int f'(u) beta(u_x) u_x.
double second_energy_balance(const Trajectory& traj, const FluxModel& flux,
                             const ViscosityModel& visc,
                             const RegularizationParams& params);

namespace detail {
// int u_x^2 dx with face slopes; used by the second energy residual.
double slope_energy(const SimState& state);
}  // namespace detail

}  // namespace kdvb
