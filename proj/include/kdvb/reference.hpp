#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kdvb/models.hpp"
#include "kdvb/solver.hpp"

namespace kdvb {

struct RiemannData {
  double u_left = 0.0;
  double u_right = 0.0;
};

enum class RefScheme { godunov, exact_riemann };
enum class RefBoundary { periodic, outflow };

// Entropy-solution surrogate of the first order conservation law, produced
// either by the Godunov scheme or sampled from the exact Riemann solution.
struct ReferenceSolution {
  Grid1D grid;
  std::vector<double> u;
  double t = 0.0;
  RefScheme scheme = RefScheme::godunov;
};

struct ReferenceRun {
  SimState initial;
  std::vector<SimState> states;  // recorded states, time-ordered
  ReferenceSolution final;
};

// Godunov numerical flux: min of f over [u_left, u_right] when
// u_left <= u_right, max over [u_right, u_left] otherwise. Closed form for
// the convex built-in fluxes, sampling plus local refinement for tables.
double godunov_flux(double u_left, double u_right, const FluxModel& flux);

// First-order conservative Godunov update under the CFL condition
// dt <= cfl * h / max|f'|. Satisfies the discrete maximum principle
// min u_0 <= u_j^n <= max u_0 exactly.
ReferenceSolution godunov_integrate(const SimState& initial, double T,
                                    const FluxModel& flux,
                                    RefBoundary boundary = RefBoundary::periodic,
                                    double cfl = 0.9);

// Variant recording intermediate states: every snapshot time requested, or
// every step when record_every_step is set (used by the norm contraction
// checks).
ReferenceRun godunov_integrate_run(const SimState& initial, double T,
                                   const FluxModel& flux, RefBoundary boundary,
                                   double cfl,
                                   std::span<const double> snapshot_times,
                                   bool record_every_step = false);

// Exact self-similar Riemann solution for a convex flux, evaluated at
// xi = x / t. Shock case (u_left > u_right) travels at the Rankine-Hugoniot
// speed and returns the left state on the ray xi = s; rarefaction case
// returns (f')^{-1}(xi) inside the fan.
double riemann_exact(const RiemannData& data, const FluxModel& flux, double xi);

// Samples the exact Riemann solution (jump at x_jump at time 0) on a grid.
ReferenceSolution riemann_exact_on_grid(const RiemannData& data,
                                        const FluxModel& flux,
                                        const Grid1D& grid, double x_jump,
                                        double t);

// True when the L^r norm is non-increasing across every consecutive pair of
// states, up to 1e-12 relative to the initial norm.
bool norm_contraction_check(std::span<const SimState> states, double r);

}  // namespace kdvb
