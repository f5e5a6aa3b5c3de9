#include "kdvb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kdvb/kernels.hpp"

namespace kdvb {

bool Grid1D::compatible(const Grid1D& other) const {
  const double tol = 1e-9 * std::max(1.0, std::fabs(length()));
  return std::fabs(x_left - other.x_left) <= tol &&
         std::fabs(x_right - other.x_right) <= tol;
}

Grid1D make_grid(double x_left, double x_right, std::size_t cells) {
  if (!(x_right > x_left))
    throw std::invalid_argument("grid: x_right must exceed x_left");
  if (cells < 16) throw std::invalid_argument("grid: need at least 16 cells");
  return Grid1D{x_left, x_right, cells};
}

std::vector<const SimState*> Trajectory::all_states() const {
  std::vector<const SimState*> out;
  out.reserve(snapshots.size() + 1);
  out.push_back(&initial_state);
  for (const auto& s : snapshots) out.push_back(&s);
  return out;
}

namespace {

[[noreturn]] void throw_blowup(double t, std::size_t node) {
  std::ostringstream os;
  os << "blow-up: non-finite value at node " << node << ", t = " << t;
  throw BlowUpError(t, node, os.str());
}

void check_finite(std::span<const double> x, double t) {
  const std::size_t bad = kernels::find_nonfinite(x);
  if (bad != kernels::npos) throw_blowup(t, bad);
}

struct Workspace {
  std::vector<double> fu, lam, bf, rhs, stage, mid;

  void resize(std::size_t n) {
    fu.resize(n);
    lam.resize(n);
    bf.assign(n, 0.0);
    rhs.resize(n);
    stage.resize(n);
    mid.resize(n);
  }
};

void eval_rhs(std::span<const double> u, const Grid1D& grid,
              const RegularizationParams& params, const FluxModel& flux,
              const ViscosityModel& visc, Workspace& ws, std::span<double> rhs,
              double t) {
  const double h = grid.spacing();
  flux.f_array(u, ws.fu);
  kernels::scaled_diff_periodic(u, 1.0 / h, ws.lam);
  if (params.epsilon > 0.0) visc.beta_array(ws.lam, ws.bf);
  kernels::rhs_combine_periodic(ws.fu, ws.bf, u, 0.5 / h, params.epsilon / h,
                                params.delta / (2.0 * h * h * h), rhs);
  check_finite(rhs, t);
}

// Midpoint-rule increments of the dissipation integrals, evaluated on the
// half-step stage. The parabolic integrand uses the chord form
// (l_+ - l_-)(beta(l_+) - beta(l_-))/h^2 per node, which is nonnegative for
// non-decreasing beta and consistent with u_xx^2 beta'(u_x).
struct DissipationIncrements {
  double viscous = 0.0, parabolic = 0.0, flux_weighted = 0.0;
};

DissipationIncrements dissipation_increments(std::span<const double> u,
                                             const Grid1D& grid,
                                             const FluxModel& flux,
                                             const ViscosityModel& visc,
                                             Workspace& ws) {
  const double h = grid.spacing();
  const std::size_t n = u.size();
  kernels::scaled_diff_periodic(u, 1.0 / h, ws.lam);
  visc.beta_array(ws.lam, ws.bf);
  DissipationIncrements inc;
  inc.viscous = kernels::dot(ws.lam, ws.bf) * h;
  double parabolic = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm1 = j == 0 ? n - 1 : j - 1;
    const double dl = ws.lam[j] - ws.lam[jm1];
    const double db = ws.bf[j] - ws.bf[jm1];
    parabolic += dl * db;
    const std::size_t jp1 = j + 1 == n ? 0 : j + 1;
    const double face_u = 0.5 * (u[j] + u[jp1]);
    weighted += flux.fprime(face_u) * ws.bf[j] * ws.lam[j];
  }
  inc.parabolic = parabolic / h;
  inc.flux_weighted = weighted * h;
  return inc;
}

// Shu-Osher SSP-RK3. Returns the half-step stage in ws.mid so the caller can
// apply the midpoint quadrature of the dissipation integrals.
void ssp_rk3_step(std::span<const double> u, double t, double dt,
                  const Grid1D& grid, const RegularizationParams& params,
                  const FluxModel& flux, const ViscosityModel& visc,
                  Workspace& ws, std::span<double> out) {
  const std::size_t n = u.size();
  eval_rhs(u, grid, params, flux, visc, ws, ws.rhs, t);
  kernels::axpby(1.0, u, dt, ws.rhs, std::span<double>(ws.stage.data(), n));
  eval_rhs(ws.stage, grid, params, flux, visc, ws, ws.rhs, t + dt);
  kernels::axpbypcz(0.75, u, 0.25, ws.stage, 0.25 * dt, ws.rhs,
                    std::span<double>(ws.mid.data(), n));
  eval_rhs(ws.mid, grid, params, flux, visc, ws, ws.rhs, t + 0.5 * dt);
  kernels::axpbypcz(1.0 / 3.0, u, 2.0 / 3.0, ws.mid, 2.0 / 3.0 * dt, ws.rhs,
                    out);
  check_finite(out, t + dt);
}

// Core of stable_timestep operating on a raw state vector; `lam` is scratch.
double stable_dt(std::span<const double> u, const Grid1D& grid,
                 const RegularizationParams& params, const FluxModel& flux,
                 const ViscosityModel& visc, double safety, double horizon,
                 std::span<double> lam) {
  const double h = grid.spacing();
  double dt = std::numeric_limits<double>::infinity();
  bool active = false;

  const double max_wave = flux.max_abs_fprime(u);
  if (max_wave > 0.0) {
    dt = std::min(dt, h / max_wave);
    active = true;
  }
  if (params.epsilon > 0.0) {
    kernels::scaled_diff_periodic(u, 1.0 / h, lam);
    const double max_bp = visc.max_beta_prime(lam);
    if (max_bp > 0.0) {
      dt = std::min(dt, h * h / (2.0 * params.epsilon * max_bp));
      active = true;
    }
  }
  if (params.delta > 0.0) {
    dt = std::min(dt, h * h * h / (4.0 * params.delta));
    active = true;
  }

  if (!active) {
    if (std::isnan(horizon))
      throw std::domain_error(
          "stable_timestep: no active term and no output interval given");
    return horizon;
  }
  return safety * dt;
}

}  // namespace

std::vector<double> semidiscrete_rhs(const SimState& state,
                                     const RegularizationParams& params,
                                     const FluxModel& flux,
                                     const ViscosityModel& visc) {
  check_finite(state.u, state.t);
  Workspace ws;
  ws.resize(state.u.size());
  std::vector<double> rhs(state.u.size());
  eval_rhs(state.u, state.grid, params, flux, visc, ws, rhs, state.t);
  return rhs;
}

double stable_timestep(const SimState& state,
                       const RegularizationParams& params,
                       const FluxModel& flux, const ViscosityModel& visc,
                       double safety, double horizon) {
  if (!(safety > 0.0 && safety <= 1.0))
    throw std::invalid_argument("stable_timestep: safety must be in (0, 1]");
  check_finite(state.u, state.t);
  std::vector<double> lam(state.u.size());
  return stable_dt(state.u, state.grid, params, flux, visc, safety, horizon,
                   lam);
}

SimState advance(const SimState& state, double dt,
                 const RegularizationParams& params, const FluxModel& flux,
                 const ViscosityModel& visc) {
  check_finite(state.u, state.t);
  Workspace ws;
  ws.resize(state.u.size());
  SimState next;
  next.grid = state.grid;
  next.t = state.t + dt;
  next.u.resize(state.u.size());
  ssp_rk3_step(state.u, state.t, dt, state.grid, params, flux, visc, ws,
               next.u);
  return next;
}

Trajectory integrate(const SimState& initial, double T,
                     const RegularizationParams& params, const FluxModel& flux,
                     const ViscosityModel& visc,
                     std::span<const double> snapshot_times, double safety) {
  if (!(T > initial.t))
    throw std::invalid_argument("integrate: T must exceed the initial time");
  std::vector<double> stops(snapshot_times.begin(), snapshot_times.end());
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  for (double s : stops)
    if (!(s > initial.t) || s > T * (1.0 + 1e-12))
      throw std::invalid_argument(
          "integrate: snapshot times must lie in (initial.t, T]");
  if (stops.empty() || stops.back() < T * (1.0 - 1e-12)) stops.push_back(T);

  Trajectory traj;
  traj.initial_state = initial;
  traj.records.reserve(stops.size());

  Workspace ws;
  const std::size_t n = initial.u.size();
  ws.resize(n);

  std::vector<double> u = initial.u;
  std::vector<double> u_next(n);
  double t = initial.t;
  double viscous = 0.0, parabolic = 0.0, weighted = 0.0;
  std::size_t next_stop = 0;

  try {
    check_finite(initial.u, initial.t);
    while (next_stop < stops.size()) {
      const double stop = stops[next_stop];
      while (t < stop) {
        double dt = stable_dt(u, initial.grid, params, flux, visc, safety,
                              stop - t, ws.lam);
        if (!(dt > 0.0) || dt < 1e-15 * (T - initial.t)) {
          // A collapsing stable step means wave speeds are exploding while
          // the values are still finite; surface it as a blow-up at the
          // fastest node.
          std::size_t worst = 0;
          for (std::size_t j = 1; j < n; ++j)
            if (std::fabs(u[j]) > std::fabs(u[worst])) worst = j;
          std::ostringstream os;
          os << "blow-up: stable time step collapsed at node " << worst
             << ", t = " << t;
          throw BlowUpError(t, worst, os.str());
        }
        bool lands = false;
        if (t + dt >= stop - 1e-14 * std::max(1.0, std::fabs(stop))) {
          dt = stop - t;
          lands = true;
        }
        ssp_rk3_step(u, t, dt, initial.grid, params, flux, visc, ws,
                     u_next);
        const auto inc =
            dissipation_increments(ws.mid, initial.grid, flux, visc, ws);
        viscous += dt * inc.viscous;
        parabolic += dt * inc.parabolic;
        weighted += dt * inc.flux_weighted;
        std::swap(u, u_next);
        t = lands ? stop : t + dt;
      }
      SimState snap;
      snap.grid = initial.grid;
      snap.u = u;
      snap.t = stop;
      traj.snapshots.push_back(std::move(snap));
      traj.records.push_back({stop, viscous, parabolic, weighted});
      ++next_stop;
    }
  } catch (BlowUpError& e) {
    traj.dissipation = viscous;
    traj.parabolic_dissipation = parabolic;
    traj.flux_weighted_dissipation = weighted;
    e.attach_partial(std::move(traj));
    throw;
  }

  traj.dissipation = viscous;
  traj.parabolic_dissipation = parabolic;
  traj.flux_weighted_dissipation = weighted;
  return traj;
}

namespace detail {

double slope_energy(const SimState& state) {
  const double h = state.grid.spacing();
  std::vector<double> lam(state.u.size());
  kernels::scaled_diff_periodic(state.u, 1.0 / h, lam);
  return kernels::sum_sq(lam) * h;
}

}  // namespace detail

double energy_balance(const Trajectory& traj,
                      const RegularizationParams& params) {
  if (traj.snapshots.empty())
    throw std::invalid_argument("energy_balance: empty trajectory");
  const double h = traj.initial_state.grid.spacing();
  const double e0 = kernels::sum_sq(traj.initial_state.u) * h;
  const double eT = kernels::sum_sq(traj.final_state().u) * h;
  return eT + 2.0 * params.epsilon * traj.dissipation - e0;
}

double second_energy_balance(const Trajectory& traj, const FluxModel& flux,
                             const ViscosityModel& visc,
                             const RegularizationParams& params) {
  (void)visc;
  if (traj.snapshots.empty())
    throw std::invalid_argument("second_energy_balance: empty trajectory");
  const auto& u0 = traj.initial_state;
  const auto& uT = traj.final_state();
  const double h = u0.grid.spacing();

  auto primitive_integral = [&](const SimState& s) {
    double acc = 0.0;
    for (double v : s.u) acc += flux.primitive(v);
    return acc * h;
  };

  const double lhs_T =
      0.5 * params.delta * detail::slope_energy(uT) - primitive_integral(uT);
  const double lhs_0 =
      0.5 * params.delta * detail::slope_energy(u0) - primitive_integral(u0);
  return lhs_T - lhs_0 +
         params.epsilon * params.delta * traj.parabolic_dissipation -
         params.epsilon * traj.flux_weighted_dissipation;
}

}  // namespace kdvb
