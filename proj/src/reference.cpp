#include "kdvb/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

// The reference module is the independent oracle side of every comparison,
// so it stays on plain scalar loops and a first-order monotone scheme; none
// of the solver's vector kernels are used here.

namespace kdvb {

namespace {

// Minimum of f over [a, b] (a <= b) by coarse sampling plus golden-section
// refinement; used for table fluxes only.
double sampled_min(const FluxModel& flux, double a, double b) {
  constexpr int kCoarse = 64;
  double best_x = a, best = flux.f(a);
  for (int i = 1; i <= kCoarse; ++i) {
    const double x = a + (b - a) * i / kCoarse;
    const double v = flux.f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  double lo = std::max(a, best_x - (b - a) / kCoarse);
  double hi = std::min(b, best_x + (b - a) / kCoarse);
  constexpr double kGolden = 0.6180339887498949;
  for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, std::fabs(hi));
       ++it) {
    const double x1 = hi - kGolden * (hi - lo);
    const double x2 = lo + kGolden * (hi - lo);
    if (flux.f(x1) <= flux.f(x2))
      hi = x2;
    else
      lo = x1;
  }
  return std::min(best, flux.f(0.5 * (lo + hi)));
}

double sampled_max(const FluxModel& flux, double a, double b) {
  // Tables may put the maximum in the interior; mirror sampled_min.
  constexpr int kCoarse = 64;
  double best_x = a, best = flux.f(a);
  for (int i = 1; i <= kCoarse; ++i) {
    const double x = a + (b - a) * i / kCoarse;
    const double v = flux.f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  double lo = std::max(a, best_x - (b - a) / kCoarse);
  double hi = std::min(b, best_x + (b - a) / kCoarse);
  constexpr double kGolden = 0.6180339887498949;
  for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, std::fabs(hi));
       ++it) {
    const double x1 = hi - kGolden * (hi - lo);
    const double x2 = lo + kGolden * (hi - lo);
    if (flux.f(x1) >= flux.f(x2))
      hi = x2;
    else
      lo = x1;
  }
  return std::max(best, flux.f(0.5 * (lo + hi)));
}

bool convex_builtin(const FluxModel& flux) {
  return flux.kind() == FluxKind::burgers || flux.kind() == FluxKind::power;
}

}  // namespace

double godunov_flux(double u_left, double u_right, const FluxModel& flux) {
  if (!std::isfinite(u_left) || !std::isfinite(u_right))
    throw std::domain_error("godunov_flux: non-finite state");
  if (u_left == u_right) return flux.f(u_left);
  if (u_left < u_right) {
    // Minimum over [u_left, u_right]; built-in fluxes are convex with their
    // minimum at 0.
    if (convex_builtin(flux)) {
      if (u_left >= 0.0) return flux.f(u_left);
      if (u_right <= 0.0) return flux.f(u_right);
      return flux.f(0.0);
    }
    if (flux.kind() == FluxKind::zero) return 0.0;
    return sampled_min(flux, u_left, u_right);
  }
  // u_left > u_right: maximum over [u_right, u_left].
  if (convex_builtin(flux) || flux.kind() == FluxKind::zero)
    return std::max(flux.f(u_left), flux.f(u_right));
  return sampled_max(flux, u_right, u_left);
}

namespace {

void godunov_step(std::vector<double>& u, std::vector<double>& fluxes,
                  double dt_over_h, const FluxModel& flux,
                  RefBoundary boundary) {
  const std::size_t n = u.size();
  // fluxes[j] = numerical flux through the face between j and j+1.
  for (std::size_t j = 0; j + 1 < n; ++j)
    fluxes[j] = godunov_flux(u[j], u[j + 1], flux);
  double f_left;  // flux into cell 0 from the left
  if (boundary == RefBoundary::periodic) {
    fluxes[n - 1] = godunov_flux(u[n - 1], u[0], flux);
    f_left = fluxes[n - 1];
  } else {
    fluxes[n - 1] = flux.f(u[n - 1]);
    f_left = flux.f(u[0]);
  }
  double upstream = f_left;
  for (std::size_t j = 0; j < n; ++j) {
    const double here = fluxes[j];
    u[j] -= dt_over_h * (here - upstream);
    upstream = here;
  }
}

double godunov_dt(const std::vector<double>& u, const FluxModel& flux,
                  double h, double cfl) {
  const double max_wave = flux.max_abs_fprime(u);
  if (max_wave <= 0.0) return std::numeric_limits<double>::infinity();
  return cfl * h / max_wave;
}

}  // namespace

ReferenceRun godunov_integrate_run(const SimState& initial, double T,
                                   const FluxModel& flux, RefBoundary boundary,
                                   double cfl,
                                   std::span<const double> snapshot_times,
                                   bool record_every_step) {
  if (!(T >= initial.t))
    throw std::invalid_argument("godunov_integrate: T must be >= initial time");
  if (!(cfl > 0.0 && cfl <= 1.0))
    throw std::invalid_argument("godunov_integrate: cfl must be in (0, 1]");

  std::vector<double> stops(snapshot_times.begin(), snapshot_times.end());
  std::sort(stops.begin(), stops.end());
  if (stops.empty() || stops.back() < T * (1.0 - 1e-12)) stops.push_back(T);

  ReferenceRun run;
  run.initial = initial;

  std::vector<double> u = initial.u;
  std::vector<double> fluxes(u.size());
  const double h = initial.grid.spacing();
  double t = initial.t;

  auto record = [&](double time) {
    SimState s;
    s.grid = initial.grid;
    s.u = u;
    s.t = time;
    run.states.push_back(std::move(s));
  };

  for (double stop : stops) {
    while (t < stop) {
      double dt = godunov_dt(u, flux, h, cfl);
      if (t + dt >= stop - 1e-14 * std::max(1.0, std::fabs(stop)))
        dt = stop - t;
      godunov_step(u, fluxes, dt / h, flux, boundary);
      t = std::min(stop, t + dt);
      if (record_every_step && t < stop) record(t);
    }
    record(stop);
  }

  run.final.grid = initial.grid;
  run.final.u = u;
  run.final.t = T;
  run.final.scheme = RefScheme::godunov;
  return run;
}

ReferenceSolution godunov_integrate(const SimState& initial, double T,
                                    const FluxModel& flux, RefBoundary boundary,
                                    double cfl) {
  return godunov_integrate_run(initial, T, flux, boundary, cfl, {}, false)
      .final;
}

namespace {

// Inverse of f' on [lo, hi] by bisection; f' is non-decreasing for convex f.
double fprime_inverse(const FluxModel& flux, double xi, double lo, double hi) {
  if (flux.kind() == FluxKind::burgers) return xi;
  if (flux.kind() == FluxKind::power) {
    const double m = flux.growth_exponent();
    const double s = xi < 0.0 ? -1.0 : 1.0;
    return s * std::pow(std::fabs(xi), 1.0 / (m - 1.0));
  }
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(b));
       ++it) {
    const double mid = 0.5 * (a + b);
    if (flux.fprime(mid) < xi)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

void require_convex(const FluxModel& flux, double lo, double hi) {
  if (convex_builtin(flux) || flux.kind() == FluxKind::zero) return;
  constexpr int kProbe = 256;
  double prev = flux.fprime(lo);
  for (int i = 1; i <= kProbe; ++i) {
    const double x = lo + (hi - lo) * i / kProbe;
    const double cur = flux.fprime(x);
    if (cur < prev - 1e-10 * std::max(1.0, std::fabs(prev)))
      throw std::invalid_argument(
          "riemann_exact: flux not convex on the data range; use "
          "godunov_integrate instead");
    prev = cur;
  }
}

}  // namespace

double riemann_exact(const RiemannData& data, const FluxModel& flux,
                     double xi) {
  if (!std::isfinite(data.u_left) || !std::isfinite(data.u_right))
    throw std::domain_error("riemann_exact: non-finite data");
  const double ul = data.u_left, ur = data.u_right;
  if (ul == ur) return ul;
  const double lo = std::min(ul, ur), hi = std::max(ul, ur);
  require_convex(flux, lo, hi);

  if (ul > ur) {
    // Admissible shock at the Rankine-Hugoniot speed; the ray xi = s carries
    // the left state by convention (measure zero).
    const double s = (flux.f(ul) - flux.f(ur)) / (ul - ur);
    return xi <= s ? ul : ur;
  }
  const double a = flux.fprime(ul);
  const double b = flux.fprime(ur);
  if (xi <= a) return ul;
  if (xi >= b) return ur;
  return fprime_inverse(flux, xi, ul, ur);
}

ReferenceSolution riemann_exact_on_grid(const RiemannData& data,
                                        const FluxModel& flux,
                                        const Grid1D& grid, double x_jump,
                                        double t) {
  ReferenceSolution out;
  out.grid = grid;
  out.t = t;
  out.scheme = RefScheme::exact_riemann;
  out.u.resize(grid.cells);
  for (std::size_t j = 0; j < grid.cells; ++j) {
    const double x = grid.node(j) - x_jump;
    if (t <= 0.0)
      out.u[j] = x < 0.0 ? data.u_left : data.u_right;
    else
      out.u[j] = riemann_exact(data, flux, x / t);
  }
  return out;
}

bool norm_contraction_check(std::span<const SimState> states, double r) {
  if (states.size() < 2)
    throw std::invalid_argument("norm_contraction_check: need >= 2 states");
  if (!(r >= 1.0))
    throw std::invalid_argument("norm_contraction_check: r must be >= 1");

  auto norm = [&](const SimState& s) {
    const double h = s.grid.spacing();
    double acc = 0.0;
    for (double v : s.u) acc += std::pow(std::fabs(v), r);
    return std::pow(acc * h, 1.0 / r);
  };

  const double slack = 1e-12 * norm(states.front());
  double prev = norm(states.front());
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double cur = norm(states[i]);
    if (cur > prev + slack) return false;
    prev = cur;
  }
  return true;
}

}  // namespace kdvb
