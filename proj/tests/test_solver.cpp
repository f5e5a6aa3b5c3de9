#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "kdvb/diagnostics.hpp"
#include "kdvb/kernels.hpp"
#include "kdvb/reference.hpp"
#include "kdvb/solver.hpp"

using namespace kdvb;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

SimState sine_state(std::size_t n, double amplitude = 1.0) {
  SimState s;
  s.grid = make_grid(0.0, kTwoPi, n);
  s.u.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    s.u[j] = amplitude * std::sin(s.grid.node(j));
  return s;
}

SimState constant_state(std::size_t n, double c) {
  SimState s;
  s.grid = make_grid(0.0, kTwoPi, n);
  s.u.assign(n, c);
  return s;
}

// Pre-shock entropy solution of Burgers by fixed-point iteration on the
// characteristics relation u = u0(x - u t).
double characteristics_burgers(double x, double t, double amplitude) {
  double u = 0.0;
  for (int it = 0; it < 200; ++it) u = amplitude * std::sin(x - u * t);
  return u;
}

}  // namespace

TEST_CASE("rhs vanishes on constant states") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const auto state = constant_state(64, 2.5);
  const auto rhs = semidiscrete_rhs(state, {0.3, 0.01}, flux, visc);
  for (double v : rhs) CHECK(v == 0.0);
}

TEST_CASE("rhs matches the analytic advective derivative") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  double err[2];
  const std::size_t ns[2] = {128, 256};
  for (int r = 0; r < 2; ++r) {
    const auto state = sine_state(ns[r]);
    const auto rhs = semidiscrete_rhs(state, {0.0, 0.0}, flux, visc);
    double worst = 0.0;
    for (std::size_t j = 0; j < ns[r]; ++j) {
      const double x = state.grid.node(j);
      worst = std::max(worst, std::fabs(rhs[j] + std::sin(x) * std::cos(x)));
    }
    err[r] = worst;
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("rhs matches the analytic third derivative") {
  const auto flux = FluxModel::zero();
  const auto visc = ViscosityModel::von_neumann();
  double err[2];
  const std::size_t ns[2] = {128, 256};
  for (int r = 0; r < 2; ++r) {
    const auto state = sine_state(ns[r]);
    const auto rhs = semidiscrete_rhs(state, {0.0, 1.0}, flux, visc);
    double worst = 0.0;
    for (std::size_t j = 0; j < ns[r]; ++j) {
      const double x = state.grid.node(j);
      worst = std::max(worst, std::fabs(rhs[j] - std::cos(x)));
    }
    err[r] = worst;
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("stable_timestep arithmetic") {
  // h = 0.01 via a unit domain with 100 cells.
  SimState s;
  s.grid = make_grid(0.0, 1.0, 100);
  s.u.assign(100, 1.0);

  const auto burgers = FluxModel::burgers();
  const auto zero = FluxModel::zero();
  const auto vn = ViscosityModel::von_neumann();
  const auto lin = ViscosityModel::linear();

  CHECK(stable_timestep(s, {0.0, 0.0}, burgers, vn, 0.5) ==
        doctest::Approx(0.005));
  CHECK(stable_timestep(s, {0.0, 1e-4}, zero, vn, 1.0) ==
        doctest::Approx(2.5e-3));
  CHECK(stable_timestep(s, {0.01, 0.0}, zero, lin, 1.0) ==
        doctest::Approx(5e-3));

  // All terms inactive: the output-interval horizon is the step.
  CHECK(stable_timestep(s, {0.0, 0.0}, zero, vn, 1.0, 7.5) ==
        doctest::Approx(7.5));
  CHECK_THROWS_AS(stable_timestep(s, {0.0, 0.0}, zero, vn, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(stable_timestep(s, {0.0, 0.0}, burgers, vn, 1.5),
                  std::invalid_argument);

  const double dt = stable_timestep(s, {0.5, 0.25}, burgers, vn, 1.0);
  CHECK(dt > 0.0);
  CHECK(std::isfinite(dt));
}

TEST_CASE("advance keeps constant states") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const auto state = constant_state(64, 0.7);
  const auto next = advance(state, 1e-3, {0.2, 1e-3}, flux, visc);
  for (std::size_t j = 0; j < state.u.size(); ++j)
    CHECK(next.u[j] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(next.t == doctest::Approx(state.t + 1e-3));
}

TEST_CASE("advance conserves discrete mass per step") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  for (const RegularizationParams params :
       {RegularizationParams{0.0, 0.0}, RegularizationParams{0.02, 0.0},
        RegularizationParams{0.02, 1e-4}, RegularizationParams{0.0, 1e-4}}) {
    const auto state = sine_state(256);
    const double dt = stable_timestep(state, params, flux, visc, 0.4);
    const auto next = advance(state, dt, params, flux, visc);
    const double h = state.grid.spacing();
    const double before = kernels::sum(state.u) * h;
    const double after = kernels::sum(next.u) * h;
    const double bound = 10.0 * std::numeric_limits<double>::epsilon() *
                         static_cast<double>(state.u.size()) *
                         kernels::max_abs(state.u);
    CHECK(std::fabs(after - before) <= bound);
  }
}

TEST_CASE("advance matches the characteristics solution before shocks") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const double amplitude = 0.5;  // first crossing time 1/amplitude = 2
  const double T = 0.3;
  double err[2];
  const std::size_t ns[2] = {128, 256};
  for (int r = 0; r < 2; ++r) {
    auto state = sine_state(ns[r], amplitude);
    const auto traj = integrate(state, T, {0.0, 0.0}, flux, visc, {}, 0.4);
    const auto& fin = traj.final_state();
    double worst = 0.0;
    for (std::size_t j = 0; j < fin.u.size(); ++j)
      worst = std::max(worst,
                       std::fabs(fin.u[j] - characteristics_burgers(
                                                fin.grid.node(j), T, amplitude)));
    err[r] = worst;
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("integrate hits snapshot times exactly") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const auto state = sine_state(64, 0.3);
  const std::vector<double> times = {0.05, 0.125, 0.2};
  const auto traj = integrate(state, 0.25, {0.05, 0.0}, flux, visc, times, 0.4);
  REQUIRE(traj.snapshots.size() == 4);  // three requested plus T
  CHECK(traj.snapshots[0].t == 0.05);
  CHECK(traj.snapshots[1].t == 0.125);
  CHECK(traj.snapshots[2].t == 0.2);
  CHECK(traj.snapshots[3].t == 0.25);

  const auto only_final =
      integrate(state, 0.25, {0.05, 0.0}, flux, visc, {}, 0.4);
  CHECK(only_final.snapshots.size() == 1);
  CHECK(only_final.snapshots[0].t == 0.25);

  // Duplicate requests collapse; snapshot times stay strictly increasing.
  const std::vector<double> dupes = {0.1, 0.1, 0.2};
  const auto deduped =
      integrate(state, 0.25, {0.05, 0.0}, flux, visc, dupes, 0.4);
  REQUIRE(deduped.snapshots.size() == 3);
  for (std::size_t i = 0; i + 1 < deduped.snapshots.size(); ++i)
    CHECK(deduped.snapshots[i].t < deduped.snapshots[i + 1].t);

  CHECK_THROWS_AS(integrate(state, 0.0, {0.05, 0.0}, flux, visc, {}, 0.4),
                  std::invalid_argument);
  const std::vector<double> bad = {0.5};
  CHECK_THROWS_AS(integrate(state, 0.25, {0.05, 0.0}, flux, visc, bad, 0.4),
                  std::invalid_argument);
}

TEST_CASE("dissipation records are non-decreasing") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const auto state = sine_state(256);
  const std::vector<double> times = {0.2, 0.4, 0.6, 0.8, 1.0};
  const auto traj = integrate(state, 1.0, {0.05, 0.0}, flux, visc, times, 0.4);
  double prev = 0.0;
  for (const auto& rec : traj.records) {
    CHECK(rec.viscous >= prev - 1e-15);
    prev = rec.viscous;
  }
  CHECK(traj.dissipation == traj.records.back().viscous);
  CHECK(traj.parabolic_dissipation >= 0.0);
}

TEST_CASE("viscous regime stays monotone and tracks the Godunov reference") {
  const auto flux = FluxModel::burgers();
  const double eps = 0.01;
  const std::size_t n = 2514;  // h = eps/4 resolves the shock layer
  const auto state = sine_state(n);
  const double tv0 = total_variation(state);
  auto fine = sine_state(4 * n);
  const auto ref = godunov_integrate(fine, 2.0, flux, RefBoundary::periodic);

  // Linear viscosity has an O(eps) shock layer and lands within 0.05 of the
  // entropy solution; the von Neumann layer is degenerate with width
  // pi*sqrt(2 eps) ~ 0.44, so its gap is an order larger (measured 0.158).
  {
    const auto visc = ViscosityModel::linear();
    const auto traj = integrate(state, 2.0, {eps, 0.0}, flux, visc, {}, 0.4);
    CHECK(total_variation(traj.final_state()) <= 1.05 * tv0);
    CHECK(l1_distance(traj.final_state(), ref) <= 0.05);
  }
  {
    const auto visc = ViscosityModel::von_neumann();
    const auto traj = integrate(state, 2.0, {eps, 0.0}, flux, visc, {}, 0.4);
    CHECK(total_variation(traj.final_state()) <= 1.05 * tv0);
    CHECK(l1_distance(traj.final_state(), ref) <= 0.2);
  }
}

TEST_CASE("dispersive regime develops an oscillatory wake") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const std::size_t n = 2514;  // h = sqrt(delta)/4
  const auto state = sine_state(n);
  const auto traj = integrate(state, 1.5, {0.0, 1e-4}, flux, visc, {}, 0.4);
  CHECK(total_variation(traj.final_state()) > 2.0 * total_variation(state));
}

TEST_CASE("supremum stays bounded in the parabolic regime") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const double eps = 0.02;
  const std::size_t n = 1257;
  const auto state = sine_state(n);
  const std::vector<double> times = {0.3, 0.6, 0.9, 1.2, 1.5};
  const auto traj = integrate(state, 1.5, {eps, 0.0}, flux, visc, times, 0.4);
  const double sup0 = kernels::max_abs(state.u);
  for (const auto& snap : traj.snapshots)
    CHECK(kernels::max_abs(snap.u) <= 1.05 * sup0);
}

TEST_CASE("energy balance vanishes on constant data") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const auto state = constant_state(64, 1.3);
  const auto traj = integrate(state, 0.5, {0.1, 1e-4}, flux, visc, {}, 0.4);
  CHECK(std::fabs(energy_balance(traj, {0.1, 1e-4})) <= 1e-12);
  CHECK(std::fabs(second_energy_balance(traj, flux, visc, {0.1, 1e-4})) <=
        1e-12);
}

TEST_CASE("pure-dispersion energy drift refines at second order") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const RegularizationParams params{0.0, 1e-3};
  double res[3];
  const std::size_t ns[3] = {128, 256, 512};
  for (int r = 0; r < 3; ++r) {
    const auto state = sine_state(ns[r], 0.5);
    const auto traj = integrate(state, 0.3, params, flux, visc, {}, 0.4);
    res[r] = std::fabs(energy_balance(traj, params));
  }
  CHECK(std::log2(res[0] / res[1]) >= 1.7);
  CHECK(std::log2(res[1] / res[2]) >= 1.7);
}

TEST_CASE("second energy residual refines on the dispersive invariant") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const RegularizationParams params{0.0, 1e-3};
  double res[2];
  const std::size_t ns[2] = {128, 256};
  for (int r = 0; r < 2; ++r) {
    const auto state = sine_state(ns[r], 0.5);
    const auto traj = integrate(state, 0.3, params, flux, visc, {}, 0.4);
    res[r] = std::fabs(second_energy_balance(traj, flux, visc, params));
  }
  CHECK(res[0] / res[1] >= 3.0);
}

TEST_CASE("second energy residual refines with both terms active") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const RegularizationParams params{0.02, 1e-3};
  double res[2];
  const std::size_t ns[2] = {256, 512};
  for (int r = 0; r < 2; ++r) {
    const auto state = sine_state(ns[r], 0.5);
    const auto traj = integrate(state, 0.3, params, flux, visc, {}, 0.4);
    res[r] = std::fabs(second_energy_balance(traj, flux, visc, params));
  }
  CHECK(res[0] / res[1] >= 3.0);
}

TEST_CASE("blow-up reporting carries the node, time, and partial trajectory") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  auto state = constant_state(64, 1.0);
  state.u[17] = std::nan("");

  CHECK_THROWS_AS(semidiscrete_rhs(state, {0.0, 0.0}, flux, visc),
                  BlowUpError);
  try {
    integrate(state, 0.5, {0.0, 0.0}, flux, visc, {}, 0.4);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.node() == 17);
    CHECK(e.time() == 0.0);
    CHECK(e.has_partial());
    CHECK(e.partial().snapshots.empty());
  }

  auto big = constant_state(64, 1e300);
  CHECK_THROWS_AS(semidiscrete_rhs(big, {0.0, 0.0}, flux, visc), BlowUpError);
}
