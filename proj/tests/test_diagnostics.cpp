#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kdvb/diagnostics.hpp"
#include "kdvb/harness.hpp"
#include "kdvb/kernels.hpp"
#include "kdvb/models.hpp"
#include "kdvb/reference.hpp"
#include "kdvb/solver.hpp"

using namespace kdvb;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

SimState grid_state(double x0, double x1, std::size_t n) {
  SimState s;
  s.grid = make_grid(x0, x1, n);
  s.u.assign(n, 0.0);
  return s;
}

SimState sine_state(std::size_t n, double amplitude = 1.0) {
  auto s = grid_state(0.0, kTwoPi, n);
  for (std::size_t j = 0; j < n; ++j)
    s.u[j] = amplitude * std::sin(s.grid.node(j));
  return s;
}

Trajectory constant_trajectory(double c, std::size_t n, std::size_t snaps) {
  Trajectory traj;
  auto s = grid_state(0.0, kTwoPi, n);
  s.u.assign(n, c);
  traj.initial_state = s;
  for (std::size_t i = 1; i <= snaps; ++i) {
    s.t = static_cast<double>(i) / static_cast<double>(snaps);
    traj.snapshots.push_back(s);
    traj.records.push_back({s.t, 0.0, 0.0, 0.0});
  }
  return traj;
}

// Trajectory holding samples of the exact Riemann shock (u_l > u_r).
Trajectory shock_trajectory(const RiemannData& data, const FluxModel& flux,
                            const Grid1D& grid, double T, std::size_t snaps) {
  Trajectory traj;
  const double mid = 0.5 * (grid.x_left + grid.x_right);
  auto sample = [&](double t) {
    const auto ref = riemann_exact_on_grid(data, flux, grid, mid, t);
    SimState s;
    s.grid = grid;
    s.u = ref.u;
    s.t = t;
    return s;
  };
  traj.initial_state = sample(0.0);
  for (std::size_t i = 1; i <= snaps; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(snaps);
    traj.snapshots.push_back(sample(t));
    traj.records.push_back({t, 0.0, 0.0, 0.0});
  }
  return traj;
}

}  // namespace

TEST_CASE("lq_norm spec values") {
  auto s = grid_state(0.0, 2.0, 64);
  s.u.assign(64, 1.0);
  CHECK(lq_norm(s, 2.0) == doctest::Approx(std::sqrt(2.0)));
  s.u.assign(64, 0.0);
  for (double q : {1.0, 2.0, 5.0}) CHECK(lq_norm(s, q) == 0.0);

  const auto sine = sine_state(512);
  CHECK(lq_norm(sine, 2.0) ==
        doctest::Approx(std::sqrt(3.141592653589793)).epsilon(1e-4));
  CHECK(lq_norm(sine, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(lq_norm(sine, 0.5), std::invalid_argument);
}

TEST_CASE("Hoelder relation between lq and linf on a finite domain") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  auto s = grid_state(0.0, kTwoPi, 256);
  for (auto& v : s.u) v = dist(rng);
  const double L = s.grid.length();
  const double linf = lq_norm(s, std::numeric_limits<double>::infinity());
  for (double q : {1.0, 2.0, 3.5, 5.0})
    CHECK(linf >= lq_norm(s, q) / std::pow(L, 1.0 / q) - 1e-12);
}

TEST_CASE("total_variation spec values") {
  auto s = grid_state(0.0, 1.0, 64);
  CHECK(total_variation(s) == 0.0);

  s.u.assign(64, 0.0);
  s.u[10] = 1.0;  // single up-down hat
  CHECK(total_variation(s) == doctest::Approx(2.0));

  CHECK(total_variation(sine_state(1024)) == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("l1_distance is a metric and handles restriction") {
  auto a = sine_state(128);
  ReferenceSolution same;
  same.grid = a.grid;
  same.u = a.u;
  same.t = a.t;
  CHECK(l1_distance(a, same) == 0.0);

  auto shifted = same;
  for (auto& v : shifted.u) v += 0.25;
  CHECK(l1_distance(a, shifted) == doctest::Approx(0.25 * kTwoPi).epsilon(1e-12));

  // Symmetry and the triangle inequality on sampled triples.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto b = a, c = a;
  for (auto& v : b.u) v = dist(rng);
  for (auto& v : c.u) v = dist(rng);
  ReferenceSolution rb{b.grid, b.u, b.t, RefScheme::godunov};
  ReferenceSolution rc{c.grid, c.u, c.t, RefScheme::godunov};
  ReferenceSolution ra{a.grid, a.u, a.t, RefScheme::godunov};
  CHECK(l1_distance(a, rb) == doctest::Approx(l1_distance(b, ra)).epsilon(1e-12));
  CHECK(l1_distance(a, rc) <=
        l1_distance(a, rb) + l1_distance(b, rc) + 1e-12);

  // 4x restriction averages back to the coarse samples for linear data.
  ReferenceSolution fine;
  fine.grid = make_grid(0.0, kTwoPi, 512);
  fine.u.resize(512);
  fine.t = a.t;
  for (std::size_t j = 0; j < 512; ++j)
    fine.u[j] = std::sin(fine.grid.node(j));
  CHECK(l1_distance(a, fine) <= 2e-3);

  ReferenceSolution wrong_domain;
  wrong_domain.grid = make_grid(0.0, 1.0, 128);
  wrong_domain.u.assign(128, 0.0);
  wrong_domain.t = a.t;
  CHECK_THROWS_AS(l1_distance(a, wrong_domain), std::invalid_argument);

  ReferenceSolution wrong_time = same;
  wrong_time.t = a.t + 1.0;
  CHECK_THROWS_AS(l1_distance(a, wrong_time), std::invalid_argument);

  ReferenceSolution incommensurate;
  incommensurate.grid = make_grid(0.0, kTwoPi, 130);
  incommensurate.u.assign(130, 0.0);
  incommensurate.t = a.t;
  CHECK_THROWS_AS(l1_distance(a, incommensurate), std::invalid_argument);
}

TEST_CASE("entropy production vanishes on constant trajectories") {
  const auto flux = FluxModel::burgers();
  const auto traj = constant_trajectory(0.8, 128, 8);
  const std::vector<double> ks = {-0.5, 0.0, 0.5, 0.8, 1.5};
  const auto report = entropy_production(traj, flux, ks);
  for (double p : report.positive_production) CHECK(p <= 1e-12);
}

TEST_CASE("entropy production preconditions") {
  const auto flux = FluxModel::burgers();
  Trajectory short_traj = constant_trajectory(0.5, 64, 1);
  const std::vector<double> ks = {0.0};
  CHECK_THROWS_AS(entropy_production(short_traj, flux, ks),
                  std::invalid_argument);
}

TEST_CASE("admissible shock has nonpositive signed production") {
  const auto flux = FluxModel::burgers();
  const RiemannData data{1.0, 0.0};
  // The measured positive part decays linearly with h (the bilinear ramp at
  // the jump against the hat slope); this resolution puts it at ~6e-4.
  const auto grid = make_grid(-2.0, 2.0, 16000);
  const auto traj = shock_trajectory(data, flux, grid, 1.0, 200);

  // Closed-form wedge oracle: the production measure carried by the shock is
  // (s[eta] - [Q]) per unit time. For k outside [u_r, u_l] it cancels to
  // roundoff; inside it is strictly dissipative.
  const double s =
      (flux.f(data.u_left) - flux.f(data.u_right)) / (data.u_left - data.u_right);
  auto wedge_density = [&](double k) {
    const EntropyPair pair{k};
    const double deta = pair.eta(data.u_left) - pair.eta(data.u_right);
    const double dq = pair.q(flux, data.u_left) - pair.q(flux, data.u_right);
    return s * deta - dq;
  };
  CHECK(std::fabs(wedge_density(-0.5)) <= 1e-10);
  CHECK(std::fabs(wedge_density(1.5)) <= 1e-10);
  CHECK(wedge_density(0.5) == doctest::Approx(-0.25));
  CHECK(wedge_density(0.25) < 0.0);
  CHECK(wedge_density(0.75) < 0.0);

  // The measured positive part is quadrature-level small for every k.
  const std::vector<double> ks = {-0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5};
  const auto report = entropy_production(traj, flux, ks);
  const double jump = std::fabs(data.u_left - data.u_right);
  for (double p : report.positive_production) CHECK(p <= 1e-3 * jump);
}

TEST_CASE("dispersive wakes produce order-one entropy production") {
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const std::size_t n = 2514;
  const auto state = sine_state(n);
  std::vector<double> times;
  for (int i = 1; i <= 16; ++i) times.push_back(1.5 * i / 16.0);
  const auto traj = integrate(state, 1.5, {0.0, 1e-4}, flux, visc, times, 0.4);
  const std::vector<double> ks = {0.5};
  const auto report = entropy_production(traj, flux, ks);
  CHECK(report.max_production() >= 0.05);
}

TEST_CASE("young histogram on constant data is a Dirac in every cell") {
  const auto traj = constant_trajectory(1.1, 128, 8);
  const auto hist = young_histogram(traj, {0.0, kTwoPi, 0.0, 1.0}, 8, 4, 32);
  for (std::size_t c = 0; c < hist.cell_var.size(); ++c)
    CHECK(hist.cell_var[c] == 0.0);
  // Each cell's histogram carries total mass one.
  for (std::size_t it = 0; it < hist.cells_t; ++it)
    for (std::size_t ix = 0; ix < hist.cells_x; ++ix) {
      double mass = 0.0;
      for (std::size_t b = 0; b < hist.bins; ++b)
        mass += hist.mass_at(ix, it, b);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
  CHECK(concentration_metric(hist) == 0.0);
}

TEST_CASE("two-value oscillation has variance ((b-a)/2)^2") {
  Trajectory traj;
  auto s = grid_state(0.0, kTwoPi, 128);
  const double a = -0.3, b = 0.9;
  for (std::size_t j = 0; j < 128; ++j) s.u[j] = (j % 2 == 0) ? a : b;
  traj.initial_state = s;
  for (int i = 1; i <= 4; ++i) {
    s.t = 0.25 * i;
    traj.snapshots.push_back(s);
    traj.records.push_back({s.t, 0.0, 0.0, 0.0});
  }
  const auto hist = young_histogram(traj, {0.0, kTwoPi, 0.0, 1.0}, 4, 2, 64);
  const double expected = 0.25 * (b - a) * (b - a);
  for (double v : hist.cell_var)
    CHECK(v == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("young histogram rejects empty cells and bad windows") {
  const auto traj = constant_trajectory(0.0, 64, 3);
  // More time cells than snapshots leaves gaps.
  CHECK_THROWS_AS(young_histogram(traj, {0.0, kTwoPi, 0.0, 1.0}, 4, 16, 32),
                  std::invalid_argument);
  CHECK_THROWS_AS(young_histogram(traj, {0.0, kTwoPi, 0.0, 2.0}, 4, 2, 32),
                  std::invalid_argument);
  CHECK_THROWS_AS(young_histogram(traj, {0.0, kTwoPi, 0.0, 1.0}, 4, 2, 8),
                  std::invalid_argument);
}

TEST_CASE("concentration of a uniform histogram is 1/sqrt(12)") {
  YoungHistogram hist;
  hist.cells_x = 4;
  hist.cells_t = 2;
  hist.bins = 64;
  hist.value_min = 0.0;
  hist.value_max = 1.0;
  hist.mass.assign(hist.cells_x * hist.cells_t * hist.bins, 1.0 / 64.0);
  hist.cell_mean.assign(hist.cells_x * hist.cells_t, 0.5);
  hist.cell_var.clear();
  const double bin_w = 1.0 / 64.0;
  for (std::size_t c = 0; c < 8; ++c) {
    double var = 0.0;
    for (std::size_t b = 0; b < 64; ++b) {
      const double center = (b + 0.5) * bin_w;
      var += (1.0 / 64.0) * (center - 0.5) * (center - 0.5);
    }
    hist.cell_var.push_back(var);
  }
  CHECK(concentration_metric(hist) ==
        doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(2e-3));
}

TEST_CASE("sup_scaling_fit recovers exact power laws") {
  std::vector<std::pair<double, double>> runs;
  for (double d : {1e-3, 1e-4, 1e-5})
    runs.emplace_back(d, std::pow(d, -1.0 / 3.0));
  CHECK(sup_scaling_fit(runs) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

  std::vector<std::pair<double, double>> flat;
  for (double d : {1e-3, 1e-4, 1e-5}) flat.emplace_back(d, 2.0);
  CHECK(sup_scaling_fit(flat) == doctest::Approx(0.0));

  std::vector<std::pair<double, double>> two = {{1e-3, 1.0}, {1e-4, 2.0}};
  CHECK_THROWS_AS(sup_scaling_fit(two), std::invalid_argument);
}

TEST_CASE("slope energy growth stays within the delta bound") {
  // (1/2) int u_x^2(T) + eps * parabolic dissipation along a delta sweep;
  // the fitted growth exponent against 1/delta must stay below
  // 4/(5-m) + 0.3 = 4/3 + 0.3 for burgers.
  const auto flux = FluxModel::burgers();
  const auto visc = ViscosityModel::von_neumann();
  const double eps = 0.05;
  std::vector<std::pair<double, double>> runs;
  for (double delta : {1e-3, 2.5e-4, 6.3e-5}) {
    const double h_req = std::sqrt(delta) / 4.0;
    const auto n = static_cast<std::size_t>(std::ceil(kTwoPi / h_req));
    const auto state = sine_state(n);
    const auto traj =
        integrate(state, 0.6, {eps, delta}, flux, visc, {}, 0.4);
    const double quantity = 0.5 * detail::slope_energy(traj.final_state()) +
                            eps * traj.parabolic_dissipation;
    runs.emplace_back(delta, quantity);
  }
  CHECK(sup_scaling_fit(runs) <= 4.0 / 3.0 + 0.3);
}
