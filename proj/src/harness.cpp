#include "kdvb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <semaphore>
#include <sstream>
#include <thread>

#include "kdvb/io.hpp"
#include "kdvb/kernels.hpp"

namespace kdvb {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::convergent:
      return "convergent";
    case Regime::oscillatory:
      return "oscillatory";
    case Regime::indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

Regime regime_from_name(const std::string& name) {
  if (name == "convergent") return Regime::convergent;
  if (name == "oscillatory") return Regime::oscillatory;
  if (name == "indeterminate") return Regime::indeterminate;
  throw std::invalid_argument("unknown regime label: " + name);
}

Regime classify_regime(const SweepRow& row, double scale) {
  constexpr double slack = 1e-12;
  if (row.tv_ratio <= 2.0 &&
      row.max_entropy_production <= 0.1 * scale + slack)
    return Regime::convergent;
  if (row.tv_ratio >= 5.0) return Regime::oscillatory;
  return Regime::indeterminate;
}

double entropy_scale(const SimState& initial, const FluxModel& flux,
                     std::span<const double> k_grid) {
  const double tv = kernels::total_variation_periodic(initial.u);
  double umin = 0.0, umax = 0.0;
  if (!initial.u.empty()) {
    const auto [lo, hi] = std::minmax_element(initial.u.begin(),
                                              initial.u.end());
    umin = *lo;
    umax = *hi;
  }
  constexpr int kSamples = 64;
  double widest = 0.0;
  for (double k : k_grid) {
    const EntropyPair pair{k};
    double qmin = std::numeric_limits<double>::infinity();
    double qmax = -qmin;
    for (int i = 0; i <= kSamples; ++i) {
      const double u = umin + (umax - umin) * i / kSamples;
      const double q = pair.q(flux, u);
      qmin = std::min(qmin, q);
      qmax = std::max(qmax, q);
    }
    widest = std::max(widest, qmax - qmin);
  }
  return tv * widest;
}

std::vector<double> default_k_grid(const SimState& initial, std::size_t count) {
  double umin = 0.0, umax = 0.0;
  if (!initial.u.empty()) {
    const auto [lo, hi] = std::minmax_element(initial.u.begin(),
                                              initial.u.end());
    umin = *lo;
    umax = *hi;
  }
  const double lo = umin - 0.1, hi = umax + 0.1;
  std::vector<double> ks(count);
  for (std::size_t i = 0; i < count; ++i)
    ks[i] = lo + (hi - lo) * static_cast<double>(i) /
                     static_cast<double>(count - 1);
  return ks;
}

namespace {

// Compact-support data should stay away from the periodic seam; warn when
// the outer 5% band carries more than 1e-8 of the peak.
void check_seam(const ExperimentConfig& cfg, const SimState& final_state,
                std::vector<std::string>& warnings) {
  if (cfg.initial.kind != "gaussian" && cfg.initial.kind != "gaussian-bump" &&
      cfg.initial.kind != "from-file")
    return;
  const std::size_t n = final_state.u.size();
  const std::size_t band = std::max<std::size_t>(1, n / 20);
  double band_max = 0.0;
  for (std::size_t j = 0; j < band; ++j) {
    band_max = std::max(band_max, std::fabs(final_state.u[j]));
    band_max = std::max(band_max, std::fabs(final_state.u[n - 1 - j]));
  }
  const double peak = kernels::max_abs(final_state.u);
  if (band_max > 1e-8 * peak) {
    std::ostringstream os;
    os << "seam monitor: outer 5% band carries " << band_max << " (peak "
       << peak << "); enlarge the domain padding";
    warnings.push_back(os.str());
  }
}

Trajectory wrap_reference_run(const ReferenceRun& run) {
  Trajectory traj;
  traj.initial_state = run.initial;
  traj.snapshots = run.states;
  for (const auto& s : run.states)
    traj.records.push_back({s.t, 0.0, 0.0, 0.0});
  return traj;
}

// Young-measure window: the smallest contiguous x-interval carrying two
// thirds of the final state's total variation (the oscillation diagnostic
// should sample where the structure lives, not average it away over quiet
// regions), over the second half of the time range. Falls back to the full
// domain for flat data or when the interval would wrap the seam.
SpaceTimeWindow young_window(const Trajectory& traj) {
  const SimState& fin = traj.final_state();
  const Grid1D& grid = fin.grid;
  const std::size_t n = fin.u.size();
  const double t1 = fin.t;
  const double t0 = std::max(traj.initial_state.t, 0.5 * t1);

  constexpr std::size_t kBands = 32;
  double band_tv[kBands] = {};
  double total = 0.0;
  for (std::size_t b = 0; b < kBands; ++b) {
    const std::size_t lo = n * b / kBands;
    const std::size_t hi = n * (b + 1) / kBands;
    for (std::size_t j = lo; j + 1 < hi; ++j)
      band_tv[b] += std::fabs(fin.u[j + 1] - fin.u[j]);
    total += band_tv[b];
  }

  std::size_t best_lo = 0, best_len = kBands;
  if (total > 1e-14 * std::max(1.0, kernels::max_abs(fin.u))) {
    for (std::size_t lo = 0; lo < kBands; ++lo) {
      double acc = 0.0;
      for (std::size_t len = 1; len <= kBands; ++len) {
        acc += band_tv[(lo + len - 1) % kBands];
        if (acc >= 2.0 / 3.0 * total) {
          if (len < best_len) {
            best_len = len;
            best_lo = lo;
          }
          break;
        }
      }
    }
  }
  if (best_lo + best_len > kBands) {  // wraps the seam
    best_lo = 0;
    best_len = kBands;
  }
  const double L = grid.length();
  return {grid.x_left + L * static_cast<double>(best_lo) / kBands,
          grid.x_left + L * static_cast<double>(best_lo + best_len) / kBands,
          t0, t1};
}

void write_artifacts(const ExperimentConfig& cfg, const RunResult& result,
                     const FluxModel& flux,
                     const EntropyProductionReport* production,
                     const YoungHistogram* young) {
  (void)flux;
  if (cfg.output_dir.empty()) return;
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + dir.string());

  const auto& traj = result.trajectory;
  io::write_snapshot_csv(dir / "snapshot_initial.csv",
                         traj.initial_state.grid, traj.initial_state.u);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    std::ostringstream name;
    name << "snapshot_" << i + 1 << ".csv";
    io::write_snapshot_csv(dir / name.str(), traj.snapshots[i].grid,
                           traj.snapshots[i].u);
  }
  io::write_snapshot_csv(dir / "reference_final.csv", result.reference.grid,
                         result.reference.u);
  if (production) {
    std::ofstream os(dir / "entropy_production.csv");
    production->write_csv(os);
  }
  if (young) {
    std::ofstream os(dir / "young_histogram.csv");
    young->write_csv(os);
  }
  std::ofstream os(dir / "summary.csv");
  SweepResult one;
  one.rows.push_back(result.row);
  one.entropy_scales.push_back(result.entropy_scale);
  one.write_csv(os);
  if (!result.warnings.empty()) {
    std::ofstream warn(dir / "warnings.txt");
    for (const auto& w : result.warnings) warn << w << '\n';
  }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const FluxModel flux = build_flux(cfg.flux);
  const ViscosityModel visc = build_viscosity(cfg.viscosity);
  const SimState initial = build_initial_state(cfg);
  const auto snapshot_times = resolve_snapshot_times(cfg);
  const RegularizationParams params{cfg.epsilon, cfg.delta};

  RunResult result;
  result.row.epsilon = cfg.epsilon;
  result.row.delta = cfg.delta;
  result.row.h = initial.grid.spacing();

  const bool fallback = cfg.godunov_fallback;
  const bool riemann_data = cfg.initial.kind == "riemann";

  if (fallback) {
    // Pure first-order entropy evolution; for Riemann data on a convex flux
    // the exact self-similar solution is the reference.
    const RefBoundary bc =
        riemann_data ? RefBoundary::outflow : RefBoundary::periodic;
    ReferenceRun run = godunov_integrate_run(initial, cfg.final_time, flux, bc,
                                             0.9, snapshot_times);
    result.trajectory = wrap_reference_run(run);
    const double h = initial.grid.spacing();
    const double wave = flux.max_abs_fprime(initial.u);
    result.row.dt = wave > 0.0 ? 0.9 * h / wave : cfg.final_time;
    if (riemann_data && flux.kind() != FluxKind::table) {
      result.reference = riemann_exact_on_grid(
          {cfg.initial.u_left, cfg.initial.u_right}, flux, initial.grid,
          0.5 * (cfg.x_left + cfg.x_right), cfg.final_time);
    } else {
      SimState fine;
      fine.grid = make_grid(cfg.x_left, cfg.x_right,
                            cfg.cells * cfg.reference_refinement);
      ExperimentConfig fine_cfg = cfg;
      fine_cfg.cells = fine.grid.cells;
      fine = build_initial_state(fine_cfg);
      result.reference = godunov_integrate(fine, cfg.final_time, flux, bc, 0.9);
    }
  } else {
    try {
      result.trajectory = integrate(initial, cfg.final_time, params, flux,
                                    visc, snapshot_times, cfg.safety);
    } catch (BlowUpError& e) {
      // Leave partial artifacts behind before propagating.
      if (!cfg.output_dir.empty() && e.has_partial()) {
        const std::filesystem::path dir(cfg.output_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        const auto& partial = e.partial();
        io::write_snapshot_csv(dir / "snapshot_initial.csv",
                               partial.initial_state.grid,
                               partial.initial_state.u);
        for (std::size_t i = 0; i < partial.snapshots.size(); ++i) {
          std::ostringstream name;
          name << "snapshot_" << i + 1 << ".csv";
          io::write_snapshot_csv(dir / name.str(), partial.snapshots[i].grid,
                                 partial.snapshots[i].u);
        }
      }
      throw;
    }
    // Worst-case stable step over the run, reported as the row's dt.
    double dt_min = std::numeric_limits<double>::infinity();
    for (const auto& snap : result.trajectory.snapshots)
      dt_min = std::min(dt_min, stable_timestep(snap, params, flux, visc,
                                                cfg.safety, cfg.final_time));
    result.row.dt = dt_min;

    ExperimentConfig fine_cfg = cfg;
    fine_cfg.cells = cfg.cells * cfg.reference_refinement;
    const SimState fine = build_initial_state(fine_cfg);
    result.reference = godunov_integrate(fine, cfg.final_time, flux,
                                         RefBoundary::periodic, 0.9);
  }

  const SimState& final_state = result.trajectory.final_state();
  result.row.l1_error = l1_distance(final_state, result.reference);
  result.row.l2_norm = lq_norm(final_state, 2.0);
  result.row.l5_norm = lq_norm(final_state, 5.0);
  result.row.linf =
      lq_norm(final_state, std::numeric_limits<double>::infinity());
  result.row.energy_residual = energy_balance(result.trajectory, params);

  const double tv0 = total_variation(result.trajectory.initial_state);
  const double tvT = total_variation(final_state);
  const double tv_floor = 1e-14 * std::max(1.0, kernels::max_abs(initial.u));
  if (tv0 > tv_floor)
    result.row.tv_ratio = tvT / tv0;
  else
    result.row.tv_ratio =
        tvT > tv_floor ? std::numeric_limits<double>::infinity() : 0.0;

  const auto k_grid = default_k_grid(initial, cfg.k_count);
  result.entropy_scale = entropy_scale(initial, flux, k_grid);

  std::optional<EntropyProductionReport> production;
  if (cfg.entropy_production) {
    production = entropy_production(result.trajectory, flux, k_grid,
                                    {cfg.hats_x, cfg.hats_t});
    result.row.max_entropy_production = production->max_production();
  }
  std::optional<YoungHistogram> young;
  if (cfg.young_histogram) {
    young = young_histogram(result.trajectory, young_window(result.trajectory),
                            cfg.young_cells_x, cfg.young_cells_t,
                            cfg.young_bins);
    result.row.concentration = concentration_metric(*young);
  }

  check_seam(cfg, final_state, result.warnings);
  result.row.regime = classify_regime(result.row, result.entropy_scale);

  write_artifacts(cfg, result, flux,
                  production ? &*production : nullptr,
                  young ? &*young : nullptr);
  return result;
}

double coupling_exponent(TheoremId theorem, double m, double r) {
  switch (theorem) {
    case TheoremId::thm41:
      if (!(m < 3.0))
        throw std::invalid_argument(
            "coupling_exponent: the (B1)-only regime requires m < 3");
      return (5.0 - m) / (3.0 - m);
    case TheoremId::thm42:
      if (!(r >= 1.0))
        throw std::invalid_argument("coupling_exponent: requires r >= 1");
      if (!(m < 5.0 - 1.0 / r))
        throw std::invalid_argument(
            "coupling_exponent: the (B1)+(B3) regime requires m < 5 - 1/r");
      return (5.0 - m) / (r * (5.0 - m) - 1.0);
    case TheoremId::thm43:
      if (m != 2.0)
        throw std::invalid_argument(
            "coupling_exponent: the linear-viscosity regime requires m = 2");
      return 3.0;
  }
  throw std::invalid_argument("coupling_exponent: unknown theorem");
}

void SweepResult::write_csv(std::ostream& os) const {
  os << "epsilon,delta,h,dt,l1_error,l2_norm,l5_norm,linf,tv_ratio,"
        "energy_residual,max_entropy_production,concentration,regime\n";
  for (const auto& r : rows) {
    os << io::format17(r.epsilon) << ',' << io::format17(r.delta) << ','
       << io::format17(r.h) << ',' << io::format17(r.dt) << ','
       << io::format17(r.l1_error) << ',' << io::format17(r.l2_norm) << ','
       << io::format17(r.l5_norm) << ',' << io::format17(r.linf) << ','
       << io::format17(r.tv_ratio) << ',' << io::format17(r.energy_residual)
       << ',' << io::format17(r.max_entropy_production) << ','
       << io::format17(r.concentration) << ',' << regime_name(r.regime)
       << '\n';
  }
}

SweepResult parse_sweep_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty sweep csv: " + path.string());
  SweepResult result;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 13)
      throw std::runtime_error("sweep csv: expected 13 columns, got " +
                               std::to_string(cells.size()));
    SweepRow r;
    r.epsilon = std::stod(cells[0]);
    r.delta = std::stod(cells[1]);
    r.h = std::stod(cells[2]);
    r.dt = std::stod(cells[3]);
    r.l1_error = std::stod(cells[4]);
    r.l2_norm = std::stod(cells[5]);
    r.l5_norm = std::stod(cells[6]);
    r.linf = std::stod(cells[7]);
    r.tv_ratio = std::stod(cells[8]);
    r.energy_residual = std::stod(cells[9]);
    r.max_entropy_production = std::stod(cells[10]);
    r.concentration = std::stod(cells[11]);
    r.regime = regime_from_name(cells[12]);
    result.rows.push_back(r);
  }
  return result;
}

namespace {

SweepResult sweep_impl(const ExperimentConfig& base, double exponent, double C,
                       std::span<const double> epsilons,
                       std::vector<RunResult>* runs_out) {
  if (epsilons.size() < 3)
    throw std::invalid_argument("sweep: need at least 3 epsilons");
  for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
    if (!(epsilons[i] > epsilons[i + 1]))
      throw std::invalid_argument("sweep: epsilons must be strictly decreasing");
  for (double e : epsilons)
    if (!(e > 0.0))
      throw std::invalid_argument("sweep: epsilons must be positive");

  const double length = base.x_right - base.x_left;
  std::vector<ExperimentConfig> members;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    ExperimentConfig cfg = base;
    cfg.epsilon = epsilons[i];
    cfg.delta = C * std::pow(epsilons[i], exponent);
    // Resolve the dominant structural scale: the viscous layer (eps) along
    // admissible couplings where delta << eps^2, the dispersive wavelength
    // (sqrt(delta)) when dispersion dominates. The finer branch of the
    // resolution rule is overridden rather than chased.
    const double scale = cfg.delta >= cfg.epsilon * cfg.epsilon
                             ? std::sqrt(cfg.delta)
                             : cfg.epsilon;
    const auto needed =
        static_cast<std::size_t>(std::ceil(4.0 * length / scale));
    cfg.cells = std::max(base.cells, needed);
    cfg.override_resolution = true;
    if (!base.output_dir.empty()) {
      std::ostringstream sub;
      sub << base.output_dir << "/eps_" << cfg.epsilon;
      cfg.output_dir = sub.str();
    }
    members.push_back(std::move(cfg));
  }

  const std::size_t workers =
      base.workers > 0
          ? base.workers
          : std::max<unsigned>(1, std::thread::hardware_concurrency());
  std::counting_semaphore<64> slots(
      static_cast<std::ptrdiff_t>(std::min<std::size_t>(workers, 64)));

  std::vector<std::future<RunResult>> futures;
  futures.reserve(members.size());
  for (const auto& cfg : members)
    futures.push_back(std::async(std::launch::async, [&slots, cfg] {
      slots.acquire();
      try {
        RunResult r = run_experiment(cfg);
        slots.release();
        return r;
      } catch (...) {
        slots.release();
        throw;
      }
    }));

  SweepResult result;
  result.coupling_constant = C;
  result.exponent = exponent;
  std::vector<RunResult> runs;
  std::exception_ptr first_error;
  std::string first_error_what;
  for (auto& f : futures) {
    try {
      runs.push_back(f.get());
    } catch (const std::exception& e) {
      if (!first_error) {
        first_error = std::current_exception();
        first_error_what = e.what();
      }
    } catch (...) {
      if (!first_error) {
        first_error = std::current_exception();
        first_error_what = "unknown error";
      }
    }
  }
  // Rows merge in epsilon order (the futures vector is already ordered by
  // decreasing epsilon regardless of completion order).
  for (auto& r : runs) {
    result.rows.push_back(r.row);
    result.entropy_scales.push_back(r.entropy_scale);
  }
  if (first_error) {
    if (result.rows.empty()) std::rethrow_exception(first_error);
    throw SweepError("sweep member failed: " + first_error_what,
                     std::move(result));
  }

  result.l1_strictly_decreasing = result.rows.size() >= 2;
  for (std::size_t i = 0; i + 1 < result.rows.size(); ++i)
    if (!(result.rows[i + 1].l1_error < result.rows[i].l1_error))
      result.l1_strictly_decreasing = false;

  if (runs_out) *runs_out = std::move(runs);
  return result;
}

}  // namespace

SweepResult sweep(const ExperimentConfig& base, TheoremId theorem, double C,
                  std::span<const double> epsilons,
                  std::vector<RunResult>* member_runs) {
  const FluxModel flux = build_flux(base.flux);
  const ViscosityModel visc = build_viscosity(base.viscosity);
  const double p =
      coupling_exponent(theorem, flux.growth_exponent(), visc.exponent());
  return sweep_impl(base, p, C, epsilons, member_runs);
}

SweepResult sweep_with_exponent(const ExperimentConfig& base, double exponent,
                                double C, std::span<const double> epsilons,
                                std::vector<RunResult>* member_runs) {
  return sweep_impl(base, exponent, C, epsilons, member_runs);
}

std::vector<std::filesystem::path> emit_outputs(
    const SweepResult& result, const std::set<OutputFormat>& formats,
    const std::filesystem::path& dir, std::span<const RunResult> member_runs) {
  if (result.rows.empty())
    throw std::invalid_argument("emit_outputs: empty sweep result");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("emit_outputs: unwritable output directory " +
                             dir.string());

  std::vector<std::filesystem::path> written;
  if (formats.count(OutputFormat::csv)) {
    const auto path = dir / "sweep.csv";
    std::ofstream os(path);
    if (!os)
      throw std::runtime_error("emit_outputs: cannot write " + path.string());
    result.write_csv(os);
    written.push_back(path);
  }
  if (formats.count(OutputFormat::svg)) {
    io::Series errors;
    errors.label = "l1 error";
    for (const auto& r : result.rows) {
      errors.x.push_back(r.epsilon);
      errors.y.push_back(r.l1_error);
    }
    const auto err_path = dir / "l1_vs_epsilon.svg";
    io::write_svg_plot(err_path, {"epsilon", "L1 error", true, true},
                       std::vector<io::Series>{errors});
    written.push_back(err_path);

    if (!member_runs.empty()) {
      std::vector<io::Series> overlays;
      for (const auto& run : member_runs) {
        const auto& fin = run.trajectory.final_state();
        io::Series s;
        std::ostringstream label;
        label << "eps " << run.row.epsilon;
        s.label = label.str();
        for (std::size_t j = 0; j < fin.u.size(); ++j) {
          s.x.push_back(fin.grid.node(j));
          s.y.push_back(fin.u[j]);
        }
        overlays.push_back(std::move(s));
      }
      const auto& ref = member_runs.back().reference;
      io::Series rs;
      rs.label = "reference";
      for (std::size_t j = 0; j < ref.u.size(); ++j) {
        rs.x.push_back(ref.grid.node(j));
        rs.y.push_back(ref.u[j]);
      }
      overlays.push_back(std::move(rs));
      const auto overlay_path = dir / "final_states.svg";
      io::write_svg_plot(overlay_path, {"x", "u", false, false}, overlays);
      written.push_back(overlay_path);
    }
  }
  return written;
}

}  // namespace kdvb
