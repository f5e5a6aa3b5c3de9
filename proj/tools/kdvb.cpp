// Command-line driver: single runs, (epsilon, delta) sweeps along coupling
// curves, entropy references, assumption verification, and plotting.
//
// Exit codes: 0 success, 2 validation failure, 3 blow-up.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "kdvb/config.hpp"
#include "kdvb/harness.hpp"
#include "kdvb/io.hpp"
#include "kdvb/kernels.hpp"
#include "kdvb/models.hpp"
#include "kdvb/reference.hpp"
#include "kdvb/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitBlowUp = 3;

void print_row(const kdvb::SweepRow& row) {
  std::printf(
      "eps=%-10.4g delta=%-10.4g h=%-9.3g dt=%-9.3g l1=%-10.4g l2=%-9.4g "
      "l5=%-9.4g linf=%-9.4g tv=%-8.3g R=%-10.3g prod=%-10.4g conc=%-8.3g %s\n",
      row.epsilon, row.delta, row.h, row.dt, row.l1_error, row.l2_norm,
      row.l5_norm, row.linf, row.tv_ratio, row.energy_residual,
      row.max_entropy_production, row.concentration,
      kdvb::regime_name(row.regime).c_str());
}

int do_run(const std::string& config_path) {
  const auto cfg = kdvb::load_config(config_path);
  const auto result = kdvb::run_experiment(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  print_row(result.row);
  if (!cfg.output_dir.empty())
    std::cout << "artifacts written to " << cfg.output_dir << '\n';
  return kExitOk;
}

int do_sweep(const std::string& config_path, int theorem, double exponent,
             bool have_exponent, double coupling_constant,
             const std::vector<double>& epsilons) {
  if (theorem == 0 && !have_exponent) {
    std::cerr << "error: sweep needs --theorem {41|42|43} or --exponent p\n";
    return kExitValidation;
  }
  auto cfg = kdvb::load_config(config_path);
  std::vector<kdvb::RunResult> runs;
  kdvb::SweepResult result;
  if (theorem != 0) {
    kdvb::TheoremId id;
    switch (theorem) {
      case 41: id = kdvb::TheoremId::thm41; break;
      case 42: id = kdvb::TheoremId::thm42; break;
      case 43: id = kdvb::TheoremId::thm43; break;
      default:
        std::cerr << "error: --theorem must be one of 41, 42, 43\n";
        return kExitValidation;
    }
    result = kdvb::sweep(cfg, id, coupling_constant, epsilons, &runs);
  } else {
    result = kdvb::sweep_with_exponent(cfg, exponent, coupling_constant,
                                       epsilons, &runs);
  }
  for (const auto& row : result.rows) print_row(row);
  std::cout << "l1_error strictly decreasing: "
            << (result.l1_strictly_decreasing ? "yes" : "no") << '\n';

  const std::filesystem::path dir =
      cfg.output_dir.empty() ? "sweep_out" : cfg.output_dir;
  const auto written = kdvb::emit_outputs(
      result, {kdvb::OutputFormat::csv, kdvb::OutputFormat::svg}, dir, runs);
  for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
  return kExitOk;
}

int do_reference(const std::string& config_path) {
  auto cfg = kdvb::load_config(config_path);
  cfg.godunov_fallback = true;
  kdvb::validate(cfg);
  const auto flux = kdvb::build_flux(cfg.flux);
  const auto initial = kdvb::build_initial_state(cfg);
  const auto bc = cfg.initial.kind == "riemann" ? kdvb::RefBoundary::outflow
                                                : kdvb::RefBoundary::periodic;
  const auto ref =
      kdvb::godunov_integrate(initial, cfg.final_time, flux, bc, 0.9);
  const std::filesystem::path dir =
      cfg.output_dir.empty() ? "." : cfg.output_dir;
  std::filesystem::create_directories(dir);
  const auto path = dir / "reference_final.csv";
  kdvb::io::write_snapshot_csv(path, ref.grid, ref.u);
  std::cout << "wrote " << path.string() << '\n';
  return kExitOk;
}

int do_verify_assumptions(const std::string& config_path) {
  const auto cfg = kdvb::load_config(config_path);
  const auto flux = kdvb::build_flux(cfg.flux);
  const auto visc = kdvb::build_viscosity(cfg.viscosity);
  const auto report = kdvb::verify_assumptions(
      flux, visc, -cfg.assumption_range, cfg.assumption_range,
      cfg.assumption_samples);
  std::cout << report.describe();
  std::cout << (report.all_pass() ? "all assumptions pass\n"
                                  : "some assumptions fail\n");
  return kExitOk;
}

int do_plot(const std::string& csv_path) {
  const auto result = kdvb::parse_sweep_csv(csv_path);
  if (result.rows.empty()) {
    std::cerr << "error: no rows in " << csv_path << '\n';
    return kExitValidation;
  }
  const auto dir = std::filesystem::path(csv_path).parent_path();
  const auto written = kdvb::emit_outputs(
      result, {kdvb::OutputFormat::svg}, dir.empty() ? "." : dir, {});
  for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical laboratory for conservation laws with vanishing nonlinear "
      "diffusion and dispersion"};
  app.require_subcommand(1);

  std::string config_path, csv_path;
  int theorem = 0;
  double exponent = 3.0;
  double coupling_constant = 0.1;
  std::vector<double> epsilons;
  bool force_scalar = false;
  app.add_flag("--scalar-kernels", force_scalar,
               "Pin the scalar kernel backend");

  auto* run = app.add_subcommand("run", "Run one configured experiment");
  run->add_option("config", config_path, "Experiment configuration file")
      ->required();

  auto* sw = app.add_subcommand(
      "sweep", "Run an epsilon sweep along delta = C eps^p");
  sw->add_option("config", config_path, "Experiment configuration file")
      ->required();
  auto* thm_opt = sw->add_option(
      "--theorem", theorem, "Coupling regime: 41, 42 or 43");
  auto* exp_opt = sw->add_option(
      "--exponent", exponent, "Free coupling exponent p (used without --theorem)");
  exp_opt->excludes(thm_opt);
  sw->add_option("--coupling-constant", coupling_constant,
                 "Constant C in delta = C eps^p");
  sw->add_option("--epsilons", epsilons,
                 "Comma-separated, strictly decreasing epsilon list")
      ->required()
      ->delimiter(',');

  auto* ref = app.add_subcommand("reference",
                                 "Compute the Godunov entropy reference");
  ref->add_option("config", config_path, "Experiment configuration file")
      ->required();

  auto* verify = app.add_subcommand(
      "verify-assumptions", "Check (A1)-(A2), (B1)-(B3) on sampled ranges");
  verify->add_option("config", config_path, "Experiment configuration file")
      ->required();

  auto* plot = app.add_subcommand("plot", "Re-emit SVG plots from a sweep CSV");
  plot->add_option("csv", csv_path, "sweep.csv produced by the sweep command")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (force_scalar)
      kdvb::kernels::select_backend(kdvb::kernels::Backend::scalar);
    if (app.got_subcommand(run)) return do_run(config_path);
    if (app.got_subcommand(sw))
      return do_sweep(config_path, theorem, exponent, exp_opt->count() > 0,
                      coupling_constant, epsilons);
    if (app.got_subcommand(ref)) return do_reference(config_path);
    if (app.got_subcommand(verify)) return do_verify_assumptions(config_path);
    if (app.got_subcommand(plot)) return do_plot(csv_path);
  } catch (const kdvb::BlowUpError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const kdvb::SweepError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& row : e.partial().rows) print_row(row);
    return kExitBlowUp;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
