#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kdvb/config.hpp"
#include "kdvb/diagnostics.hpp"
#include "kdvb/reference.hpp"
#include "kdvb/solver.hpp"

namespace kdvb {

enum class Regime { convergent, oscillatory, indeterminate };

std::string regime_name(Regime r);
Regime regime_from_name(const std::string& name);

// One results row; the 12 numeric fields plus the regime label are exactly
// the sweep CSV columns.
struct SweepRow {
  double epsilon = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double dt = 0.0;
  double l1_error = 0.0;
  double l2_norm = 0.0;
  double l5_norm = 0.0;
  double linf = 0.0;
  double tv_ratio = 0.0;
  double energy_residual = 0.0;
  double max_entropy_production = 0.0;
  double concentration = 0.0;
  Regime regime = Regime::indeterminate;
};

// Thresholds are engineering choices: convergent needs tv_ratio <= 2 and
// production within 10% of the initial-data entropy scale; tv_ratio >= 5 is
// oscillatory; anything else is indeterminate. A small absolute slack keeps
// exactly-zero rows (constant data) convergent.
Regime classify_regime(const SweepRow& row, double entropy_scale);

// TV(u0) * max_k (range of Q_k over the data range); the production
// normalizer used by classify_regime.
double entropy_scale(const SimState& initial, const FluxModel& flux,
                     std::span<const double> k_grid);

std::vector<double> default_k_grid(const SimState& initial, std::size_t count);

struct RunResult {
  SweepRow row;
  double entropy_scale = 0.0;
  Trajectory trajectory;        // primary evolution (fallback runs wrap Godunov)
  ReferenceSolution reference;  // entropy reference at final time
  std::vector<std::string> warnings;
};

// Integrates the configured problem, computes the Godunov (or exact Riemann)
// reference, evaluates the enabled diagnostics, and writes snapshot CSVs and
// a one-row summary into config.output_dir when set.
RunResult run_experiment(const ExperimentConfig& config);

enum class TheoremId { thm41, thm42, thm43 };

// Coupling exponent p of the admissible curve delta <= C eps^p:
//   thm41: (5-m)/(3-m) for m < 3
//   thm42: (5-m)/(r(5-m)-1) for m < 5 - 1/r, r >= 1
//   thm43: 3 for m = 2 (linear viscosity)
double coupling_exponent(TheoremId theorem, double m, double r);

struct SweepResult {
  std::vector<SweepRow> rows;               // ordered by decreasing epsilon
  std::vector<double> entropy_scales;       // parallel to rows
  double coupling_constant = 0.0;
  double exponent = 0.0;
  bool l1_strictly_decreasing = false;

  void write_csv(std::ostream& os) const;
};

SweepResult parse_sweep_csv(const std::filesystem::path& path);

// Raised when a sweep member fails; carries whatever rows completed.
class SweepError : public std::runtime_error {
 public:
  SweepError(std::string what, SweepResult partial)
      : std::runtime_error(std::move(what)), partial_(std::move(partial)) {}
  const SweepResult& partial() const { return partial_; }

 private:
  SweepResult partial_;
};

// Runs one experiment per epsilon with delta = C eps^p. Members run
// concurrently up to config.workers; rows merge in epsilon order. Unless
// the base config pins a finer grid, each member resolves the viscous layer
// with h = epsilon/4. Member failures raise SweepError with the partial
// table retained.
SweepResult sweep(const ExperimentConfig& base, TheoremId theorem, double C,
                  std::span<const double> epsilons,
                  std::vector<RunResult>* member_runs = nullptr);
// Free-coupling variant with an explicit exponent p.
SweepResult sweep_with_exponent(const ExperimentConfig& base, double exponent,
                                double C, std::span<const double> epsilons,
                                std::vector<RunResult>* member_runs = nullptr);

enum class OutputFormat { csv, svg };

// Writes sweep.csv and the SVG plots (log-log l1_error vs epsilon, final
// states vs reference) into `dir`.
std::vector<std::filesystem::path> emit_outputs(
    const SweepResult& result, const std::set<OutputFormat>& formats,
    const std::filesystem::path& dir,
    std::span<const RunResult> member_runs = {});

}  // namespace kdvb
