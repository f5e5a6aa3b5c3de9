#include "kdvb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "kdvb/kernels.hpp"

namespace kdvb {

double lq_norm(const SimState& state, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be >= 1");
  if (std::isinf(q)) return kernels::max_abs(state.u);
  const double h = state.grid.spacing();
  if (q == 1.0) return kernels::sum_abs(state.u) * h;
  if (q == 2.0) return std::sqrt(kernels::sum_sq(state.u) * h);
  return std::pow(kernels::sum_abs_pow(state.u, q) * h, 1.0 / q);
}

double total_variation(const SimState& state) {
  return kernels::total_variation_periodic(state.u);
}

double l1_distance(const SimState& a, const ReferenceSolution& b) {
  if (!a.grid.compatible(b.grid))
    throw std::invalid_argument("l1_distance: mismatched domains");
  const double tol = 1e-9 * std::max(1.0, std::fabs(a.t));
  if (std::fabs(a.t - b.t) > tol)
    throw std::invalid_argument("l1_distance: states at different times");
  const std::size_t n = a.u.size();
  const std::size_t m = b.u.size();
  if (m % n != 0)
    throw std::invalid_argument("l1_distance: grids are not commensurate");
  const std::size_t k = m / n;
  const double h = a.grid.spacing();

  double acc = 0.0;
  if (k == 1) {
    for (std::size_t j = 0; j < n; ++j) acc += std::fabs(a.u[j] - b.u[j]);
    return acc * h;
  }
  // Conservative restriction centered on the coarse node: full weights on
  // interior fine nodes, half weights on the two end nodes for even k.
  const auto wrap = [m](std::ptrdiff_t i) -> std::size_t {
    return static_cast<std::size_t>(
        (i % static_cast<std::ptrdiff_t>(m) + static_cast<std::ptrdiff_t>(m)) %
        static_cast<std::ptrdiff_t>(m));
  };
  for (std::size_t j = 0; j < n; ++j) {
    const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(j * k);
    double avg = 0.0;
    if (k % 2 == 0) {
      const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(k / 2);
      avg += 0.5 * b.u[wrap(center - half)];
      avg += 0.5 * b.u[wrap(center + half)];
      for (std::ptrdiff_t o = -half + 1; o <= half - 1; ++o)
        avg += b.u[wrap(center + o)];
    } else {
      const std::ptrdiff_t half = static_cast<std::ptrdiff_t>((k - 1) / 2);
      for (std::ptrdiff_t o = -half; o <= half; ++o)
        avg += b.u[wrap(center + o)];
    }
    avg /= static_cast<double>(k);
    acc += std::fabs(a.u[j] - avg);
  }
  return acc * h;
}

namespace {

// Exact pairings of a unit hat (center c, half-width w) and its derivative
// against the piecewise-linear nodal basis on the sorted abscissae xs:
//   weight[j]  = int hat(x)  basis_j(x) dx
//   dweight[j] = int hat'(x) basis_j(x) dx
// Summing g_j * weight[j] therefore integrates hat * (P1 interpolant of g)
// exactly, and sum dweight[j] = 0 holds identically.
struct HatWeights {
  std::vector<double> weight, dweight;
  std::size_t first = 0, last = 0;  // support touches nodes [first, last]
};

HatWeights hat_weights(std::span<const double> xs, double c, double w) {
  const std::size_t n = xs.size();
  HatWeights out;
  out.weight.assign(n, 0.0);
  out.dweight.assign(n, 0.0);

  auto hat = [&](double x) {
    const double d = std::fabs(x - c);
    return d >= w ? 0.0 : 1.0 - d / w;
  };
  auto dhat = [&](double x) {
    if (x <= c - w || x >= c + w) return 0.0;
    return x < c ? 1.0 / w : -1.0 / w;
  };

  out.first = n;
  out.last = 0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double a = xs[j], b = xs[j + 1];
    if (b <= c - w || a >= c + w) continue;
    out.first = std::min(out.first, j);
    out.last = std::max(out.last, j + 1);
    // Split the node interval at hat breakpoints so every piece is a product
    // of polynomials; Simpson is exact there.
    double cuts[4] = {a, std::clamp(c - w, a, b), std::clamp(c, a, b),
                      std::clamp(c + w, a, b)};
    std::sort(cuts, cuts + 4);
    double pts[5] = {cuts[0], cuts[1], cuts[2], cuts[3], b};
    for (int p = 0; p + 1 < 5; ++p) {
      const double lo = pts[p], hi = pts[p + 1];
      if (!(hi > lo)) continue;
      const double mid = 0.5 * (lo + hi);
      const double len = hi - lo;
      auto basis_lo = [&](double x) { return (b - x) / (b - a); };
      auto basis_hi = [&](double x) { return (x - a) / (b - a); };
      // Simpson: exact for the cubic products appearing here.
      auto simpson = [&](auto f) {
        return len / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
      };
      out.weight[j] += simpson([&](double x) { return hat(x) * basis_lo(x); });
      out.weight[j + 1] +=
          simpson([&](double x) { return hat(x) * basis_hi(x); });
      const double slope = dhat(mid);  // constant inside the piece
      out.dweight[j] += slope * simpson(basis_lo);
      out.dweight[j + 1] += slope * simpson(basis_hi);
    }
  }
  if (out.first > out.last) out.first = out.last = 0;
  return out;
}

}  // namespace

double EntropyProductionReport::max_production() const {
  double m = 0.0;
  for (double p : positive_production) m = std::max(m, p);
  return m;
}

void EntropyProductionReport::write_csv(std::ostream& os) const {
  os << "k,production\n";
  char buf[64];
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", k_grid[i],
                  positive_production[i]);
    os << buf;
  }
}

EntropyProductionReport entropy_production(const Trajectory& traj,
                                           const FluxModel& flux,
                                           std::span<const double> k_grid,
                                           EntropyProductionOptions options) {
  const auto states = traj.all_states();
  if (states.size() < 3)
    throw std::invalid_argument("entropy_production: need >= 3 snapshots");
  if (options.hats_x < 2 || options.hats_t < 2)
    throw std::invalid_argument("entropy_production: test lattice too coarse");

  const Grid1D& grid = states.front()->grid;
  const std::size_t n = grid.cells;
  const std::size_t m = states.size();
  const double t0 = states.front()->t;
  const double t1 = states.back()->t;
  if (!(t1 > t0))
    throw std::invalid_argument("entropy_production: degenerate time window");

  // Node abscissae extended by the periodic wrap node at x_right.
  std::vector<double> xs(n + 1);
  for (std::size_t j = 0; j < n; ++j) xs[j] = grid.node(j);
  xs[n] = grid.x_right;
  std::vector<double> ts(m);
  for (std::size_t i = 0; i < m; ++i) ts[i] = states[i]->t;

  const double wx = grid.length() / static_cast<double>(options.hats_x);
  const double wt = (t1 - t0) / static_cast<double>(options.hats_t);
  const double phi_l1 = wx * wt;

  std::vector<HatWeights> xw;
  for (std::size_t i = 1; i < options.hats_x; ++i)
    xw.push_back(hat_weights(xs, grid.x_left + wx * static_cast<double>(i), wx));
  std::vector<HatWeights> tw;
  for (std::size_t i = 1; i < options.hats_t; ++i)
    tw.push_back(hat_weights(ts, t0 + wt * static_cast<double>(i), wt));

  EntropyProductionReport report;
  report.k_grid.assign(k_grid.begin(), k_grid.end());
  report.positive_production.assign(k_grid.size(), 0.0);

  std::vector<double> eta(m * (n + 1)), qk(m * (n + 1));
  // Row partial sums per x-hat: pairing of eta with hat, q with hat'.
  std::vector<double> row_eta(xw.size() * m), row_q(xw.size() * m);

  for (std::size_t ik = 0; ik < k_grid.size(); ++ik) {
    const EntropyPair pair{k_grid[ik]};
    const double fk = flux.f(pair.k);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& u = states[i]->u;
      double* erow = eta.data() + i * (n + 1);
      double* qrow = qk.data() + i * (n + 1);
      for (std::size_t j = 0; j < n; ++j) {
        const double v = u[j];
        erow[j] = std::fabs(v - pair.k);
        const double s = v > pair.k ? 1.0 : (v < pair.k ? -1.0 : 0.0);
        qrow[j] = s * (flux.f(v) - fk);
      }
      erow[n] = erow[0];
      qrow[n] = qrow[0];
    }

    for (std::size_t hx = 0; hx < xw.size(); ++hx) {
      const auto& H = xw[hx];
      for (std::size_t i = 0; i < m; ++i) {
        const double* erow = eta.data() + i * (n + 1);
        const double* qrow = qk.data() + i * (n + 1);
        double se = 0.0, sq = 0.0;
        for (std::size_t j = H.first; j <= H.last; ++j) {
          se += erow[j] * H.weight[j];
          sq += qrow[j] * H.dweight[j];
        }
        row_eta[hx * m + i] = se;
        row_q[hx * m + i] = sq;
      }
    }

    double worst = 0.0;  // most negative pairing
    for (std::size_t hx = 0; hx < xw.size(); ++hx) {
      for (const auto& T : tw) {
        double a = 0.0;
        for (std::size_t i = T.first; i <= T.last; ++i)
          a += T.dweight[i] * row_eta[hx * m + i] +
               T.weight[i] * row_q[hx * m + i];
        worst = std::min(worst, a);
      }
    }
    report.positive_production[ik] = -worst / phi_l1;
  }
  return report;
}

void YoungHistogram::write_csv(std::ostream& os) const {
  os << "cell_x,cell_t,bin,mass\n";
  char buf[96];
  for (std::size_t it = 0; it < cells_t; ++it)
    for (std::size_t ix = 0; ix < cells_x; ++ix)
      for (std::size_t b = 0; b < bins; ++b) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g\n", ix, it, b,
                      mass_at(ix, it, b));
        os << buf;
      }
}

YoungHistogram young_histogram(const Trajectory& traj, SpaceTimeWindow window,
                               std::size_t cells_x, std::size_t cells_t,
                               std::size_t bins) {
  if (bins < 16) throw std::invalid_argument("young_histogram: need >= 16 bins");
  if (cells_x == 0 || cells_t == 0)
    throw std::invalid_argument("young_histogram: empty macro-cell layout");
  if (!(window.x1 > window.x0) || !(window.t1 > window.t0))
    throw std::invalid_argument("young_histogram: degenerate window");

  const auto states = traj.all_states();
  const Grid1D& grid = states.front()->grid;
  const double tol = 1e-12 * std::max(1.0, std::fabs(window.t1));
  if (window.t0 < states.front()->t - tol || window.t1 > states.back()->t + tol)
    throw std::invalid_argument(
        "young_histogram: window outside the trajectory extent");

  struct Sample {
    std::size_t cell;
    double value;
  };
  std::vector<Sample> samples;

  // Snapshot times are a sparse sample of the window, so the time boxes are
  // rank-based (equal-count groups of the in-window snapshots); equal-width
  // binning would leave boxes empty whenever a box boundary rounds onto a
  // snapshot time.
  std::vector<const SimState*> in_window;
  for (const SimState* s : states)
    if (s->t >= window.t0 - tol && s->t <= window.t1 + tol)
      in_window.push_back(s);
  if (in_window.size() < cells_t)
    throw std::invalid_argument(
        "young_histogram: empty macro-cell; enlarge the window or reduce "
        "the cell counts");

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  for (std::size_t rank = 0; rank < in_window.size(); ++rank) {
    const SimState* s = in_window[rank];
    const std::size_t it =
        std::min(cells_t - 1, rank * cells_t / in_window.size());
    for (std::size_t j = 0; j < grid.cells; ++j) {
      const double x = grid.node(j);
      if (x < window.x0 || x >= window.x1) continue;
      const double frac_x = (x - window.x0) / (window.x1 - window.x0);
      const std::size_t ix =
          std::min(cells_x - 1, static_cast<std::size_t>(frac_x * cells_x));
      const double v = s->u[j];
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
      samples.push_back({it * cells_x + ix, v});
    }
  }
  if (samples.empty())
    throw std::invalid_argument("young_histogram: no samples in the window");

  YoungHistogram hist;
  hist.cells_x = cells_x;
  hist.cells_t = cells_t;
  hist.bins = bins;
  hist.value_min = vmin;
  hist.value_max = vmax;
  hist.mass.assign(cells_x * cells_t * bins, 0.0);

  const double range = vmax - vmin;
  std::vector<double> counts(cells_x * cells_t, 0.0);
  for (const auto& s : samples) {
    std::size_t b = bins / 2;
    if (range > 0.0)
      b = std::min(bins - 1,
                   static_cast<std::size_t>((s.value - vmin) / range * bins));
    hist.mass[s.cell * bins + b] += 1.0;
    counts[s.cell] += 1.0;
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0.0)
      throw std::invalid_argument(
          "young_histogram: empty macro-cell; enlarge the window or reduce "
          "the cell counts");
    for (std::size_t b = 0; b < bins; ++b) hist.mass[c * bins + b] /= counts[c];
  }

  hist.cell_mean.assign(cells_x * cells_t, 0.0);
  hist.cell_var.assign(cells_x * cells_t, 0.0);
  const double bin_width = range > 0.0 ? range / static_cast<double>(bins) : 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    double mean = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double center = vmin + (static_cast<double>(b) + 0.5) * bin_width;
      mean += hist.mass[c * bins + b] * center;
    }
    double var = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double center = vmin + (static_cast<double>(b) + 0.5) * bin_width;
      var += hist.mass[c * bins + b] * (center - mean) * (center - mean);
    }
    hist.cell_mean[c] = range > 0.0 ? mean : vmin;
    hist.cell_var[c] = var;
  }
  return hist;
}

double concentration_metric(const YoungHistogram& hist) {
  const double range = hist.value_max - hist.value_min;
  if (range <= 0.0) return 0.0;
  double acc = 0.0;
  for (double v : hist.cell_var) acc += std::sqrt(v);
  return acc / (static_cast<double>(hist.cell_var.size()) * range);
}

double sup_scaling_fit(std::span<const std::pair<double, double>> runs) {
  if (runs.size() < 3)
    throw std::invalid_argument("sup_scaling_fit: need >= 3 runs");
  double sx = 0.0, sy = 0.0;
  for (const auto& [delta, sup] : runs) {
    if (!(delta > 0.0) || !(sup > 0.0))
      throw std::invalid_argument("sup_scaling_fit: need positive delta and sup");
    sx += std::log(1.0 / delta);
    sy += std::log(sup);
  }
  const double mx = sx / static_cast<double>(runs.size());
  const double my = sy / static_cast<double>(runs.size());
  double num = 0.0, den = 0.0;
  for (const auto& [delta, sup] : runs) {
    const double dx = std::log(1.0 / delta) - mx;
    num += dx * (std::log(sup) - my);
    den += dx * dx;
  }
  if (den == 0.0)
    throw std::invalid_argument("sup_scaling_fit: runs must span a delta range");
  return num / den;
}

}  // namespace kdvb
