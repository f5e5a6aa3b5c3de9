#include "kdvb/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kdvb/kernels.hpp"

namespace kdvb {

namespace detail {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw std::invalid_argument("table: need at least two (x, y) samples");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x_[i] < x_[i + 1]))
      throw std::invalid_argument("table: abscissae must be strictly increasing");
  if (x_.front() > 0.0 || x_.back() < 0.0)
    throw std::invalid_argument("table: range must contain 0");

  // Fritsch-Carlson knot slopes.
  std::vector<double> h(n - 1), m(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    m[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (m[i - 1] * m[i] <= 0.0) {
      d_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (d * m0 <= 0.0) return 0.0;
    if (m0 * m1 <= 0.0 && std::fabs(d) > 3.0 * std::fabs(m0))
      return 3.0 * m0;
    return d;
  };
  d_[0] = n == 2 ? m[0] : end_slope(h[0], h[1], m[0], m[1]);
  d_[n - 1] = n == 2 ? m[0] : end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);

  // Exact integrals of the Hermite pieces, accumulated from the first knot.
  cum_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double piece =
        h[i] * (0.5 * (y_[i] + y_[i + 1]) + h[i] * (d_[i] - d_[i + 1]) / 12.0);
    cum_[i + 1] = cum_[i] + piece;
  }

  // Cache the integral from the first knot to 0 so the antiderivative can be
  // anchored at A(0) = 0.
  integral_to_zero_ = 0.0;
  const std::size_t k = interval(0.0);
  const double t = (0.0 - x_[k]) / h[k];
  const double hh = h[k];
  // Integral of the Hermite basis combination over [x_k, x_k + t h].
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double ih00 = t - t3 + 0.5 * t4;
  const double ih10 = 0.5 * t2 - (2.0 / 3.0) * t3 + 0.25 * t4;
  const double ih01 = t3 - 0.5 * t4;
  const double ih11 = -t3 / 3.0 + 0.25 * t4;
  integral_to_zero_ =
      cum_[k] + hh * (y_[k] * ih00 + hh * d_[k] * ih10 + y_[k + 1] * ih01 +
                      hh * d_[k + 1] * ih11);
}

std::size_t MonotoneCubic::interval(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double MonotoneCubic::value(double x) const {
  if (x < x_.front()) return y_.front() + d_.front() * (x - x_.front());
  if (x > x_.back()) return y_.back() + d_.back() * (x - x_.back());
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

double MonotoneCubic::derivative(double x) const {
  if (x < x_.front()) return d_.front();
  if (x > x_.back()) return d_.back();
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double g00 = (6.0 * t2 - 6.0 * t) / h;
  const double g10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double g01 = (-6.0 * t2 + 6.0 * t) / h;
  const double g11 = 3.0 * t2 - 2.0 * t;
  return g00 * y_[k] + g10 * d_[k] + g01 * y_[k + 1] + g11 * d_[k + 1];
}

double MonotoneCubic::antiderivative(double x) const {
  double clamped = std::clamp(x, x_.front(), x_.back());
  const std::size_t k = interval(clamped);
  const double h = x_[k + 1] - x_[k];
  const double t = (clamped - x_[k]) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double ih00 = t - t3 + 0.5 * t4;
  const double ih10 = 0.5 * t2 - (2.0 / 3.0) * t3 + 0.25 * t4;
  const double ih01 = t3 - 0.5 * t4;
  const double ih11 = -t3 / 3.0 + 0.25 * t4;
  double a = cum_[k] + h * (y_[k] * ih00 + h * d_[k] * ih10 +
                            y_[k + 1] * ih01 + h * d_[k + 1] * ih11);
  // Linear continuation of the interpolant outside the knot range.
  if (x < x_.front()) {
    const double dx = x - x_.front();
    a += y_.front() * dx + 0.5 * d_.front() * dx * dx;
  } else if (x > x_.back()) {
    const double dx = x - x_.back();
    a += y_.back() * dx + 0.5 * d_.back() * dx * dx;
  }
  return a - integral_to_zero_;
}

}  // namespace detail

namespace {

void require_finite(double u, const char* what) {
  if (!std::isfinite(u))
    throw std::domain_error(std::string(what) + ": non-finite argument");
}

}  // namespace

FluxModel FluxModel::burgers() { return FluxModel(FluxKind::burgers, 2.0, 1.0); }

FluxModel FluxModel::power(double m, double c1) {
  if (!(m > 1.0)) throw std::invalid_argument("power flux: m must exceed 1");
  if (!(c1 > 0.0)) throw std::invalid_argument("power flux: C1 must be positive");
  return FluxModel(FluxKind::power, m, c1);
}

FluxModel FluxModel::table(std::vector<double> u, std::vector<double> f,
                           double m, double c1) {
  if (!(m > 1.0) || !(c1 > 0.0))
    throw std::invalid_argument("table flux: need m > 1 and C1 > 0");
  FluxModel model(FluxKind::table, m, c1);
  model.table_ = detail::MonotoneCubic(std::move(u), std::move(f));
  return model;
}

FluxModel FluxModel::zero() { return FluxModel(FluxKind::zero, 2.0, 1.0); }

double FluxModel::f(double u) const {
  require_finite(u, "flux_eval");
  switch (kind_) {
    case FluxKind::burgers:
      return 0.5 * u * u;
    case FluxKind::power:
      return std::pow(std::fabs(u), m_) / m_;
    case FluxKind::table:
      return table_.value(u);
    case FluxKind::zero:
      return 0.0;
  }
  return 0.0;
}

double FluxModel::fprime(double u) const {
  require_finite(u, "flux derivative");
  switch (kind_) {
    case FluxKind::burgers:
      return u;
    case FluxKind::power:
      return u == 0.0 ? 0.0 : u * std::pow(std::fabs(u), m_ - 2.0);
    case FluxKind::table:
      return table_.derivative(u);
    case FluxKind::zero:
      return 0.0;
  }
  return 0.0;
}

double FluxModel::primitive(double u) const {
  require_finite(u, "flux primitive");
  switch (kind_) {
    case FluxKind::burgers:
      return u * u * u / 6.0;
    case FluxKind::power: {
      const double s = u < 0.0 ? -1.0 : 1.0;
      return s * std::pow(std::fabs(u), m_ + 1.0) / (m_ * (m_ + 1.0));
    }
    case FluxKind::table:
      return table_.antiderivative(u);
    case FluxKind::zero:
      return 0.0;
  }
  return 0.0;
}

double FluxModel::primitive_entropy_flux(double u) const {
  const double fu = f(u);
  return 0.5 * fu * fu;
}

void FluxModel::f_array(std::span<const double> u, std::span<double> out) const {
  switch (kind_) {
    case FluxKind::burgers:
      kernels::half_square(u, out);
      return;
    case FluxKind::zero:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case FluxKind::power:
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = std::pow(std::fabs(u[i]), m_) / m_;
      return;
    case FluxKind::table:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = table_.value(u[i]);
      return;
  }
}

double FluxModel::max_abs_fprime(std::span<const double> u) const {
  switch (kind_) {
    case FluxKind::burgers:
      return kernels::max_abs(u);
    case FluxKind::power:
      return std::pow(kernels::max_abs(u), m_ - 1.0);
    case FluxKind::zero:
      return 0.0;
    case FluxKind::table: {
      double m = 0.0;
      for (double v : u) m = std::max(m, std::fabs(table_.derivative(v)));
      return m;
    }
  }
  return 0.0;
}

ViscosityModel ViscosityModel::power(double r, Constants c) {
  if (!(r >= 1.0)) throw std::invalid_argument("power viscosity: r must be >= 1");
  return ViscosityModel(ViscosityKind::power, r, c);
}

ViscosityModel ViscosityModel::linear(Constants c) {
  return ViscosityModel(ViscosityKind::linear, 1.0, c);
}

ViscosityModel ViscosityModel::von_neumann(Constants c) {
  return ViscosityModel(ViscosityKind::von_neumann, 1.0, c);
}

ViscosityModel ViscosityModel::table(std::vector<double> lambda,
                                     std::vector<double> beta, double r,
                                     Constants c) {
  if (!(r >= 1.0)) throw std::invalid_argument("table viscosity: r must be >= 1");
  ViscosityModel model(ViscosityKind::table, r, c);
  model.table_ = detail::MonotoneCubic(std::move(lambda), std::move(beta));
  return model;
}

double ViscosityModel::beta(double lambda) const {
  require_finite(lambda, "beta_eval");
  switch (kind_) {
    case ViscosityKind::power:
      return lambda == 0.0
                 ? 0.0
                 : std::pow(std::fabs(lambda), 3.0 * r_ - 2.0) * lambda;
    case ViscosityKind::linear:
      return lambda;
    case ViscosityKind::von_neumann:
      return std::fabs(lambda) * lambda;
    case ViscosityKind::table:
      return table_.value(lambda);
  }
  return 0.0;
}

double ViscosityModel::beta_prime(double lambda) const {
  require_finite(lambda, "beta derivative");
  switch (kind_) {
    case ViscosityKind::power:
      return lambda == 0.0
                 ? 0.0
                 : (3.0 * r_ - 1.0) * std::pow(std::fabs(lambda), 3.0 * r_ - 2.0);
    case ViscosityKind::linear:
      return 1.0;
    case ViscosityKind::von_neumann:
      return 2.0 * std::fabs(lambda);
    case ViscosityKind::table:
      return table_.derivative(lambda);
  }
  return 0.0;
}

void ViscosityModel::beta_array(std::span<const double> lambda,
                                std::span<double> out) const {
  switch (kind_) {
    case ViscosityKind::von_neumann:
      kernels::signed_square(lambda, out);
      return;
    case ViscosityKind::linear:
      std::copy(lambda.begin(), lambda.end(), out.begin());
      return;
    case ViscosityKind::power:
      for (std::size_t i = 0; i < lambda.size(); ++i)
        out[i] = lambda[i] == 0.0
                     ? 0.0
                     : std::pow(std::fabs(lambda[i]), 3.0 * r_ - 2.0) * lambda[i];
      return;
    case ViscosityKind::table:
      for (std::size_t i = 0; i < lambda.size(); ++i)
        out[i] = table_.value(lambda[i]);
      return;
  }
}

double ViscosityModel::max_beta_prime(std::span<const double> lambda) const {
  switch (kind_) {
    case ViscosityKind::von_neumann:
      return 2.0 * kernels::max_abs(lambda);
    case ViscosityKind::linear:
      return 1.0;
    case ViscosityKind::power:
      return (3.0 * r_ - 1.0) *
             std::pow(kernels::max_abs(lambda), 3.0 * r_ - 2.0);
    case ViscosityKind::table: {
      double m = 0.0;
      for (double v : lambda) m = std::max(m, std::fabs(table_.derivative(v)));
      return m;
    }
  }
  return 0.0;
}

double EntropyPair::eta(double u) const { return std::fabs(u - k); }

double EntropyPair::q(const FluxModel& flux, double u) const {
  const double s = u > k ? 1.0 : (u < k ? -1.0 : 0.0);
  return s * (flux.f(u) - flux.f(k));
}

std::pair<double, double> kruzkov_pair_eval(const EntropyPair& pair,
                                            const FluxModel& flux, double u) {
  require_finite(u, "kruzkov_pair_eval");
  return {pair.eta(u), pair.q(flux, u)};
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string AssumptionCheck::describe(const std::string& name) const {
  std::string s = name + ": " + (pass ? "pass" : "FAIL");
  s += " (fitted constant " + fmt(fitted_constant);
  if (!pass) s += ", witness at " + fmt(witness) + ", margin " + fmt(margin);
  s += ")";
  return s;
}

bool AssumptionReport::all_pass() const {
  return a1.pass && a2.pass && b1_lower.pass && b1_upper.pass && b2.pass &&
         b3.pass;
}

std::string AssumptionReport::describe() const {
  std::string s;
  s += a1.describe("A1") + "\n";
  s += a2.describe("A2") + "\n";
  s += b1_lower.describe("B1 lower") + "\n";
  s += b1_upper.describe("B1 upper") + "\n";
  s += b2.describe("B2") + "\n";
  s += b3.describe("B3") + "\n";
  return s;
}

AssumptionReport verify_assumptions(const FluxModel& flux,
                                    const ViscosityModel& visc,
                                    double range_min, double range_max,
                                    std::size_t samples) {
  if (!(range_max > range_min))
    throw std::invalid_argument("verify_assumptions: empty range");
  if (samples < 100)
    throw std::invalid_argument("verify_assumptions: need at least 100 samples");
  const double span = range_max - range_min;
  if (std::fabs(range_min + range_max) > 1e-9 * span)
    throw std::invalid_argument(
        "verify_assumptions: range must be symmetric about 0");
  const double big_n = visc.constants().threshold;
  if (range_min > -big_n - 1.0 || range_max < big_n + 1.0)
    throw std::invalid_argument(
        "verify_assumptions: range must contain [-N-1, N+1]");

  AssumptionReport rep;
  const double rel = 1e-12;  // slack absorbing pow/ulp roundoff
  const double r3 = 3.0 * visc.exponent();
  const auto& c = visc.constants();

  // Track worst margins; fitted constants are the sampled extrema of the
  // relevant ratios.
  rep.a1.fitted_constant = 0.0;
  rep.b1_lower.fitted_constant = std::numeric_limits<double>::infinity();
  rep.b1_upper.fitted_constant = 0.0;
  rep.b2.fitted_constant = std::numeric_limits<double>::infinity();
  rep.b3.fitted_constant = std::numeric_limits<double>::infinity();
  bool b1_any = false;

  auto fail = [](AssumptionCheck& chk, double where, double margin) {
    if (chk.pass || margin < chk.margin) {
      chk.pass = false;
      chk.witness = where;
      chk.margin = margin;
    }
  };

  double beta_prev = 0.0;
  bool have_prev = false;

  for (std::size_t i = 0; i < samples; ++i) {
    const double x =
        range_min + span * static_cast<double>(i) /
                        static_cast<double>(samples - 1);

    // (A1) on the flux.
    const double fp = std::fabs(flux.fprime(x));
    const double envelope =
        1.0 + std::pow(std::fabs(x), flux.growth_exponent() - 1.0);
    rep.a1.fitted_constant = std::max(rep.a1.fitted_constant, fp / envelope);
    {
      const double margin = flux.growth_constant() * envelope - fp;
      if (margin < -rel * std::max(1.0, fp)) fail(rep.a1, x, margin);
    }

    // (A2): monotone beta with beta(0) = 0, hence beta(l) l >= 0.
    const double b = visc.beta(x);
    if (have_prev && b < beta_prev - rel * std::max(1.0, std::fabs(b)))
      fail(rep.a2, x, b - beta_prev);
    if (b * x < -rel * std::max(1.0, std::fabs(b * x)))
      fail(rep.a2, x, b * x);
    beta_prev = b;
    have_prev = true;

    const double bl = b * x;
    const double al = std::fabs(x);
    if (al > 0.0) {
      const double p3r = std::pow(al, r3);
      const double ratio = bl / p3r;
      rep.b3.fitted_constant = std::min(rep.b3.fitted_constant, ratio);
      if (bl < c.c5 * p3r * (1.0 - rel) - rel)
        fail(rep.b3, x, bl - c.c5 * p3r);
      if (al >= big_n) {
        b1_any = true;
        rep.b1_lower.fitted_constant =
            std::min(rep.b1_lower.fitted_constant, ratio);
        rep.b1_upper.fitted_constant =
            std::max(rep.b1_upper.fitted_constant, ratio);
        if (bl < c.c2 * p3r * (1.0 - rel)) fail(rep.b1_lower, x, bl - c.c2 * p3r);
        if (bl > c.c3 * p3r * (1.0 + rel)) fail(rep.b1_upper, x, c.c3 * p3r - bl);
        const double cube = al * al * al;
        rep.b2.fitted_constant = std::min(rep.b2.fitted_constant, bl / cube);
        if (bl < c.c4 * cube * (1.0 - rel)) fail(rep.b2, x, bl - c.c4 * cube);
      }
    }
  }

  const double beta0 = visc.beta(0.0);
  if (std::fabs(beta0) > 1e-14) fail(rep.a2, 0.0, -std::fabs(beta0));
  if (!b1_any) {
    rep.b1_lower.fitted_constant = 0.0;
    rep.b1_upper.fitted_constant = 0.0;
    rep.b2.fitted_constant = 0.0;
  }
  return rep;
}

}  // namespace kdvb
