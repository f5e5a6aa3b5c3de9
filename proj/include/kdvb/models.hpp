#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kdvb {

namespace detail {

// Shape-preserving (Fritsch-Carlson) cubic Hermite interpolant with linear
// extrapolation beyond the knot range and an exact piecewise antiderivative.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double value(double x) const;
  double derivative(double x) const;
  // Antiderivative anchored at zero: A(x) = integral_0^x value(s) ds.
  // Requires 0 to lie inside the knot range.
  double antiderivative(double x) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_, y_, d_;     // knots, values, knot derivatives
  std::vector<double> cum_;           // integral from x_[0] to each knot
  double integral_to_zero_ = 0.0;     // integral from x_[0] to 0
};

}  // namespace detail

enum class FluxKind { burgers, power, table, zero };

// Flux f of the conservation law together with its derivative and primitive.
// The power family uses f'(u) = u|u|^{m-2}, i.e. f(u) = |u|^m / m, the
// canonical member of the growth class with C1 = 1. Immutable after
// construction; safe to share across threads.
class FluxModel {
 public:
  static FluxModel burgers();
  static FluxModel power(double m, double c1 = 1.0);
  static FluxModel table(std::vector<double> u, std::vector<double> f,
                         double m, double c1);
  static FluxModel zero();

  FluxKind kind() const { return kind_; }
  double growth_exponent() const { return m_; }   // m in (A1)
  double growth_constant() const { return c1_; }  // C1 in (A1)

  double f(double u) const;          // flux value
  double fprime(double u) const;     // f'
  double primitive(double u) const;  // F with F' = f, F(0) = 0
  // Entropy flux paired with the primitive entropy F: H with H' = f f',
  // equal to f(u)^2 / 2 for every model with f(0) = 0.
  double primitive_entropy_flux(double u) const;

  void f_array(std::span<const double> u, std::span<double> out) const;
  double max_abs_fprime(std::span<const double> u) const;

 private:
  FluxModel(FluxKind k, double m, double c1) : kind_(k), m_(m), c1_(c1) {}

  FluxKind kind_;
  double m_;
  double c1_;
  detail::MonotoneCubic table_;
};

enum class ViscosityKind { power, linear, von_neumann, table };

// Degenerate viscosity beta acting on the slope. The power family is
// beta(lambda) = |lambda|^{3r-2} lambda; von Neumann is the r = 1 member
// |lambda| lambda; linear is beta(lambda) = lambda.
class ViscosityModel {
 public:
  struct Constants {
    double c2 = 1.0, c3 = 1.0, c4 = 1.0, c5 = 1.0;
    double threshold = 1.0;  // N: |lambda| >= N activates (B1)/(B2)
  };

  static ViscosityModel power(double r, Constants c);
  static ViscosityModel power(double r) { return power(r, Constants{}); }
  static ViscosityModel linear(Constants c);
  static ViscosityModel linear() { return linear(Constants{}); }
  static ViscosityModel von_neumann(Constants c);
  static ViscosityModel von_neumann() { return von_neumann(Constants{}); }
  static ViscosityModel table(std::vector<double> lambda,
                              std::vector<double> beta, double r, Constants c);
  static ViscosityModel table(std::vector<double> lambda,
                              std::vector<double> beta, double r) {
    return table(std::move(lambda), std::move(beta), r, Constants{});
  }

  ViscosityKind kind() const { return kind_; }
  double exponent() const { return r_; }  // r in (B1)/(B3)
  const Constants& constants() const { return constants_; }

  double beta(double lambda) const;
  double beta_prime(double lambda) const;  // one-sided limit 0 at 0 for r >= 1

  void beta_array(std::span<const double> lambda, std::span<double> out) const;
  double max_beta_prime(std::span<const double> lambda) const;

 private:
  ViscosityModel(ViscosityKind k, double r, Constants c)
      : kind_(k), r_(r), constants_(c) {}

  ViscosityKind kind_;
  double r_;
  Constants constants_;
  detail::MonotoneCubic table_;
};

// Kruzkov entropy pair eta_k(u) = |u - k|, Q_k(u) = sgn(u - k)(f(u) - f(k)).
struct EntropyPair {
  double k = 0.0;

  double eta(double u) const;
  double q(const FluxModel& flux, double u) const;
};

std::pair<double, double> kruzkov_pair_eval(const EntropyPair& pair,
                                            const FluxModel& flux, double u);

// Sampled verdict for one structural assumption. `fitted_constant` is the
// tightest constant the samples allow (minimal feasible C1/C3, maximal
// feasible C2/C4/C5); `witness` is the sample point of the worst violation.
struct AssumptionCheck {
  bool pass = true;
  double witness = 0.0;
  double margin = 0.0;  // most negative slack seen (>= 0 when passing)
  double fitted_constant = 0.0;
  std::string describe(const std::string& name) const;
};

struct AssumptionReport {
  AssumptionCheck a1;        // |f'| <= C1 (1 + |u|^{m-1})
  AssumptionCheck a2;        // beta(0) = 0, beta non-decreasing
  AssumptionCheck b1_lower;  // C2 |l|^{3r} <= beta(l) l   for |l| >= N
  AssumptionCheck b1_upper;  // beta(l) l <= C3 |l|^{3r}   for |l| >= N
  AssumptionCheck b2;        // beta(l) l >= C4 |l|^3      for |l| >= N
  AssumptionCheck b3;        // beta(l) l >= C5 |l|^{3r}   for all l

  bool all_pass() const;
  std::string describe() const;
};

// Samples both models on [range_min, range_max] and checks (A1), (A2),
// (B1), (B2), (B3). The range must be symmetric about 0, non-empty, and
// contain [-N-1, N+1]; at least 100 samples are required.
AssumptionReport verify_assumptions(const FluxModel& flux,
                                    const ViscosityModel& visc,
                                    double range_min, double range_max,
                                    std::size_t samples);

}  // namespace kdvb
