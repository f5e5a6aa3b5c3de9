#pragma once

#include <cstddef>
#include <span>
#include <string>

// Reduction and stencil kernels shared by the solver and the diagnostics.
//
// Every kernel has a scalar reference implementation (namespace `scalar`)
// that is always available and is the semantic definition. Vector variants
// (AVX2 on x86-64) are selected once at startup from the host CPU and can be
// overridden with select_backend(), e.g. to pin the scalar path in tests.
// Elementwise and stencil kernels produce bit-identical results across
// backends; reductions may differ by accumulation order within a few ulps.

namespace kdvb::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
void select_backend(Backend b);  // throws std::invalid_argument if unsupported
std::string backend_name(Backend b);

namespace scalar {

double sum(const double* x, std::size_t n);
double sum_sq(const double* x, std::size_t n);
double sum_abs(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double total_variation_periodic(const double* u, std::size_t n);

// out = a*x + b*y
void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n);
// out = a*x + b*y + c*z
void axpbypcz(double a, const double* x, double b, const double* y, double c,
              const double* z, double* out, std::size_t n);
// out[j] = c * (u[j+1] - u[j]), periodic wrap at j = n-1
void scaled_diff_periodic(const double* u, double c, double* out,
                          std::size_t n);
// out = 0.5 * u^2
void half_square(const double* u, double* out, std::size_t n);
// out = |u| * u
void signed_square(const double* u, double* out, std::size_t n);

// Fused semidiscrete right-hand side on a periodic grid:
//   rhs[j] = -c_adv  * (fu[j+1] - fu[j-1])
//            + c_visc * (bf[j]   - bf[j-1])
//            - c_disp * (u[j+2] - 2u[j+1] + 2u[j-1] - u[j-2])
// fu holds f(u_j), bf holds beta(lambda_{j+1/2}).
void rhs_combine_periodic(const double* fu, const double* bf, const double* u,
                          double c_adv, double c_visc, double c_disp,
                          double* rhs, std::size_t n);

}  // namespace scalar

// Dispatched entry points. Signatures mirror the scalar reference.
double sum(std::span<const double> x);
double sum_sq(std::span<const double> x);
double sum_abs(std::span<const double> x);
double max_abs(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double total_variation_periodic(std::span<const double> u);
void axpby(double a, std::span<const double> x, double b,
           std::span<const double> y, std::span<double> out);
void axpbypcz(double a, std::span<const double> x, double b,
              std::span<const double> y, double c, std::span<const double> z,
              std::span<double> out);
void scaled_diff_periodic(std::span<const double> u, double c,
                          std::span<double> out);
void half_square(std::span<const double> u, std::span<double> out);
void signed_square(std::span<const double> u, std::span<double> out);
void rhs_combine_periodic(std::span<const double> fu,
                          std::span<const double> bf,
                          std::span<const double> u, double c_adv,
                          double c_visc, double c_disp, std::span<double> rhs);

// Sum of |x|^q. Needs pow per element; scalar on every backend.
double sum_abs_pow(std::span<const double> x, double q);

// Index of the first non-finite entry, or npos if all entries are finite.
inline constexpr std::size_t npos = static_cast<std::size_t>(-1);
std::size_t find_nonfinite(std::span<const double> x);

}  // namespace kdvb::kernels
