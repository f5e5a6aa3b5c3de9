#include "kdvb/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace kdvb::kernels {

namespace scalar {

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double sum_sq(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double sum_abs(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double total_variation_periodic(const double* u, std::size_t n) {
  if (n < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += std::fabs(u[i + 1] - u[i]);
  s += std::fabs(u[0] - u[n - 1]);
  return s;
}

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void axpbypcz(double a, const double* x, double b, const double* y, double c,
              const double* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

void scaled_diff_periodic(const double* u, double c, double* out,
                          std::size_t n) {
  if (n == 0) return;
  for (std::size_t i = 0; i + 1 < n; ++i) out[i] = c * (u[i + 1] - u[i]);
  out[n - 1] = c * (u[0] - u[n - 1]);
}

void half_square(const double* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * u[i] * u[i];
}

void signed_square(const double* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(u[i]) * u[i];
}

void rhs_combine_periodic(const double* fu, const double* bf, const double* u,
                          double c_adv, double c_visc, double c_disp,
                          double* rhs, std::size_t n) {
  auto wrap = [n](std::ptrdiff_t j) -> std::size_t {
    return static_cast<std::size_t>((j % static_cast<std::ptrdiff_t>(n) + n) %
                                    static_cast<std::ptrdiff_t>(n));
  };
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm2 = wrap(static_cast<std::ptrdiff_t>(j) - 2);
    const std::size_t jm1 = wrap(static_cast<std::ptrdiff_t>(j) - 1);
    const std::size_t jp1 = wrap(static_cast<std::ptrdiff_t>(j) + 1);
    const std::size_t jp2 = wrap(static_cast<std::ptrdiff_t>(j) + 2);
    rhs[j] = -c_adv * (fu[jp1] - fu[jm1]) + c_visc * (bf[j] - bf[jm1]) -
             c_disp * (u[jp2] - 2.0 * u[jp1] + 2.0 * u[jm1] - u[jm2]);
  }
}

}  // namespace scalar

namespace {

struct Ops {
  double (*sum)(const double*, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
  double (*sum_abs)(const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*tv_periodic)(const double*, std::size_t);
  void (*axpby)(double, const double*, double, const double*, double*,
                std::size_t);
  void (*axpbypcz)(double, const double*, double, const double*, double,
                   const double*, double*, std::size_t);
  void (*scaled_diff_periodic)(const double*, double, double*, std::size_t);
  void (*half_square)(const double*, double*, std::size_t);
  void (*signed_square)(const double*, double*, std::size_t);
  void (*rhs_combine_periodic)(const double*, const double*, const double*,
                               double, double, double, double*, std::size_t);
};

constexpr Ops scalar_ops = {
    scalar::sum,
    scalar::sum_sq,
    scalar::sum_abs,
    scalar::max_abs,
    scalar::dot,
    scalar::total_variation_periodic,
    scalar::axpby,
    scalar::axpbypcz,
    scalar::scaled_diff_periodic,
    scalar::half_square,
    scalar::signed_square,
    scalar::rhs_combine_periodic,
};

}  // namespace

#if defined(__x86_64__) || defined(_M_X64)
#define KDVB_HAVE_AVX2_TU 1
namespace avx2 {
// Implemented in kernels_avx2.cpp, compiled with -mavx2.
double sum(const double*, std::size_t);
double sum_sq(const double*, std::size_t);
double sum_abs(const double*, std::size_t);
double max_abs(const double*, std::size_t);
double dot(const double*, const double*, std::size_t);
double total_variation_periodic(const double*, std::size_t);
void axpby(double, const double*, double, const double*, double*, std::size_t);
void axpbypcz(double, const double*, double, const double*, double,
              const double*, double*, std::size_t);
void scaled_diff_periodic(const double*, double, double*, std::size_t);
void half_square(const double*, double*, std::size_t);
void signed_square(const double*, double*, std::size_t);
void rhs_combine_periodic(const double*, const double*, const double*, double,
                          double, double, double*, std::size_t);
}  // namespace avx2
#else
#define KDVB_HAVE_AVX2_TU 0
#endif

namespace {

#if KDVB_HAVE_AVX2_TU
constexpr Ops avx2_ops = {
    avx2::sum,
    avx2::sum_sq,
    avx2::sum_abs,
    avx2::max_abs,
    avx2::dot,
    avx2::total_variation_periodic,
    avx2::axpby,
    avx2::axpbypcz,
    avx2::scaled_diff_periodic,
    avx2::half_square,
    avx2::signed_square,
    avx2::rhs_combine_periodic,
};
#endif

bool cpu_has_avx2() {
#if KDVB_HAVE_AVX2_TU
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

struct Dispatch {
  const Ops* ops;
  Backend backend;
  Dispatch() {
    if (cpu_has_avx2()) {
#if KDVB_HAVE_AVX2_TU
      ops = &avx2_ops;
      backend = Backend::avx2;
      return;
#endif
    }
    ops = &scalar_ops;
    backend = Backend::scalar;
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
  }
  return false;
}

void select_backend(Backend b) {
  if (!backend_supported(b))
    throw std::invalid_argument("kernels: backend not supported on this host: " +
                                backend_name(b));
  switch (b) {
    case Backend::scalar:
      dispatch().ops = &scalar_ops;
      break;
    case Backend::avx2:
#if KDVB_HAVE_AVX2_TU
      dispatch().ops = &avx2_ops;
#endif
      break;
  }
  dispatch().backend = b;
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

double sum(std::span<const double> x) {
  return dispatch().ops->sum(x.data(), x.size());
}
double sum_sq(std::span<const double> x) {
  return dispatch().ops->sum_sq(x.data(), x.size());
}
double sum_abs(std::span<const double> x) {
  return dispatch().ops->sum_abs(x.data(), x.size());
}
double max_abs(std::span<const double> x) {
  return dispatch().ops->max_abs(x.data(), x.size());
}
double dot(std::span<const double> x, std::span<const double> y) {
  return dispatch().ops->dot(x.data(), y.data(), x.size());
}
double total_variation_periodic(std::span<const double> u) {
  return dispatch().ops->tv_periodic(u.data(), u.size());
}
void axpby(double a, std::span<const double> x, double b,
           std::span<const double> y, std::span<double> out) {
  dispatch().ops->axpby(a, x.data(), b, y.data(), out.data(), out.size());
}
void axpbypcz(double a, std::span<const double> x, double b,
              std::span<const double> y, double c, std::span<const double> z,
              std::span<double> out) {
  dispatch().ops->axpbypcz(a, x.data(), b, y.data(), c, z.data(), out.data(),
                           out.size());
}
void scaled_diff_periodic(std::span<const double> u, double c,
                          std::span<double> out) {
  dispatch().ops->scaled_diff_periodic(u.data(), c, out.data(), u.size());
}
void half_square(std::span<const double> u, std::span<double> out) {
  dispatch().ops->half_square(u.data(), out.data(), u.size());
}
void signed_square(std::span<const double> u, std::span<double> out) {
  dispatch().ops->signed_square(u.data(), out.data(), u.size());
}
void rhs_combine_periodic(std::span<const double> fu,
                          std::span<const double> bf,
                          std::span<const double> u, double c_adv,
                          double c_visc, double c_disp, std::span<double> rhs) {
  dispatch().ops->rhs_combine_periodic(fu.data(), bf.data(), u.data(), c_adv,
                                       c_visc, c_disp, rhs.data(), u.size());
}

double sum_abs_pow(std::span<const double> x, double q) {
  double s = 0.0;
  for (double v : x) s += std::pow(std::fabs(v), q);
  return s;
}

std::size_t find_nonfinite(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return i;
  return npos;
}

}  // namespace kdvb::kernels
