// AVX2 variants of the kernels in kernels.cpp. This translation unit is the
// only one compiled with -mavx2; it is reached solely through the runtime
// dispatch table after __builtin_cpu_supports("avx2") succeeds.
//
// Elementwise/stencil kernels mirror the scalar expression trees exactly
// (mul/add, no FMA), so they are bit-identical with the scalar reference.
// Reductions use four lanes plus a scalar tail and may differ from the
// strict left-fold by accumulation order.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace kdvb::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

inline __m256d vabs(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

}  // namespace

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

double sum_abs(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, vabs(_mm256_loadu_pd(x + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

double max_abs(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_max_pd(acc, vabs(_mm256_loadu_pd(x + i)));
  double m = hmax(acc);
  for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(x + i);
    __m256d b = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(a, b));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double total_variation_periodic(const double* u, std::size_t n) {
  if (n < 2) return 0.0;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 5 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(u + i);
    __m256d b = _mm256_loadu_pd(u + i + 1);
    acc = _mm256_add_pd(acc, vabs(_mm256_sub_pd(b, a)));
  }
  double s = hsum(acc);
  for (; i + 1 < n; ++i) s += std::fabs(u[i + 1] - u[i]);
  s += std::fabs(u[0] - u[n - 1]);
  return s;
}

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                              _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(out + i, t);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void axpbypcz(double a, const double* x, double b, const double* y, double c,
              const double* z, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                              _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    t = _mm256_add_pd(t, _mm256_mul_pd(vc, _mm256_loadu_pd(z + i)));
    _mm256_storeu_pd(out + i, t);
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i] + c * z[i];
}

void scaled_diff_periodic(const double* u, double c, double* out,
                          std::size_t n) {
  if (n == 0) return;
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 5 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(u + i);
    __m256d b = _mm256_loadu_pd(u + i + 1);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vc, _mm256_sub_pd(b, a)));
  }
  for (; i + 1 < n; ++i) out[i] = c * (u[i + 1] - u[i]);
  out[n - 1] = c * (u[0] - u[n - 1]);
}

void half_square(const double* u, double* out, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(u + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(half, v), v));
  }
  for (; i < n; ++i) out[i] = 0.5 * u[i] * u[i];
}

void signed_square(const double* u, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(u + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vabs(v), v));
  }
  for (; i < n; ++i) out[i] = std::fabs(u[i]) * u[i];
}

void rhs_combine_periodic(const double* fu, const double* bf, const double* u,
                          double c_adv, double c_visc, double c_disp,
                          double* rhs, std::size_t n) {
  auto at = [n](std::ptrdiff_t j) -> std::size_t {
    return static_cast<std::size_t>((j % static_cast<std::ptrdiff_t>(n) + n) %
                                    static_cast<std::ptrdiff_t>(n));
  };
  auto node = [&](std::size_t j) {
    const std::size_t jm2 = at(static_cast<std::ptrdiff_t>(j) - 2);
    const std::size_t jm1 = at(static_cast<std::ptrdiff_t>(j) - 1);
    const std::size_t jp1 = at(static_cast<std::ptrdiff_t>(j) + 1);
    const std::size_t jp2 = at(static_cast<std::ptrdiff_t>(j) + 2);
    rhs[j] = -c_adv * (fu[jp1] - fu[jm1]) + c_visc * (bf[j] - bf[jm1]) -
             c_disp * (u[jp2] - 2.0 * u[jp1] + 2.0 * u[jm1] - u[jm2]);
  };
  if (n < 16) {
    for (std::size_t j = 0; j < n; ++j) node(j);
    return;
  }
  node(0);
  node(1);
  const __m256d vadv = _mm256_set1_pd(-c_adv);
  const __m256d vvis = _mm256_set1_pd(c_visc);
  const __m256d vdis = _mm256_set1_pd(c_disp);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t j = 2;
  for (; j + 4 <= n - 2; j += 4) {
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(fu + j + 1),
                               _mm256_loadu_pd(fu + j - 1));
    __m256d d2 =
        _mm256_sub_pd(_mm256_loadu_pd(bf + j), _mm256_loadu_pd(bf + j - 1));
    __m256d up2 = _mm256_loadu_pd(u + j + 2);
    __m256d up1 = _mm256_loadu_pd(u + j + 1);
    __m256d um1 = _mm256_loadu_pd(u + j - 1);
    __m256d um2 = _mm256_loadu_pd(u + j - 2);
    __m256d d3 = _mm256_sub_pd(
        _mm256_add_pd(_mm256_sub_pd(up2, _mm256_mul_pd(two, up1)),
                      _mm256_mul_pd(two, um1)),
        um2);
    __m256d t = _mm256_add_pd(_mm256_mul_pd(vadv, d1), _mm256_mul_pd(vvis, d2));
    t = _mm256_sub_pd(t, _mm256_mul_pd(vdis, d3));
    _mm256_storeu_pd(rhs + j, t);
  }
  for (; j < n; ++j) node(j);
}

}  // namespace kdvb::kernels::avx2

#endif  // x86-64
