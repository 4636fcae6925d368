// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may run before dispatch.cpp has confirmed the
// CPU supports both.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "biphoton/kernels.hpp"

namespace biphoton::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp(x) for x in the normal range, 0 below it. Range reduction by ln2 with
// a split constant, then the degree-13 Taylor polynomial on |r| <= ln2/2
// (truncation ~4e-18 relative), then scaling by 2^k through the exponent
// field.
inline __m256d exp_pd(__m256d x) {
  const __m256d lower = _mm256_set1_pd(-708.39);
  const __m256d upper = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lower), upper);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), r);

  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,      1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,         0.5,
      1.0,                1.0,
  };
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[i]));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_add_epi64(_mm256_cvtepi32_epi64(k32), _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, result);
}

inline __m256d quadratic(__m256d y, __m256d c0, __m256d c1, __m256d c2) {
  return _mm256_fmadd_pd(y, _mm256_fmadd_pd(c2, y, c1), c0);
}

void exp_quadratic_avx2(const double* y, std::size_t n, double c0, double c1, double c2,
                        double* out) {
  const __m256d v0 = _mm256_set1_pd(c0);
  const __m256d v1 = _mm256_set1_pd(c1);
  const __m256d v2 = _mm256_set1_pd(c2);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(out + k, exp_pd(quadratic(_mm256_loadu_pd(y + k), v0, v1, v2)));
  }
  for (; k < n; ++k) out[k] = std::exp(c0 + y[k] * (c1 + c2 * y[k]));
}

ModelSums exp_quadratic_sums_avx2(const double* y, const double* data, std::size_t n, double c0,
                                  double c1, double c2) {
  const __m256d v0 = _mm256_set1_pd(c0);
  const __m256d v1 = _mm256_set1_pd(c1);
  const __m256d v2 = _mm256_set1_pd(c2);
  __m256d sm = _mm256_setzero_pd();
  __m256d smm = _mm256_setzero_pd();
  __m256d sdm = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d m = exp_pd(quadratic(_mm256_loadu_pd(y + k), v0, v1, v2));
    sm = _mm256_add_pd(sm, m);
    smm = _mm256_fmadd_pd(m, m, smm);
    sdm = _mm256_fmadd_pd(_mm256_loadu_pd(data + k), m, sdm);
  }
  ModelSums s{hsum(sm), hsum(smm), hsum(sdm)};
  for (; k < n; ++k) {
    const double m = std::exp(c0 + y[k] * (c1 + c2 * y[k]));
    s.m += m;
    s.mm += m * m;
    s.dm += data[k] * m;
  }
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) y[k] += a * x[k];
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + k));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + k + 4));
  }
  for (; k + 4 <= n; k += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + k));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += x[k];
  return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + k + 4), _mm256_loadu_pd(y + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += x[k] * y[k];
  return s;
}

Moments moments_avx2(const double* w, std::size_t n, double x0, double dx) {
  __m256d sw = _mm256_setzero_pd();
  __m256d swx = _mm256_setzero_pd();
  __m256d swxx = _mm256_setzero_pd();
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d vdx = _mm256_set1_pd(dx);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d base = _mm256_set1_pd(x0 + static_cast<double>(k) * dx);
    const __m256d x = _mm256_fmadd_pd(lane, vdx, base);
    const __m256d v = _mm256_loadu_pd(w + k);
    const __m256d vx = _mm256_mul_pd(v, x);
    sw = _mm256_add_pd(sw, v);
    swx = _mm256_add_pd(swx, vx);
    swxx = _mm256_fmadd_pd(vx, x, swxx);
  }
  Moments m{hsum(sw), hsum(swx), hsum(swxx)};
  for (; k < n; ++k) {
    const double x = x0 + static_cast<double>(k) * dx;
    m.w += w[k];
    m.wx += w[k] * x;
    m.wxx += w[k] * x * x;
  }
  return m;
}

void fir_avx2(const double* in, std::size_t n, const double* taps, std::size_t radius,
              double* out) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const auto r = static_cast<std::ptrdiff_t>(radius);
  auto edge = [&](std::ptrdiff_t k) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-r, -k);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(r, sn - 1 - k);
    double acc = 0.0;
    for (std::ptrdiff_t t = lo; t <= hi; ++t) acc += taps[t + r] * in[k + t];
    out[k] = acc;
  };

  const std::ptrdiff_t interior_end = sn - r;  // outputs [r, n - r) need no padding
  std::ptrdiff_t k = 0;
  for (; k < std::min(r, sn); ++k) edge(k);
  for (; k + 4 <= interior_end; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::ptrdiff_t t = -r; t <= r; ++t) {
      acc = _mm256_fmadd_pd(_mm256_set1_pd(taps[t + r]), _mm256_loadu_pd(in + k + t), acc);
    }
    _mm256_storeu_pd(out + k, acc);
  }
  for (; k < sn; ++k) edge(k);
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{
      "avx2",   exp_quadratic_avx2, exp_quadratic_sums_avx2, axpy_avx2,
      sum_avx2, dot_avx2,           moments_avx2,            fir_avx2,
  };
  return table;
}

}  // namespace biphoton::kernels
