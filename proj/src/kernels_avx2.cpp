#include "causalsens/kernels.hpp"

#if defined(CAUSALSENS_HAVE_AVX2_BACKEND)

#include <immintrin.h>

// AVX2 backend. One 4-lane vector accumulator per kernel; the scalar tail
// lands in lane (i mod 4) so that results match the reference bit for bit.
// No fma: these files are built with contraction off and explicit mul+add.

namespace causalsens::kern::avx2 {

namespace {

inline double reduce(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = n4; i < n; ++i) lane[i & 3] += x[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d t = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, t);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = n4; i < n; ++i) lane[i & 3] += x[i] * y[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double effect_dot(const double* px, const double* mu1, const double* mu0,
                  std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d diff =
        _mm256_sub_pd(_mm256_loadu_pd(mu1 + i), _mm256_loadu_pd(mu0 + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(px + i), diff));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = n4; i < n; ++i) lane[i & 3] += px[i] * (mu1[i] - mu0[i]);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double tau_general(const double* px, const double* mu0, const double* mu1,
                   const double* e, const double* eps0, const double* eps1,
                   std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d pxv = _mm256_loadu_pd(px + i);
    const __m256d ev = _mm256_loadu_pd(e + i);
    const __m256d ome = _mm256_sub_pd(one, ev);
    const __m256d w1 =
        _mm256_add_pd(ev, _mm256_div_pd(ome, _mm256_loadu_pd(eps1 + i)));
    const __m256d w0 =
        _mm256_add_pd(ome, _mm256_mul_pd(ev, _mm256_loadu_pd(eps0 + i)));
    const __m256d val =
        _mm256_sub_pd(_mm256_mul_pd(_mm256_loadu_pd(mu1 + i), w1),
                      _mm256_mul_pd(_mm256_loadu_pd(mu0 + i), w0));
    // NEQ_UQ matches the scalar `px != 0` comparison on NaN inputs.
    const __m256d mask = _mm256_cmp_pd(pxv, zero, _CMP_NEQ_UQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_mul_pd(pxv, val), mask));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = n4; i < n; ++i) {
    double term = 0.0;
    if (px[i] != 0.0) {
      const double ome = 1.0 - e[i];
      const double w1 = e[i] + ome / eps1[i];
      const double w0 = ome + e[i] * eps0[i];
      term = px[i] * (mu1[i] * w1 - mu0[i] * w0);
    }
    lane[i & 3] += term;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sq_dist_one(const double* a, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), one);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = a[i] - 1.0;
    lane[i & 3] += d * d;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void mul(double* out, const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (std::size_t i = n4; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace causalsens::kern::avx2

#endif  // CAUSALSENS_HAVE_AVX2_BACKEND
