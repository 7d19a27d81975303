#pragma once

#include <cstddef>

// Arithmetic kernels behind the effect evaluations and solver loops. Each
// kernel has a scalar reference implementation and an AVX2 variant selected
// once at startup. Both accumulate into four independent lanes (element i
// goes to lane i mod 4) and reduce as (l0+l1)+(l2+l3), so the backends are
// bit-identical; the equivalence tests assert exact equality.

namespace causalsens::kern {

namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
// sum_i px[i] * (mu1[i] - mu0[i])
double effect_dot(const double* px, const double* mu1, const double* mu0,
                  std::size_t n);
// sum_i px[i] * (mu1[i]*(e + (1-e)/eps1) - mu0[i]*((1-e) + e*eps0)),
// cells with px == 0 contribute exactly zero (their eps entries are never
// touched, so degenerate placeholders cannot poison the sum).
double tau_general(const double* px, const double* mu0, const double* mu1,
                   const double* e, const double* eps0, const double* eps1,
                   std::size_t n);
// sum_i (a[i] - 1)^2
double sq_dist_one(const double* a, std::size_t n);
void mul(double* out, const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
#define CAUSALSENS_HAVE_AVX2_BACKEND 1
namespace avx2 {
// Callable only when avx2_available() is true.
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double effect_dot(const double* px, const double* mu1, const double* mu0,
                  std::size_t n);
double tau_general(const double* px, const double* mu0, const double* mu1,
                   const double* e, const double* eps0, const double* eps1,
                   std::size_t n);
double sq_dist_one(const double* a, std::size_t n);
void mul(double* out, const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

bool avx2_available();
const char* active_backend();  // "avx2" or "scalar"

// Dispatched fronts.
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double effect_dot(const double* px, const double* mu1, const double* mu0,
                  std::size_t n);
double tau_general(const double* px, const double* mu0, const double* mu1,
                   const double* e, const double* eps0, const double* eps1,
                   std::size_t n);
double sq_dist_one(const double* a, std::size_t n);
void mul(double* out, const double* a, const double* b, std::size_t n);

}  // namespace causalsens::kern
