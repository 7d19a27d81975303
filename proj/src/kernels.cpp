#include "causalsens/kernels.hpp"

namespace causalsens::kern {

bool avx2_available() {
#if defined(CAUSALSENS_HAVE_AVX2_BACKEND)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {
const bool use_avx2 = avx2_available();
}

const char* active_backend() { return use_avx2 ? "avx2" : "scalar"; }

#if defined(CAUSALSENS_HAVE_AVX2_BACKEND)
#define CAUSALSENS_PICK(fn, ...) \
  return use_avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define CAUSALSENS_PICK(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double sum(const double* x, std::size_t n) { CAUSALSENS_PICK(sum, x, n); }

double dot(const double* x, const double* y, std::size_t n) {
  CAUSALSENS_PICK(dot, x, y, n);
}

double effect_dot(const double* px, const double* mu1, const double* mu0,
                  std::size_t n) {
  CAUSALSENS_PICK(effect_dot, px, mu1, mu0, n);
}

double tau_general(const double* px, const double* mu0, const double* mu1,
                   const double* e, const double* eps0, const double* eps1,
                   std::size_t n) {
  CAUSALSENS_PICK(tau_general, px, mu0, mu1, e, eps0, eps1, n);
}

double sq_dist_one(const double* a, std::size_t n) {
  CAUSALSENS_PICK(sq_dist_one, a, n);
}

void mul(double* out, const double* a, const double* b, std::size_t n) {
#if defined(CAUSALSENS_HAVE_AVX2_BACKEND)
  if (use_avx2) {
    avx2::mul(out, a, b, n);
    return;
  }
#endif
  scalar::mul(out, a, b, n);
}

#undef CAUSALSENS_PICK

}  // namespace causalsens::kern
