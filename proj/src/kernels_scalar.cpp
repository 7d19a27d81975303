#include "causalsens/kernels.hpp"

// Reference backend. The four-lane accumulation mirrors the AVX2 register
// layout exactly; do not "simplify" to a single accumulator.

namespace causalsens::kern::scalar {

double sum(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += x[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += x[i] * y[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double effect_dot(const double* px, const double* mu1, const double* mu0,
                  std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i & 3] += px[i] * (mu1[i] - mu0[i]);
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double tau_general(const double* px, const double* mu0, const double* mu1,
                   const double* e, const double* eps0, const double* eps1,
                   std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    double term = 0.0;
    if (px[i] != 0.0) {
      const double ome = 1.0 - e[i];
      const double w1 = e[i] + ome / eps1[i];
      const double w0 = ome + e[i] * eps0[i];
      term = px[i] * (mu1[i] * w1 - mu0[i] * w0);
    }
    acc[i & 3] += term;
  }
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sq_dist_one(const double* a, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - 1.0;
    acc[i & 3] += d * d;
  }
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void mul(double* out, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace causalsens::kern::scalar
