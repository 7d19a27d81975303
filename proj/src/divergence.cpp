#include "causalsens/divergence.hpp"

#include <cmath>
#include <limits>

#include "causalsens/errors.hpp"

namespace causalsens {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNormTol = 1e-9;
}  // namespace

double kl_categorical(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    fail("length-mismatch", "distributions must have equal length");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0))
      fail("unnormalized", "distribution entries must be nonnegative");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > kNormTol || std::abs(sq - 1.0) > kNormTol)
    fail("unnormalized", "distributions must sum to 1");

  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return acc;
}

double bernoulli_kl(double mu, double muref) {
  if (!(mu >= 0.0 && mu <= 1.0) || !(muref >= 0.0 && muref <= 1.0))
    fail("bad-mean", "Bernoulli means must lie in [0, 1]");
  double acc = 0.0;
  if (mu > 0.0) {
    if (muref == 0.0) return kInf;
    acc += mu * std::log(mu / muref);
  }
  if (mu < 1.0) {
    if (muref == 1.0) return kInf;
    acc += (1.0 - mu) * std::log((1.0 - mu) / (1.0 - muref));
  }
  return acc;
}

double kl_outcome(std::span<const double> mu, std::span<const double> muref,
                  std::span<const std::uint8_t> active) {
  if (mu.size() != muref.size() || mu.size() != active.size())
    fail("length-mismatch", "outcome mean arrays must have equal length");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!active[i]) continue;
    const double term = bernoulli_kl(mu[i], muref[i]);
    if (term == kInf) return kInf;
    acc += term;
  }
  return acc;
}

double sq_dist_eps(std::span<const double> eps0, std::span<const double> eps1) {
  if (eps0.size() != eps1.size())
    fail("length-mismatch", "eps arrays must have equal length");
  double acc = 0.0;
  for (std::size_t i = 0; i < eps0.size(); ++i) {
    if (!(eps0[i] > 0.0) || !(eps1[i] > 0.0))
      fail("non-positive-odds-ratio", "confounding factors must be positive");
    const double d0 = eps0[i] - 1.0;
    const double d1 = 1.0 / eps1[i] - 1.0;
    acc += d0 * d0 + d1 * d1;
  }
  return acc;
}

double to_sensitivity(double divergence) {
  if (std::isnan(divergence) || divergence < 0.0)
    fail("negative-divergence", "divergence must be nonnegative");
  if (divergence == kInf) return 0.0;
  return std::exp(-divergence);
}

}  // namespace causalsens
