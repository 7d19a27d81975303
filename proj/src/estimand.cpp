#include "causalsens/estimand.hpp"

#include <cmath>

#include "causalsens/errors.hpp"
#include "causalsens/kernels.hpp"

namespace causalsens {

namespace {

constexpr double kNormTol = 1e-9;

void check_px(std::span<const double> px) {
  double s = 0.0;
  for (double v : px) {
    if (!(v >= 0.0)) fail("unnormalized-px", "px entries must be nonnegative");
    s += v;
  }
  if (std::abs(s - 1.0) > kNormTol)
    fail("unnormalized-px", "px must sum to 1");
}

void check_eps(std::span<const double> eps0, std::span<const double> eps1,
               std::span<const double> px) {
  for (std::size_t i = 0; i < eps0.size(); ++i) {
    if (px[i] == 0.0) continue;  // placeholders on empty cells are inert
    if (!(eps0[i] > 0.0) || !(eps1[i] > 0.0))
      fail("non-positive-odds-ratio", "confounding factors must be positive");
  }
}

}  // namespace

double ate_general(const AssumptionPoint& a, std::span<const double> e) {
  const std::size_t d = a.px.size();
  if (a.eps0.size() != d || a.eps1.size() != d || a.mu0.size() != d ||
      a.mu1.size() != d || e.size() != d)
    fail("length-mismatch", "assumption point fields must share one grid");
  check_px(a.px);
  check_eps(a.eps0, a.eps1, a.px);
  return kern::tau_general(a.px.data(), a.mu0.data(), a.mu1.data(), e.data(),
                           a.eps0.data(), a.eps1.data(), d);
}

double ate_unconfounded(std::span<const double> mu0,
                        std::span<const double> mu1,
                        std::span<const double> px) {
  if (mu0.size() != px.size() || mu1.size() != px.size())
    fail("length-mismatch", "mu and px must share one grid");
  check_px(px);
  return kern::effect_dot(px.data(), mu1.data(), mu0.data(), px.size());
}

double ate_ipw(std::span<const double> eps0, std::span<const double> eps1,
               std::span<const double> e, const JointDistribution& joint) {
  const std::size_t d = static_cast<std::size_t>(joint.d);
  if (eps0.size() != d || eps1.size() != d || e.size() != d ||
      joint.p.size() != 4 * d)
    fail("length-mismatch", "joint distribution fields must share one grid");

  double total = 0.0;
  for (double v : joint.p) {
    if (!(v >= 0.0)) fail("unnormalized-px", "joint entries must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > kNormTol)
    fail("unnormalized-px", "joint distribution must sum to 1");

  double acc = 0.0;
  for (std::size_t x = 0; x < d; ++x) {
    const double mass = joint.cell_mass(static_cast<int>(x));
    if (mass == 0.0) continue;
    if (!(e[x] > 0.0) || !(e[x] < 1.0))
      fail("propensity-overlap-violation",
           "cell with mass needs a treated fraction strictly inside (0,1)");
    if (!(eps0[x] > 0.0) || !(eps1[x] > 0.0))
      fail("non-positive-odds-ratio", "confounding factors must be positive");
    const double w1 = e[x] + (1.0 - e[x]) / eps1[x];
    const double w0 = e[x] * eps0[x] + 1.0 - e[x];
    const int xi = static_cast<int>(x);
    // only y = 1 entries contribute
    acc += w1 * joint.at(xi, 1, 1) / e[x];
    acc -= w0 * joint.at(xi, 0, 1) / (1.0 - e[x]);
  }
  return acc;
}

}  // namespace causalsens
