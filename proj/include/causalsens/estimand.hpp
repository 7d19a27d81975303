#pragma once

#include <span>
#include <vector>

namespace causalsens {

// Binary decision threshold: act when the effect exceeds delta.
struct DecisionSpec {
  double delta = 0.0;
};

inline bool decide(double tau, const DecisionSpec& spec) {
  return tau > spec.delta;
}

// One full assumption configuration: per-cell odds-ratio confounding factors
// by arm, per-cell outcome means by arm, and a covariate distribution.
struct AssumptionPoint {
  std::vector<double> eps0, eps1;  // strictly positive
  std::vector<double> mu0, mu1;    // in [0, 1]
  std::vector<double> px;          // nonnegative, sums to 1
};

// Effect under the given confounding factors; e is the per-cell treated
// fraction. Collapses to the unconfounded effect when eps0 = eps1 = 1.
double ate_general(const AssumptionPoint& a, std::span<const double> e);

double ate_unconfounded(std::span<const double> mu0,
                        std::span<const double> mu1,
                        std::span<const double> px);

// Joint distribution over (cell, t, y); p is indexed as 4*cell + 2*t + y.
struct JointDistribution {
  int d = 0;
  std::vector<double> p;

  double at(int cell, int t, int y) const { return p[4 * cell + 2 * t + y]; }
  double& at(int cell, int t, int y) { return p[4 * cell + 2 * t + y]; }
  double cell_mass(int cell) const {
    return p[4 * cell] + p[4 * cell + 1] + p[4 * cell + 2] + p[4 * cell + 3];
  }
};

// Weighted inverse-propensity form of the same effect, evaluated on a joint
// observable distribution; cross-checks ate_general on consistent inputs.
double ate_ipw(std::span<const double> eps0, std::span<const double> eps1,
               std::span<const double> e, const JointDistribution& joint);

}  // namespace causalsens
