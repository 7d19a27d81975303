#pragma once

#include <functional>
#include <span>
#include <vector>

#include "causalsens/spaces.hpp"

namespace causalsens {

enum class SolveStatus { Converged, Infeasible, IterationLimit };

struct SolverOptions {
  double eta = 0.1;             // dual step size
  int inner_iters = 100;        // budget per primal minimization
  int outer_iters = 200000;     // dual ascent rounds
  double tol_constraint = 1e-7; // allowed effect slack above delta
  double tol_gap = 1e-10;       // primal objective change at convergence
};

struct WorstCaseReport {
  double value = 0.0;           // exp(-divergence_at_opt), 0 when infeasible
  double divergence_at_opt = 0.0;
  double tau_at_opt = 0.0;
  std::vector<double> argmin_theta;
  SolveStatus status = SolveStatus::Converged;
  double dual = 0.0;            // final multiplier
  int outer_iters_used = 0;
};

// Multiplicative-weights update on the simplex: p'_i proportional to
// p_i * exp(-eta * g_i). Shift-invariant in g and normalization-preserving.
std::vector<double> mirror_step(std::span<const double> p,
                                std::span<const double> g, double eta);

struct DualAscentResult {
  std::vector<double> coords;
  double lambda = 0.0;
  SolveStatus status = SolveStatus::Converged;
  int outer_iters_used = 0;
  double constraint_at_opt = 0.0;  // h(coords), <= tol at convergence
};

// Alternates coords <- inner_argmin(lambda, coords) with the multiplier
// update lambda <- max(lambda + eta * h(coords), 0); stops once h <=
// tol_constraint and the objective change falls below tol_gap. Declares
// infeasibility when lambda passes 1e6 with the best-seen h still positive.
// Returns the best feasible iterate seen (lowest objective).
DualAscentResult dual_ascent(
    const std::function<std::vector<double>(double, std::span<const double>)>&
        inner_argmin,
    const std::function<double(std::span<const double>)>& objective,
    const std::function<double(std::span<const double>)>& constraint,
    std::vector<double> coords0, const SolverOptions& opts);

// Smallest divergence from the baseline at which the decision flips, as a
// sensitivity value in [0, 1]; exact 0 when no finite-divergence point of
// the space reverses the decision.
WorstCaseReport worst_case(const AssumptionSpace& space,
                           const DecisionSpec& spec,
                           const SolverOptions& opts = {});

}  // namespace causalsens
