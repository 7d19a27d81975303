#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "causalsens/divergence.hpp"
#include "causalsens/estimand.hpp"
#include "causalsens/model.hpp"

namespace causalsens {

enum class SpaceKind { CovariateSubset, OutcomeSubgroup, EpsilonSubset };

// One parameterized family of assumption configurations: a single component
// of the baseline is freed over a finite-dimensional feasible set while the
// rest stays pinned at its estimate. The effect restricted to the family is
// affine in solver coordinates, so tau_theta goes through a precomputed
// coefficient vector; embed materializes the full configuration.
struct AssumptionSpace {
  SpaceKind kind = SpaceKind::CovariateSubset;
  std::string label;
  BaselineEstimate baseline;
  DivergenceKind divergence = DivergenceKind::KLCategorical;
  int free_dim = 0;
  std::vector<double> baseline_theta;

  // CovariateSubset / EpsilonSubset
  std::vector<int> subset;      // covariate indices in grid order
  std::vector<int> subset_arities;
  int levels = 0;               // number of subset level tuples
  std::vector<int> cell_level;  // grid cell -> subset level tuple index
  std::vector<double> cond;     // covariate spaces: q(x_-J | x_J), with an
                                // independence fallback on zero-mass levels

  // OutcomeSubgroup
  int arm = -1;
  std::vector<int> selected_cells;  // canonical cell order

  // Affine form of the effect in solver coordinates: theta itself for
  // simplex/box spaces, (eps0, 1/eps1) level blocks for epsilon spaces.
  double tau_c0 = 0.0;
  std::vector<double> tau_w;

  // Coordinates that cannot move at finite divergence (zero baseline mass,
  // degenerate baseline mean); the solver holds them at the baseline value.
  std::vector<std::uint8_t> pinned;

  double tau_theta(std::span<const double> theta) const;
  double tau_coords(std::span<const double> coords) const;
  double divergence_theta(std::span<const double> theta) const;
  std::vector<double> coords_of_theta(std::span<const double> theta) const;
  std::vector<double> theta_of_coords(std::span<const double> coords) const;
  void validate_theta(std::span<const double> theta) const;
  AssumptionPoint embed(std::span<const double> theta) const;
};

AssumptionSpace covariate_subset_space(const BaselineEstimate& base,
                                       std::vector<int> subset);
AssumptionSpace outcome_subgroup_space(
    const BaselineEstimate& base, int arm,
    const std::function<bool(std::span<const int>)>& predicate,
    std::string label);
AssumptionSpace epsilon_subset_space(const BaselineEstimate& base,
                                     std::vector<int> subset);

std::vector<int> resolve_covariates(const CovariateGrid& grid,
                                    const std::vector<std::string>& names);

// Sensitivity values per space label, sorted non-increasing with
// lexicographic tie-break on the label.
struct Ranking {
  std::vector<std::pair<std::string, double>> entries;
};

Ranking rank_spaces(std::vector<std::pair<std::string, double>> entries);

// Rank correlation of two rankings over one label set, via squared rank
// differences: 1 - 6*sum(d^2) / (n(n^2-1)).
double spearman(const Ranking& a, const Ranking& b);

}  // namespace causalsens
