#pragma once

#include <cstdint>
#include <vector>

#include "causalsens/model.hpp"

namespace causalsens {

// Synthetic binary-covariate generator with treatment-by-covariate
// interactions, confounded assignment, and outcome-dependent selection.
// replicate_map appends exact copies of base covariates (values and every
// coefficient), which yields perfectly collinear columns on purpose.
struct SimConfig {
  std::vector<double> bern;     // P(X_j = 1) per base covariate
  std::vector<double> t_coeff;  // assignment logit weights
  double beta = 0.0;            // treatment main effect on the outcome logit
  std::vector<double> gamma;    // outcome logit weights
  std::vector<double> delta;    // treatment-interaction weights
  double sel_y = 0.0;           // selection logit weight on y
  double sel_t = 0.0;           // selection logit weight on t
  std::vector<double> sel_x;    // selection logit weights on x
  std::vector<int> replicate_map;  // base covariate index per appended copy

  std::size_t base_covariates() const { return bern.size(); }
  std::size_t covariates() const { return bern.size() + replicate_map.size(); }

  // Canonical constant sets for 4, 6, and 8 covariates. preset(6) appends
  // duplicated columns via replicate_map; preset(8) repeats the base pattern
  // as independent draws so no subset-marginal level is left empty.
  static SimConfig preset(int covariates);
};

// Observational draw: confounded assignment plus selection; only selected
// rows are returned, so the result usually has fewer than n rows.
Dataset simulate_observational(const SimConfig& cfg, std::int64_t n,
                               std::uint64_t seed);

// Randomized, unselected draw from the same outcome model: T ~ Ber(0.5),
// every row kept. Plug-in effects on this variant converge to true_ate.
Dataset simulate_unbiased(const SimConfig& cfg, std::int64_t n,
                          std::uint64_t seed);

// Exact population effect by enumeration of the base covariate patterns.
double true_ate(const SimConfig& cfg);

}  // namespace causalsens
