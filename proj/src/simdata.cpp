#include "causalsens/simdata.hpp"

#include <cmath>
#include <string>

#include "causalsens/errors.hpp"
#include "causalsens/rng.hpp"

namespace causalsens {

namespace {

double expit(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_config(const SimConfig& cfg) {
  const std::size_t k = cfg.bern.size();
  if (k == 0) fail("dimension-mismatch", "config needs at least one covariate");
  if (cfg.t_coeff.size() != k || cfg.gamma.size() != k ||
      cfg.delta.size() != k || cfg.sel_x.size() != k)
    fail("dimension-mismatch",
         "coefficient vectors must match the base covariate count");
  for (double p : cfg.bern)
    if (!(p > 0.0 && p < 1.0))
      fail("bad-level", "covariate rates must lie strictly inside (0, 1)");
  for (int src : cfg.replicate_map)
    if (src < 0 || src >= static_cast<int>(k))
      fail("dimension-mismatch", "replicate source index out of range");
}

// Coefficients extended over the appended copies.
std::vector<double> extend(const std::vector<double>& base,
                           const std::vector<int>& map) {
  std::vector<double> out = base;
  for (int src : map) out.push_back(base[src]);
  return out;
}

CovariateGrid sim_grid(const SimConfig& cfg) {
  const std::size_t k = cfg.covariates();
  std::vector<std::string> names;
  names.reserve(k);
  for (std::size_t i = 0; i < k; ++i) names.push_back("x" + std::to_string(i + 1));
  return build_grid(std::move(names), std::vector<int>(k, 2));
}

struct Coeffs {
  std::vector<double> t_coeff, gamma, delta, sel_x;
};

Coeffs extended(const SimConfig& cfg) {
  return Coeffs{extend(cfg.t_coeff, cfg.replicate_map),
                extend(cfg.gamma, cfg.replicate_map),
                extend(cfg.delta, cfg.replicate_map),
                extend(cfg.sel_x, cfg.replicate_map)};
}

double dot_bits(const std::vector<int>& x, const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) acc += w[i];
  return acc;
}

Dataset simulate(const SimConfig& cfg, std::int64_t n, std::uint64_t seed,
                 bool observational) {
  check_config(cfg);
  if (n < 0) fail("bad-level", "row count must be nonnegative");

  const std::size_t kb = cfg.base_covariates();
  const std::size_t k = cfg.covariates();
  const Coeffs co = extended(cfg);

  Dataset data;
  data.grid = sim_grid(cfg);

  Rng rng(seed);
  std::vector<int> x(k);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < kb; ++j)
      x[j] = rng.uniform() < cfg.bern[j] ? 1 : 0;
    for (std::size_t j = 0; j < cfg.replicate_map.size(); ++j)
      x[kb + j] = x[cfg.replicate_map[j]];

    const int t = observational
                      ? (rng.uniform() < expit(dot_bits(x, co.t_coeff)) ? 1 : 0)
                      : (rng.uniform() < 0.5 ? 1 : 0);
    const double y_logit =
        cfg.beta * t + dot_bits(x, co.gamma) + dot_bits(x, co.delta) * t;
    const int y = rng.uniform() < expit(y_logit) ? 1 : 0;

    if (observational) {
      const double s_logit = cfg.sel_y * y + cfg.sel_t * t + dot_bits(x, co.sel_x);
      if (!(rng.uniform() < expit(s_logit))) continue;
    }
    data.add_row(x, t, y);
  }
  return data;
}

}  // namespace

SimConfig SimConfig::preset(int covariates) {
  SimConfig cfg;
  cfg.bern = {0.4, 0.5, 0.6, 0.7};
  cfg.t_coeff = {0.0, -3.0, 0.0, 0.0};
  cfg.beta = 4.0;
  cfg.gamma = {1.0, -1.0, 1.0, 0.0};
  cfg.delta = {-2.0, -3.0, -1.0, -2.0};
  cfg.sel_y = 2.0;
  cfg.sel_t = 1.0;
  cfg.sel_x = {10.0, 10.0, 5.0, 1.0};
  switch (covariates) {
    case 4:
      break;
    case 6:
      cfg.replicate_map = {2, 3};
      break;
    case 8:
      // Eight process-independent covariates repeating the base pattern.
      // Duplicated columns would zero out entire subset-marginal levels,
      // collapsing every prior-weighted sensitivity on subsets that span a
      // duplicate pair; independent draws keep all cells populated.
      cfg.bern = {0.4, 0.5, 0.6, 0.7, 0.4, 0.5, 0.6, 0.7};
      cfg.t_coeff = {0.0, -3.0, 0.0, 0.0, 0.0, -3.0, 0.0, 0.0};
      cfg.gamma = {1.0, -1.0, 1.0, 0.0, 1.0, -1.0, 1.0, 0.0};
      cfg.delta = {-2.0, -3.0, -1.0, -2.0, -2.0, -3.0, -1.0, -2.0};
      cfg.sel_x = {10.0, 10.0, 5.0, 1.0, 10.0, 10.0, 5.0, 1.0};
      break;
    default:
      fail("dimension-mismatch", "presets exist for 4, 6, and 8 covariates");
  }
  return cfg;
}

Dataset simulate_observational(const SimConfig& cfg, std::int64_t n,
                               std::uint64_t seed) {
  return simulate(cfg, n, seed, true);
}

Dataset simulate_unbiased(const SimConfig& cfg, std::int64_t n,
                          std::uint64_t seed) {
  return simulate(cfg, n, seed, false);
}

double true_ate(const SimConfig& cfg) {
  check_config(cfg);
  const std::size_t kb = cfg.base_covariates();
  const std::size_t k = cfg.covariates();
  const Coeffs co = extended(cfg);

  double acc = 0.0;
  std::vector<int> x(k);
  for (std::uint64_t pat = 0; pat < (1ULL << kb); ++pat) {
    double p = 1.0;
    for (std::size_t j = 0; j < kb; ++j) {
      x[j] = (pat >> j) & 1;
      p *= x[j] ? cfg.bern[j] : 1.0 - cfg.bern[j];
    }
    for (std::size_t j = 0; j < cfg.replicate_map.size(); ++j)
      x[kb + j] = x[cfg.replicate_map[j]];
    const double base = dot_bits(x, co.gamma);
    const double m1 = expit(cfg.beta + base + dot_bits(x, co.delta));
    const double m0 = expit(base);
    acc += p * (m1 - m0);
  }
  return acc;
}

}  // namespace causalsens
