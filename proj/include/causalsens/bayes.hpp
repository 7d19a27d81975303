#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causalsens/rng.hpp"
#include "causalsens/spaces.hpp"

namespace causalsens {

// Prior over the free parameter of one assumption space. Simplex priors go
// with covariate spaces, per-entry priors on [0,1] with outcome subgroups,
// and the truncated Gaussian (centered at no confounding) with epsilon
// spaces. There is deliberately no flat prior on the epsilon spaces: their
// support is unbounded.
struct Prior {
  enum class Kind {
    Dirichlet,
    UniformSimplex,
    BetaMeans,
    UniformBox,
    TruncGaussianEps,
    PointMass,
  };
  Kind kind = Kind::UniformSimplex;
  std::vector<double> alpha;                        // Dirichlet
  std::vector<std::pair<double, double>> beta_params;  // BetaMeans
  double sigma = 1.0;                               // TruncGaussianEps
  std::vector<double> point;                        // PointMass
};

// Method-of-moments Dirichlet fit: component means plus a precision pooled
// from the per-component variance identity var = m(1-m)/(s+1).
std::vector<double> fit_dirichlet(const std::vector<std::vector<double>>& rows);

// Per-entry Beta parameters matched to subgroup rate means (and variances
// when available; entries without one get precision 10).
std::vector<std::pair<double, double>> fit_beta_means(
    const std::vector<double>& means,
    const std::vector<std::optional<double>>& variances);

void sample_prior(const Prior& prior, const AssumptionSpace& space, Rng& rng,
                  std::vector<double>& out);
std::vector<double> sample_prior(const Prior& prior,
                                 const AssumptionSpace& space, Rng& rng);

struct ReversalEstimate {
  double estimate = 0.0;
  std::int64_t k = 0;
  double lo = 0.0, hi = 0.0;  // 95% Wilson interval
};

ReversalEstimate wilson_interval(std::int64_t successes, std::int64_t k);

// Monte Carlo probability that a prior draw lands in the reversal region.
ReversalEstimate reversal_probability(const AssumptionSpace& space,
                                      const Prior& prior,
                                      const DecisionSpec& spec, std::int64_t k,
                                      std::uint64_t seed);

struct BsvReport {
  double bsv = 0.0;
  std::int64_t m_accepted = 0;
  std::int64_t n_drawn = 0;
  double acceptance_rate = 0.0;
  double mc_stderr = 0.0;
  ReversalEstimate reversal;
  std::uint64_t seed = 0;
  bool no_accepted_samples = false;  // empty reversal region within budget
  bool budget_exhausted = false;     // hit n_max before m_target acceptances
};

// Mean sensitivity over prior draws conditioned on reversal: draws until
// m_target acceptances (or n_max draws), averaging exp(-divergence) over the
// accepted points. Acceptance uses the non-strict reversal check tau <=
// delta, evaluated exactly as tau_theta reports it. A separate stream of
// reversal_k draws estimates the reversal probability for the report.
BsvReport bsv(const AssumptionSpace& space, const Prior& prior,
              const DecisionSpec& spec, std::int64_t m_target,
              std::int64_t n_max, std::uint64_t seed,
              std::int64_t reversal_k = 100000);

}  // namespace causalsens
