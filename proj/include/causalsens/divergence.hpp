#pragma once

#include <cstdint>
#include <span>

namespace causalsens {

enum class DivergenceKind {
  KLCategorical,   // covariate distributions
  KLBernoulliSum,  // outcome means, summed over the varied entries
  SqEuclideanEps,  // confounding factors in (eps0, 1/eps1) coordinates
};

// KL(p || q) in nats; 0 log 0 = 0 and any p-mass outside supp(q) gives +inf.
double kl_categorical(std::span<const double> p, std::span<const double> q);

// Single Bernoulli KL(mu || muref); +inf when muref is degenerate and mu
// moves off it.
double bernoulli_kl(double mu, double muref);

// Sum of Bernoulli KLs over entries with active != 0.
double kl_outcome(std::span<const double> mu, std::span<const double> muref,
                  std::span<const std::uint8_t> active);

// sum (eps0 - 1)^2 + (1/eps1 - 1)^2, one term per varied level.
double sq_dist_eps(std::span<const double> eps0, std::span<const double> eps1);

// exp(-divergence); +inf maps to exactly 0.
double to_sensitivity(double divergence);

}  // namespace causalsens
