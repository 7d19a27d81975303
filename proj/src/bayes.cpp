#include "causalsens/bayes.hpp"

#include <cmath>

#include "causalsens/errors.hpp"
#include "causalsens/kernels.hpp"

namespace causalsens {

namespace {

constexpr double kNormTol = 1e-9;

void check_compat(const Prior& prior, const AssumptionSpace& space) {
  const int d = space.free_dim;
  switch (prior.kind) {
    case Prior::Kind::Dirichlet:
      if (space.kind != SpaceKind::CovariateSubset)
        fail("incompatible-prior", "Dirichlet priors pair with covariate spaces");
      if (static_cast<int>(prior.alpha.size()) != d)
        fail("incompatible-prior", "alpha length does not match the space");
      for (double a : prior.alpha)
        if (!(a > 0.0)) fail("incompatible-prior", "alpha must be positive");
      return;
    case Prior::Kind::UniformSimplex:
      if (space.kind != SpaceKind::CovariateSubset)
        fail("incompatible-prior", "simplex priors pair with covariate spaces");
      return;
    case Prior::Kind::BetaMeans:
      if (space.kind != SpaceKind::OutcomeSubgroup)
        fail("incompatible-prior", "Beta priors pair with outcome subgroups");
      if (static_cast<int>(prior.beta_params.size()) != d)
        fail("incompatible-prior", "Beta parameter count does not match");
      for (const auto& [a, b] : prior.beta_params)
        if (!(a > 0.0) || !(b > 0.0))
          fail("incompatible-prior", "Beta parameters must be positive");
      return;
    case Prior::Kind::UniformBox:
      if (space.kind != SpaceKind::OutcomeSubgroup)
        fail("incompatible-prior", "box priors pair with outcome subgroups");
      return;
    case Prior::Kind::TruncGaussianEps:
      if (space.kind != SpaceKind::EpsilonSubset)
        fail("incompatible-prior",
             "truncated Gaussian priors pair with epsilon spaces");
      if (!(prior.sigma > 0.0))
        fail("incompatible-prior", "sigma must be positive");
      return;
    case Prior::Kind::PointMass:
      if (static_cast<int>(prior.point.size()) != d)
        fail("incompatible-prior", "point length does not match the space");
      space.validate_theta(prior.point);
      return;
  }
  fail("incompatible-prior", "unknown prior kind");
}

}  // namespace

std::vector<double> fit_dirichlet(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2)
    fail("too-few-rows", "Dirichlet fit needs at least two rows");
  const std::size_t d = rows[0].size();
  if (d < 2) fail("length-mismatch", "probability vectors need >= 2 components");
  for (const auto& r : rows) {
    if (r.size() != d)
      fail("length-mismatch", "rows must have equal length");
    double s = 0.0;
    for (double v : r) {
      if (!(v >= 0.0)) fail("unnormalized", "row entries must be nonnegative");
      s += v;
    }
    if (std::abs(s - 1.0) > kNormTol) fail("unnormalized", "rows must sum to 1");
  }

  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i) mean[i] += r[i];
  for (double& m : mean) m /= n;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < d; ++i) {
      const double dlt = r[i] - mean[i];
      var[i] += dlt * dlt;
    }
  for (double& v : var) v /= (n - 1.0);

  // pool the precision implied per component: var_i = m_i(1-m_i)/(s+1)
  double s_acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (!(var[i] > 0.0))
      fail("degenerate-variance",
           "component " + std::to_string(i) + " has zero sample variance");
    s_acc += mean[i] * (1.0 - mean[i]) / var[i] - 1.0;
  }
  const double s = s_acc / static_cast<double>(d);
  if (!(s > 0.0))
    fail("degenerate-variance", "implied precision is not positive");

  std::vector<double> alpha(d);
  for (std::size_t i = 0; i < d; ++i) alpha[i] = s * mean[i];
  return alpha;
}

std::vector<std::pair<double, double>> fit_beta_means(
    const std::vector<double>& means,
    const std::vector<std::optional<double>>& variances) {
  if (!variances.empty() && variances.size() != means.size())
    fail("length-mismatch", "means and variances must align");
  std::vector<std::pair<double, double>> out;
  out.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double m = means[i];
    if (!(m > 0.0 && m < 1.0))
      fail("bad-mean", "Beta fitting needs means strictly inside (0, 1)");
    double s = 10.0;  // default precision without variance data
    if (i < variances.size() && variances[i]) {
      const double v = *variances[i];
      if (!(v > 0.0) || v >= m * (1.0 - m))
        fail("degenerate-variance", "variance incompatible with a Beta");
      s = m * (1.0 - m) / v - 1.0;
    }
    out.emplace_back(m * s, (1.0 - m) * s);
  }
  return out;
}

void sample_prior(const Prior& prior, const AssumptionSpace& space, Rng& rng,
                  std::vector<double>& out) {
  check_compat(prior, space);
  const int d = space.free_dim;
  out.resize(d);
  switch (prior.kind) {
    case Prior::Kind::Dirichlet: {
      double z = 0.0;
      for (int i = 0; i < d; ++i) {
        out[i] = rng.gamma(prior.alpha[i]);
        z += out[i];
      }
      for (double& v : out) v /= z;
      return;
    }
    case Prior::Kind::UniformSimplex: {
      double z = 0.0;
      for (int i = 0; i < d; ++i) {
        out[i] = rng.exponential();
        z += out[i];
      }
      for (double& v : out) v /= z;
      return;
    }
    case Prior::Kind::BetaMeans:
      for (int i = 0; i < d; ++i)
        out[i] = rng.beta(prior.beta_params[i].first, prior.beta_params[i].second);
      return;
    case Prior::Kind::UniformBox:
      for (int i = 0; i < d; ++i) out[i] = rng.uniform();
      return;
    case Prior::Kind::TruncGaussianEps: {
      // draws live in (eps0, 1/eps1) coordinates around no confounding
      const int levels = space.levels;
      for (int v = 0; v < levels; ++v)
        out[v] = rng.trunc_normal_positive(1.0, prior.sigma);
      for (int v = 0; v < levels; ++v)
        out[levels + v] = 1.0 / rng.trunc_normal_positive(1.0, prior.sigma);
      return;
    }
    case Prior::Kind::PointMass:
      std::copy(prior.point.begin(), prior.point.end(), out.begin());
      return;
  }
}

std::vector<double> sample_prior(const Prior& prior,
                                 const AssumptionSpace& space, Rng& rng) {
  std::vector<double> out;
  sample_prior(prior, space, rng, out);
  return out;
}

ReversalEstimate wilson_interval(std::int64_t successes, std::int64_t k) {
  if (k <= 0) fail("too-few", "interval needs a positive sample size");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(k);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  ReversalEstimate r;
  r.estimate = p;
  r.k = k;
  r.lo = std::max(0.0, center - half);
  r.hi = std::min(1.0, center + half);
  return r;
}

ReversalEstimate reversal_probability(const AssumptionSpace& space,
                                      const Prior& prior,
                                      const DecisionSpec& spec, std::int64_t k,
                                      std::uint64_t seed) {
  if (k <= 0) fail("too-few", "draw count must be positive");
  check_compat(prior, space);
  Rng rng(seed);
  std::vector<double> theta;
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < k; ++i) {
    sample_prior(prior, space, rng, theta);
    if (space.tau_theta(theta) <= spec.delta) ++hits;
  }
  return wilson_interval(hits, k);
}

BsvReport bsv(const AssumptionSpace& space, const Prior& prior,
              const DecisionSpec& spec, std::int64_t m_target,
              std::int64_t n_max, std::uint64_t seed,
              std::int64_t reversal_k) {
  if (m_target <= 0 || n_max <= 0)
    fail("too-few", "sample budgets must be positive");
  check_compat(prior, space);

  const double tau_hat = space.tau_theta(space.baseline_theta);
  if (!(tau_hat > spec.delta))
    fail("baseline-already-reversed",
         "the baseline effect does not exceed delta; nothing to stress");

  BsvReport rep;
  rep.seed = seed;

  Rng rng(seed);
  std::vector<double> theta;
  double sum = 0.0, sum_sq = 0.0;
  while (rep.m_accepted < m_target && rep.n_drawn < n_max) {
    sample_prior(prior, space, rng, theta);
    ++rep.n_drawn;
    if (space.tau_theta(theta) > spec.delta) continue;
    const double value = to_sensitivity(space.divergence_theta(theta));
    sum += value;
    sum_sq += value * value;
    ++rep.m_accepted;
  }

  if (rep.m_accepted == 0) {
    rep.no_accepted_samples = true;
    rep.bsv = 0.0;  // lower bound: nothing in the reversal region was seen
  } else {
    rep.bsv = sum / static_cast<double>(rep.m_accepted);
    if (rep.m_accepted >= 2) {
      const double m = static_cast<double>(rep.m_accepted);
      const double var = std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0));
      rep.mc_stderr = std::sqrt(var / m);
    }
  }
  rep.budget_exhausted = rep.m_accepted < m_target;
  rep.acceptance_rate = rep.n_drawn > 0
                            ? static_cast<double>(rep.m_accepted) /
                                  static_cast<double>(rep.n_drawn)
                            : 0.0;
  if (reversal_k > 0)
    rep.reversal = reversal_probability(space, prior, spec, reversal_k,
                                        mix_seed(seed, "reversal"));
  return rep;
}

}  // namespace causalsens
