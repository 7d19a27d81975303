#include "causalsens/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "causalsens/errors.hpp"
#include "causalsens/kernels.hpp"

namespace causalsens {

namespace {

constexpr double kNormTol = 1e-9;

std::vector<int> checked_subset(const CovariateGrid& grid,
                                std::vector<int> subset) {
  if (subset.empty()) fail("empty-subset", "covariate subset must be nonempty");
  std::sort(subset.begin(), subset.end());
  if (std::adjacent_find(subset.begin(), subset.end()) != subset.end())
    fail("duplicate-name", "covariate subset has repeated entries");
  for (int j : subset)
    if (j < 0 || j >= static_cast<int>(grid.covariates()))
      fail("unknown-covariate", "covariate index out of range");
  return subset;
}

std::string subset_label(const char* prefix, const CovariateGrid& grid,
                         const std::vector<int>& subset) {
  std::string s = prefix;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) s += ',';
    s += grid.names[subset[i]];
  }
  return s;
}

// Per-cell index of the level tuple spanned by the subset covariates,
// lexicographic with the last subset covariate fastest.
void fill_level_map(const CovariateGrid& grid, const std::vector<int>& subset,
                    std::vector<int>& subset_arities,
                    std::vector<int>& cell_level, int& levels) {
  subset_arities.clear();
  for (int j : subset) subset_arities.push_back(grid.arities[j]);
  long long l = 1;
  for (int a : subset_arities) l *= a;
  levels = static_cast<int>(l);

  std::vector<int> substrides(subset.size(), 1);
  for (int i = static_cast<int>(subset.size()) - 2; i >= 0; --i)
    substrides[i] = substrides[i + 1] * subset_arities[i + 1];

  cell_level.assign(grid.d, 0);
  for (int c = 0; c < grid.d; ++c) {
    int v = 0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
      const int lev = (c / grid.strides[subset[i]]) % grid.arities[subset[i]];
      v += lev * substrides[i];
    }
    cell_level[c] = v;
  }
}

}  // namespace

AssumptionSpace covariate_subset_space(const BaselineEstimate& base,
                                       std::vector<int> subset) {
  AssumptionSpace sp;
  sp.kind = SpaceKind::CovariateSubset;
  sp.baseline = base;
  sp.divergence = DivergenceKind::KLCategorical;
  sp.subset = checked_subset(base.grid, std::move(subset));
  sp.label = subset_label("cov:", base.grid, sp.subset);
  fill_level_map(base.grid, sp.subset, sp.subset_arities, sp.cell_level,
                 sp.levels);
  sp.free_dim = sp.levels;

  // subset marginal and the conditional of the remaining covariates
  std::vector<double> marg(sp.levels, 0.0);
  for (int c = 0; c < base.grid.d; ++c) marg[sp.cell_level[c]] += base.qx[c];
  sp.baseline_theta = marg;

  // complement marginal for the independence fallback on zero-mass levels
  const int comp_cells = sp.levels > 0 ? base.grid.d / sp.levels : 0;
  std::vector<double> comp(std::max(comp_cells, 1), 0.0);
  std::vector<int> comp_index(base.grid.d, 0);
  {
    std::vector<int> comp_covs;
    for (std::size_t i = 0; i < base.grid.covariates(); ++i)
      if (!std::binary_search(sp.subset.begin(), sp.subset.end(),
                              static_cast<int>(i)))
        comp_covs.push_back(static_cast<int>(i));
    std::vector<int> strides(comp_covs.size(), 1);
    for (int i = static_cast<int>(comp_covs.size()) - 2; i >= 0; --i)
      strides[i] = strides[i + 1] * base.grid.arities[comp_covs[i + 1]];
    for (int c = 0; c < base.grid.d; ++c) {
      int u = 0;
      for (std::size_t i = 0; i < comp_covs.size(); ++i) {
        const int lev =
            (c / base.grid.strides[comp_covs[i]]) % base.grid.arities[comp_covs[i]];
        u += lev * strides[i];
      }
      comp_index[c] = u;
      comp[u] += base.qx[c];
    }
  }

  sp.cond.assign(base.grid.d, 0.0);
  sp.pinned.assign(sp.free_dim, 0);
  for (int c = 0; c < base.grid.d; ++c) {
    const double m = marg[sp.cell_level[c]];
    sp.cond[c] = m > 0.0 ? base.qx[c] / m : comp[comp_index[c]];
  }
  for (int v = 0; v < sp.levels; ++v)
    if (marg[v] == 0.0) sp.pinned[v] = 1;

  sp.tau_c0 = 0.0;
  sp.tau_w.assign(sp.free_dim, 0.0);
  for (int c = 0; c < base.grid.d; ++c)
    sp.tau_w[sp.cell_level[c]] += sp.cond[c] * (base.mu1[c] - base.mu0[c]);
  return sp;
}

AssumptionSpace outcome_subgroup_space(
    const BaselineEstimate& base, int arm,
    const std::function<bool(std::span<const int>)>& predicate,
    std::string label) {
  if (arm != 0 && arm != 1) fail("bad-arm", "arm must be 0 or 1");
  AssumptionSpace sp;
  sp.kind = SpaceKind::OutcomeSubgroup;
  sp.baseline = base;
  sp.divergence = DivergenceKind::KLBernoulliSum;
  sp.arm = arm;
  sp.label = std::move(label);

  for (int c = 0; c < base.grid.d; ++c) {
    const std::vector<int> lv = base.grid.levels_of(c);
    if (predicate(lv)) sp.selected_cells.push_back(c);
  }
  if (sp.selected_cells.empty())
    fail("empty-subgroup", "subgroup predicate selects no cells");

  sp.free_dim = static_cast<int>(sp.selected_cells.size());
  const std::vector<double>& mu = arm == 1 ? base.mu1 : base.mu0;
  sp.baseline_theta.reserve(sp.free_dim);
  sp.pinned.assign(sp.free_dim, 0);
  for (int i = 0; i < sp.free_dim; ++i) {
    const double m = mu[sp.selected_cells[i]];
    sp.baseline_theta.push_back(m);
    if (m == 0.0 || m == 1.0) sp.pinned[i] = 1;
  }

  // tau(theta) = c0 + sum_j w_j theta_j with the arm's selected entries
  // removed from the plug-in effect
  const double sign = arm == 1 ? 1.0 : -1.0;
  sp.tau_c0 = base.tau_hat();
  sp.tau_w.assign(sp.free_dim, 0.0);
  for (int i = 0; i < sp.free_dim; ++i) {
    const int c = sp.selected_cells[i];
    sp.tau_w[i] = sign * base.qx[c];
    sp.tau_c0 -= sp.tau_w[i] * mu[c];
  }
  return sp;
}

AssumptionSpace epsilon_subset_space(const BaselineEstimate& base,
                                     std::vector<int> subset) {
  AssumptionSpace sp;
  sp.kind = SpaceKind::EpsilonSubset;
  sp.baseline = base;
  sp.divergence = DivergenceKind::SqEuclideanEps;
  sp.subset = checked_subset(base.grid, std::move(subset));
  sp.label = subset_label("eps:", base.grid, sp.subset);
  fill_level_map(base.grid, sp.subset, sp.subset_arities, sp.cell_level,
                 sp.levels);

  // theta = [eps0 per level | eps1 per level]; solver coordinates replace
  // the second block by 1/eps1
  sp.free_dim = 2 * sp.levels;
  sp.baseline_theta.assign(sp.free_dim, 1.0);
  sp.pinned.assign(sp.free_dim, 0);

  sp.tau_w.assign(sp.free_dim, 0.0);
  double c0 = 0.0;
  for (int c = 0; c < base.grid.d; ++c) {
    const double q = base.qx[c];
    if (q == 0.0) continue;
    const int v = sp.cell_level[c];
    c0 += q * (base.mu1[c] * base.e[c] - base.mu0[c] * (1.0 - base.e[c]));
    sp.tau_w[v] -= q * base.mu0[c] * base.e[c];                    // eps0
    sp.tau_w[sp.levels + v] += q * base.mu1[c] * (1.0 - base.e[c]);  // 1/eps1
  }
  sp.tau_c0 = c0;
  return sp;
}

std::vector<int> resolve_covariates(const CovariateGrid& grid,
                                    const std::vector<std::string>& names) {
  std::vector<int> idx;
  idx.reserve(names.size());
  for (const auto& nm : names) {
    const int j = grid.find(nm);
    if (j < 0) fail("unknown-covariate", "no covariate named " + nm);
    idx.push_back(j);
  }
  return idx;
}

double AssumptionSpace::tau_coords(std::span<const double> coords) const {
  return tau_c0 + kern::dot(tau_w.data(), coords.data(), coords.size());
}

double AssumptionSpace::tau_theta(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != free_dim)
    fail("length-mismatch", "theta length does not match the space");
  if (kind != SpaceKind::EpsilonSubset) return tau_coords(theta);
  double acc = tau_c0;
  for (int v = 0; v < levels; ++v) {
    acc += tau_w[v] * theta[v];
    acc += tau_w[levels + v] * (1.0 / theta[levels + v]);
  }
  return acc;
}

std::vector<double> AssumptionSpace::coords_of_theta(
    std::span<const double> theta) const {
  std::vector<double> coords(theta.begin(), theta.end());
  if (kind == SpaceKind::EpsilonSubset)
    for (int v = 0; v < levels; ++v) coords[levels + v] = 1.0 / theta[levels + v];
  return coords;
}

std::vector<double> AssumptionSpace::theta_of_coords(
    std::span<const double> coords) const {
  std::vector<double> theta(coords.begin(), coords.end());
  if (kind == SpaceKind::EpsilonSubset)
    for (int v = 0; v < levels; ++v) theta[levels + v] = 1.0 / coords[levels + v];
  return theta;
}

double AssumptionSpace::divergence_theta(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != free_dim)
    fail("length-mismatch", "theta length does not match the space");
  switch (kind) {
    case SpaceKind::CovariateSubset:
      return kl_categorical(theta, baseline_theta);
    case SpaceKind::OutcomeSubgroup: {
      double acc = 0.0;
      for (int i = 0; i < free_dim; ++i) {
        const double term = bernoulli_kl(theta[i], baseline_theta[i]);
        if (std::isinf(term)) return term;
        acc += term;
      }
      return acc;
    }
    case SpaceKind::EpsilonSubset:
      return sq_dist_eps(theta.subspan(0, levels), theta.subspan(levels));
  }
  fail("bad-kind", "unreachable");
}

void AssumptionSpace::validate_theta(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != free_dim)
    fail("infeasible-theta", "theta length does not match the space");
  switch (kind) {
    case SpaceKind::CovariateSubset: {
      double s = 0.0;
      for (double v : theta) {
        if (!(v >= 0.0))
          fail("infeasible-theta", "simplex coordinates must be nonnegative");
        s += v;
      }
      if (std::abs(s - 1.0) > kNormTol)
        fail("infeasible-theta", "simplex coordinates must sum to 1");
      return;
    }
    case SpaceKind::OutcomeSubgroup:
      for (double v : theta)
        if (!(v >= 0.0 && v <= 1.0))
          fail("infeasible-theta", "outcome means must lie in [0, 1]");
      return;
    case SpaceKind::EpsilonSubset:
      for (double v : theta)
        if (!(v > 0.0))
          fail("infeasible-theta", "confounding factors must be positive");
      return;
  }
}

AssumptionPoint AssumptionSpace::embed(std::span<const double> theta) const {
  validate_theta(theta);
  const int d = baseline.grid.d;
  AssumptionPoint a;
  a.eps0.assign(d, 1.0);
  a.eps1.assign(d, 1.0);
  a.mu0 = baseline.mu0;
  a.mu1 = baseline.mu1;
  a.px = baseline.qx;
  switch (kind) {
    case SpaceKind::CovariateSubset:
      for (int c = 0; c < d; ++c) a.px[c] = theta[cell_level[c]] * cond[c];
      break;
    case SpaceKind::OutcomeSubgroup: {
      std::vector<double>& mu = arm == 1 ? a.mu1 : a.mu0;
      for (int i = 0; i < free_dim; ++i) mu[selected_cells[i]] = theta[i];
      break;
    }
    case SpaceKind::EpsilonSubset:
      for (int c = 0; c < d; ++c) {
        a.eps0[c] = theta[cell_level[c]];
        a.eps1[c] = theta[levels + cell_level[c]];
      }
      break;
  }
  return a;
}

Ranking rank_spaces(std::vector<std::pair<std::string, double>> entries) {
  if (entries.empty()) fail("empty-entries", "nothing to rank");
  std::set<std::string> seen;
  for (const auto& [label, value] : entries) {
    if (!seen.insert(label).second)
      fail("duplicate-name", "ranking labels must be unique: " + label);
    if (!(value >= 0.0 && value <= 1.0))
      fail("bad-value", "sensitivity values must lie in [0, 1]");
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return Ranking{std::move(entries)};
}

double spearman(const Ranking& a, const Ranking& b) {
  const std::size_t n = a.entries.size();
  if (n != b.entries.size())
    fail("label-mismatch", "rankings cover different label sets");
  if (n < 2) fail("too-few", "rank correlation needs at least two entries");
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos[a.entries[i].first] = i;
  double sum_d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = pos.find(b.entries[i].first);
    if (it == pos.end())
      fail("label-mismatch", "rankings cover different label sets");
    const double diff = static_cast<double>(i) - static_cast<double>(it->second);
    sum_d2 += diff * diff;
  }
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * sum_d2 / (nn * (nn * nn - 1.0));
}

}  // namespace causalsens
