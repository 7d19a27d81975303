#include "causalsens/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causalsens/errors.hpp"
#include "causalsens/kernels.hpp"

namespace causalsens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEpsFloor = 1e-8;     // lower bound for eps coordinates
constexpr double kLambdaLimit = 1e6;   // dual blow-up treated as infeasible
constexpr double kTinyMass = 1e-300;   // keeps mirror iterates interior

// Infimum of the affine effect over the finite-divergence part of the
// feasible set; decides up front whether any reversal is reachable.
double inf_tau(const AssumptionSpace& sp) {
  switch (sp.kind) {
    case SpaceKind::CovariateSubset: {
      double m = kInf;
      for (int v = 0; v < sp.free_dim; ++v)
        if (!sp.pinned[v]) m = std::min(m, sp.tau_w[v]);
      return m;
    }
    case SpaceKind::OutcomeSubgroup: {
      double acc = sp.tau_c0;
      for (int j = 0; j < sp.free_dim; ++j)
        acc += sp.pinned[j] ? sp.tau_w[j] * sp.baseline_theta[j]
                            : std::min(0.0, sp.tau_w[j]);
      return acc;
    }
    case SpaceKind::EpsilonSubset: {
      // eps0 coefficients are nonpositive; any strictly negative one lets
      // the effect fall without bound
      for (int v = 0; v < sp.levels; ++v)
        if (sp.tau_w[v] < 0.0) return -kInf;
      double acc = sp.tau_c0;
      for (int v = 0; v < sp.levels; ++v)
        acc += sp.tau_w[sp.levels + v] * kEpsFloor;
      return acc;
    }
  }
  fail("bad-kind", "unreachable");
}

struct Inner {
  std::function<std::vector<double>(double, std::span<const double>)> argmin;
  std::vector<double> start;
};

// Entropic inner minimizer over the support of theta_hat; one unit step of
// the multiplicative update already lands on the exact argmin, the loop and
// halving are a safety net.
Inner make_simplex_inner(const AssumptionSpace& sp, const SolverOptions& opts) {
  std::vector<int> sup;
  for (int v = 0; v < sp.free_dim; ++v)
    if (!sp.pinned[v]) sup.push_back(v);

  std::vector<double> ref(sup.size()), w(sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i) {
    ref[i] = sp.baseline_theta[sup[i]];
    w[i] = sp.tau_w[sup[i]];
  }

  Inner in;
  in.start.assign(sp.free_dim, 0.0);
  {
    const double u = 1.0 / static_cast<double>(sup.size());
    double z = 0.0;
    for (std::size_t i = 0; i < sup.size(); ++i) z += 0.999 * ref[i] + 0.001 * u;
    for (std::size_t i = 0; i < sup.size(); ++i)
      in.start[sup[i]] = (0.999 * ref[i] + 0.001 * u) / z;
  }

  const int inner_iters = opts.inner_iters;
  in.argmin = [sup, ref, w, inner_iters,
               &sp](double lambda, std::span<const double> warm) {
    const std::size_t m = sup.size();
    std::vector<double> th(m), g(m);
    for (std::size_t i = 0; i < m; ++i)
      th[i] = std::max(warm[sup[i]], kTinyMass);

    const auto fval = [&](const std::vector<double>& t) {
      double kl = 0.0, lin = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        kl += t[i] * std::log(t[i] / ref[i]);
        lin += w[i] * t[i];
      }
      return kl + lambda * lin;
    };

    double step = 1.0;
    double f = fval(th);
    for (int it = 0; it < inner_iters; ++it) {
      for (std::size_t i = 0; i < m; ++i)
        g[i] = std::log(th[i] / ref[i]) + 1.0 + lambda * w[i];
      std::vector<double> cand = mirror_step(th, g, step);
      bool renorm = false;
      for (double& c : cand)
        if (c < kTinyMass) {
          c = kTinyMass;
          renorm = true;
        }
      if (renorm) {
        const double z = kern::sum(cand.data(), cand.size());
        for (double& c : cand) c /= z;
      }
      const double fc = fval(cand);
      if (fc <= f + 1e-15) {
        double delta = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          delta = std::max(delta, std::abs(cand[i] - th[i]));
        th.swap(cand);
        f = fc;
        if (delta < 1e-14) break;
      } else {
        step *= 0.5;
        if (step < 1e-6) break;
      }
    }

    std::vector<double> full(sp.free_dim, 0.0);
    for (std::size_t i = 0; i < m; ++i) full[sup[i]] = th[i];
    return full;
  };
  return in;
}

// Independent Bernoulli pairs, same entropic update per pair.
Inner make_box_inner(const AssumptionSpace& sp, const SolverOptions& opts) {
  Inner in;
  in.start = sp.baseline_theta;
  for (int j = 0; j < sp.free_dim; ++j)
    if (!sp.pinned[j]) in.start[j] = 0.999 * sp.baseline_theta[j] + 0.001 * 0.5;

  const int inner_iters = opts.inner_iters;
  in.argmin = [&sp, inner_iters](double lambda, std::span<const double> warm) {
    const double hi = 1.0 - 1e-15;
    std::vector<double> mu(warm.begin(), warm.end());

    const auto fval = [&](const std::vector<double>& t) {
      double acc = 0.0;
      for (int j = 0; j < sp.free_dim; ++j) {
        if (sp.pinned[j]) continue;
        const double r = sp.baseline_theta[j];
        acc += t[j] * std::log(t[j] / r) +
               (1.0 - t[j]) * std::log((1.0 - t[j]) / (1.0 - r)) +
               lambda * sp.tau_w[j] * t[j];
      }
      return acc;
    };

    double step = 1.0;
    double f = fval(mu);
    for (int it = 0; it < inner_iters; ++it) {
      std::vector<double> cand(mu);
      for (int j = 0; j < sp.free_dim; ++j) {
        if (sp.pinned[j]) continue;
        const double r = sp.baseline_theta[j];
        const double pair[2] = {mu[j], 1.0 - mu[j]};
        const double grad[2] = {std::log(pair[0] / r) + lambda * sp.tau_w[j],
                                std::log(pair[1] / (1.0 - r))};
        const std::vector<double> next = mirror_step(pair, grad, step);
        cand[j] = std::clamp(next[0], kTinyMass, hi);
      }
      const double fc = fval(cand);
      if (fc <= f + 1e-15) {
        double delta = 0.0;
        for (int j = 0; j < sp.free_dim; ++j)
          delta = std::max(delta, std::abs(cand[j] - mu[j]));
        mu.swap(cand);
        f = fc;
        if (delta < 1e-14) break;
      } else {
        step *= 0.5;
        if (step < 1e-6) break;
      }
    }
    return mu;
  };
  return in;
}

// Projected gradient on the quadratic divergence; step 1/2 is exact, the
// halving loop again only guards pathological inputs.
Inner make_eps_inner(const AssumptionSpace& sp, const SolverOptions& opts) {
  Inner in;
  in.start.assign(sp.free_dim, 1.0);

  const int inner_iters = opts.inner_iters;
  in.argmin = [&sp, inner_iters](double lambda, std::span<const double> warm) {
    std::vector<double> a(warm.begin(), warm.end());

    const auto fval = [&](const std::vector<double>& t) {
      return kern::sq_dist_one(t.data(), t.size()) +
             lambda * kern::dot(sp.tau_w.data(), t.data(), t.size());
    };

    double step = 0.5;
    double f = fval(a);
    for (int it = 0; it < inner_iters; ++it) {
      std::vector<double> cand(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double g = 2.0 * (a[i] - 1.0) + lambda * sp.tau_w[i];
        cand[i] = std::max(a[i] - step * g, kEpsFloor);
      }
      const double fc = fval(cand);
      if (fc <= f + 1e-15) {
        double delta = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
          delta = std::max(delta, std::abs(cand[i] - a[i]));
        a.swap(cand);
        f = fc;
        if (delta < 1e-14) break;
      } else {
        step *= 0.5;
        if (step < 1e-6) break;
      }
    }
    return a;
  };
  return in;
}

}  // namespace

std::vector<double> mirror_step(std::span<const double> p,
                                std::span<const double> g, double eta) {
  if (p.size() != g.size())
    fail("length-mismatch", "point and gradient must have equal length");
  if (p.empty()) fail("zero-mass-input", "empty simplex point");
  double shift = kInf;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0))
      fail("zero-mass-input", "mirror step needs strictly positive mass");
    shift = std::min(shift, eta * g[i]);
  }
  // the common shift cancels in the normalization and keeps exp in range
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = p[i] * std::exp(-(eta * g[i] - shift));
  const double z = kern::sum(out.data(), out.size());
  if (!(z > 0.0)) fail("zero-mass-input", "mirror step annihilated all mass");
  for (double& v : out) v /= z;
  return out;
}

DualAscentResult dual_ascent(
    const std::function<std::vector<double>(double, std::span<const double>)>&
        inner_argmin,
    const std::function<double(std::span<const double>)>& objective,
    const std::function<double(std::span<const double>)>& constraint,
    std::vector<double> coords0, const SolverOptions& opts) {
  DualAscentResult res;
  std::vector<double> coords = std::move(coords0);
  double lambda = 0.0;

  std::vector<double> best_coords;
  double best_obj = kInf;
  double best_violation = kInf;
  double prev_obj = kInf;
  SolveStatus status = SolveStatus::IterationLimit;
  int used = opts.outer_iters;

  for (int k = 1; k <= opts.outer_iters; ++k) {
    coords = inner_argmin(lambda, coords);
    const double h = constraint(coords);
    const double obj = objective(coords);

    best_violation = std::min(best_violation, h);
    if (h <= opts.tol_constraint && obj < best_obj) {
      best_obj = obj;
      best_coords = coords;
    }
    if (h <= opts.tol_constraint && std::abs(obj - prev_obj) <= opts.tol_gap) {
      status = SolveStatus::Converged;
      used = k;
      break;
    }
    prev_obj = obj;

    lambda = std::max(lambda + opts.eta * h, 0.0);
    if (lambda > kLambdaLimit && best_violation > opts.tol_constraint) {
      status = SolveStatus::Infeasible;
      used = k;
      break;
    }
  }

  res.status = status;
  res.lambda = lambda;
  res.outer_iters_used = used;
  res.coords = best_coords.empty() ? std::move(coords) : std::move(best_coords);
  res.constraint_at_opt = constraint(res.coords);
  return res;
}

WorstCaseReport worst_case(const AssumptionSpace& space,
                           const DecisionSpec& spec,
                           const SolverOptions& opts) {
  const double tau_hat = space.tau_theta(space.baseline_theta);
  if (!(tau_hat > spec.delta))
    fail("baseline-already-reversed",
         "the baseline effect does not exceed delta; nothing to stress");

  WorstCaseReport rep;
  const double lo = inf_tau(space);
  if (!(lo <= spec.delta)) {
    rep.status = SolveStatus::Infeasible;
    rep.value = 0.0;
    rep.divergence_at_opt = kInf;
    rep.tau_at_opt = lo;
    rep.argmin_theta = space.baseline_theta;
    return rep;
  }

  Inner inner;
  switch (space.kind) {
    case SpaceKind::CovariateSubset:
      inner = make_simplex_inner(space, opts);
      break;
    case SpaceKind::OutcomeSubgroup:
      inner = make_box_inner(space, opts);
      break;
    case SpaceKind::EpsilonSubset:
      inner = make_eps_inner(space, opts);
      break;
  }

  const auto objective = [&space](std::span<const double> coords) {
    switch (space.kind) {
      case SpaceKind::CovariateSubset:
        return kl_categorical(coords, space.baseline_theta);
      case SpaceKind::OutcomeSubgroup: {
        double acc = 0.0;
        for (int j = 0; j < space.free_dim; ++j)
          acc += bernoulli_kl(coords[j], space.baseline_theta[j]);
        return acc;
      }
      case SpaceKind::EpsilonSubset:
        return kern::sq_dist_one(coords.data(), coords.size());
    }
    fail("bad-kind", "unreachable");
  };
  const double delta = spec.delta;
  const auto constraint = [&space, delta](std::span<const double> coords) {
    return space.tau_coords(coords) - delta;
  };

  DualAscentResult r =
      dual_ascent(inner.argmin, objective, constraint, inner.start, opts);

  rep.status = r.status;
  rep.dual = r.lambda;
  rep.outer_iters_used = r.outer_iters_used;
  rep.argmin_theta = space.theta_of_coords(r.coords);

  if (r.status == SolveStatus::Infeasible) {
    rep.value = 0.0;
    rep.divergence_at_opt = kInf;
    rep.tau_at_opt = space.tau_theta(rep.argmin_theta);
    return rep;
  }
  if (r.status == SolveStatus::Converged &&
      r.constraint_at_opt > opts.tol_constraint)
    rep.status = SolveStatus::IterationLimit;

  // An exhausted budget still reports the best iterate; tau_at_opt tells the
  // caller how far from the boundary the ascent stopped.
  rep.divergence_at_opt = space.divergence_theta(rep.argmin_theta);
  rep.value = to_sensitivity(rep.divergence_at_opt);
  rep.tau_at_opt = space.tau_theta(rep.argmin_theta);
  return rep;
}

}  // namespace causalsens
