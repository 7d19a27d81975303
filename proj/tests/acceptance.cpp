// Acceptance gate: each numbered check prints one [PASS]/[FAIL] line and the
// process exits nonzero if any check fails. Expected values come from the
// independent oracles coded here (dense grids, quadrature, enumeration),
// never from the library's own solvers.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "causalsens/bayes.hpp"
#include "causalsens/errors.hpp"
#include "causalsens/estimand.hpp"
#include "causalsens/model.hpp"
#include "causalsens/rng.hpp"
#include "causalsens/simdata.hpp"
#include "causalsens/spaces.hpp"
#include "causalsens/worstcase.hpp"

namespace fs = std::filesystem;
using namespace causalsens;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s%s%s\n", pass ? "PASS" : "FAIL", idx, name,
              detail.empty() ? "" : " | ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

template <typename F>
void run_criterion(int idx, const char* name, F&& f) {
  try {
    auto [pass, detail] = f();
    report(idx, name, pass, detail);
  } catch (const Error& e) {
    report(idx, name, false, std::string(e.code()) + ": " + e.what());
  } catch (const std::exception& e) {
    report(idx, name, false, e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double xlogx_ratio(double p, double q) {
  return p > 0.0 ? p * std::log(p / q) : 0.0;
}

double kl_vec(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += xlogx_ratio(p[i], q[i]);
  return acc;
}

struct Stats {
  double mean = 0.0, sd = 0.0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(acc / static_cast<double>(v.size() - 1));
  return s;
}

BaselineEstimate one_cov_baseline(int arity, std::vector<double> qx,
                                  std::vector<double> mu0,
                                  std::vector<double> mu1,
                                  std::vector<double> e) {
  BaselineEstimate b;
  b.grid = build_grid({"x"}, {arity});
  b.qx = std::move(qx);
  b.mu0 = std::move(mu0);
  b.mu1 = std::move(mu1);
  b.e = std::move(e);
  b.counts.control.assign(arity, 50);
  b.counts.treated.assign(arity, 50);
  b.n = 100 * arity;
  return b;
}

// ---- criterion 1: ate_general at eps = 1 collapses to the plug-in ----

std::pair<bool, std::string> criterion_reduction() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform() * 16.0);
    AssumptionPoint a;
    a.eps0.assign(d, 1.0);
    a.eps1.assign(d, 1.0);
    a.mu0.resize(d);
    a.mu1.resize(d);
    a.px.resize(d);
    std::vector<double> e(d);
    double z = 0.0;
    for (int i = 0; i < d; ++i) {
      a.mu0[i] = rng.uniform();
      a.mu1[i] = rng.uniform();
      a.px[i] = 0.05 + rng.uniform();
      e[i] = 0.05 + 0.9 * rng.uniform();
      z += a.px[i];
    }
    for (double& p : a.px) p /= z;
    const double diff =
        std::abs(ate_general(a, e) - ate_unconfounded(a.mu0, a.mu1, a.px));
    worst = std::max(worst, diff);
  }
  const double secs = seconds_since(t0);
  const bool pass = worst < 1e-12 && secs < 1.0;
  return {pass, fmt("max |general - plugin| = %.2e over 1000 baselines, %.2fs",
                    worst, secs)};
}

// ---- criterion 2: worst case against dense grid oracles ----

// Boundary of {tau = delta} inside the simplex, scanned along theta_1; the
// constrained KL minimum always sits on it because the objective decreases
// toward the (infeasible) baseline.
double grid_oracle_cov(const std::vector<double>& theta_hat,
                       const std::vector<double>& effect, double delta) {
  const int d = static_cast<int>(theta_hat.size());
  double best = kInf;
  if (d == 2) {
    for (int i = 0; i <= 100000; ++i) {
      const double t = i * 1e-5;
      const std::vector<double> th = {t, 1.0 - t};
      if (th[0] * effect[0] + th[1] * effect[1] > delta) continue;
      best = std::min(best, kl_vec(th, theta_hat));
    }
    return best;
  }
  // d == 3: scan the boundary segment along each of the first two axes so a
  // segment nearly parallel to one of them is still sampled densely.
  for (int axis = 0; axis < 2; ++axis) {
    const int other = 1 - axis;
    const double div = effect[other] - effect[2];
    for (int i = 0; i <= 10000; ++i) {
      const double ta = i * 1e-4;
      const double tb =
          (delta - effect[2] - (effect[axis] - effect[2]) * ta) / div;
      const double t3 = 1.0 - ta - tb;
      if (tb < 0.0 || t3 < 0.0) continue;
      std::vector<double> th(3);
      th[axis] = ta;
      th[other] = tb;
      th[2] = t3;
      best = std::min(best, kl_vec(th, theta_hat));
    }
  }
  // Corner pieces where the plane exits the simplex.
  for (int v = 0; v < 3; ++v)
    if (effect[v] <= delta)
      best = std::min(best, xlogx_ratio(1.0, theta_hat[v]));
  return best;
}

std::pair<bool, std::string> criterion_worstcase_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(202);
  int checked = 0;
  double worst_gap = 0.0, worst_slack = -kInf;

  for (int rep = 0; rep < 200; ++rep) {
    const int arity = rep < 100 ? 2 : 3;
    std::vector<double> qx(arity), mu0(arity), mu1(arity), e(arity);
    double tau_hat = 0.0, min_eff = kInf;
    std::vector<double> effect(arity);
    for (;;) {
      double z = 0.0;
      for (int v = 0; v < arity; ++v) {
        qx[v] = 0.15 + 0.7 * rng.uniform();
        mu0[v] = 0.1 + 0.8 * rng.uniform();
        mu1[v] = 0.1 + 0.8 * rng.uniform();
        e[v] = 0.2 + 0.6 * rng.uniform();
        z += qx[v];
      }
      for (double& q : qx) q /= z;
      tau_hat = 0.0;
      min_eff = kInf;
      for (int v = 0; v < arity; ++v) {
        effect[v] = mu1[v] - mu0[v];
        tau_hat += qx[v] * effect[v];
        min_eff = std::min(min_eff, effect[v]);
      }
      if (arity == 3 && (std::abs(effect[1] - effect[2]) < 1e-6 ||
                         std::abs(effect[0] - effect[2]) < 1e-6))
        continue;
      if (tau_hat - min_eff >= 0.08) break;  // margin for a clean boundary
    }
    const double delta = min_eff + 0.25 * (tau_hat - min_eff);

    const BaselineEstimate base = one_cov_baseline(arity, qx, mu0, mu1, e);
    const AssumptionSpace sp = covariate_subset_space(base, {0});
    const WorstCaseReport rep_wc =
        worst_case(sp, DecisionSpec{delta}, SolverOptions{});
    if (rep_wc.status != SolveStatus::Converged)
      return {false, fmt("instance %d did not converge", rep)};

    const double oracle = grid_oracle_cov(qx, effect, delta);
    worst_gap = std::max(worst_gap, std::abs(rep_wc.divergence_at_opt - oracle));
    double tau_opt = 0.0;
    for (int v = 0; v < arity; ++v)
      tau_opt += rep_wc.argmin_theta[v] * effect[v];
    worst_slack = std::max(worst_slack, tau_opt - delta);
    ++checked;
  }

  // Hand instance A: effects (0.4, -0.2) at a fifty-fifty marginal, delta 0.
  const BaselineEstimate ha =
      one_cov_baseline(2, {0.5, 0.5}, {0.3, 0.5}, {0.7, 0.3}, {0.5, 0.5});
  const WorstCaseReport ra =
      worst_case(covariate_subset_space(ha, {0}), DecisionSpec{0.0}, {});
  const double oa = grid_oracle_cov({0.5, 0.5}, {0.4, -0.2}, 0.0);
  const bool hand_a = std::abs(ra.divergence_at_opt - oa) < 1e-3 &&
                      std::abs(ra.value - 0.9450) < 1e-3;

  // Hand instance B: single populated cell, e = 0.5, mu1 = 0.8, mu0 = 0.4;
  // tau(a, b) = 0.2 - 0.2 a + 0.4 b over (eps0, 1/eps1), squared distance.
  const BaselineEstimate hb =
      one_cov_baseline(2, {1.0, 0.0}, {0.4, 0.5}, {0.8, 0.5}, {0.5, 0.5});
  const WorstCaseReport rb =
      worst_case(epsilon_subset_space(hb, {0}), DecisionSpec{0.0}, {});
  double ob = kInf;
  for (int i = 1; i <= 3000; ++i)
    for (int j = 1; j <= 1500; ++j) {
      const double a = i * 1e-3, b = j * 1e-3;
      if (0.2 - 0.2 * a + 0.4 * b > 0.0) continue;
      ob = std::min(ob, (a - 1.0) * (a - 1.0) + (b - 1.0) * (b - 1.0));
    }
  const bool hand_b = std::abs(rb.divergence_at_opt - ob) < 1e-3 &&
                      std::abs(rb.value - 0.4493) < 1e-3;

  const double secs = seconds_since(t0);
  const bool pass = checked == 200 && worst_gap < 1e-3 &&
                    worst_slack <= 1e-6 && hand_a && hand_b && secs < 120.0;
  return {pass,
          fmt("200 random: max |D - grid| = %.2e, max slack = %.2e; hand A "
              "value %.4f (want 0.9450), hand B value %.4f (want 0.4493), %.1fs",
              worst_gap, worst_slack, ra.value, rb.value, secs)};
}

// ---- criterion 3: BSV against 1-D quadrature ----

std::pair<bool, std::string> criterion_bsv_quadrature() {
  const auto t0 = std::chrono::steady_clock::now();
  const BaselineEstimate base =
      one_cov_baseline(2, {0.5, 0.5}, {0.3, 0.5}, {0.7, 0.3}, {0.5, 0.5});
  const AssumptionSpace sp = covariate_subset_space(base, {0});
  Prior uni;
  uni.kind = Prior::Kind::UniformSimplex;
  const DecisionSpec spec{0.0};

  // Midpoint quadrature of exp(-KL) over the reversal region {theta_1 <=
  // 1/3}, normalized by the region mass; theta_1 is uniform on [0, 1].
  const double step = 1e-5;
  const int cells = static_cast<int>(std::llround((1.0 / 3.0) / step));
  double acc = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double t = (i + 0.5) * step;
    acc += std::exp(-(xlogx_ratio(t, 0.5) + xlogx_ratio(1.0 - t, 0.5)));
  }
  const double oracle = acc * step / (1.0 / 3.0);

  const BsvReport r = bsv(sp, uni, spec, 5000, 2000000, 33, 100000);
  const double tol = std::max(0.01, 3.0 * r.mc_stderr);
  const bool bsv_ok = std::abs(r.bsv - oracle) <= tol;
  const bool rev_ok = r.reversal.lo <= 1.0 / 3.0 && r.reversal.hi >= 1.0 / 3.0;
  const double secs = seconds_since(t0);
  const bool pass = bsv_ok && rev_ok && secs < 30.0;
  return {pass, fmt("bsv %.4f vs quadrature %.4f (tol %.4f); reversal "
                    "[%.4f, %.4f] covers 1/3; %.1fs",
                    r.bsv, oracle, tol, r.reversal.lo, r.reversal.hi, secs)};
}

// ---- criterion 4: BSV never beats the worst case by more than noise ----

std::pair<bool, std::string> criterion_dominance() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(404);
  int evaluated = 0, skipped = 0;
  double worst_excess = -kInf;

  for (int rep = 0; rep < 500; ++rep) {
    const int family = rep % 3;
    const int arity = 2 + static_cast<int>(rng.uniform() * 2.0);
    std::vector<double> qx(arity), mu0(arity), mu1(arity), e(arity);
    double z = 0.0;
    for (int v = 0; v < arity; ++v) {
      qx[v] = 0.15 + 0.7 * rng.uniform();
      mu0[v] = 0.15 + 0.7 * rng.uniform();
      mu1[v] = 0.15 + 0.7 * rng.uniform();
      e[v] = 0.25 + 0.5 * rng.uniform();
      z += qx[v];
    }
    for (double& q : qx) q /= z;
    const BaselineEstimate base = one_cov_baseline(arity, qx, mu0, mu1, e);

    AssumptionSpace sp;
    Prior prior;
    double delta = 0.0;
    if (family == 0) {
      sp = covariate_subset_space(base, {0});
      prior.kind = Prior::Kind::UniformSimplex;
      double tau_hat = 0.0, min_eff = kInf;
      for (int v = 0; v < arity; ++v) {
        tau_hat += qx[v] * (mu1[v] - mu0[v]);
        min_eff = std::min(min_eff, mu1[v] - mu0[v]);
      }
      if (tau_hat - min_eff < 0.05) {
        ++skipped;
        continue;
      }
      delta = min_eff + 0.3 * (tau_hat - min_eff);
    } else if (family == 1) {
      sp = outcome_subgroup_space(base, 1,
                                  [](std::span<const int>) { return true; },
                                  "out:t=1,all");
      prior.kind = Prior::Kind::UniformBox;
      double tau_hat = 0.0, tau_min = 0.0;
      for (int v = 0; v < arity; ++v) {
        tau_hat += qx[v] * (mu1[v] - mu0[v]);
        tau_min += qx[v] * (0.0 - mu0[v]);
      }
      delta = tau_min + 0.4 * (tau_hat - tau_min);
    } else {
      sp = epsilon_subset_space(base, {0});
      prior.kind = Prior::Kind::TruncGaussianEps;
      prior.sigma = 1.0;
      double tau_hat = 0.0, pull = 0.0;  // shift reachable at eps0 ~ 2
      for (int v = 0; v < arity; ++v) {
        tau_hat += qx[v] * (mu1[v] - mu0[v]);
        pull += qx[v] * mu0[v] * e[v];
      }
      delta = tau_hat - (0.2 + 0.5 * rng.uniform()) * pull;
    }

    const WorstCaseReport wc = worst_case(sp, DecisionSpec{delta}, {});
    if (wc.status != SolveStatus::Converged) {
      ++skipped;
      continue;
    }
    const BsvReport r =
        bsv(sp, prior, DecisionSpec{delta}, 600, 150000,
            mix_seed(4040, sp.label + std::to_string(rep)), 0);
    if (r.m_accepted < 2) {
      ++skipped;
      continue;
    }
    worst_excess = std::max(worst_excess, r.bsv - wc.value - 2.0 * r.mc_stderr);
    ++evaluated;
  }

  const double secs = seconds_since(t0);
  const bool pass =
      worst_excess <= 0.0 && evaluated >= 400 && secs < 600.0;
  return {pass, fmt("%d evaluated, %d skipped (infeasible or empty region); "
                    "max (bsv - worst - 2se) = %.2e; %.1fs",
                    evaluated, skipped, worst_excess, secs)};
}

// ---- criterion 5: empty reversal regions agree on exact zero ----

std::pair<bool, std::string> criterion_zero_agreement() {
  bool pass = true;
  std::string detail;

  // Covariate family: both effects positive, delta 0.
  {
    const BaselineEstimate b =
        one_cov_baseline(2, {0.5, 0.5}, {0.1, 0.2}, {0.5, 0.4}, {0.5, 0.5});
    const AssumptionSpace sp = covariate_subset_space(b, {0});
    Prior uni;
    uni.kind = Prior::Kind::UniformSimplex;
    const WorstCaseReport wc = worst_case(sp, DecisionSpec{0.0}, {});
    const BsvReport r = bsv(sp, uni, DecisionSpec{0.0}, 100, 2000, 5, 0);
    const ReversalEstimate rev =
        reversal_probability(sp, uni, DecisionSpec{0.0}, 10000, 6);
    pass = pass && wc.status == SolveStatus::Infeasible && wc.value == 0.0 &&
           r.bsv == 0.0 && r.no_accepted_samples && rev.estimate == 0.0;
    detail += fmt("cov %g/%g/%g", wc.value, r.bsv, rev.estimate);
  }

  // Outcome family: even the zero mean cannot push tau below delta.
  {
    const BaselineEstimate b =
        one_cov_baseline(2, {0.5, 0.5}, {0.2, 0.3}, {0.7, 0.6}, {0.5, 0.5});
    const AssumptionSpace sp = outcome_subgroup_space(
        b, 1, [](std::span<const int>) { return true; }, "out:t=1,all");
    Prior box;
    box.kind = Prior::Kind::UniformBox;
    const double tau_floor = 0.5 * (0.0 - 0.2) + 0.5 * (0.0 - 0.3);  // m = 0
    const double delta = tau_floor - 0.05;
    const WorstCaseReport wc = worst_case(sp, DecisionSpec{delta}, {});
    const BsvReport r = bsv(sp, box, DecisionSpec{delta}, 100, 2000, 7, 0);
    const ReversalEstimate rev =
        reversal_probability(sp, box, DecisionSpec{delta}, 10000, 8);
    pass = pass && wc.status == SolveStatus::Infeasible && wc.value == 0.0 &&
           r.bsv == 0.0 && r.no_accepted_samples && rev.estimate == 0.0;
    detail += fmt("; out %g/%g/%g", wc.value, r.bsv, rev.estimate);
  }

  // Confounding family: with mu0 = 0 the control side cannot move and the
  // treated side only grows, so tau never drops to delta.
  {
    const BaselineEstimate b =
        one_cov_baseline(2, {0.6, 0.4}, {0.0, 0.0}, {0.5, 0.4}, {0.5, 0.5});
    const AssumptionSpace sp = epsilon_subset_space(b, {0});
    Prior tg;
    tg.kind = Prior::Kind::TruncGaussianEps;
    tg.sigma = 1.5;
    const WorstCaseReport wc = worst_case(sp, DecisionSpec{0.0}, {});
    const BsvReport r = bsv(sp, tg, DecisionSpec{0.0}, 100, 2000, 9, 0);
    const ReversalEstimate rev =
        reversal_probability(sp, tg, DecisionSpec{0.0}, 10000, 10);
    pass = pass && wc.status == SolveStatus::Infeasible && wc.value == 0.0 &&
           r.bsv == 0.0 && r.no_accepted_samples && rev.estimate == 0.0;
    detail += fmt("; eps %g/%g/%g", wc.value, r.bsv, rev.estimate);
  }

  return {pass, detail + " (worst/bsv/reversal, all exactly 0)"};
}

// ---- criterion 6: subset-size trend on the 8-covariate generator ----

std::pair<bool, std::string> criterion_dimensionality() {
  const auto t0 = std::chrono::steady_clock::now();
  const SimConfig cfg = SimConfig::preset(8);
  const Dataset data = simulate_observational(cfg, 200000, 11);
  const BaselineEstimate base = fit_baseline(data, 1.0);
  // The observational plug-in effect is about -0.446 here; -0.46 sits close
  // enough below it that every subset's reversal region keeps enough uniform
  // prior mass for rejection sampling within the default draw budget.
  const DecisionSpec spec{-0.46};
  Prior uni;
  uni.kind = Prior::Kind::UniformSimplex;

  std::string detail;
  bool pass = true;
  for (int k = 5; k <= 7; ++k) {
    // Spread is measured over subsets with real acceptances; a subset whose
    // region the sampler never hits reports a flagged zero lower bound, and
    // letting such zeros into the spread would fabricate the dispersion this
    // check asserts. They must stay rare for the per-k statistics to stand.
    std::vector<double> wvals, bvals;
    int starved = 0;
    std::vector<int> subset(k);
    // enumerate k-combinations of the 8 covariates
    for (int i = 0; i < k; ++i) subset[i] = i;
    for (;;) {
      const AssumptionSpace sp = covariate_subset_space(base, subset);
      const WorstCaseReport wc = worst_case(sp, spec, {});
      if (wc.status != SolveStatus::Converged)
        return {false, fmt("worst case did not converge on %s", sp.label.c_str())};
      wvals.push_back(wc.value);
      const BsvReport r =
          bsv(sp, uni, spec, 5000, 2000000, mix_seed(1234, sp.label), 0);
      if (r.m_accepted >= 2)
        bvals.push_back(r.bsv);
      else
        ++starved;

      int i = k - 1;
      while (i >= 0 && subset[i] == 8 - k + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
    const Stats w = stats_of(wvals);
    const Stats b = stats_of(bvals);
    const int total = static_cast<int>(wvals.size());
    pass = pass && w.mean >= 0.9 && w.sd <= 0.05 && b.sd > w.sd &&
           starved * 10 <= total;
    detail += fmt("k=%d mean_w=%.4f sd_w=%.4f sd_bsv=%.4f starved=%d/%d; ", k,
                  w.mean, w.sd, b.sd, starved, total);
  }
  const double secs = seconds_since(t0);
  pass = pass && secs < 1200.0;
  return {pass, detail + fmt("%.1fs", secs)};
}

// ---- criterion 7: generator hits its marginals and assignment model ----

std::pair<bool, std::string> criterion_generator_fidelity() {
  const std::int64_t n = 100000;
  const SimConfig cfg = SimConfig::preset(4);
  const Dataset unb = simulate_unbiased(cfg, n, 2025);
  double worst_z = 0.0;

  std::vector<double> ones(4, 0.0);
  for (std::size_t i = 0; i < unb.n(); ++i) {
    const auto lv = unb.grid.levels_of(unb.cell[i]);
    for (int j = 0; j < 4; ++j) ones[j] += lv[j];
  }
  bool pass = true;
  for (int j = 0; j < 4; ++j) {
    const double p = cfg.bern[j];
    const double zscore = std::abs(ones[j] / static_cast<double>(n) - p) /
                          std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    worst_z = std::max(worst_z, zscore);
    pass = pass && zscore <= 3.0;
  }

  // Assignment check on a draw with the selection channels silenced, since
  // selection deliberately distorts the post-selection treated fractions.
  SimConfig neutral = cfg;
  neutral.sel_y = 0.0;
  neutral.sel_t = 0.0;
  neutral.sel_x = {0.0, 0.0, 0.0, 0.0};
  const Dataset obs = simulate_observational(neutral, n, 7);
  std::vector<double> rows(16, 0.0), hits(16, 0.0);
  for (std::size_t i = 0; i < obs.n(); ++i) {
    rows[obs.cell[i]] += 1.0;
    hits[obs.cell[i]] += obs.t[i];
  }
  for (int c = 0; c < 16; ++c) {
    if (rows[c] < 50.0) {
      pass = false;
      continue;
    }
    const auto lv = obs.grid.levels_of(c);
    double logit = 0.0;
    for (int j = 0; j < 4; ++j)
      if (lv[j]) logit += cfg.t_coeff[j];
    const double p = 1.0 / (1.0 + std::exp(-logit));
    const double zscore = std::abs(hits[c] / rows[c] - p) /
                          std::sqrt(p * (1.0 - p) / rows[c]);
    worst_z = std::max(worst_z, zscore);
    pass = pass && zscore <= 3.0;
  }
  return {pass, fmt("max |z| = %.2f over 4 marginals and 16 cell propensities",
                    worst_z)};
}

// ---- criterion 8: Dirichlet refitting ----

std::pair<bool, std::string> criterion_dirichlet_recovery() {
  const std::vector<std::vector<double>> targets = {{2.0, 2.0},
                                                    {1.0, 3.0, 6.0}};
  Rng rng(808);
  double worst_rel = 0.0;
  for (const auto& alpha : targets) {
    std::vector<std::vector<double>> rows(10000);
    for (auto& row : rows) {
      row.resize(alpha.size());
      double z = 0.0;
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        row[i] = rng.gamma(alpha[i]);
        z += row[i];
      }
      for (double& v : row) v /= z;
    }
    const auto fit = fit_dirichlet(rows);
    for (std::size_t i = 0; i < alpha.size(); ++i)
      worst_rel = std::max(worst_rel, std::abs(fit[i] - alpha[i]) / alpha[i]);
  }
  return {worst_rel <= 0.10,
          fmt("max relative error %.3f over Dir(2,2) and Dir(1,3,6)",
              worst_rel)};
}

// ---- criterion 9: IPW agrees with the plug-in on consistent joints ----

std::pair<bool, std::string> criterion_ipw_consistency() {
  Rng rng(909);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform() * 16.0);
    std::vector<double> mu0(d), mu1(d), px(d), e(d);
    double z = 0.0;
    for (int i = 0; i < d; ++i) {
      mu0[i] = rng.uniform();
      mu1[i] = rng.uniform();
      px[i] = 0.05 + rng.uniform();
      e[i] = 0.1 + 0.8 * rng.uniform();
      z += px[i];
    }
    for (double& p : px) p /= z;

    JointDistribution joint;
    joint.d = d;
    joint.p.assign(4 * d, 0.0);
    for (int i = 0; i < d; ++i) {
      joint.at(i, 1, 1) = px[i] * e[i] * mu1[i];
      joint.at(i, 1, 0) = px[i] * e[i] * (1.0 - mu1[i]);
      joint.at(i, 0, 1) = px[i] * (1.0 - e[i]) * mu0[i];
      joint.at(i, 0, 0) = px[i] * (1.0 - e[i]) * (1.0 - mu0[i]);
    }
    const std::vector<double> ones(d, 1.0);
    const double diff = std::abs(ate_ipw(ones, ones, e, joint) -
                                 ate_unconfounded(mu0, mu1, px));
    worst = std::max(worst, diff);
  }
  return {worst < 1e-12,
          fmt("max |ipw - plugin| = %.2e over 200 joints", worst)};
}

// ---- criterion 10: byte-identical replay through the binary ----

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(CAUSALSENS_BIN) + " " + args + " > " +
                          (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::pair<bool, std::string> criterion_replay() {
  const fs::path dir =
      fs::temp_directory_path() / ("causalsens_acc_" + std::to_string(getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << "{\"preset\": 4}\n";

  const std::string cfg = (dir / "config.json").string();
  const std::string data = (dir / "data.csv").string();
  const std::string base = (dir / "baseline.json").string();
  const std::string wc = (dir / "wc.json").string();
  const std::string bs = (dir / "bsv.json").string();
  const std::string rk = (dir / "rank.csv").string();

  if (run_cli("simulate --config " + cfg + " --n 20000 --seed 11 --out " + data,
              dir) != 0)
    return {false, "simulate failed"};
  if (run_cli("baseline --data " + data + " --smoothing 1.0 --out " + base,
              dir) != 0)
    return {false, "baseline failed"};
  if (run_cli("worst-case --baseline " + base +
                  " --space cov:x1,x2 --delta -0.5 --out " + wc,
              dir) != 0)
    return {false, "worst-case failed"};
  if (run_cli("bsv --baseline " + base +
                  " --space cov:x1,x2 --delta -0.5 --samples 500 "
                  "--reversal-k 2000 --seed 7 --out " + bs,
              dir) != 0)
    return {false, "bsv failed"};
  if (run_cli("rank --baseline " + base +
                  " --spaces all-singletons:cov --criterion both --delta -0.5 "
                  "--samples 300 --max-draws 100000 --seed 17 --out " + rk,
              dir) != 0)
    return {false, "rank failed"};

  const std::vector<std::string> outputs = {data, base, wc, bs, rk};
  std::vector<std::string> before;
  for (const auto& path : outputs) before.push_back(slurp(path));

  int replayed = 0;
  for (const auto& path : outputs) {
    fs::remove(path);
    if (run_cli("replay --manifest " + path + ".manifest.json", dir) != 0)
      return {false, "replay failed for " + path};
    ++replayed;
  }
  bool pass = true;
  for (std::size_t i = 0; i < outputs.size(); ++i)
    pass = pass && slurp(outputs[i]) == before[i];
  return {pass, fmt("%d commands replayed byte-identically", replayed)};
}

}  // namespace

int main() {
  std::printf("acceptance checks, tool version %s\n", "0.1.0");
  run_criterion(1, "reduction identity at eps = 1", criterion_reduction);
  run_criterion(2, "worst case vs dense grid oracles", criterion_worstcase_oracle);
  run_criterion(3, "bsv vs quadrature oracle", criterion_bsv_quadrature);
  run_criterion(4, "bsv dominated by the worst case", criterion_dominance);
  run_criterion(5, "empty reversal regions agree on zero", criterion_zero_agreement);
  run_criterion(6, "subset-size trend on the 8-covariate generator",
                criterion_dimensionality);
  run_criterion(7, "generator marginals and assignment model",
                criterion_generator_fidelity);
  run_criterion(8, "dirichlet refitting within 10%", criterion_dirichlet_recovery);
  run_criterion(9, "ipw consistency with the plug-in", criterion_ipw_consistency);
  run_criterion(10, "byte-identical manifest replay", criterion_replay);

  if (g_failures == 0) {
    std::printf("all 10 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
