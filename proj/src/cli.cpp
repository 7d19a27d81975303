#include "causalsens/cli.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "causalsens/bayes.hpp"
#include "causalsens/errors.hpp"
#include "causalsens/io.hpp"
#include "causalsens/model.hpp"
#include "causalsens/rng.hpp"
#include "causalsens/simdata.hpp"
#include "causalsens/spaces.hpp"
#include "causalsens/worstcase.hpp"

namespace causalsens {
namespace {

using nlohmann::json;

// Errors raised while interpreting arguments exit with 2; errors raised by
// the computation itself exit with 1.
struct UsageFailure {
  Error err;
};

template <typename F>
auto usage_phase(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageFailure{e};
  }
}

void print_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
}

// Collects input hashes and output files for one run and drops the manifest
// next to every output at the end.
struct Emitter {
  RunManifest m;

  explicit Emitter(std::vector<std::string> argv) { m.argv = std::move(argv); }

  void input(const std::string& path) { m.inputs[path] = file_hash_hex(path); }

  void output(const std::string& path, const std::string& content) {
    write_text_file(path, content);
    m.outputs.push_back(path);
  }

  void output_json(const std::string& path, const json& j) {
    output(path, j.dump(2) + "\n");
  }

  void finish() { write_manifests(m); }
};

void check_uniform_allowed(SpaceKind kind) {
  if (kind == SpaceKind::EpsilonSubset)
    fail("incompatible-prior",
         "no uniform prior exists on the unbounded confounding space; pass a "
         "trunc-gaussian-eps prior file");
}

Prior uniform_prior_for(SpaceKind kind) {
  Prior p;
  p.kind = kind == SpaceKind::OutcomeSubgroup ? Prior::Kind::UniformBox
                                              : Prior::Kind::UniformSimplex;
  return p;
}

struct SimulateArgs {
  std::string config, out;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  bool unbiased = false;
};

int do_simulate(const std::vector<std::string>& argv, const SimulateArgs& a) {
  Emitter em(argv);
  em.input(a.config);
  em.m.seed = a.seed;
  const SimConfig cfg = simconfig_from_json(load_json_file(a.config));
  const Dataset data = a.unbiased ? simulate_unbiased(cfg, a.n, a.seed)
                                  : simulate_observational(cfg, a.n, a.seed);
  em.output(a.out, dataset_to_csv(data));
  em.m.options = {{"config", a.config},
                  {"n", a.n},
                  {"out", a.out},
                  {"seed", a.seed},
                  {"unbiased", a.unbiased}};
  em.finish();
  return 0;
}

struct BaselineArgs {
  std::string data, out;
  std::optional<double> smoothing;
};

int do_baseline(const std::vector<std::string>& argv, const BaselineArgs& a) {
  Emitter em(argv);
  em.input(a.data);
  const BaselineEstimate b = fit_baseline(read_dataset_csv(a.data), a.smoothing);
  em.output_json(a.out, baseline_to_json(b));
  em.m.options = {{"data", a.data},
                  {"out", a.out},
                  {"smoothing", a.smoothing ? json(*a.smoothing) : json()}};
  em.finish();
  return 0;
}

json solver_options_json(const SolverOptions& s) {
  return {{"eta", s.eta},
          {"inner_iters", s.inner_iters},
          {"outer_iters", s.outer_iters},
          {"tol_constraint", s.tol_constraint},
          {"tol_gap", s.tol_gap}};
}

struct WorstCaseArgs {
  std::string baseline, space, out;
  double delta = 0.0;
  SolverOptions solver;
};

int do_worst_case(const std::vector<std::string>& argv, const WorstCaseArgs& a) {
  const SpaceDescriptor desc = usage_phase([&] { return parse_space(a.space); });

  Emitter em(argv);
  em.input(a.baseline);
  const BaselineEstimate base = baseline_from_json(load_json_file(a.baseline));
  const AssumptionSpace sp = make_space(desc, base);
  const WorstCaseReport rep = worst_case(sp, DecisionSpec{a.delta}, a.solver);

  json j = worstcase_to_json(rep);
  j["space"] = sp.label;
  j["delta"] = a.delta;
  em.output_json(a.out, j);
  em.m.options = {{"baseline", a.baseline},
                  {"delta", a.delta},
                  {"out", a.out},
                  {"solver", solver_options_json(a.solver)},
                  {"space", a.space}};
  em.finish();
  return 0;
}

struct BsvArgs {
  std::string baseline, space, prior = "uniform", out;
  double delta = 0.0;
  std::int64_t samples = 5000;
  std::int64_t max_draws = 2000000;
  std::int64_t reversal_k = 100000;
  std::uint64_t seed = 0;
};

int do_bsv(const std::vector<std::string>& argv, const BsvArgs& a) {
  const SpaceDescriptor desc = usage_phase([&] { return parse_space(a.space); });
  if (a.prior == "uniform")
    usage_phase([&] { check_uniform_allowed(desc.kind); });

  Emitter em(argv);
  em.input(a.baseline);
  em.m.seed = a.seed;
  const BaselineEstimate base = baseline_from_json(load_json_file(a.baseline));
  const AssumptionSpace sp = make_space(desc, base);

  Prior prior;
  if (a.prior == "uniform") {
    prior = uniform_prior_for(desc.kind);
  } else {
    em.input(a.prior);
    prior = prior_from_json(load_json_file(a.prior));
  }

  const BsvReport rep = bsv(sp, prior, DecisionSpec{a.delta}, a.samples,
                            a.max_draws, a.seed, a.reversal_k);
  json j = bsv_to_json(rep);
  j["space"] = sp.label;
  j["delta"] = a.delta;
  em.output_json(a.out, j);
  em.m.options = {{"baseline", a.baseline}, {"delta", a.delta},
                  {"max_draws", a.max_draws}, {"out", a.out},
                  {"prior", a.prior},        {"reversal_k", a.reversal_k},
                  {"samples", a.samples},    {"seed", a.seed},
                  {"space", a.space}};
  em.finish();
  return 0;
}

struct ReversalArgs {
  std::string baseline, space, prior = "uniform", out;
  double delta = 0.0;
  std::int64_t k = 1000000;
  std::uint64_t seed = 0;
};

int do_reversal(const std::vector<std::string>& argv, const ReversalArgs& a) {
  const SpaceDescriptor desc = usage_phase([&] { return parse_space(a.space); });
  if (a.prior == "uniform")
    usage_phase([&] { check_uniform_allowed(desc.kind); });

  Emitter em(argv);
  em.input(a.baseline);
  em.m.seed = a.seed;
  const BaselineEstimate base = baseline_from_json(load_json_file(a.baseline));
  const AssumptionSpace sp = make_space(desc, base);

  Prior prior;
  if (a.prior == "uniform") {
    prior = uniform_prior_for(desc.kind);
  } else {
    em.input(a.prior);
    prior = prior_from_json(load_json_file(a.prior));
  }

  const ReversalEstimate rev =
      reversal_probability(sp, prior, DecisionSpec{a.delta}, a.k, a.seed);
  json j = reversal_to_json(rev, a.seed);
  j["space"] = sp.label;
  j["delta"] = a.delta;
  em.output_json(a.out, j);
  em.m.options = {{"baseline", a.baseline}, {"delta", a.delta},
                  {"k", a.k},               {"out", a.out},
                  {"prior", a.prior},       {"seed", a.seed},
                  {"space", a.space}};
  em.finish();
  return 0;
}

struct FitPriorArgs {
  std::string rows, out;
};

int do_fit_dirichlet(const std::vector<std::string>& argv, const FitPriorArgs& a) {
  Emitter em(argv);
  em.input(a.rows);
  Prior p;
  p.kind = Prior::Kind::Dirichlet;
  p.alpha = fit_dirichlet(read_prob_rows_csv(a.rows));
  em.output_json(a.out, prior_to_json(p));
  em.m.options = {{"method", "dirichlet"}, {"out", a.out}, {"rows", a.rows}};
  em.finish();
  return 0;
}

struct RankArgs {
  std::string baseline, spaces, criterion = "both", prior = "uniform", out, plot;
  double delta = 0.0;
  std::int64_t samples = 5000;
  std::int64_t max_draws = 2000000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  SolverOptions solver;
};

struct SpacesSpec {
  int size = 1;
  SpaceKind family = SpaceKind::CovariateSubset;
};

SpacesSpec parse_spaces_arg(const std::string& s) {
  const std::size_t pos = s.find(':');
  if (pos == std::string::npos)
    fail("bad-space", "--spaces must look like all-pairs:cov");
  const std::string size = s.substr(0, pos);
  const std::string family = s.substr(pos + 1);
  SpacesSpec spec;
  if (size == "all-singletons") spec.size = 1;
  else if (size == "all-pairs") spec.size = 2;
  else if (size == "all-triples") spec.size = 3;
  else fail("bad-space", "sizes: all-singletons, all-pairs, all-triples");
  if (family == "cov") spec.family = SpaceKind::CovariateSubset;
  else if (family == "eps") spec.family = SpaceKind::EpsilonSubset;
  else fail("bad-family", "rank enumerates the cov and eps families");
  return spec;
}

std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

bool all_equal(const std::vector<double>& v) {
  for (double x : v)
    if (x != v.front()) return false;
  return true;
}

int do_rank(const std::vector<std::string>& argv, const RankArgs& a) {
  const bool want_worst = a.criterion == "worst" || a.criterion == "both";
  const bool want_bsv = a.criterion == "bsv" || a.criterion == "both";
  const SpacesSpec spec = usage_phase([&] { return parse_spaces_arg(a.spaces); });
  if (want_bsv) {
    usage_phase([&] {
      if (!a.seed_given)
        fail("missing-seed", "--seed is required when ranking by bsv");
      if (a.prior == "uniform") check_uniform_allowed(spec.family);
    });
  }

  Emitter em(argv);
  em.input(a.baseline);
  if (a.seed_given) em.m.seed = a.seed;
  const BaselineEstimate base = baseline_from_json(load_json_file(a.baseline));

  Prior prior;
  if (want_bsv) {
    if (a.prior == "uniform") {
      prior = uniform_prior_for(spec.family);
    } else {
      em.input(a.prior);
      prior = prior_from_json(load_json_file(a.prior));
    }
  }

  const int k = static_cast<int>(base.grid.covariates());
  if (spec.size > k)
    fail("bad-space", "subset size exceeds the covariate count");
  const DecisionSpec dec{a.delta};

  std::vector<std::string> labels;
  std::vector<double> worst_vals, bsv_vals;
  std::vector<std::pair<std::string, double>> worst_entries, bsv_entries;
  for (const std::vector<int>& subset : combinations(k, spec.size)) {
    const AssumptionSpace sp = spec.family == SpaceKind::CovariateSubset
                                   ? covariate_subset_space(base, subset)
                                   : epsilon_subset_space(base, subset);
    labels.push_back(sp.label);
    if (want_worst) {
      const WorstCaseReport rep = worst_case(sp, dec, a.solver);
      worst_vals.push_back(rep.value);
      worst_entries.emplace_back(sp.label, rep.value);
    }
    if (want_bsv) {
      const BsvReport rep = bsv(sp, prior, dec, a.samples, a.max_draws,
                                mix_seed(a.seed, sp.label));
      bsv_vals.push_back(rep.bsv);
      bsv_entries.emplace_back(sp.label, rep.bsv);
    }
  }

  Ranking rank_w, rank_b;
  std::map<std::string, std::size_t> pos_w, pos_b;
  std::map<std::string, double> val_w, val_b;
  if (want_worst) {
    rank_w = rank_spaces(worst_entries);
    for (std::size_t i = 0; i < rank_w.entries.size(); ++i)
      pos_w[rank_w.entries[i].first] = i + 1;
    for (const auto& [label, value] : worst_entries) val_w[label] = value;
  }
  if (want_bsv) {
    rank_b = rank_spaces(bsv_entries);
    for (std::size_t i = 0; i < rank_b.entries.size(); ++i)
      pos_b[rank_b.entries[i].first] = i + 1;
    for (const auto& [label, value] : bsv_entries) val_b[label] = value;
  }

  std::vector<std::string> order;
  for (const auto& [label, value] : (want_worst ? rank_w : rank_b).entries)
    order.push_back(label);

  std::string csv = "space";
  if (want_worst) csv += ",worst";
  if (want_bsv) csv += ",bsv";
  if (want_worst) csv += ",rank_worst";
  if (want_bsv) csv += ",rank_bsv";
  csv += '\n';
  for (const std::string& label : order) {
    csv += label;
    if (want_worst) csv += "," + format_double(val_w[label]);
    if (want_bsv) csv += "," + format_double(val_b[label]);
    if (want_worst) csv += "," + std::to_string(pos_w[label]);
    if (want_bsv) csv += "," + std::to_string(pos_b[label]);
    csv += '\n';
  }
  if (want_worst && want_bsv) {
    const bool degenerate =
        labels.size() < 2 || all_equal(worst_vals) || all_equal(bsv_vals);
    csv += degenerate
               ? "# spearman,0,degenerate\n"
               : "# spearman," + format_double(spearman(rank_w, rank_b)) + "\n";
  }
  em.output(a.out, csv);

  if (!a.plot.empty()) {
    std::string plot = "x,series,value\n";
    for (const std::string& label : order)
      if (want_worst)
        plot += label + ",worst," + format_double(val_w[label]) + "\n";
    for (const std::string& label : order)
      if (want_bsv) plot += label + ",bsv," + format_double(val_b[label]) + "\n";
    em.output(a.plot, plot);
  }

  em.m.options = {{"baseline", a.baseline},
                  {"criterion", a.criterion},
                  {"delta", a.delta},
                  {"max_draws", a.max_draws},
                  {"out", a.out},
                  {"plot", a.plot.empty() ? json() : json(a.plot)},
                  {"prior", a.prior},
                  {"samples", a.samples},
                  {"solver", solver_options_json(a.solver)},
                  {"spaces", a.spaces}};
  if (a.seed_given) em.m.options["seed"] = a.seed;
  em.finish();
  return 0;
}

struct ReplayArgs {
  std::string manifest;
};

int do_replay(const ReplayArgs& a) {
  const RunManifest m = manifest_from_json(load_json_file(a.manifest));
  if (m.version != kToolVersion)
    fail("version-mismatch", "manifest was written by version " + m.version);
  for (const auto& [path, hash] : m.inputs)
    if (file_hash_hex(path) != hash)
      fail("input-hash-mismatch", path + " no longer matches the manifest");
  return run(m.argv);
}

void add_solver_flags(CLI::App* cmd, SolverOptions& s) {
  cmd->add_option("--eta", s.eta, "dual ascent step size")
      ->capture_default_str();
  cmd->add_option("--inner-iters", s.inner_iters,
                  "iteration budget per primal minimization")
      ->capture_default_str();
  cmd->add_option("--outer-iters", s.outer_iters, "dual ascent rounds")
      ->capture_default_str();
  cmd->add_option("--tol-constraint", s.tol_constraint,
                  "allowed effect slack above delta")
      ->capture_default_str();
  cmd->add_option("--tol-gap", s.tol_gap,
                  "primal objective change at convergence")
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"sensitivity of causal decisions to assumption violations"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "draw a synthetic dataset");
  sim_cmd->add_option("--config", sim.config, "generator config JSON")
      ->required();
  sim_cmd->add_option("--n", sim.n, "units to draw before selection")
      ->required()
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--seed", sim.seed, "generator seed")->required();
  sim_cmd->add_flag("--unbiased", sim.unbiased,
                    "randomized assignment, no selection");
  sim_cmd->add_option("--out", sim.out, "output dataset CSV")->required();

  BaselineArgs bl;
  CLI::App* bl_cmd =
      app.add_subcommand("baseline", "fit per-cell baseline estimates");
  bl_cmd->add_option("--data", bl.data, "dataset CSV")->required();
  bl_cmd->add_option("--smoothing", bl.smoothing,
                     "pseudo-count for the per-arm means");
  bl_cmd->add_option("--out", bl.out, "output baseline JSON")->required();

  WorstCaseArgs wc;
  CLI::App* wc_cmd = app.add_subcommand(
      "worst-case", "smallest divergence that reverses the decision");
  wc_cmd->add_option("--baseline", wc.baseline, "baseline JSON")->required();
  wc_cmd->add_option("--space", wc.space,
                     "cov:a,b | out:t=0,a=1 | eps:a,b | JSON descriptor")
      ->required();
  wc_cmd->add_option("--delta", wc.delta, "decision threshold")
      ->capture_default_str();
  wc_cmd->add_option("--out", wc.out, "output report JSON")->required();
  add_solver_flags(wc_cmd, wc.solver);

  BsvArgs bs;
  CLI::App* bs_cmd = app.add_subcommand(
      "bsv", "prior-averaged sensitivity over the reversal region");
  bs_cmd->add_option("--baseline", bs.baseline, "baseline JSON")->required();
  bs_cmd->add_option("--space", bs.space,
                     "cov:a,b | out:t=0,a=1 | eps:a,b | JSON descriptor")
      ->required();
  bs_cmd->add_option("--prior", bs.prior,
                     "prior JSON path, or 'uniform' for the flat prior")
      ->capture_default_str();
  bs_cmd->add_option("--delta", bs.delta, "decision threshold")
      ->capture_default_str();
  bs_cmd->add_option("--samples", bs.samples, "accepted samples target")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bs_cmd->add_option("--max-draws", bs.max_draws, "total draw budget")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bs_cmd->add_option("--reversal-k", bs.reversal_k,
                     "draws for the reversal probability estimate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bs_cmd->add_option("--seed", bs.seed, "sampler seed")->required();
  bs_cmd->add_option("--out", bs.out, "output report JSON")->required();

  ReversalArgs rv;
  CLI::App* rv_cmd = app.add_subcommand(
      "reversal-prob", "prior probability of decision reversal");
  rv_cmd->add_option("--baseline", rv.baseline, "baseline JSON")->required();
  rv_cmd->add_option("--space", rv.space,
                     "cov:a,b | out:t=0,a=1 | eps:a,b | JSON descriptor")
      ->required();
  rv_cmd->add_option("--prior", rv.prior,
                     "prior JSON path, or 'uniform' for the flat prior")
      ->capture_default_str();
  rv_cmd->add_option("--delta", rv.delta, "decision threshold")
      ->capture_default_str();
  rv_cmd->add_option("--k", rv.k, "draws")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  rv_cmd->add_option("--seed", rv.seed, "sampler seed")->required();
  rv_cmd->add_option("--out", rv.out, "output report JSON")->required();

  FitPriorArgs fp;
  CLI::App* fp_cmd =
      app.add_subcommand("fit-prior", "fit a prior from tabulated data");
  fp_cmd->require_subcommand(1);
  CLI::App* fp_dir = fp_cmd->add_subcommand(
      "dirichlet", "method-of-moments fit to probability-vector rows");
  fp_dir->add_option("--rows", fp.rows, "CSV of probability vectors")
      ->required();
  fp_dir->add_option("--out", fp.out, "output prior JSON")->required();

  RankArgs rk;
  CLI::App* rk_cmd = app.add_subcommand(
      "rank", "rank enumerated spaces by sensitivity");
  rk_cmd->add_option("--baseline", rk.baseline, "baseline JSON")->required();
  rk_cmd->add_option("--spaces", rk.spaces,
                     "all-singletons|all-pairs|all-triples : cov|eps")
      ->required();
  rk_cmd->add_option("--criterion", rk.criterion, "worst | bsv | both")
      ->capture_default_str()
      ->check(CLI::IsMember({"worst", "bsv", "both"}));
  rk_cmd->add_option("--prior", rk.prior,
                     "prior JSON path, or 'uniform' for the flat prior")
      ->capture_default_str();
  rk_cmd->add_option("--delta", rk.delta, "decision threshold")
      ->capture_default_str();
  rk_cmd->add_option("--samples", rk.samples, "accepted samples target")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  rk_cmd->add_option("--max-draws", rk.max_draws, "total draw budget")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  CLI::Option* rk_seed = rk_cmd->add_option("--seed", rk.seed, "sampler seed");
  rk_cmd->add_option("--out", rk.out, "output ranking CSV")->required();
  rk_cmd->add_option("--plot", rk.plot, "plot-ready CSV of (x, series, value)");
  add_solver_flags(rk_cmd, rk.solver);

  ReplayArgs rp;
  CLI::App* rp_cmd =
      app.add_subcommand("replay", "re-run a command from its manifest");
  rp_cmd->add_option("--manifest", rp.manifest, "manifest JSON")->required();

  std::vector<const char*> cargv;
  cargv.reserve(args.size() + 1);
  cargv.push_back("causalsens");
  for (const std::string& s : args) cargv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (app.got_subcommand(sim_cmd)) return do_simulate(args, sim);
    if (app.got_subcommand(bl_cmd)) return do_baseline(args, bl);
    if (app.got_subcommand(wc_cmd)) return do_worst_case(args, wc);
    if (app.got_subcommand(bs_cmd)) return do_bsv(args, bs);
    if (app.got_subcommand(rv_cmd)) return do_reversal(args, rv);
    if (app.got_subcommand(fp_cmd)) return do_fit_dirichlet(args, fp);
    if (app.got_subcommand(rk_cmd)) {
      rk.seed_given = rk_seed->count() > 0;
      return do_rank(args, rk);
    }
    if (app.got_subcommand(rp_cmd)) return do_replay(rp);
    print_error("usage", "no subcommand given");
    return 2;
  } catch (const UsageFailure& u) {
    print_error(u.err.code(), u.err.what());
    return 2;
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace causalsens
