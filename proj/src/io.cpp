#include "causalsens/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "causalsens/errors.hpp"
#include "causalsens/rng.hpp"

namespace causalsens {

using nlohmann::json;

namespace {

template <typename F>
auto json_guard(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail("bad-json", what + ": " + e.what());
  }
}

std::string trimmed(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

long long parse_int(const std::string& tok, const char* what) {
  const std::string t = trimmed(tok);
  long long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    fail("bad-csv", std::string("expected an integer ") + what + ": '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok) {
  const std::string t = trimmed(tok);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    fail("bad-csv", "expected a number: '" + tok + "'");
  return v;
}

json checked_parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const std::exception& e) {
    fail("bad-json", what + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io-error", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) fail("io-error", "cannot read " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("io-error", "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out.good()) fail("io-error", "cannot write " + path);
}

std::string file_hash_hex(const std::string& path) {
  const std::uint64_t h = fnv1a64(read_text_file(path));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json load_json_file(const std::string& path) {
  return checked_parse(read_text_file(path), path);
}

std::string format_double(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, p);
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out;
  for (std::size_t i = 0; i < data.grid.covariates(); ++i) {
    out += data.grid.names[i];
    out += ',';
  }
  out += "t,y\n";
  for (std::size_t r = 0; r < data.n(); ++r) {
    for (int lev : data.grid.levels_of(data.cell[r])) {
      out += std::to_string(lev);
      out += ',';
    }
    out += char('0' + data.t[r]);
    out += ',';
    out += char('0' + data.y[r]);
    out += '\n';
  }
  return out;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  write_text_file(path, dataset_to_csv(data));
}

Dataset read_dataset_csv(const std::string& path) {
  const std::vector<std::string> lines = lines_of(read_text_file(path));
  if (lines.empty()) fail("bad-csv", path + ": missing header row");

  std::vector<std::string> header = split(lines[0], ',');
  for (auto& h : header) h = trimmed(h);
  if (header.size() < 3 || header[header.size() - 2] != "t" ||
      header.back() != "y")
    fail("bad-csv", path + ": header must end with t,y");
  const std::size_t k = header.size() - 2;
  std::vector<std::string> names(header.begin(), header.begin() + k);

  std::vector<std::vector<int>> rows;
  std::vector<int> arities(k, 2);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trimmed(lines[li]).empty()) continue;
    const std::vector<std::string> toks = split(lines[li], ',');
    if (toks.size() != k + 2)
      fail("bad-csv", path + ": wrong column count on line " +
                          std::to_string(li + 1));
    std::vector<int> row(k + 2);
    for (std::size_t c = 0; c < k + 2; ++c) {
      const long long v = parse_int(toks[c], "level");
      const bool binary_col = c >= k;
      if (v < 0 || (binary_col && v > 1))
        fail("bad-csv", path + ": out-of-range value on line " +
                            std::to_string(li + 1));
      row[c] = static_cast<int>(v);
      if (!binary_col) arities[c] = std::max(arities[c], row[c] + 1);
    }
    rows.push_back(std::move(row));
  }

  Dataset data;
  data.grid = build_grid(std::move(names), std::move(arities));
  for (const auto& row : rows)
    data.add_row(std::span<const int>(row.data(), k), row[k], row[k + 1]);
  return data;
}

json baseline_to_json(const BaselineEstimate& b) {
  json j;
  j["grid"] = {{"names", b.grid.names}, {"arities", b.grid.arities}};
  j["n"] = b.n;
  j["qx"] = b.qx;
  j["mu0"] = b.mu0;
  j["mu1"] = b.mu1;
  j["e"] = b.e;
  j["counts"] = {{"control", b.counts.control}, {"treated", b.counts.treated}};
  return j;
}

BaselineEstimate baseline_from_json(const json& j) {
  return json_guard("baseline", [&] {
    BaselineEstimate b;
    b.grid = build_grid(j.at("grid").at("names").get<std::vector<std::string>>(),
                        j.at("grid").at("arities").get<std::vector<int>>());
    b.n = j.at("n").get<std::int64_t>();
    b.qx = j.at("qx").get<std::vector<double>>();
    b.mu0 = j.at("mu0").get<std::vector<double>>();
    b.mu1 = j.at("mu1").get<std::vector<double>>();
    b.e = j.at("e").get<std::vector<double>>();
    b.counts.control = j.at("counts").at("control").get<std::vector<std::int64_t>>();
    b.counts.treated = j.at("counts").at("treated").get<std::vector<std::int64_t>>();

    const std::size_t d = static_cast<std::size_t>(b.grid.d);
    for (const auto* v : {&b.qx, &b.mu0, &b.mu1, &b.e})
      if (v->size() != d)
        fail("length-mismatch", "baseline arrays must have one entry per cell");
    if (b.counts.control.size() != d || b.counts.treated.size() != d)
      fail("length-mismatch", "baseline counts must have one entry per cell");

    double total = 0.0;
    for (double q : b.qx) {
      if (q < 0.0) fail("unnormalized-px", "qx entries must be nonnegative");
      total += q;
    }
    if (std::abs(total - 1.0) > 1e-9)
      fail("unnormalized-px", "qx must sum to 1");
    for (const auto* v : {&b.mu0, &b.mu1, &b.e})
      for (double m : *v)
        if (!(m >= 0.0 && m <= 1.0))
          fail("bad-mean", "means and propensities must lie in [0, 1]");
    return b;
  });
}

namespace {

SpaceDescriptor space_from_json(const json& j) {
  return json_guard("space", [&] {
    SpaceDescriptor d;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "covariate" || kind == "epsilon") {
      d.kind = kind == "covariate" ? SpaceKind::CovariateSubset
                                   : SpaceKind::EpsilonSubset;
      d.subset = j.at("subset").get<std::vector<std::string>>();
    } else if (kind == "outcome") {
      d.kind = SpaceKind::OutcomeSubgroup;
      d.arm = j.at("t").get<int>();
      if (j.contains("where"))
        for (const auto& [name, lev] : j.at("where").items())
          d.where.emplace_back(name, lev.get<int>());
    } else {
      fail("bad-kind", "unknown space kind: " + kind);
    }
    return d;
  });
}

}  // namespace

SpaceDescriptor parse_space(const std::string& text) {
  const std::string s = trimmed(text);
  if (!s.empty() && s.front() == '{')
    return space_from_json(checked_parse(s, "space"));

  SpaceDescriptor d;
  std::string rest;
  if (s.rfind("cov:", 0) == 0) {
    d.kind = SpaceKind::CovariateSubset;
    rest = s.substr(4);
  } else if (s.rfind("eps:", 0) == 0) {
    d.kind = SpaceKind::EpsilonSubset;
    rest = s.substr(4);
  } else if (s.rfind("out:", 0) == 0) {
    d.kind = SpaceKind::OutcomeSubgroup;
    rest = s.substr(4);
  } else {
    fail("bad-space",
         "space must be cov:..., out:..., eps:..., or a JSON object");
  }
  if (trimmed(rest).empty()) fail("bad-space", "space descriptor is empty");

  if (d.kind != SpaceKind::OutcomeSubgroup) {
    for (const std::string& tok : split(rest, ',')) {
      const std::string name = trimmed(tok);
      if (name.empty()) fail("bad-space", "empty covariate name in " + s);
      d.subset.push_back(name);
    }
    return d;
  }

  bool have_arm = false;
  for (const std::string& tok : split(rest, ',')) {
    const std::vector<std::string> kv = split(tok, '=');
    if (kv.size() != 2)
      fail("bad-space", "outcome terms must look like name=level: " + tok);
    const std::string key = trimmed(kv[0]);
    long long val = 0;
    {
      const std::string v = trimmed(kv[1]);
      const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), val);
      if (ec != std::errc() || p != v.data() + v.size())
        fail("bad-space", "level must be an integer: " + tok);
    }
    if (key == "t") {
      if (have_arm) fail("bad-space", "t= given twice");
      have_arm = true;
      d.arm = static_cast<int>(val);
    } else {
      d.where.emplace_back(key, static_cast<int>(val));
    }
  }
  if (!have_arm) fail("bad-space", "outcome spaces need a t= term");
  return d;
}

AssumptionSpace make_space(const SpaceDescriptor& desc,
                           const BaselineEstimate& base) {
  switch (desc.kind) {
    case SpaceKind::CovariateSubset:
      return covariate_subset_space(base,
                                    resolve_covariates(base.grid, desc.subset));
    case SpaceKind::EpsilonSubset:
      return epsilon_subset_space(base,
                                  resolve_covariates(base.grid, desc.subset));
    case SpaceKind::OutcomeSubgroup:
      break;
  }

  if (desc.arm != 0 && desc.arm != 1) fail("bad-arm", "t must be 0 or 1");
  std::vector<std::pair<int, int>> terms;  // (covariate index, level)
  for (const auto& [name, lev] : desc.where) {
    const int j = base.grid.find(name);
    if (j < 0) fail("unknown-covariate", "no covariate named " + name);
    if (lev < 0 || lev >= base.grid.arities[j])
      fail("bad-level", name + " has no level " + std::to_string(lev));
    terms.emplace_back(j, lev);
  }
  std::sort(terms.begin(), terms.end());
  for (std::size_t i = 1; i < terms.size(); ++i)
    if (terms[i].first == terms[i - 1].first)
      fail("duplicate-name", "covariate constrained twice in outcome space");

  std::string label = "out:t=" + std::to_string(desc.arm);
  for (const auto& [j, lev] : terms)
    label += "," + base.grid.names[j] + "=" + std::to_string(lev);

  const auto predicate = [terms](std::span<const int> levels) {
    for (const auto& [j, lev] : terms)
      if (levels[j] != lev) return false;
    return true;
  };
  return outcome_subgroup_space(base, desc.arm, predicate, label);
}

json prior_to_json(const Prior& p) {
  json j;
  switch (p.kind) {
    case Prior::Kind::Dirichlet:
      j["kind"] = "dirichlet";
      j["alpha"] = p.alpha;
      break;
    case Prior::Kind::UniformSimplex:
      j["kind"] = "uniform-simplex";
      break;
    case Prior::Kind::BetaMeans: {
      j["kind"] = "beta-means";
      json params = json::array();
      for (const auto& [a, b] : p.beta_params) params.push_back({a, b});
      j["params"] = params;
      break;
    }
    case Prior::Kind::UniformBox:
      j["kind"] = "uniform-box";
      break;
    case Prior::Kind::TruncGaussianEps:
      j["kind"] = "trunc-gaussian-eps";
      j["sigma"] = p.sigma;
      break;
    case Prior::Kind::PointMass:
      j["kind"] = "point";
      j["theta"] = p.point;
      break;
  }
  return j;
}

Prior prior_from_json(const json& j) {
  return json_guard("prior", [&] {
    Prior p;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dirichlet") {
      p.kind = Prior::Kind::Dirichlet;
      p.alpha = j.at("alpha").get<std::vector<double>>();
      if (p.alpha.empty()) fail("bad-value", "alpha must be nonempty");
      for (double a : p.alpha)
        if (!(a > 0.0)) fail("bad-value", "alpha entries must be positive");
    } else if (kind == "uniform-simplex") {
      p.kind = Prior::Kind::UniformSimplex;
    } else if (kind == "beta-means") {
      p.kind = Prior::Kind::BetaMeans;
      for (const auto& pair : j.at("params")) {
        if (!pair.is_array() || pair.size() != 2)
          fail("bad-value", "beta params must be [a, b] pairs");
        const double a = pair[0].get<double>();
        const double b = pair[1].get<double>();
        if (!(a > 0.0 && b > 0.0))
          fail("bad-value", "beta parameters must be positive");
        p.beta_params.emplace_back(a, b);
      }
      if (p.beta_params.empty()) fail("bad-value", "params must be nonempty");
    } else if (kind == "uniform-box") {
      p.kind = Prior::Kind::UniformBox;
    } else if (kind == "trunc-gaussian-eps") {
      p.kind = Prior::Kind::TruncGaussianEps;
      p.sigma = j.value("sigma", 1.0);
      if (!(p.sigma > 0.0)) fail("bad-value", "sigma must be positive");
    } else if (kind == "point") {
      p.kind = Prior::Kind::PointMass;
      p.point = j.at("theta").get<std::vector<double>>();
      if (p.point.empty()) fail("bad-value", "theta must be nonempty");
    } else {
      fail("bad-kind", "unknown prior kind: " + kind);
    }
    return p;
  });
}

json simconfig_to_json(const SimConfig& cfg) {
  json j;
  j["bern"] = cfg.bern;
  j["t_coeff"] = cfg.t_coeff;
  j["beta"] = cfg.beta;
  j["gamma"] = cfg.gamma;
  j["delta"] = cfg.delta;
  j["sel_y"] = cfg.sel_y;
  j["sel_t"] = cfg.sel_t;
  j["sel_x"] = cfg.sel_x;
  if (!cfg.replicate_map.empty()) j["replicate_map"] = cfg.replicate_map;
  return j;
}

SimConfig simconfig_from_json(const json& j) {
  return json_guard("config", [&] {
    SimConfig cfg;
    const bool preset = j.contains("preset");
    if (preset) cfg = SimConfig::preset(j.at("preset").get<int>());

    const auto want = [&](const char* key) { return !preset || j.contains(key); };
    if (want("bern")) cfg.bern = j.at("bern").get<std::vector<double>>();
    if (want("t_coeff")) cfg.t_coeff = j.at("t_coeff").get<std::vector<double>>();
    if (want("beta")) cfg.beta = j.at("beta").get<double>();
    if (want("gamma")) cfg.gamma = j.at("gamma").get<std::vector<double>>();
    if (want("delta")) cfg.delta = j.at("delta").get<std::vector<double>>();
    if (want("sel_y")) cfg.sel_y = j.at("sel_y").get<double>();
    if (want("sel_t")) cfg.sel_t = j.at("sel_t").get<double>();
    if (want("sel_x")) cfg.sel_x = j.at("sel_x").get<std::vector<double>>();
    if (j.contains("replicate_map"))
      cfg.replicate_map = j.at("replicate_map").get<std::vector<int>>();
    return cfg;
  });
}

namespace {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

json finite_or_null(double x) {
  return std::isfinite(x) ? json(x) : json();
}

}  // namespace

json worstcase_to_json(const WorstCaseReport& r) {
  json j;
  j["value"] = r.value;
  j["divergence_at_opt"] = finite_or_null(r.divergence_at_opt);
  j["tau_at_opt"] = r.tau_at_opt;
  j["argmin_theta"] = r.argmin_theta;
  j["status"] = status_name(r.status);
  j["dual"] = r.dual;
  j["outer_iters_used"] = r.outer_iters_used;
  return j;
}

json bsv_to_json(const BsvReport& r) {
  json j;
  j["bsv"] = r.bsv;
  j["m_accepted"] = r.m_accepted;
  j["n_drawn"] = r.n_drawn;
  j["acceptance_rate"] = r.acceptance_rate;
  j["mc_stderr"] = r.mc_stderr;
  j["reversal"] = {{"estimate", r.reversal.estimate},
                   {"k", r.reversal.k},
                   {"lo", r.reversal.lo},
                   {"hi", r.reversal.hi}};
  j["seed"] = r.seed;
  json flags = json::array();
  if (r.no_accepted_samples) flags.push_back("no-accepted-samples");
  if (r.budget_exhausted) flags.push_back("budget-exhausted");
  j["flags"] = flags;
  return j;
}

json reversal_to_json(const ReversalEstimate& r, std::uint64_t seed) {
  json j;
  j["estimate"] = r.estimate;
  j["k"] = r.k;
  j["lo"] = r.lo;
  j["hi"] = r.hi;
  j["seed"] = seed;
  return j;
}

std::vector<std::vector<double>> read_prob_rows_csv(const std::string& path) {
  std::vector<std::vector<double>> rows;
  bool first = true;
  for (const std::string& line : lines_of(read_text_file(path))) {
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> toks = split(line, ',');
    if (first) {
      first = false;
      // An optional header line is tolerated: skip it when any token is
      // non-numeric.
      const auto numeric = [](const std::string& t) {
        const std::string s = trimmed(t);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc() && p == s.data() + s.size();
      };
      if (!std::all_of(toks.begin(), toks.end(), numeric)) continue;
    }
    std::vector<double> row;
    for (const std::string& tok : toks) row.push_back(parse_real(tok));
    rows.push_back(std::move(row));
  }
  return rows;
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["argv"] = m.argv;
  j["inputs"] = m.inputs;
  j["options"] = m.options;
  j["outputs"] = m.outputs;
  if (m.seed) j["seed"] = *m.seed;
  j["version"] = m.version;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  return json_guard("manifest", [&] {
    RunManifest m;
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.options = j.at("options");
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    return m;
  });
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

void write_manifests(const RunManifest& m) {
  const std::string text = manifest_to_json(m).dump(2) + "\n";
  for (const std::string& out : m.outputs)
    write_text_file(manifest_path_for(out), text);
}

}  // namespace causalsens
