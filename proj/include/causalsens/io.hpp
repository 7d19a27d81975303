#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "causalsens/bayes.hpp"
#include "causalsens/model.hpp"
#include "causalsens/simdata.hpp"
#include "causalsens/spaces.hpp"
#include "causalsens/worstcase.hpp"

namespace causalsens {

inline constexpr const char* kToolVersion = "0.1.0";

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string file_hash_hex(const std::string& path);
nlohmann::json load_json_file(const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

// Dataset CSV: header names the covariates then t,y; one row per unit with
// nonnegative integer levels. Reading infers each arity as max level + 1
// (at least 2).
std::string dataset_to_csv(const Dataset& data);
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

nlohmann::json baseline_to_json(const BaselineEstimate& b);
BaselineEstimate baseline_from_json(const nlohmann::json& j);

// Parsed form of a space argument, either shorthand (cov:x1,x2 /
// out:t=0,age=0 / eps:age,sex) or the JSON equivalent.
struct SpaceDescriptor {
  SpaceKind kind = SpaceKind::CovariateSubset;
  std::vector<std::string> subset;                 // covariate, epsilon
  int arm = 0;                                     // outcome
  std::vector<std::pair<std::string, int>> where;  // outcome predicate
};

SpaceDescriptor parse_space(const std::string& text);
AssumptionSpace make_space(const SpaceDescriptor& desc,
                           const BaselineEstimate& base);

nlohmann::json prior_to_json(const Prior& p);
Prior prior_from_json(const nlohmann::json& j);

nlohmann::json simconfig_to_json(const SimConfig& cfg);
SimConfig simconfig_from_json(const nlohmann::json& j);

nlohmann::json worstcase_to_json(const WorstCaseReport& r);
nlohmann::json bsv_to_json(const BsvReport& r);
nlohmann::json reversal_to_json(const ReversalEstimate& r, std::uint64_t seed);

// One probability vector per line, comma separated; a leading header line
// is skipped when any of its tokens is non-numeric.
std::vector<std::vector<double>> read_prob_rows_csv(const std::string& path);

// Everything needed to reproduce one run: the exact argv, content hashes of
// the input files, the resolved option values, and the tool version. No
// timestamps on purpose; replays must be byte-identical.
struct RunManifest {
  std::vector<std::string> argv;               // subcommand first
  std::map<std::string, std::string> inputs;   // path -> content hash
  nlohmann::json options = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  std::string version = kToolVersion;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
std::string manifest_path_for(const std::string& output_path);
void write_manifests(const RunManifest& m);

}  // namespace causalsens
