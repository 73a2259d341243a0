#ifndef GROUPWALK_HARNESS_HPP
#define GROUPWALK_HARNESS_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupwalk/boundary.hpp"
#include "groupwalk/entropy.hpp"

namespace groupwalk {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr int kConfigSchema = 1;

// One requested analysis; params stay as JSON so every analysis owns its own
// defaulting and validation.
struct AnalysisSpec {
  std::string type;
  nlohmann::json params;
};

struct ExperimentConfig {
  std::string name;
  ModelPtr group;
  EnvPtr env;
  uint64_t seed = 0;
  int workers = 1;
  size_t budget_atoms = kDefaultAtomBudget;  // default for analyses that don't set their own
  std::string out_dir;
  std::vector<AnalysisSpec> analyses;
  nlohmann::json raw;  // normalized config document; hashed into the manifest
};

// Parses and validates; collects every problem before throwing one
// ValidationError listing them all.
ExperimentConfig parse_config(const nlohmann::json& doc);
ModelPtr build_group(const nlohmann::json& spec);
EnvPtr build_environment(const nlohmann::json& spec, const ModelPtr& group);

struct ExperimentManifest {
  std::string config_hash;
  std::string rng_algorithm;
  std::string tool_version;
  uint64_t seed = 0;
  int workers = 1;
  std::string started_at;
  std::string finished_at;
  struct Verdict {
    std::string analysis;
    std::string status;  // "pass", "fail", "aborted", "info"
    std::string detail;
  };
  std::vector<Verdict> verdicts;
  double dropped_mass_total = 0.0;
  std::vector<std::string> artifacts;  // relative paths under out_dir

  nlohmann::json to_json() const;
};

struct RunResult {
  ExperimentManifest manifest;
  int exit_code = 0;  // 0 pass, 2 verdict fail, 3 budget abort, 4 validation
};

// Executes the analyses in config order, writes reports/CSVs plus
// config.json and manifest.json under out_dir.
RunResult run_experiment(const ExperimentConfig& cfg);

// Re-runs the config stored next to a manifest and byte-compares every
// ensemble CSV it lists.  Returns 0 on an exact match.
int replay_experiment(const std::string& manifest_path, const std::string& scratch_dir);

const std::map<std::string, std::string>& bundled_configs();  // name -> JSON text
std::string describe_catalog();

}  // namespace groupwalk

#endif
