// groupwalk: configuration-driven experiments on random walks with
// time-dependent and random step distributions.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "groupwalk/harness.hpp"

using nlohmann::json;

namespace {

json load_config_doc(const std::string& ref) {
  const auto& bundled = groupwalk::bundled_configs();
  if (auto it = bundled.find(ref); it != bundled.end()) return json::parse(it->second);
  std::ifstream f(ref);
  if (!f) throw groupwalk::ValidationError("no bundled config or readable file named '" + ref + "'");
  return json::parse(f);
}

void apply_overrides(json& doc, std::optional<uint64_t> seed, std::optional<int> workers,
                     std::optional<int> budget_mb, std::optional<std::string> out) {
  if (const char* w = std::getenv("GROUPWALK_WORKERS")) doc["workers"] = std::atoi(w);
  if (const char* b = std::getenv("GROUPWALK_BUDGET_MB"))
    doc["budget_atoms"] = static_cast<size_t>(std::atoll(b)) * 12500;
  if (seed) doc["seed"] = *seed;
  if (workers) doc["workers"] = *workers;
  if (budget_mb) doc["budget_atoms"] = static_cast<size_t>(*budget_mb) * 12500;
  if (out) doc["out"] = *out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "groupwalk: random walks on groups with time-dependent and random step "
      "distributions.\nEnvironment overrides: GROUPWALK_WORKERS, GROUPWALK_BUDGET_MB "
      "(flags win over the environment).\nExit codes: 0 all verdicts pass, 2 verdict "
      "failed, 3 budget abort, 4 validation failure."};
  app.require_subcommand(1);

  std::string config_ref, out_dir, manifest_path, scratch_dir = "artifacts/replay-scratch";
  std::optional<uint64_t> seed;
  std::optional<int> workers, budget_mb;
  std::optional<std::string> out;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_ref, "bundled config name or path to a JSON config")
        ->required();
    cmd->add_option("--seed", seed, "override the master seed");
    cmd->add_option("--workers", workers, "worker pool size for ensemble sampling");
    cmd->add_option("--budget-mb", budget_mb, "memory budget for exact convolution supports");
    cmd->add_option("--out", out, "output directory override");
  };

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  add_common(run);
  CLI::App* validate = app.add_subcommand("validate", "validate a config without running it");
  add_common(validate);
  CLI::App* describe = app.add_subcommand("describe", "list groups, environments, bundled configs");
  CLI::App* replay = app.add_subcommand("replay", "re-run a manifest and verify ensemble bytes");
  replay->add_option("manifest", manifest_path, "path to a manifest.json")->required();
  replay->add_option("--scratch", scratch_dir, "scratch output directory for the re-run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (describe->parsed()) {
      std::cout << groupwalk::describe_catalog();
      return 0;
    }
    if (replay->parsed()) {
      int rc = groupwalk::replay_experiment(manifest_path, scratch_dir);
      std::cout << (rc == 0 ? "replay: ensemble artifacts match byte-for-byte\n"
                            : "replay: MISMATCH or failed re-run\n");
      return rc;
    }
    json doc = load_config_doc(config_ref);
    apply_overrides(doc, seed, workers, budget_mb, out);
    groupwalk::ExperimentConfig cfg = groupwalk::parse_config(doc);
    if (validate->parsed()) {
      std::cout << "config '" << cfg.name << "' is valid (" << cfg.analyses.size()
                << " analyses)\n";
      return 0;
    }
    groupwalk::RunResult res = groupwalk::run_experiment(cfg);
    for (const auto& v : res.manifest.verdicts)
      std::cout << v.analysis << ": " << v.status << (v.detail.empty() ? "" : "  " + v.detail)
                << "\n";
    std::cout << "manifest: " << cfg.out_dir << "/manifest.json\n";
    return res.exit_code;
  } catch (const groupwalk::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
