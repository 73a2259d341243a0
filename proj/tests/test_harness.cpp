#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "groupwalk/harness.hpp"

using namespace groupwalk;
namespace fs = std::filesystem;

namespace {

nlohmann::json tiny_config(const std::string& out) {
  return nlohmann::json{
      {"schema", kConfigSchema},
      {"name", "tiny"},
      {"seed", 404},
      {"out", out},
      {"group", {{"kind", "free"}, {"rank", 2}}},
      {"environment",
       {{"kind", "frozen"},
        {"measures", {{{"a", 0.25}, {"A", 0.25}, {"b", 0.25}, {"B", 0.25}}}}}},
      {"analyses",
       {{{"type", "smb"}, {"n", 8}, {"paths", 200}, {"window", 4}, {"save_ensemble", true}}}}};
}

fs::path fresh_dir(const char* stem) {
  fs::path p = fs::temp_directory_path() / (std::string("groupwalk-test-") + stem);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("every bundled config parses and validates") {
  for (const auto& [name, text] : bundled_configs()) {
    CAPTURE(name);
    auto doc = nlohmann::json::parse(text);
    auto cfg = parse_config(doc);
    REQUIRE(cfg.name == name);
    REQUIRE(cfg.group != nullptr);
    REQUIRE(cfg.env != nullptr);
    REQUIRE_FALSE(cfg.analyses.empty());
  }
}

TEST_CASE("the shipped catalog names its contract configs and groups") {
  auto txt = describe_catalog();
  for (auto needle : {"IntegerLattice", "Heisenberg", "FreeGroup", "z-parity", "heis-nilpotent",
                      "f2-srw", "f2-markov-env"})
    REQUIRE(txt.find(needle) != std::string::npos);
}

TEST_CASE("config validation collects every problem into one error") {
  nlohmann::json doc{{"schema", kConfigSchema},
                     {"name", "broken"},
                     {"seed", 1},
                     {"group", {{"kind", "dodecahedral"}}},
                     {"environment", {{"kind", "frozen"}}},
                     {"analyses", {{{"type", "mystery"}}, {{"type", "entropy"}}}}};
  try {
    parse_config(doc);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    REQUIRE(msg.find("group kind") != std::string::npos);
    REQUIRE(msg.find("mystery") != std::string::npos);
    REQUIRE(msg.find("n_max") != std::string::npos);
  }
}

TEST_CASE("inequality analysis requires its three inputs earlier in the list") {
  auto doc = tiny_config("/tmp/unused");
  doc["analyses"].push_back({{"type", "inequality"}});
  REQUIRE_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("running an experiment produces a complete manifest and artifacts") {
  auto out = fresh_dir("run");
  auto cfg = parse_config(tiny_config(out.string()));
  auto result = run_experiment(cfg);
  REQUIRE(result.exit_code == 0);
  const auto& m = result.manifest;
  REQUIRE(m.rng_algorithm == Rng::kAlgorithmId);
  REQUIRE(m.tool_version == kToolVersion);
  REQUIRE(m.seed == 404);
  REQUIRE_FALSE(m.config_hash.empty());
  REQUIRE(m.verdicts.size() == 1);
  REQUIRE(m.verdicts[0].analysis == "smb");
  REQUIRE(fs::exists(out / "manifest.json"));
  REQUIRE(fs::exists(out / "config.json"));
  for (const auto& a : m.artifacts) REQUIRE(fs::exists(out / a));
  // manifest on disk round-trips the same hash
  std::ifstream in(out / "manifest.json");
  auto doc = nlohmann::json::parse(in);
  REQUIRE(doc["config_hash"].get<std::string>() == m.config_hash);
}

TEST_CASE("identical configs give identical manifests and artifact bytes") {
  auto out1 = fresh_dir("det1");
  auto out2 = fresh_dir("det2");
  auto r1 = run_experiment(parse_config(tiny_config(out1.string())));
  auto r2 = run_experiment(parse_config(tiny_config(out2.string())));
  REQUIRE(r1.manifest.config_hash == r2.manifest.config_hash);
  REQUIRE(r1.manifest.artifacts == r2.manifest.artifacts);
  for (const auto& a : r1.manifest.artifacts) {
    std::ifstream f1(out1 / a, std::ios::binary), f2(out2 / a, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    REQUIRE(b1 == b2);
  }
}

TEST_CASE("replay byte-compares the stored ensembles") {
  auto out = fresh_dir("replay");
  auto scratch = fresh_dir("replay-scratch");
  auto r = run_experiment(parse_config(tiny_config(out.string())));
  REQUIRE(r.exit_code == 0);
  REQUIRE(replay_experiment((out / "manifest.json").string(), scratch.string()) == 0);
}

TEST_CASE("worker count changes neither verdicts nor ensemble artifacts") {
  auto out1 = fresh_dir("w1");
  auto out4 = fresh_dir("w4");
  auto doc1 = tiny_config(out1.string());
  auto doc4 = tiny_config(out4.string());
  doc4["workers"] = 4;
  auto r1 = run_experiment(parse_config(doc1));
  auto r4 = run_experiment(parse_config(doc4));
  REQUIRE(r1.exit_code == r4.exit_code);
  for (const auto& a : r1.manifest.artifacts) {
    if (a.find("ensemble") == std::string::npos) continue;
    std::ifstream f1(out1 / a, std::ios::binary), f2(out4 / a, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    REQUIRE(b1 == b2);
  }
}

TEST_CASE("build_group and build_environment reject malformed specs") {
  REQUIRE_THROWS_AS(build_group({{"kind", "free"}, {"rank", 0}}), ValidationError);
  auto f2 = build_group({{"kind", "free"}, {"rank", 2}});
  REQUIRE(f2->kind() == GroupKind::FreeGroup);
  // measure masses must normalize
  nlohmann::json env{{"kind", "frozen"}, {"measures", {{{"a", 0.5}, {"b", 0.4}}}}};
  REQUIRE_THROWS(build_environment(env, f2));
}
