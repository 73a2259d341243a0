#include "groupwalk/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace groupwalk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string iso_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::ofstream open_artifact(const ExperimentConfig& cfg, ExperimentManifest& man,
                            const std::string& name) {
  man.artifacts.push_back(name);
  std::ofstream os(fs::path(cfg.out_dir) / name);
  os << std::setprecision(17);
  if (!os) throw ValidationError("cannot write artifact " + name + " under " + cfg.out_dir);
  return os;
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t i = std::min(v.size() - 1, static_cast<size_t>(q * static_cast<double>(v.size())));
  return v[i];
}

}  // namespace

ModelPtr build_group(const json& spec) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw ValidationError("group spec must be an object with a 'kind'");
  std::string kind = spec.at("kind");
  if (kind == "lattice") return GroupModel::integer_lattice(spec.value("dim", 1));
  if (kind == "heisenberg") return GroupModel::heisenberg();
  if (kind == "free") return GroupModel::free_group(spec.value("rank", 2));
  if (kind == "cyclic") return GroupModel::cyclic_quotient(spec.at("modulus").get<int64_t>());
  if (kind == "sol") return GroupModel::sol_lattice();
  throw ValidationError("unknown group kind '" + kind + "'");
}

namespace {

SparseMeasure parse_measure(const json& spec, const ModelPtr& group) {
  if (!spec.is_object() || spec.empty())
    throw ValidationError("measure spec must be a non-empty {element: mass} object");
  std::vector<std::pair<GroupElement, double>> atoms;
  for (const auto& [text, mass] : spec.items())
    atoms.emplace_back(group->parse(text), mass.get<double>());
  return SparseMeasure::from_atoms(group, atoms);
}

}  // namespace

EnvPtr build_environment(const json& spec, const ModelPtr& group) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw ValidationError("environment spec must be an object with a 'kind'");
  std::string kind = spec.at("kind");
  std::vector<SparseMeasure> table;
  for (const auto& m : spec.at("measures")) table.push_back(parse_measure(m, group));
  if (kind == "frozen") {
    if (table.size() != 1) throw ValidationError("frozen environment takes exactly one measure");
    return EnvironmentModel::frozen(table.front());
  }
  if (kind == "iid") return EnvironmentModel::iid(table, spec.at("probs").get<std::vector<double>>());
  if (kind == "markov")
    return EnvironmentModel::markov(table,
                                    spec.at("transition").get<std::vector<std::vector<double>>>(),
                                    spec.at("stationary").get<std::vector<double>>());
  if (kind == "periodic") return EnvironmentModel::periodic(table);
  throw ValidationError("unknown environment kind '" + kind + "'");
}

ExperimentConfig parse_config(const json& doc) {
  std::vector<std::string> errors;
  ExperimentConfig cfg;
  cfg.raw = doc;

  if (doc.value("schema", 0) != kConfigSchema)
    errors.push_back("config schema must be " + std::to_string(kConfigSchema));
  cfg.name = doc.value("name", "unnamed");
  if (!doc.contains("seed") || !doc.at("seed").is_number_unsigned())
    errors.push_back("config needs an unsigned 'seed'");
  else
    cfg.seed = doc.at("seed").get<uint64_t>();
  cfg.workers = doc.value("workers", 1);
  if (cfg.workers < 1) errors.push_back("workers must be >= 1");
  cfg.budget_atoms = doc.value("budget_atoms", kDefaultAtomBudget);
  cfg.out_dir = doc.value("out", "artifacts/" + cfg.name);

  try {
    cfg.group = build_group(doc.value("group", json()));
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  if (cfg.group) {
    try {
      cfg.env = build_environment(doc.value("environment", json()), cfg.group);
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }

  bool have_smb = false, have_escape = false, have_growth = false;
  for (const auto& a : doc.value("analyses", json::array())) {
    AnalysisSpec spec;
    spec.type = a.value("type", "");
    spec.params = a;
    double eps = a.value("prune_eps", 0.0);
    if (eps < 0.0 || eps > 0.01) errors.push_back(spec.type + ": prune_eps must lie in [0, 0.01]");
    auto need_positive = [&](const char* key, long long min_v) {
      if (a.value(key, static_cast<long long>(min_v)) < min_v)
        errors.push_back(spec.type + ": '" + key + "' must be >= " + std::to_string(min_v));
    };
    if (spec.type == "entropy") {
      if (!a.contains("n_max")) errors.push_back("entropy: missing n_max");
      need_positive("n_max", 1);
    } else if (spec.type == "hk") {
      need_positive("k", 1);
      if (a.value("n_max", 0) <= a.value("k", 1) + 2) errors.push_back("hk: need n_max > k + 2");
    } else if (spec.type == "tail") {
      need_positive("n_max", 2);
      if (!a.contains("elements") || !a.at("elements").is_array() || a.at("elements").empty())
        errors.push_back("tail: needs a non-empty 'elements' array");
      else if (cfg.group) {
        for (const auto& t : a.at("elements")) {
          try {
            cfg.group->parse(t.get<std::string>());
          } catch (const std::exception& e) {
            errors.push_back(std::string("tail: ") + e.what());
          }
        }
      }
    } else if (spec.type == "smb") {
      need_positive("n", 2);
      need_positive("paths", 10);
      int n = a.value("n", 2), w = a.value("window", n / 2);
      if (w < 1 || w >= n) errors.push_back("smb: window must lie in [1, n)");
      have_smb = true;
    } else if (spec.type == "escape") {
      need_positive("n", 4);
      need_positive("paths", 10);
      have_escape = true;
    } else if (spec.type == "growth") {
      need_positive("t_max", 3);
      have_growth = true;
    } else if (spec.type == "inequality") {
      if (!have_smb || !have_escape || !have_growth)
        errors.push_back("inequality: requires smb, escape and growth earlier in the analysis list");
    } else if (spec.type == "invariance") {
      if (!a.contains("elements") || a.at("elements").empty())
        errors.push_back("invariance: needs a non-empty 'elements' array");
      if (!a.contains("checkpoints") || a.at("checkpoints").empty())
        errors.push_back("invariance: needs a non-empty 'checkpoints' array");
    } else if (spec.type == "boundary") {
      need_positive("n", 40);
      need_positive("paths", 10);
      need_positive("depth", 1);
      if (cfg.group && cfg.group->kind() != GroupKind::FreeGroup)
        errors.push_back("boundary: needs a free-group model");
    } else if (spec.type == "conditional") {
      need_positive("n", 2);
      need_positive("paths", 10);
      if (!a.contains("depths") || a.at("depths").empty())
        errors.push_back("conditional: needs a non-empty 'depths' array");
      if (cfg.group && cfg.group->kind() != GroupKind::FreeGroup)
        errors.push_back("conditional: needs a free-group model");
    } else {
      errors.push_back("unknown analysis type '" + spec.type + "'");
    }
    cfg.analyses.push_back(std::move(spec));
  }

  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
  return cfg;
}

json ExperimentManifest::to_json() const {
  json j;
  j["config_hash"] = config_hash;
  j["rng_algorithm"] = rng_algorithm;
  j["tool_version"] = tool_version;
  j["seed"] = seed;
  j["workers"] = workers;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["dropped_mass_total"] = dropped_mass_total;
  j["artifacts"] = artifacts;
  j["verdicts"] = json::array();
  for (const auto& v : verdicts)
    j["verdicts"].push_back({{"analysis", v.analysis}, {"status", v.status}, {"detail", v.detail}});
  return j;
}

namespace {

struct RunContext {
  std::optional<SmbReport> smb;
  std::optional<EscapeReport> escape;
  std::optional<GrowthReport> growth;
};

std::string render_prefix(const GroupModel& model, const std::vector<int32_t>& prefix) {
  return model.render(GroupElement{model.tag(), prefix});
}

void run_entropy(const ExperimentConfig& cfg, const AnalysisSpec& a, uint64_t seed,
                 ExperimentManifest& man, ExperimentManifest::Verdict& v) {
  EnvState state(cfg.env, quenched_env_seed(seed), 0);
  EntropyReport rep = entropy_profile(state, a.params.at("n_max"), a.params.value("prune_eps", 0.0),
                                      a.params.value("budget_atoms", cfg.budget_atoms));
  auto csv = open_artifact(cfg, man, "entropy_profile.csv");
  csv << "n,entropy,dropped_mass\n";
  for (size_t i = 0; i < rep.profile.size(); ++i)
    csv << (i + 1) << "," << rep.profile[i] << "," << rep.dropped_mass[i] << "\n";
  man.dropped_mass_total += rep.dropped_mass.back();

  json j = {{"h_slope_cesaro", rep.h_slope_cesaro},
            {"h_slope_first_diff", rep.h_slope_first_diff},
            {"h_slope_first_diff_se", rep.h_slope_first_diff_se},
            {"h_slope_extrapolated", rep.h_slope_extrapolated},
            {"h_slope_extrapolated_se", rep.h_slope_extrapolated_se},
            {"fit_window_begin", rep.fit_window_begin},
            {"final_dropped_mass", rep.dropped_mass.back()}};
  open_artifact(cfg, man, "entropy.json") << j.dump(2) << "\n";
  v.status = "info";
  v.detail = "h_slope_first_diff=" + std::to_string(rep.h_slope_first_diff);
}

void run_hk(const ExperimentConfig& cfg, const AnalysisSpec& a, uint64_t seed,
            ExperimentManifest& man, ExperimentManifest::Verdict& v) {
  EnvState state(cfg.env, quenched_env_seed(seed), 0);
  HkReport rep = h_k_estimate(state, a.params.value("k", 1), a.params.at("n_max"),
                              a.params.value("prune_eps", 0.0),
                              a.params.value("budget_atoms", cfg.budget_atoms));
  auto csv = open_artifact(cfg, man, "hk_profile.csv");
  csv << "n,h_k_partial\n";
  for (size_t i = 0; i < rep.sequence.size(); ++i)
    csv << (rep.k + static_cast<int>(i)) << "," << rep.sequence[i] << "\n";
  json j = {{"k", rep.k},
            {"final_value", rep.final_value},
            {"tail_oscillation", rep.tail_oscillation}};
  open_artifact(cfg, man, "hk.json") << j.dump(2) << "\n";
  v.status = "info";
  v.detail = "h_k=" + std::to_string(rep.final_value);
}

void run_tail(const ExperimentConfig& cfg, const AnalysisSpec& a, uint64_t seed,
              ExperimentManifest& man, ExperimentManifest::Verdict& v) {
  EnvState state(cfg.env, quenched_env_seed(seed), 0);
  std::vector<GroupElement> elements;
  for (const auto& t : a.params.at("elements"))
    elements.push_back(cfg.group->parse(t.get<std::string>()));
  TailReport rep = tail_analysis(state, elements, a.params.at("n_max"),
                                 a.params.value("prune_eps", 0.0),
                                 a.params.value("budget_atoms", cfg.budget_atoms),
                                 a.params.value("radius_cap", 4));
  auto csv = open_artifact(cfg, man, "tail_delta.csv");
  csv << "element,n,tv\n";
  for (const auto& d : rep.deltas)
    for (size_t i = 0; i < d.values.size(); ++i)
      csv << cfg.group->render(d.g) << "," << (i + 1) << "," << d.values[i] << "\n";

  json j;
  j["detected_period"] = rep.detected_period;
  j["subgroup_generators"] = json::array();
  for (const auto& g : rep.subgroup_generators)
    j["subgroup_generators"].push_back(cfg.group->render(g));
  j["verdicts"] = json::object();
  for (const auto& d : rep.deltas) {
    const char* s = d.verdict == DeltaVerdict::ToZero  ? "to_zero"
                    : d.verdict == DeltaVerdict::ToTwo ? "to_two"
                                                       : "undecided";
    j["verdicts"][cfg.group->render(d.g)] = s;
  }
  open_artifact(cfg, man, "tail.json") << j.dump(2) << "\n";
  v.status = "info";
  v.detail = "period=" + std::to_string(rep.detected_period);
}

void run_smb(const ExperimentConfig& cfg, const AnalysisSpec& a, uint64_t seed,
             ExperimentManifest& man, ExperimentManifest::Verdict& v, RunContext& ctx) {
  int n = a.params.at("n");
  int window = a.params.value("window", n / 2);
  int inner = a.params.value("inner", std::max(1, n / 4));
  PathEnsemble ens = sample_paths(cfg.env, cfg.group, n, a.params.at("paths").get<size_t>(), seed,
                                  SampleMode::Quenched, cfg.workers);
  EnvState state(cfg.env, quenched_env_seed(seed), 0);
  ConvolutionStream stream(state, a.params.value("prune_eps", 0.0),
                           a.params.value("budget_atoms", cfg.budget_atoms));
  for (int i = 1; i < inner; ++i) stream.advance();
  SparseMeasure term_i = stream.current();
  for (int i = inner; i < window; ++i) stream.advance();
  SparseMeasure term_w = stream.current();
  for (int i = window; i < n; ++i) stream.advance();
  SmbReport rep = smb_estimate(ens, term_i, term_w, stream.current(), inner, window, n);
  ctx.smb = rep;

  if (a.params.value("save_ensemble", false)) {
    auto os = open_artifact(cfg, man, "smb_ensemble.csv");
    write_ensemble_csv(os, ens);
  }
  json j = {{"raw_mean", rep.raw_mean},   {"raw_se", rep.raw_se},
            {"rate", rep.rate},           {"rate_se", rep.rate_se},
            {"extrapolated", rep.extrapolated}, {"extrapolated_se", rep.extrapolated_se},
            {"n", rep.n},                 {"window_begin", rep.window_begin},
            {"inner_begin", rep.inner_begin},
            {"paths_used", rep.paths_used}, {"paths_excluded", rep.paths_excluded}};
  open_artifact(cfg, man, "smb.json") << j.dump(2) << "\n";
  v.status = "info";
  v.detail = "extrapolated=" + std::to_string(rep.extrapolated) + " raw=" + std::to_string(rep.raw_mean);
}

void run_escape(const ExperimentConfig& cfg, const AnalysisSpec& a, uint64_t seed,
                ExperimentManifest& man, ExperimentManifest::Verdict& v, RunContext& ctx) {
  PathEnsemble ens = sample_paths(cfg.env, cfg.group, a.params.at("n"),
                                  a.params.at("paths").get<size_t>(), seed, SampleMode::Quenched,
                                  cfg.workers);
  EscapeReport rep = rate_of_escape(ens);
  ctx.escape = rep;
  if (a.params.value("save_ensemble", false)) {
    auto os = open_artifact(cfg, man, "escape_ensemble.csv");
    write_ensemble_csv(os, ens);
  }
  auto csv = open_artifact(cfg, man, "escape_trend.csv");
  csv << "n,mean_norm_over_n\n";
  for (const auto& [k, m] : rep.trend) csv << k << "," << m << "\n";
  json j = {{"l_estimate", rep.l_estimate},
            {"standard_error", rep.standard_error},
            {"gauge_approximate", rep.gauge_approximate},
            {"n", rep.n},
            {"paths", rep.paths}};
  open_artifact(cfg, man, "escape.json") << j.dump(2) << "\n";
  v.status = "info";
  v.detail = "l=" + std::to_string(rep.l_estimate);
}

void run_growth(const ExperimentConfig& cfg, const AnalysisSpec& a, ExperimentManifest& man,
                ExperimentManifest::Verdict& v, RunContext& ctx) {
  GrowthReport rep = growth_rate(*cfg.group, a.params.at("t_max"),
                                 a.params.value("budget_atoms", size_t{20000000}));
  ctx.growth = rep;
  auto csv = open_artifact(cfg, man, "ball_counts.csv");
  csv << "radius,count\n";
  for (size_t t = 0; t < rep.ball_sizes.size(); ++t) csv << t << "," << rep.ball_sizes[t] << "\n";
  json j = {{"v_estimate", rep.v_estimate}};
  if (rep.polynomial_degree) j["polynomial_degree"] = *rep.polynomial_degree;
  open_artifact(cfg, man, "growth.json") << j.dump(2) << "\n";
  v.status = "info";
  v.detail = "v=" + std::to_string(rep.v_estimate);
}

void run_inequality(const ExperimentConfig& cfg, ExperimentManifest& man,
                    ExperimentManifest::Verdict& v, RunContext& ctx) {
  InequalityVerdict iv = fundamental_inequality(*ctx.smb, *ctx.escape, *ctx.growth);
  json j = {{"h", iv.h},   {"h_se", iv.h_se}, {"l", iv.l},       {"l_se", iv.l_se},
            {"v", iv.v},   {"slack", iv.slack}, {"pass", iv.pass}};
  open_artifact(cfg, man, "inequality.json") << j.dump(2) << "\n";
  v.status = iv.pass ? "pass" : "fail";
  v.detail = "h=" + std::to_string(iv.h) + " l*v=" + std::to_string(iv.l * iv.v);
}

void run_invariance(const ExperimentConfig& cfg, const AnalysisSpec& a, uint64_t seed,
                    ExperimentManifest& man, ExperimentManifest::Verdict& v) {
  EnvState state(cfg.env, quenched_env_seed(seed), 0);
  std::vector<GroupElement> elements;
  for (const auto& t : a.params.at("elements"))
    elements.push_back(cfg.group->parse(t.get<std::string>()));
  InvarianceDecayReport rep =
      invariance_decay(state, elements, a.params.at("checkpoints").get<std::vector<int>>(),
                       a.params.value("prune_eps", 0.0),
                       a.params.value("budget_atoms", cfg.budget_atoms),
                       a.params.value("threshold", 0.1));
  auto csv = open_artifact(cfg, man, "invariance_decay.csv");
  csv << "element,n,tv\n";
  bool all_pass = true;
  for (const auto& e : rep.elements) {
    for (const auto& [n, tv] : e.decay) csv << cfg.group->render(e.g) << "," << n << "," << tv << "\n";
    all_pass = all_pass && e.pass;
  }
  json j = json::object();
  for (const auto& e : rep.elements) j[cfg.group->render(e.g)] = e.pass;
  open_artifact(cfg, man, "invariance.json") << j.dump(2) << "\n";
  v.status = all_pass ? "pass" : "fail";
}

void run_boundary(const ExperimentConfig& cfg, const AnalysisSpec& a, uint64_t seed,
                  ExperimentManifest& man, ExperimentManifest::Verdict& v, RunContext& ctx) {
  const int n = a.params.at("n");
  const size_t paths = a.params.at("paths").get<size_t>();
  double l;
  if (a.params.contains("l"))
    l = a.params.at("l");
  else if (ctx.escape)
    l = ctx.escape->l_estimate;
  else
    throw ValidationError("boundary: needs an 'l' parameter or an earlier escape analysis");
  const int depth = a.params.at("depth");

  Rng master(seed);
  PathEnsemble ens = sample_paths(cfg.env, cfg.group, n, paths, master.split(1).key(),
                                  SampleMode::Quenched, cfg.workers);
  size_t stabilized = 0;
  std::map<int, std::vector<double>> dev;
  for (const auto& p : ens.paths()) {
    DeviationResult d = ray_deviation(ens, p, l);
    if (!d.stabilized) continue;
    ++stabilized;
    for (const auto& pt : d.points) dev[pt.n].push_back(pt.normalized);
  }
  double frac = static_cast<double>(stabilized) / static_cast<double>(paths);
  auto dev_csv = open_artifact(cfg, man, "boundary_deviation.csv");
  dev_csv << "n,median,q10,q90\n";
  for (const auto& [m, vals] : dev)
    dev_csv << m << "," << median_of(vals) << "," << quantile_of(vals, 0.10) << ","
            << quantile_of(vals, 0.90) << "\n";

  BoundaryHistogram hist = hitting_measure(ens, l, depth);
  auto hist_csv = open_artifact(cfg, man, "hitting_histogram.csv");
  hist_csv << "cylinder,mass\n";
  for (const auto& [prefix, mass] : hist.masses)
    hist_csv << render_prefix(*cfg.group, prefix) << "," << mass << "\n";

  json j = {{"stabilized_fraction", frac},
            {"l", l},
            {"depth", depth},
            {"excluded", hist.excluded}};
  if (a.params.value("residual", false)) {
    size_t rpaths = a.params.value("residual_paths", paths);
    BoundaryHistogram h0 = hitting_measure_streamed(cfg.env, cfg.group, n, rpaths,
                                                    master.split(2).key(), SampleMode::Quenched, l,
                                                    depth, /*env_start=*/0);
    BoundaryHistogram h1 = hitting_measure_streamed(cfg.env, cfg.group, n, rpaths,
                                                    master.split(3).key(), SampleMode::Quenched, l,
                                                    depth + 1, /*env_start=*/1);
    EnvState state(cfg.env, quenched_env_seed(master.split(2).key()), 0);
    j["stationarity_residual"] = stationarity_residual(h0, h1, measure_at(state));
    j["residual_paths"] = rpaths;
  }
  open_artifact(cfg, man, "boundary.json") << j.dump(2) << "\n";
  v.status = frac >= 0.95 ? "pass" : "fail";
  v.detail = "stabilized_fraction=" + std::to_string(frac);
}

void run_conditional(const ExperimentConfig& cfg, const AnalysisSpec& a, uint64_t seed,
                     ExperimentManifest& man, ExperimentManifest::Verdict& v) {
  EnvState state(cfg.env, quenched_env_seed(seed), 0);
  const int n = a.params.at("n");
  auto csv = open_artifact(cfg, man, "conditional_entropy.csv");
  csv << "depth,weighted_mean,weighted_se,weighted_rate,weighted_rate_se,skipped\n";
  json j = json::array();
  for (int depth : a.params.at("depths").get<std::vector<int>>()) {
    int horizon = a.params.value("horizon", n + 10 * std::max(depth, 1));
    ConditionalEntropyReport rep = conditional_entropy(
        state, cfg.group, depth, n, horizon, a.params.at("paths").get<size_t>(),
        Rng(seed).split(static_cast<uint64_t>(depth)).key());
    csv << depth << "," << rep.weighted_mean << "," << rep.weighted_se << ","
        << rep.weighted_rate << "," << rep.weighted_rate_se << "," << rep.skipped_unattainable
        << "\n";
    j.push_back({{"depth", depth},
                 {"weighted_mean", rep.weighted_mean},
                 {"weighted_se", rep.weighted_se},
                 {"weighted_rate", rep.weighted_rate},
                 {"weighted_rate_se", rep.weighted_rate_se}});
  }
  open_artifact(cfg, man, "conditional.json") << j.dump(2) << "\n";
  v.status = "info";
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult res;
  ExperimentManifest& man = res.manifest;
  man.config_hash = hex64(fnv1a64(cfg.raw.dump()));
  man.rng_algorithm = Rng::kAlgorithmId;
  man.tool_version = kToolVersion;
  man.seed = cfg.seed;
  man.workers = cfg.workers;
  man.started_at = iso_now();

  fs::create_directories(cfg.out_dir);
  {
    std::ofstream os(fs::path(cfg.out_dir) / "config.json");
    os << cfg.raw.dump(2) << "\n";
  }

  RunContext ctx;
  bool any_fail = false, any_abort = false;
  Rng master(cfg.seed);
  for (size_t i = 0; i < cfg.analyses.size(); ++i) {
    const AnalysisSpec& a = cfg.analyses[i];
    uint64_t seed = master.split(100 + i).key();
    ExperimentManifest::Verdict verdict{a.type, "info", ""};
    try {
      if (a.type == "entropy")
        run_entropy(cfg, a, seed, man, verdict);
      else if (a.type == "hk")
        run_hk(cfg, a, seed, man, verdict);
      else if (a.type == "tail")
        run_tail(cfg, a, seed, man, verdict);
      else if (a.type == "smb")
        run_smb(cfg, a, seed, man, verdict, ctx);
      else if (a.type == "escape")
        run_escape(cfg, a, seed, man, verdict, ctx);
      else if (a.type == "growth")
        run_growth(cfg, a, man, verdict, ctx);
      else if (a.type == "inequality")
        run_inequality(cfg, man, verdict, ctx);
      else if (a.type == "invariance")
        run_invariance(cfg, a, seed, man, verdict);
      else if (a.type == "boundary")
        run_boundary(cfg, a, seed, man, verdict, ctx);
      else if (a.type == "conditional")
        run_conditional(cfg, a, seed, man, verdict);
    } catch (const BudgetError& e) {
      verdict.status = "aborted";
      verdict.detail = e.what();
      any_abort = true;
    } catch (const std::exception& e) {
      verdict.status = "fail";
      verdict.detail = e.what();
      any_fail = true;
    }
    if (verdict.status == "fail") any_fail = true;
    man.verdicts.push_back(std::move(verdict));
  }

  man.finished_at = iso_now();
  {
    std::ofstream os(fs::path(cfg.out_dir) / "manifest.json");
    os << man.to_json().dump(2) << "\n";
  }
  res.exit_code = any_abort ? 3 : any_fail ? 2 : 0;
  return res;
}

int replay_experiment(const std::string& manifest_path, const std::string& scratch_dir) {
  fs::path mpath(manifest_path);
  std::ifstream mf(mpath);
  if (!mf) throw ValidationError("cannot read manifest " + manifest_path);
  json manifest = json::parse(mf);
  std::ifstream cf(mpath.parent_path() / "config.json");
  if (!cf) throw ValidationError("cannot read config.json next to the manifest");
  json config_doc = json::parse(cf);

  config_doc["out"] = scratch_dir;
  ExperimentConfig cfg = parse_config(config_doc);
  RunResult rr = run_experiment(cfg);
  if (rr.exit_code == 3 || rr.exit_code == 4) return rr.exit_code;

  for (const auto& art : manifest.value("artifacts", std::vector<std::string>{})) {
    if (art.find("ensemble") == std::string::npos) continue;
    std::ifstream a(mpath.parent_path() / art, std::ios::binary);
    std::ifstream b(fs::path(scratch_dir) / art, std::ios::binary);
    if (!a || !b) return 2;
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    if (sa != sb) return 2;
  }
  return 0;
}

const std::map<std::string, std::string>& bundled_configs() {
  static const std::map<std::string, std::string> configs = {
      {"z-parity", R"json({
  "schema": 1,
  "name": "z-parity",
  "group": {"kind": "lattice", "dim": 1},
  "environment": {"kind": "frozen", "measures": [{"(1)": 0.5, "(-1)": 0.5}]},
  "seed": 7011,
  "analyses": [
    {"type": "tail", "n_max": 200, "elements": ["(1)", "(2)"], "radius_cap": 4}
  ]
})json"},
      {"z-lazy", R"json({
  "schema": 1,
  "name": "z-lazy",
  "group": {"kind": "lattice", "dim": 1},
  "environment": {"kind": "frozen", "measures": [{"(-1)": 0.25, "(0)": 0.5, "(1)": 0.25}]},
  "seed": 7012,
  "analyses": [
    {"type": "entropy", "n_max": 200},
    {"type": "hk", "k": 1, "n_max": 200},
    {"type": "tail", "n_max": 200, "elements": ["(1)"], "radius_cap": 4},
    {"type": "invariance", "elements": ["(1)"], "checkpoints": [50, 100, 200]}
  ]
})json"},
      {"heis-nilpotent", R"json({
  "schema": 1,
  "name": "heis-nilpotent",
  "group": {"kind": "heisenberg"},
  "environment": {"kind": "frozen", "measures": [{
    "(0,0,0)": 0.3333333333333333,
    "(1,0,0)": 0.16666666666666666, "(-1,0,0)": 0.16666666666666666,
    "(0,1,0)": 0.16666666666666666, "(0,-1,0)": 0.16666666666666669
  }]},
  "seed": 7013,
  "analyses": [
    {"type": "growth", "t_max": 10},
    {"type": "entropy", "n_max": 30},
    {"type": "invariance", "elements": ["(1,0,0)", "(0,1,0)"], "checkpoints": [10, 20, 30],
     "threshold": 0.5}
  ]
})json"},
      {"f2-srw", R"json({
  "schema": 1,
  "name": "f2-srw",
  "group": {"kind": "free", "rank": 2},
  "environment": {"kind": "frozen", "measures": [{"a": 0.25, "A": 0.25, "b": 0.25, "B": 0.25}]},
  "seed": 7014,
  "analyses": [
    {"type": "entropy", "n_max": 12},
    {"type": "smb", "n": 12, "window": 6, "paths": 4000, "save_ensemble": true},
    {"type": "escape", "n": 1000, "paths": 10000},
    {"type": "growth", "t_max": 12},
    {"type": "inequality"},
    {"type": "boundary", "n": 1000, "paths": 10000, "depth": 2}
  ]
})json"},
      {"f2-markov-env", R"json({
  "schema": 1,
  "name": "f2-markov-env",
  "group": {"kind": "free", "rank": 2},
  "environment": {
    "kind": "markov",
    "measures": [
      {"a": 0.25, "A": 0.25, "b": 0.25, "B": 0.25},
      {"a": 0.28, "A": 0.28, "b": 0.22, "B": 0.22}
    ],
    "transition": [[0.7, 0.3], [0.3, 0.7]],
    "stationary": [0.5, 0.5]
  },
  "seed": 7015,
  "analyses": [
    {"type": "entropy", "n_max": 12},
    {"type": "smb", "n": 12, "window": 6, "paths": 4000, "save_ensemble": true}
  ]
})json"},
      {"f2-periodic", R"json({
  "schema": 1,
  "name": "f2-periodic",
  "group": {"kind": "free", "rank": 2},
  "environment": {
    "kind": "periodic",
    "measures": [
      {"a": 0.25, "A": 0.25, "b": 0.25, "B": 0.25},
      {"a": 0.28, "A": 0.28, "b": 0.22, "B": 0.22}
    ]
  },
  "seed": 7016,
  "analyses": [
    {"type": "boundary", "n": 300, "paths": 10000, "depth": 2, "l": 0.5,
     "residual": true, "residual_paths": 100000}
  ]
})json"},
      {"sol-centered", R"json({
  "schema": 1,
  "name": "sol-centered",
  "group": {"kind": "sol"},
  "environment": {"kind": "frozen", "measures": [{
    "(0,0,0)": 0.2,
    "(1,0,0)": 0.2, "(-1,0,0)": 0.2,
    "(0,1,0)": 0.2, "(0,-1,0)": 0.2
  }]},
  "seed": 7017,
  "analyses": [
    {"type": "growth", "t_max": 8},
    {"type": "escape", "n": 200, "paths": 2000}
  ]
})json"},
  };
  return configs;
}

std::string describe_catalog() {
  std::ostringstream os;
  os << "groups:\n"
     << "  IntegerLattice(d)   free abelian lattice, L1 word length\n"
     << "  Heisenberg          discrete Heisenberg group, BFS lengths + gauge fallback\n"
     << "  FreeGroup(k)        reduced words over k generators\n"
     << "  CyclicQuotient(d)   Z/dZ\n"
     << "  SolLattice          Z^2 x_A Z (gauge lengths only, exploratory)\n"
     << "environments:\n"
     << "  frozen              one fixed step measure (classical random walk)\n"
     << "  iid                 independent symbol per step\n"
     << "  markov              stationary irreducible Markov base, two-sided\n"
     << "  periodic            deterministic cycle with uniform random phase\n"
     << "analyses:\n"
     << "  entropy, hk, tail, smb, escape, growth, inequality, invariance,\n"
     << "  boundary, conditional\n"
     << "bundled configs:\n";
  for (const auto& [name, text] : bundled_configs()) {
    json j = json::parse(text);
    os << "  " << name << "  (group " << j["group"]["kind"].get<std::string>() << ", "
       << j["analyses"].size() << " analyses)\n";
  }
  return os.str();
}

}  // namespace groupwalk
