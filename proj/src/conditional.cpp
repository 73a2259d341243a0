#include "groupwalk/conditional.hpp"

#include <array>
#include <cmath>

namespace groupwalk {

namespace {

struct RadialStep {
  double lazy;     // mass at the identity
  double per_gen;  // mass on each of the 2k generators
};

// The lumping is exact only for measures that are uniform across the
// generator sphere; anything else is rejected rather than approximated.
RadialStep radial_decomposition(const SparseMeasure& mu, const GroupModel& model) {
  RadialStep r{0.0, -1.0};
  for (const auto& [g, p] : mu.atoms()) {
    if (g.w.empty()) {
      r.lazy = p;
      continue;
    }
    if (g.w.size() != 1)
      throw ValidationError(
          "conditional sampling needs step measures supported on {e} and the generators");
    if (r.per_gen < 0)
      r.per_gen = p;
    else if (std::abs(r.per_gen - p) > 1e-12)
      throw ValidationError("conditional sampling needs equal mass on every generator");
  }
  size_t gens = model.generators().size();
  if (r.per_gen < 0) r.per_gen = 0.0;
  double total = r.lazy + r.per_gen * static_cast<double>(gens);
  if (std::abs(total - (1.0 - mu.dropped_mass())) > 1e-9)
    throw ValidationError("conditional sampling needs full generator spheres in each support");
  return r;
}

}  // namespace

CylinderSurrogate::CylinderSurrogate(EnvState start, ModelPtr group, std::vector<int32_t> prefix,
                                     int horizon)
    : group_(std::move(group)), prefix_(std::move(prefix)), horizon_(horizon) {
  if (group_->kind() != GroupKind::FreeGroup)
    throw ValidationError("cylinder surrogates are defined on free groups only");
  if (static_cast<int>(prefix_.size()) > 4)
    throw ValidationError("cylinder depth must be <= 4");
  if (horizon_ < 1) throw ValidationError("surrogate horizon must be >= 1");
  for (size_t i = 0; i < prefix_.size(); ++i) {
    int32_t letter = prefix_[i];
    if (letter == 0 || std::abs(letter) > group_->dim())
      throw ValidationError("cylinder prefix letter out of range");
    if (i > 0 && prefix_[i] == -prefix_[i - 1])
      throw ValidationError("cylinder prefix must be a reduced word");
  }
  if (prefix_.empty()) return;  // whole boundary, eps_hat == 1

  int depth = static_cast<int>(prefix_.size());
  int rmax = depth + horizon_ + 1;
  double q = static_cast<double>(group_->generators().size());

  std::vector<RadialStep> steps(static_cast<size_t>(horizon_));
  EnvState s = start;
  for (int k = 0; k < horizon_; ++k) {
    steps[static_cast<size_t>(k)] = radial_decomposition(measure_at(s), *group_);
    s = s.step();
  }

  table_.resize(static_cast<size_t>(horizon_) + 1);
  for (auto& level : table_)
    for (auto& side : level) side.assign(static_cast<size_t>(rmax) + 1, 0.0);
  // k = N: indicator of the subtree (root vertex included).
  for (int r = 0; r <= rmax; ++r) {
    table_[static_cast<size_t>(horizon_)][1][static_cast<size_t>(r)] = r == 0 ? 1.0 : 0.0;
    table_[static_cast<size_t>(horizon_)][2][static_cast<size_t>(r)] = r >= 1 ? 1.0 : 0.0;
  }
  for (int k = horizon_ - 1; k >= 0; --k) {
    const auto& nxt = table_[static_cast<size_t>(k) + 1];
    auto& cur = table_[static_cast<size_t>(k)];
    const RadialStep& st = steps[static_cast<size_t>(k)];
    auto at = [&](int side, int r) -> double {
      if (r > rmax) return 0.0;  // unreachable from any queried state
      return nxt[static_cast<size_t>(side)][static_cast<size_t>(r)];
    };
    // root vertex: one parent edge (outside), q-1 child edges (inside)
    cur[1][0] = st.lazy * at(1, 0) + st.per_gen * (at(0, 1) + (q - 1.0) * at(2, 1));
    for (int r = 1; r <= rmax; ++r) {
      cur[0][static_cast<size_t>(r)] =
          st.lazy * at(0, r) +
          st.per_gen * ((r == 1 ? at(1, 0) : at(0, r - 1)) + (q - 1.0) * at(0, r + 1));
      cur[2][static_cast<size_t>(r)] =
          st.lazy * at(2, r) +
          st.per_gen * ((r == 1 ? at(1, 0) : at(2, r - 1)) + (q - 1.0) * at(2, r + 1));
    }
  }
}

CylinderSurrogate::Lump CylinderSurrogate::classify(const GroupElement& g) const {
  int depth = static_cast<int>(prefix_.size());
  int common = 0;
  while (common < depth && common < static_cast<int>(g.w.size()) &&
         g.w[static_cast<size_t>(common)] == prefix_[static_cast<size_t>(common)])
    ++common;
  int len = static_cast<int>(g.w.size());
  if (common == depth) return {len - depth, len == depth ? 1 : 2};
  return {len + depth - 2 * common, 0};
}

double CylinderSurrogate::eps_hat(int k, const GroupElement& g) const {
  if (prefix_.empty()) return 1.0;
  if (k < 0 || k > horizon_) throw ValidationError("surrogate queried outside [0, horizon]");
  Lump l = classify(g);
  const auto& level = table_[static_cast<size_t>(k)];
  if (l.r >= static_cast<int>(level[0].size())) return 0.0;
  return level[static_cast<size_t>(l.side)][static_cast<size_t>(l.r)];
}

double CylinderSurrogate::origin_mass() const { return eps_hat(0, group_->identity()); }

PathEnsemble conditional_sampler(const EnvState& env_state, ModelPtr group, int horizon_N,
                                 const std::vector<int32_t>& cylinder_prefix, int n, size_t count,
                                 uint64_t seed) {
  int depth = static_cast<int>(cylinder_prefix.size());
  if (depth > 4) throw ValidationError("cylinder depth must be <= 4");
  if (horizon_N < n + 10 * depth)
    throw ValidationError("surrogate horizon must be >= n + 10*depth");
  CylinderSurrogate surrogate(env_state, group, cylinder_prefix, horizon_N);
  if (surrogate.origin_mass() <= 0.0)
    throw UnattainableCylinderError("cylinder has surrogate density 0 at the origin");

  PathEnsemble ens(env_state.env(), group, n, SampleMode::Quenched, seed, 1);
  ens.paths().resize(count);
  Rng master(seed);

  // Symbol window and per-symbol sorted supports are shared by all paths.
  std::vector<int> symbols(static_cast<size_t>(n));
  {
    EnvState s = env_state;
    for (int k = 0; k < n; ++k) {
      symbols[static_cast<size_t>(k)] = s.symbol();
      s = s.step();
    }
  }

  for (size_t idx = 0; idx < count; ++idx) {
    PathSample& p = ens.paths()[idx];
    Rng path_rng = master.split(idx + 1);
    p.env_seed = env_state.seed();
    p.walk_seed = path_rng.key();
    p.increment_ids.resize(static_cast<size_t>(n));
    p.symbols.resize(static_cast<size_t>(n));
    GroupElement x = group->identity();
    for (int k = 0; k < n; ++k) {
      int sym = symbols[static_cast<size_t>(k)];
      p.symbols[static_cast<size_t>(k)] = static_cast<uint8_t>(sym);
      const auto& support = ens.symbol_supports()[static_cast<size_t>(sym)];
      const auto& mu = env_state.env()->measure(static_cast<size_t>(sym));
      double total = 0;
      std::vector<double> weights(support.size());
      std::vector<GroupElement> next(support.size());
      for (size_t i = 0; i < support.size(); ++i) {
        next[i] = group->mul(x, support[i]);
        weights[i] = mu.mass_of(support[i]) * surrogate.eps_hat(k + 1, next[i]);
        total += weights[i];
      }
      double u = path_rng.uniform_at(static_cast<uint64_t>(k)) * total;
      size_t pick = support.size() - 1;
      double acc = 0;
      for (size_t i = 0; i < support.size(); ++i) {
        acc += weights[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      p.increment_ids[static_cast<size_t>(k)] = static_cast<uint16_t>(pick);
      x = next[pick];
    }
  }
  return ens;
}

std::vector<std::vector<int32_t>> all_cylinder_prefixes(const GroupModel& model, int depth) {
  if (model.kind() != GroupKind::FreeGroup)
    throw ValidationError("cylinder prefixes are defined on free groups only");
  std::vector<std::vector<int32_t>> out;
  if (depth == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int32_t> letters;
  for (int i = 1; i <= model.dim(); ++i) {
    letters.push_back(i);
    letters.push_back(-i);
  }
  std::vector<int32_t> word;
  std::function<void()> extend = [&] {
    if (static_cast<int>(word.size()) == depth) {
      out.push_back(word);
      return;
    }
    for (int32_t l : letters) {
      if (!word.empty() && word.back() == -l) continue;
      word.push_back(l);
      extend();
      word.pop_back();
    }
  };
  extend();
  return out;
}

}  // namespace groupwalk
