#include "groupwalk/walk.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

namespace groupwalk {

namespace {

// Cumulative mass table over the sorted support; sampling walks the CDF.
std::vector<double> cdf_for(const SparseMeasure& mu,
                            const std::vector<GroupElement>& sorted_support) {
  std::vector<double> cdf;
  cdf.reserve(sorted_support.size());
  double acc = 0;
  for (const auto& g : sorted_support) {
    acc += mu.mass_of(g);
    cdf.push_back(acc);
  }
  return cdf;
}

size_t draw_index(const std::vector<double>& cdf, double u) {
  double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  size_t i = static_cast<size_t>(it - cdf.begin());
  return std::min(i, cdf.size() - 1);
}

}  // namespace

PathEnsemble::PathEnsemble(EnvPtr env, ModelPtr group, int n, SampleMode mode,
                           uint64_t master_seed, int workers)
    : env_(std::move(env)),
      group_(std::move(group)),
      n_(n),
      mode_(mode),
      master_seed_(master_seed),
      workers_(workers) {
  supports_.resize(env_->num_symbols());
  for (size_t s = 0; s < env_->num_symbols(); ++s) {
    for (const auto& [g, p] : env_->measure(s).atoms()) supports_[s].push_back(g);
    std::sort(supports_[s].begin(), supports_[s].end(), element_less);
  }
}

GroupElement PathEnsemble::increment(const PathSample& p, int k) const {
  return supports_[p.symbols[static_cast<size_t>(k)]][p.increment_ids[static_cast<size_t>(k)]];
}

void PathEnsemble::fold_positions(const PathSample& p,
                                  const std::function<void(int, const GroupElement&)>& cb) const {
  GroupElement x = group_->identity();
  cb(0, x);
  if (group_->kind() == GroupKind::FreeGroup) {
    // In-place reduced-word fold: long paths would otherwise pay a full word
    // copy per step.
    x.w.reserve(static_cast<size_t>(n_));
    for (int k = 0; k < n_; ++k) {
      for (int32_t letter : increment(p, k).w) {
        if (!x.w.empty() && x.w.back() == -letter)
          x.w.pop_back();
        else
          x.w.push_back(letter);
      }
      cb(k + 1, x);
    }
    return;
  }
  for (int k = 0; k < n_; ++k) {
    x = group_->mul(x, increment(p, k));
    cb(k + 1, x);
  }
}

GroupElement PathEnsemble::terminal_position(const PathSample& p) const {
  GroupElement x = group_->identity();
  for (int k = 0; k < n_; ++k) x = group_->mul(x, increment(p, k));
  return x;
}

PathEnsemble sample_paths(EnvPtr env, ModelPtr group, int n, size_t count, uint64_t seed,
                          SampleMode mode, int workers, size_t first_index, int64_t env_start) {
  if (n < 1 || count < 1) throw ValidationError("sample_paths needs n >= 1 and count >= 1");
  if (env->group_model()->tag() != group->tag())
    throw ModelMismatchError("environment measures do not live on the requested group");
  PathEnsemble ens(env, group, n, mode, seed, workers);
  ens.paths().resize(count);

  Rng master(seed);
  uint64_t env_seed = quenched_env_seed(seed);

  // Per-symbol CDFs over the sorted supports.
  std::vector<std::vector<double>> cdfs(env->num_symbols());
  for (size_t s = 0; s < env->num_symbols(); ++s)
    cdfs[s] = cdf_for(env->measure(s), ens.symbol_supports()[s]);

  auto sample_one = [&](size_t idx) {
    PathSample& p = ens.paths()[idx];
    Rng path_rng = master.split(first_index + idx + 1);
    p.env_seed = mode == SampleMode::Quenched ? env_seed : path_rng.split(0xabba).key();
    p.walk_seed = path_rng.key();
    p.increment_ids.resize(static_cast<size_t>(n));
    p.symbols.resize(static_cast<size_t>(n));
    EnvState state = sample_initial(env, p.env_seed).advanced(env_start);
    for (int k = 0; k < n; ++k) {
      int sym = state.symbol();
      p.symbols[static_cast<size_t>(k)] = static_cast<uint8_t>(sym);
      size_t id = draw_index(cdfs[static_cast<size_t>(sym)],
                             path_rng.uniform_at(static_cast<uint64_t>(k)));
      p.increment_ids[static_cast<size_t>(k)] = static_cast<uint16_t>(id);
      state = state.step();
    }
  };

  // Paths are keyed by index, so the worker count never changes the output.
  int nw = std::max(1, workers);
  if (nw == 1 || count < 256) {
    for (size_t i = 0; i < count; ++i) sample_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> cursor{0};
    for (int t = 0; t < nw; ++t)
      pool.emplace_back([&] {
        for (;;) {
          size_t chunk = cursor.fetch_add(1024);
          if (chunk >= count) return;
          size_t end = std::min(count, chunk + 1024);
          for (size_t i = chunk; i < end; ++i) sample_one(i);
        }
      });
    for (auto& t : pool) t.join();
  }
  return ens;
}

uint64_t quenched_env_seed(uint64_t master_seed) { return Rng(master_seed).split(0xe17).key(); }

void for_each_path(EnvPtr env, ModelPtr group, int n, size_t count, uint64_t seed,
                   SampleMode mode, const std::function<void(const PathEnsemble&, const PathSample&)>& cb,
                   size_t chunk, int64_t env_start) {
  if (chunk < 1) throw ValidationError("for_each_path needs a positive chunk size");
  for (size_t first = 0; first < count; first += chunk) {
    size_t batch = std::min(chunk, count - first);
    PathEnsemble ens = sample_paths(env, group, n, batch, seed, mode, /*workers=*/1, first, env_start);
    for (const auto& p : ens.paths()) cb(ens, p);
  }
}

std::pair<EnvState, std::vector<GroupElement>> skew_transform(
    const EnvState& state, const std::vector<GroupElement>& increments) {
  if (increments.empty()) throw ValidationError("skew_transform needs a non-empty increment list");
  return {state.step(), std::vector<GroupElement>(increments.begin() + 1, increments.end())};
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens) {
  os << "path_id,step,element,env_symbol\n";
  const auto& model = *ens.group();
  for (size_t i = 0; i < ens.size(); ++i) {
    const auto& p = ens.paths()[i];
    for (int k = 0; k < ens.length(); ++k)
      os << i << "," << k << "," << model.render(ens.increment(p, k)) << ","
         << static_cast<int>(p.symbols[static_cast<size_t>(k)]) << "\n";
  }
}

}  // namespace groupwalk
