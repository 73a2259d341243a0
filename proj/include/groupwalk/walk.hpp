#ifndef GROUPWALK_WALK_HPP
#define GROUPWALK_WALK_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "groupwalk/environment.hpp"

namespace groupwalk {

enum class SampleMode { Quenched, Annealed };

// One sampled trajectory.  Increments are stored as indices into the
// deterministic (encoded-key sorted) support of the step measure, keeping
// big ensembles compact; positions are reconstructed by folding.
struct PathSample {
  uint64_t env_seed = 0;
  uint64_t walk_seed = 0;
  std::vector<uint16_t> increment_ids;
  std::vector<uint8_t> symbols;  // environment symbol at each step
};

class PathEnsemble {
 public:
  PathEnsemble(EnvPtr env, ModelPtr group, int n, SampleMode mode, uint64_t master_seed,
               int workers);

  const EnvPtr& env() const { return env_; }
  const ModelPtr& group() const { return group_; }
  int length() const { return n_; }
  SampleMode mode() const { return mode_; }
  uint64_t master_seed() const { return master_seed_; }
  int workers() const { return workers_; }
  std::vector<PathSample>& paths() { return paths_; }
  const std::vector<PathSample>& paths() const { return paths_; }
  size_t size() const { return paths_.size(); }

  // Support atoms of each symbol's measure, sorted by encoded key; the target
  // of increment_ids.
  const std::vector<std::vector<GroupElement>>& symbol_supports() const { return supports_; }

  GroupElement increment(const PathSample& p, int k) const;
  // Calls cb(k, x_k) for k = 0..n with x_0 = e.
  void fold_positions(const PathSample& p,
                      const std::function<void(int, const GroupElement&)>& cb) const;
  GroupElement terminal_position(const PathSample& p) const;

 private:
  EnvPtr env_;
  ModelPtr group_;
  int n_;
  SampleMode mode_;
  uint64_t master_seed_;
  int workers_;
  std::vector<std::vector<GroupElement>> supports_;
  std::vector<PathSample> paths_;
};

// Quenched mode fixes one environment realization (law P_omega); annealed
// draws a fresh realization per path (law P-bar).
PathEnsemble sample_paths(EnvPtr env, ModelPtr group, int n, size_t count, uint64_t seed,
                          SampleMode mode, int workers = 1, size_t first_index = 0,
                          int64_t env_start = 0);

// Streaming variant: identical path-by-path output to one sample_paths call
// (per-path seeds are keyed by absolute index), but only `chunk` paths are
// ever materialized, so huge ensembles can be aggregated in O(chunk) memory.
void for_each_path(EnvPtr env, ModelPtr group, int n, size_t count, uint64_t seed,
                   SampleMode mode, const std::function<void(const PathEnsemble&, const PathSample&)>& cb,
                   size_t chunk = 4096, int64_t env_start = 0);

// The environment-realization seed a quenched ensemble with this master seed
// will use; exposed so exact streams can be run against the same realization.
uint64_t quenched_env_seed(uint64_t master_seed);

// T-bar: advance the environment one step and re-base the path at x_1.
std::pair<EnvState, std::vector<GroupElement>> skew_transform(
    const EnvState& state, const std::vector<GroupElement>& increments);

// Ensemble CSV persistence (path_id, step, element, env_symbol).
void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens);

}  // namespace groupwalk

#endif
