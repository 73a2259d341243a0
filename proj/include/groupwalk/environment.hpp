#ifndef GROUPWALK_ENVIRONMENT_HPP
#define GROUPWALK_ENVIRONMENT_HPP

#include <memory>
#include <mutex>
#include <vector>

#include "groupwalk/measure.hpp"
#include "groupwalk/rng.hpp"

namespace groupwalk {

enum class EnvKind { Frozen, IID, MarkovBase, PeriodicCycle };

const char* env_kind_name(EnvKind k);

// The base system (Omega, lambda, T) together with the state -> measure
// assignment.  Validated at construction; immutable afterwards.
class EnvironmentModel : public std::enable_shared_from_this<EnvironmentModel> {
 public:
  static std::shared_ptr<const EnvironmentModel> frozen(SparseMeasure mu);
  static std::shared_ptr<const EnvironmentModel> iid(std::vector<SparseMeasure> table,
                                                     std::vector<double> probs);
  static std::shared_ptr<const EnvironmentModel> markov(std::vector<SparseMeasure> table,
                                                        std::vector<std::vector<double>> transition,
                                                        std::vector<double> stationary);
  static std::shared_ptr<const EnvironmentModel> periodic(std::vector<SparseMeasure> table);

  EnvKind kind() const { return kind_; }
  size_t num_symbols() const { return table_.size(); }
  const SparseMeasure& measure(size_t symbol) const { return table_.at(symbol); }
  const ModelPtr& group_model() const { return table_.front().model(); }
  bool periodic_base() const { return kind_ == EnvKind::PeriodicCycle; }
  const std::vector<double>& stationary() const { return stationary_; }
  const std::vector<std::vector<double>>& transition() const { return transition_; }

  int symbol_at(uint64_t seed, int64_t index) const;

 private:
  EnvironmentModel(EnvKind kind, std::vector<SparseMeasure> table);

  int sample_categorical(const std::vector<double>& probs, double u) const;

  EnvKind kind_;
  std::vector<SparseMeasure> table_;
  std::vector<double> iid_probs_;
  std::vector<std::vector<double>> transition_;
  std::vector<std::vector<double>> reverse_;  // backward kernel from stationarity
  std::vector<double> stationary_;

  // Two-sided Markov realizations are materialized lazily per seed.
  struct Orbit {
    std::vector<int> forward;   // indices 0, 1, 2, ...
    std::vector<int> backward;  // indices -1, -2, ...
    std::mutex mu;
  };
  mutable std::mutex orbits_mu_;
  mutable std::unordered_map<uint64_t, std::shared_ptr<Orbit>> orbits_;
};

using EnvPtr = std::shared_ptr<const EnvironmentModel>;

// A point of the two-sided realization: seed identifies the realization,
// index is the current time under T.  step/step_back realize T and T^{-1}.
class EnvState {
 public:
  EnvState() = default;
  EnvState(EnvPtr env, uint64_t seed, int64_t index) : env_(std::move(env)), seed_(seed), index_(index) {}

  const EnvPtr& env() const { return env_; }
  uint64_t seed() const { return seed_; }
  int64_t index() const { return index_; }
  int symbol() const { return env_->symbol_at(seed_, index_); }

  EnvState step() const { return EnvState(env_, seed_, index_ + 1); }
  EnvState step_back() const { return EnvState(env_, seed_, index_ - 1); }
  EnvState advanced(int64_t k) const { return EnvState(env_, seed_, index_ + k); }

 private:
  EnvPtr env_;
  uint64_t seed_ = 0;
  int64_t index_ = 0;
};

EnvState sample_initial(EnvPtr env, uint64_t seed);
const SparseMeasure& measure_at(const EnvState& state);

// Incremental exact convolution stream mu_{0,n} = mu^w mu^{Tw} ... mu^{T^n w}.
// current() after n calls to advance() is mu^w_{0,n}.
class ConvolutionStream {
 public:
  ConvolutionStream(EnvState start, double prune_eps = 0.0,
                    size_t budget_atoms = kDefaultAtomBudget);

  const SparseMeasure& current() const { return current_; }
  int index() const { return index_; }  // current() == mu_{0,index}
  void advance();

 private:
  EnvState state_;  // environment position of the *next* factor
  SparseMeasure current_;
  int index_;
  double prune_eps_;
  size_t budget_;
};

// Convenience: the first n_max stream terms mu_{0,0..n_max-1}.
std::vector<SparseMeasure> convolution_stream(const EnvState& start, int n_max,
                                              double prune_eps = 0.0,
                                              size_t budget_atoms = kDefaultAtomBudget);

}  // namespace groupwalk

#endif
