#include "groupwalk/environment.hpp"

#include <cmath>
#include <deque>

namespace groupwalk {

const char* env_kind_name(EnvKind k) {
  switch (k) {
    case EnvKind::Frozen: return "Frozen";
    case EnvKind::IID: return "IID";
    case EnvKind::MarkovBase: return "MarkovBase";
    case EnvKind::PeriodicCycle: return "PeriodicCycle";
  }
  return "?";
}

EnvironmentModel::EnvironmentModel(EnvKind kind, std::vector<SparseMeasure> table)
    : kind_(kind), table_(std::move(table)) {
  if (table_.empty()) throw ValidationError("environment needs at least one measure");
  uint32_t tag = table_.front().model()->tag();
  for (const auto& m : table_)
    if (m.model()->tag() != tag)
      throw ModelMismatchError("environment measures must share one group model");
}

std::shared_ptr<const EnvironmentModel> EnvironmentModel::frozen(SparseMeasure mu) {
  std::vector<SparseMeasure> t;
  t.push_back(std::move(mu));
  return std::shared_ptr<const EnvironmentModel>(
      new EnvironmentModel(EnvKind::Frozen, std::move(t)));
}

std::shared_ptr<const EnvironmentModel> EnvironmentModel::iid(std::vector<SparseMeasure> table,
                                                              std::vector<double> probs) {
  auto env = std::shared_ptr<EnvironmentModel>(new EnvironmentModel(EnvKind::IID, std::move(table)));
  if (probs.size() != env->table_.size())
    throw ValidationError("IID probability vector length mismatch");
  double s = 0;
  for (double p : probs) {
    if (p < 0) throw ValidationError("IID probabilities must be non-negative");
    s += p;
  }
  if (std::abs(s - 1.0) > kMassTolerance) throw ValidationError("IID probabilities must sum to 1");
  env->iid_probs_ = std::move(probs);
  return env;
}

std::shared_ptr<const EnvironmentModel> EnvironmentModel::markov(
    std::vector<SparseMeasure> table, std::vector<std::vector<double>> transition,
    std::vector<double> stationary) {
  auto env = std::shared_ptr<EnvironmentModel>(
      new EnvironmentModel(EnvKind::MarkovBase, std::move(table)));
  size_t n = env->table_.size();
  if (transition.size() != n || stationary.size() != n)
    throw ValidationError("MarkovBase matrix/stationary dimensions mismatch");
  for (const auto& row : transition) {
    if (row.size() != n) throw ValidationError("MarkovBase transition matrix must be square");
    double s = 0;
    for (double p : row) {
      if (p < 0) throw ValidationError("MarkovBase transition entries must be non-negative");
      s += p;
    }
    if (std::abs(s - 1.0) > kMassTolerance) throw ValidationError("MarkovBase row sums must be 1");
  }
  for (size_t j = 0; j < n; ++j) {
    double s = 0;
    for (size_t i = 0; i < n; ++i) s += stationary[i] * transition[i][j];
    if (std::abs(s - stationary[j]) > 1e-10)
      throw ValidationError("supplied stationary vector is not stationary");
  }
  // Irreducibility: every state reaches every other through positive entries.
  for (size_t start = 0; start < n; ++start) {
    std::vector<bool> seen(n, false);
    std::deque<size_t> q{start};
    seen[start] = true;
    while (!q.empty()) {
      size_t i = q.front();
      q.pop_front();
      for (size_t j = 0; j < n; ++j)
        if (transition[i][j] > 0 && !seen[j]) {
          seen[j] = true;
          q.push_back(j);
        }
    }
    for (bool b : seen)
      if (!b) throw ValidationError("MarkovBase chain is not irreducible");
  }
  env->reverse_.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    if (!(stationary[i] > 0)) throw ValidationError("stationary vector must be positive");
    for (size_t j = 0; j < n; ++j)
      env->reverse_[i][j] = stationary[j] * transition[j][i] / stationary[i];
  }
  env->transition_ = std::move(transition);
  env->stationary_ = std::move(stationary);
  return env;
}

std::shared_ptr<const EnvironmentModel> EnvironmentModel::periodic(
    std::vector<SparseMeasure> table) {
  return std::shared_ptr<const EnvironmentModel>(
      new EnvironmentModel(EnvKind::PeriodicCycle, std::move(table)));
}

int EnvironmentModel::sample_categorical(const std::vector<double>& probs, double u) const {
  double acc = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int EnvironmentModel::symbol_at(uint64_t seed, int64_t index) const {
  switch (kind_) {
    case EnvKind::Frozen:
      return 0;
    case EnvKind::IID:
      return sample_categorical(iid_probs_, Rng(seed).uniform_at(Rng::zigzag(index)));
    case EnvKind::PeriodicCycle: {
      int64_t d = static_cast<int64_t>(table_.size());
      int64_t r0 = static_cast<int64_t>(Rng(seed).uniform_at(0) * static_cast<double>(d));
      if (r0 >= d) r0 = d - 1;
      return static_cast<int>((((r0 + index) % d) + d) % d);
    }
    case EnvKind::MarkovBase: {
      std::shared_ptr<Orbit> orbit;
      {
        std::lock_guard<std::mutex> lk(orbits_mu_);
        auto& slot = orbits_[seed];
        if (!slot) slot = std::make_shared<Orbit>();
        orbit = slot;
      }
      Rng rng(seed);
      std::lock_guard<std::mutex> lk(orbit->mu);
      if (orbit->forward.empty())
        orbit->forward.push_back(sample_categorical(stationary_, rng.uniform_at(Rng::zigzag(0))));
      if (index >= 0) {
        while (static_cast<int64_t>(orbit->forward.size()) <= index) {
          int64_t i = static_cast<int64_t>(orbit->forward.size());
          int prev = orbit->forward.back();
          orbit->forward.push_back(
              sample_categorical(transition_[static_cast<size_t>(prev)], rng.uniform_at(Rng::zigzag(i))));
        }
        return orbit->forward[static_cast<size_t>(index)];
      }
      while (static_cast<int64_t>(orbit->backward.size()) < -index) {
        int64_t i = -static_cast<int64_t>(orbit->backward.size()) - 1;  // index being produced
        int next = orbit->backward.empty() ? orbit->forward.front() : orbit->backward.back();
        orbit->backward.push_back(
            sample_categorical(reverse_[static_cast<size_t>(next)], rng.uniform_at(Rng::zigzag(i))));
      }
      return orbit->backward[static_cast<size_t>(-index - 1)];
    }
  }
  throw std::logic_error("unreachable");
}

EnvState sample_initial(EnvPtr env, uint64_t seed) { return EnvState(std::move(env), seed, 0); }

const SparseMeasure& measure_at(const EnvState& state) {
  return state.env()->measure(static_cast<size_t>(state.symbol()));
}

ConvolutionStream::ConvolutionStream(EnvState start, double prune_eps, size_t budget_atoms)
    : state_(start.step()),
      current_(measure_at(start)),
      index_(0),
      prune_eps_(prune_eps),
      budget_(budget_atoms) {
  if (prune_eps_ > 0) current_ = prune(current_, prune_eps_);
}

void ConvolutionStream::advance() {
  try {
    current_ = convolve(current_, measure_at(state_), budget_);
  } catch (const BudgetError& e) {
    throw BudgetError(std::string(e.what()) + " at stream index " + std::to_string(index_ + 1),
                      index_);
  }
  if (prune_eps_ > 0) current_ = prune(current_, prune_eps_);
  state_ = state_.step();
  ++index_;
}

std::vector<SparseMeasure> convolution_stream(const EnvState& start, int n_max, double prune_eps,
                                              size_t budget_atoms) {
  if (n_max < 1) throw ValidationError("convolution_stream needs n_max >= 1");
  ConvolutionStream s(start, prune_eps, budget_atoms);
  std::vector<SparseMeasure> out;
  out.push_back(s.current());
  for (int n = 1; n < n_max; ++n) {
    s.advance();
    out.push_back(s.current());
  }
  return out;
}

}  // namespace groupwalk
