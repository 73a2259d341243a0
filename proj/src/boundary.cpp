#include "groupwalk/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "groupwalk/entropy.hpp"
#include "groupwalk/util.hpp"

namespace groupwalk {

namespace {

void require_free(const ModelPtr& model, const char* op) {
  if (model->kind() != GroupKind::FreeGroup)
    throw ModelMismatchError(std::string(op) + " needs a free-group model");
}

size_t common_prefix(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
  size_t n = std::min(a.size(), b.size());
  size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

}  // namespace

EndResult limit_end(const PathEnsemble& ens, const PathSample& path, double l) {
  require_free(ens.group(), "limit_end");
  if (l <= 0.0) throw ValidationError("limit_end: escape rate l must be positive");
  const int n = ens.length();
  if (n * l < 20.0) throw ValidationError("limit_end: path too short for this l (need n >= 20/l)");
  const int depth = static_cast<int>(std::floor(n * l / 2.0));
  const int quarter_start = n - n / 4;

  EndResult res;
  bool first = true;
  bool ok = true;
  ens.fold_positions(path, [&](int k, const GroupElement& x) {
    if (k < quarter_start || !ok) return;
    if (static_cast<int>(x.w.size()) < depth) {
      ok = false;
      return;
    }
    if (first) {
      res.prefix.assign(x.w.begin(), x.w.begin() + depth);
      first = false;
    } else if (!std::equal(res.prefix.begin(), res.prefix.end(), x.w.begin())) {
      ok = false;
    }
  });
  res.stabilized = ok && !first;
  if (!res.stabilized) res.prefix.clear();
  return res;
}

DeviationResult ray_deviation(const PathEnsemble& ens, const PathSample& path, double l) {
  DeviationResult out;
  EndResult end = limit_end(ens, path, l);
  if (!end.stabilized) return out;
  out.stabilized = true;

  const int n = ens.length();
  std::vector<int> checkpoints;
  for (int m = n; m >= 8; m /= 2) checkpoints.push_back(m);
  std::sort(checkpoints.begin(), checkpoints.end());

  // Proxy for the geodesic ray toward the end: the terminal position's word
  // (it extends the stabilized prefix by construction).
  std::vector<int32_t> ray;
  std::vector<std::vector<int32_t>> words(checkpoints.size());
  ens.fold_positions(path, [&](int k, const GroupElement& x) {
    auto it = std::find(checkpoints.begin(), checkpoints.end(), k);
    if (it != checkpoints.end()) words[static_cast<size_t>(it - checkpoints.begin())] = x.w;
    if (k == n) ray = x.w;
  });

  for (size_t i = 0; i < checkpoints.size(); ++i) {
    const int m = checkpoints[i];
    const auto& xw = words[i];
    size_t t = std::min<size_t>(static_cast<size_t>(std::floor(m * l)), ray.size());
    size_t common = std::min(common_prefix(xw, ray), t);
    // Tree distance via the common-prefix identity.
    double d = static_cast<double>(xw.size()) + static_cast<double>(t) - 2.0 * common;
    out.points.push_back({m, d / m});
  }
  return out;
}

double BoundaryHistogram::mass_of(const std::vector<int32_t>& prefix) const {
  auto it = std::lower_bound(masses.begin(), masses.end(), prefix,
                             [](const auto& p, const std::vector<int32_t>& key) { return p.first < key; });
  return (it != masses.end() && it->first == prefix) ? it->second : 0.0;
}

BoundaryHistogram hitting_measure(const PathEnsemble& ens, double l, int depth) {
  require_free(ens.group(), "hitting_measure");
  if (depth < 1) throw ValidationError("hitting_measure: depth must be >= 1");
  BoundaryHistogram hist;
  hist.depth = depth;
  hist.total_paths = ens.size();

  std::map<std::vector<int32_t>, size_t> counts;
  for (const auto& p : ens.paths()) {
    EndResult end = limit_end(ens, p, l);
    if (!end.stabilized || static_cast<int>(end.prefix.size()) < depth) {
      ++hist.excluded;
      continue;
    }
    end.prefix.resize(static_cast<size_t>(depth));
    ++counts[end.prefix];
  }
  size_t included = hist.total_paths - hist.excluded;
  if (hist.total_paths == 0 ||
      static_cast<double>(included) < 0.95 * static_cast<double>(hist.total_paths))
    throw IntegrityError("hitting_measure: stabilized fraction below 0.95");
  hist.masses.reserve(counts.size());
  for (const auto& [prefix, c] : counts)
    hist.masses.emplace_back(prefix, static_cast<double>(c) / static_cast<double>(included));
  return hist;
}

BoundaryHistogram hitting_measure_streamed(EnvPtr env, ModelPtr group, int n, size_t count,
                                           uint64_t seed, SampleMode mode, double l, int depth,
                                           int64_t env_start) {
  require_free(group, "hitting_measure");
  if (depth < 1) throw ValidationError("hitting_measure: depth must be >= 1");
  BoundaryHistogram hist;
  hist.depth = depth;
  hist.total_paths = count;

  std::map<std::vector<int32_t>, size_t> counts;
  for_each_path(
      env, group, n, count, seed, mode,
      [&](const PathEnsemble& chunk, const PathSample& p) {
        EndResult end = limit_end(chunk, p, l);
        if (!end.stabilized || static_cast<int>(end.prefix.size()) < depth) {
          ++hist.excluded;
          return;
        }
        end.prefix.resize(static_cast<size_t>(depth));
        ++counts[end.prefix];
      },
      4096, env_start);
  size_t included = hist.total_paths - hist.excluded;
  if (hist.total_paths == 0 ||
      static_cast<double>(included) < 0.95 * static_cast<double>(hist.total_paths))
    throw IntegrityError("hitting_measure: stabilized fraction below 0.95");
  hist.masses.reserve(counts.size());
  for (const auto& [prefix, c] : counts)
    hist.masses.emplace_back(prefix, static_cast<double>(c) / static_cast<double>(included));
  return hist;
}

double stationarity_residual(const BoundaryHistogram& hist_omega,
                             const BoundaryHistogram& hist_T_omega_refined,
                             const SparseMeasure& mu) {
  require_free(mu.model(), "stationarity_residual");
  const int depth = hist_omega.depth;
  if (hist_T_omega_refined.depth != depth + 1)
    throw ValidationError("stationarity_residual: translated histogram must be refined to depth+1");
  const auto& model = *mu.model();

  std::map<std::vector<int32_t>, double> push;
  for (const auto& [h, p] : mu.atoms()) {
    if (h.w.size() > static_cast<size_t>(hist_T_omega_refined.depth - depth))
      throw ValidationError("stationarity_residual: step support too long for one-level refinement");
    for (const auto& [cyl, mass] : hist_T_omega_refined.masses) {
      GroupElement c{model.tag(), cyl};
      std::vector<int32_t> s = model.mul(h, c).w;
      if (static_cast<int>(s.size()) < depth)
        throw ValidationError("stationarity_residual: cylinder image shorter than depth");
      s.resize(static_cast<size_t>(depth));
      push[s] += p * mass;
    }
  }

  KahanSum res;
  for (const auto& [cyl, mass] : hist_omega.masses) {
    auto it = push.find(cyl);
    res.add(std::abs(mass - (it == push.end() ? 0.0 : it->second)));
    if (it != push.end()) push.erase(it);
  }
  for (const auto& [cyl, mass] : push) {
    (void)cyl;
    res.add(std::abs(mass));
  }
  return res.value();
}

InvarianceDecayReport invariance_decay(const EnvState& start, std::vector<GroupElement> elements,
                                       std::vector<int> checkpoints, double prune_eps,
                                       size_t budget_atoms, double threshold) {
  const auto& model = *measure_at(start).model();
  if (model.kind() != GroupKind::IntegerLattice && model.kind() != GroupKind::Heisenberg)
    throw ModelMismatchError("invariance_decay: restricted to lattice and Heisenberg models");
  if (checkpoints.empty()) throw ValidationError("invariance_decay: no checkpoints");
  std::sort(checkpoints.begin(), checkpoints.end());
  if (checkpoints.front() < 1) throw ValidationError("invariance_decay: checkpoints must be >= 1");

  int period = detect_period(start);
  if (period != 1)
    throw ValidationError("invariance_decay: detected period " + std::to_string(period) +
                          "; left invariance needs an aperiodic configuration "
                          "(run the tail analysis instead)");

  if (threshold <= 0.0) throw ValidationError("invariance_decay: threshold must be positive");
  InvarianceDecayReport rep;
  rep.threshold = threshold;
  for (auto& g : elements) rep.elements.push_back({std::move(g), {}, false});

  ConvolutionStream stream(start, prune_eps, budget_atoms);
  for (int cp : checkpoints) {
    while (stream.index() < cp - 1) stream.advance();  // mu_{0,cp-1}: cp steps
    const SparseMeasure& cur = stream.current();
    for (auto& e : rep.elements)
      e.decay.emplace_back(cp, tv_distance(translate(e.g, cur), cur));
  }
  for (auto& e : rep.elements) {
    bool decreasing = true;
    for (size_t i = 1; i < e.decay.size(); ++i)
      decreasing = decreasing && e.decay[i].second < e.decay[i - 1].second;
    e.pass = decreasing && e.decay.back().second < rep.threshold;
  }
  return rep;
}

}  // namespace groupwalk
