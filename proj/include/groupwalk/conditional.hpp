#ifndef GROUPWALK_CONDITIONAL_HPP
#define GROUPWALK_CONDITIONAL_HPP

#include <array>
#include <vector>

#include "groupwalk/walk.hpp"

namespace groupwalk {

// Finite-horizon surrogate for the tail Radon-Nikodym densities on a free
// group: eps_hat(k, g) is the probability that a walk sitting at g at time k
// has, at time N, a position whose reduced word starts with the cylinder
// prefix.  For step measures that are length-radial (support inside
// {e} u generators with equal generator masses) the backward recursion over
// the attainability cone collapses exactly onto the pair
// (tree distance to the cylinder root, which side of it we are on), which is
// what makes horizons of 30+ steps computable at all.
class CylinderSurrogate {
 public:
  // prefix: reduced word over the free generators (its depth-D vertex is the
  // cylinder root).  Depth 0 means the whole boundary (eps_hat == 1).
  CylinderSurrogate(EnvState start, ModelPtr group, std::vector<int32_t> prefix, int horizon);

  int horizon() const { return horizon_; }
  int depth() const { return static_cast<int>(prefix_.size()); }
  const std::vector<int32_t>& prefix() const { return prefix_; }

  double eps_hat(int k, const GroupElement& g) const;
  double origin_mass() const;  // eps_hat(0, e): the surrogate cylinder mass

 private:
  // side: 0 outside subtree(prefix), 1 at the root vertex, 2 strictly inside
  struct Lump {
    int r;
    int side;
  };
  Lump classify(const GroupElement& g) const;

  ModelPtr group_;
  std::vector<int32_t> prefix_;
  int horizon_;
  // table_[k][side][r]
  std::vector<std::array<std::vector<double>, 3>> table_;
};

// Samples paths from the conditional (Doob-weighted) chain whose transition
// probabilities are mu_k(h) * eps_hat(k+1, gh) / eps_hat(k, g).  Every
// emitted path's time-N word prefix matches the cylinder.
PathEnsemble conditional_sampler(const EnvState& env_state, ModelPtr group, int horizon_N,
                                 const std::vector<int32_t>& cylinder_prefix, int n, size_t count,
                                 uint64_t seed);

// All reduced prefixes of the given depth over the model's generators.
std::vector<std::vector<int32_t>> all_cylinder_prefixes(const GroupModel& model, int depth);

}  // namespace groupwalk

#endif
