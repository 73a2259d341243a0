#ifndef GROUPWALK_BOUNDARY_HPP
#define GROUPWALK_BOUNDARY_HPP

#include <map>
#include <vector>

#include "groupwalk/walk.hpp"

namespace groupwalk {

// Boundary cylinder of the tree: the set of ends whose reduced word starts
// with this prefix.  Letters as in FreeGroup elements (+/-1..+/-k).
struct EndResult {
  std::vector<int32_t> prefix;
  bool stabilized = false;
};

// The common position-word prefix over the final quarter of the path,
// truncated to depth floor(n*l/2).  stabilized means the prefix was constant
// (and long enough) over the whole quarter.
EndResult limit_end(const PathEnsemble& ens, const PathSample& path, double l);

struct DeviationPoint {
  int n = 0;
  double normalized = 0.0;  // d(x_n, gamma(floor(n*l))) / n
};

// Tree distance from x_m to the geodesic ray toward the limit end, at dyadic
// checkpoints.  Empty result with stabilized == false when the path has no
// stable end.
struct DeviationResult {
  bool stabilized = false;
  std::vector<DeviationPoint> points;
};
DeviationResult ray_deviation(const PathEnsemble& ens, const PathSample& path, double l);

struct BoundaryHistogram {
  int depth = 0;
  size_t total_paths = 0;
  size_t excluded = 0;  // non-stabilized or end shorter than depth
  // (cylinder prefix, mass) sorted by prefix; masses sum to 1 over included.
  std::vector<std::pair<std::vector<int32_t>, double>> masses;

  double mass_of(const std::vector<int32_t>& prefix) const;
};

// Empirical distribution of depth-D limit ends.  Throws IntegrityError when
// the stabilized fraction drops below 0.95.
BoundaryHistogram hitting_measure(const PathEnsemble& ens, double l, int depth);

// Same histogram without materializing the whole ensemble; path-identical to
// hitting_measure over a single sample_paths call with the same arguments.
BoundaryHistogram hitting_measure_streamed(EnvPtr env, ModelPtr group, int n, size_t count,
                                           uint64_t seed, SampleMode mode, double l, int depth,
                                           int64_t env_start = 0);

// tv(hist_at_omega, sum_h mu(h) * h . hist_at_T_omega).  The translated
// histogram must be refined one level deeper (depth D+1) so that cylinders
// whose image under a length-1 generator shortens still land on full-depth
// cylinders; the refinement is how the shortened mass gets redistributed.
double stationarity_residual(const BoundaryHistogram& hist_omega,
                             const BoundaryHistogram& hist_T_omega_refined,
                             const SparseMeasure& mu);

struct InvarianceDecayReport {
  struct PerElement {
    GroupElement g;
    std::vector<std::pair<int, double>> decay;  // (n, tv)
    bool pass = false;  // decreasing across checkpoints, final below threshold
  };
  std::vector<PerElement> elements;
  double threshold = 0.1;
};

// Left-invariance evidence for nilpotent-catalog groups.  Refuses (with a
// pointer to the tail analysis) when the configuration is periodic.
InvarianceDecayReport invariance_decay(const EnvState& start,
                                       std::vector<GroupElement> elements,
                                       std::vector<int> checkpoints, double prune_eps = 0.0,
                                       size_t budget_atoms = kDefaultAtomBudget,
                                       double threshold = 0.1);

}  // namespace groupwalk

#endif
