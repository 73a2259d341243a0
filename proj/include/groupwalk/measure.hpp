#ifndef GROUPWALK_MEASURE_HPP
#define GROUPWALK_MEASURE_HPP

#include <iosfwd>
#include <unordered_map>
#include <utility>
#include <vector>

#include "groupwalk/group.hpp"

namespace groupwalk {

inline constexpr size_t kDefaultAtomBudget = 5000000;
inline constexpr double kMassTolerance = 1e-12;

// Finitely supported probability measure on a group.  dropped_mass is the
// cumulative pruning error; 0 means the measure is exact.
class SparseMeasure {
 public:
  using AtomMap = std::unordered_map<GroupElement, double, ElementHash>;

  SparseMeasure(ModelPtr model, AtomMap atoms, double dropped_mass);

  static SparseMeasure point_mass(ModelPtr model, const GroupElement& g);
  static SparseMeasure uniform(ModelPtr model, const std::vector<GroupElement>& support);
  static SparseMeasure from_atoms(ModelPtr model,
                                  const std::vector<std::pair<GroupElement, double>>& atoms);

  const ModelPtr& model() const { return model_; }
  const AtomMap& atoms() const { return atoms_; }
  double dropped_mass() const { return dropped_; }
  size_t support_size() const { return atoms_.size(); }
  double mass_of(const GroupElement& g) const {
    auto it = atoms_.find(g);
    return it == atoms_.end() ? 0.0 : it->second;
  }
  double total_mass() const;

  // Atoms in the deterministic encoded-key order.
  std::vector<std::pair<GroupElement, double>> sorted_atoms() const;

 private:
  void validate() const;

  ModelPtr model_;
  AtomMap atoms_;
  double dropped_;
};

// (mu nu)(g) = sum_h mu(h) nu(h^{-1} g); dropped masses add.
SparseMeasure convolve(const SparseMeasure& mu, const SparseMeasure& nu,
                       size_t budget_atoms = kDefaultAtomBudget);

// (g mu)(x) = mu(g^{-1} x)
SparseMeasure translate(const GroupElement& g, const SparseMeasure& mu);

// L1 convention: sum_g |mu(g) - nu(g)|, so disjoint supports give exactly 2.
double tv_distance(const SparseMeasure& mu, const SparseMeasure& nu);

// Natural-log Shannon entropy of the atom masses (dropped mass ignored here
// and reported through the pruning ledger).
double entropy(const SparseMeasure& mu);

struct Moment {
  double value = 0.0;
  bool approximate = false;
};
Moment first_moment(const SparseMeasure& mu);

std::vector<double> barycenter(const SparseMeasure& mu);
bool is_centered(const SparseMeasure& mu, double tol = 1e-12);

// Remove the smallest atoms with total removed mass <= eps, renormalize the
// rest to 1 - dropped, deterministic tie-break by encoded key.
SparseMeasure prune(const SparseMeasure& mu, double eps);

// CSV: header line "# model=<name> dropped_mass=<x>", then element,mass rows.
void write_measure_csv(std::ostream& os, const SparseMeasure& mu);
SparseMeasure read_measure_csv(std::istream& is, ModelPtr model);

}  // namespace groupwalk

#endif
