#ifndef GROUPWALK_GROUP_HPP
#define GROUPWALK_GROUP_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "groupwalk/util.hpp"

namespace groupwalk {

enum class GroupKind { IntegerLattice, Heisenberg, FreeGroup, CyclicQuotient, SolLattice };

// Canonical-form element.  The payload meaning depends on the owning model:
//   IntegerLattice(d)  d coordinates
//   Heisenberg         (a, b, c) in upper-unitriangular normal form
//   FreeGroup(k)       reduced word, letters +/-1..+/-k
//   CyclicQuotient(d)  single residue in [0, d)
//   SolLattice         (t, v1, v2)
// The tag identifies the model so cross-model arithmetic is caught early.
struct GroupElement {
  uint32_t tag = 0;
  std::vector<int32_t> w;
  bool operator==(const GroupElement&) const = default;
};

// Deterministic order matching the length-prefixed byte encoding.
inline bool element_less(const GroupElement& a, const GroupElement& b) {
  if (a.w.size() != b.w.size()) return a.w.size() < b.w.size();
  return a.w < b.w;
}

struct ElementHash {
  size_t operator()(const GroupElement& g) const {
    uint64_t h = fnv1a64(&g.tag, sizeof(g.tag));
    if (!g.w.empty()) h = fnv1a64(g.w.data(), g.w.size() * sizeof(int32_t), h);
    return static_cast<size_t>(h);
  }
};

struct WordLength {
  int value = 0;
  bool approximate = false;  // true when served from a gauge, not the word metric
};

class GroupModel {
 public:
  static std::shared_ptr<const GroupModel> integer_lattice(int dim);
  static std::shared_ptr<const GroupModel> heisenberg();
  static std::shared_ptr<const GroupModel> free_group(int rank);
  static std::shared_ptr<const GroupModel> cyclic_quotient(int64_t modulus);
  static std::shared_ptr<const GroupModel> sol_lattice();

  GroupKind kind() const { return kind_; }
  int dim() const { return dim_; }           // lattice dimension / free rank
  int64_t modulus() const { return modulus_; }
  uint32_t tag() const { return tag_; }
  const std::string& name() const { return name_; }

  GroupElement identity() const;
  const std::vector<GroupElement>& generators() const { return generators_; }

  GroupElement mul(const GroupElement& a, const GroupElement& b) const;
  GroupElement inv(const GroupElement& a) const;

  // Word metric w.r.t. the fixed generator set.  Lattice, free and cyclic
  // models have closed forms; Heisenberg is exact inside the BFS table and
  // falls back to the |a|+|b|+ceil(2*sqrt(|c|)) gauge beyond it.  SolLattice
  // is gauge-only.
  WordLength word_length(const GroupElement& g) const;

  // Exhaustive Cayley-ball enumeration by breadth-first search.
  std::vector<std::pair<GroupElement, int>> ball(int radius, size_t budget_atoms = 20000000) const;
  // |B_0|, |B_1|, ..., |B_radius|
  std::vector<size_t> ball_counts(int radius, size_t budget_atoms = 20000000) const;

  std::vector<int64_t> abelianize(const GroupElement& g) const;

  // Precompute exact Heisenberg word lengths to the given radius.  Must be
  // called before the model is shared across workers; no-op for models with
  // closed-form lengths.
  void build_length_table(int radius) const;
  int length_table_radius() const { return table_radius_; }

  // Length-prefixed little-endian byte string; the cross-run identity key.
  std::string encode(const GroupElement& g) const;
  std::string render(const GroupElement& g) const;
  GroupElement parse(std::string_view text) const;

  bool has_gauge_fallback() const;

 private:
  GroupModel(GroupKind kind, int dim, int64_t modulus);

  void check_tag(const GroupElement& g, const char* op) const;

  GroupKind kind_;
  int dim_ = 0;
  int64_t modulus_ = 0;
  uint32_t tag_ = 0;
  std::string name_;
  std::vector<GroupElement> generators_;

  // Lazily built exact-length table for Heisenberg (guarded by the build-
  // before-sharing contract, so no lock is taken on lookup).
  mutable std::unordered_map<GroupElement, int, ElementHash> length_table_;
  mutable int table_radius_ = -1;
};

using ModelPtr = std::shared_ptr<const GroupModel>;

}  // namespace groupwalk

#endif
