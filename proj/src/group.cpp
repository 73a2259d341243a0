#include "groupwalk/group.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <deque>
#include <sstream>

namespace groupwalk {

namespace {

int64_t iabs64(int64_t x) { return x < 0 ? -x : x; }

// Sol lattice automorphism A = [[2,1],[1,1]], A^{-1} = [[1,-1],[-1,2]].
void sol_apply(int64_t t, int64_t& x, int64_t& y) {
  while (t > 0) {
    int64_t nx = 2 * x + y, ny = x + y;
    x = nx; y = ny; --t;
  }
  while (t < 0) {
    int64_t nx = x - y, ny = -x + 2 * y;
    x = nx; y = ny; ++t;
  }
}

}  // namespace

GroupModel::GroupModel(GroupKind kind, int dim, int64_t modulus)
    : kind_(kind), dim_(dim), modulus_(modulus) {
  switch (kind_) {
    case GroupKind::IntegerLattice: name_ = "IntegerLattice(" + std::to_string(dim_) + ")"; break;
    case GroupKind::Heisenberg: name_ = "Heisenberg"; break;
    case GroupKind::FreeGroup: name_ = "FreeGroup(" + std::to_string(dim_) + ")"; break;
    case GroupKind::CyclicQuotient: name_ = "CyclicQuotient(" + std::to_string(modulus_) + ")"; break;
    case GroupKind::SolLattice: name_ = "SolLattice"; break;
  }
  tag_ = static_cast<uint32_t>(fnv1a64(name_) & 0xffffffffu);
}

std::shared_ptr<const GroupModel> GroupModel::integer_lattice(int dim) {
  if (dim < 1) throw ValidationError("lattice dimension must be >= 1");
  auto m = std::shared_ptr<GroupModel>(new GroupModel(GroupKind::IntegerLattice, dim, 0));
  for (int i = 0; i < dim; ++i) {
    for (int s : {+1, -1}) {
      GroupElement e{m->tag_, std::vector<int32_t>(dim, 0)};
      e.w[i] = s;
      m->generators_.push_back(std::move(e));
    }
  }
  return m;
}

std::shared_ptr<const GroupModel> GroupModel::heisenberg() {
  auto m = std::shared_ptr<GroupModel>(new GroupModel(GroupKind::Heisenberg, 3, 0));
  for (int i = 0; i < 2; ++i) {
    for (int s : {+1, -1}) {
      GroupElement e{m->tag_, {0, 0, 0}};
      e.w[i] = s;
      m->generators_.push_back(std::move(e));
    }
  }
  return m;
}

std::shared_ptr<const GroupModel> GroupModel::free_group(int rank) {
  if (rank < 1) throw ValidationError("free rank must be >= 1");
  auto m = std::shared_ptr<GroupModel>(new GroupModel(GroupKind::FreeGroup, rank, 0));
  for (int i = 1; i <= rank; ++i) {
    m->generators_.push_back(GroupElement{m->tag_, {static_cast<int32_t>(i)}});
    m->generators_.push_back(GroupElement{m->tag_, {static_cast<int32_t>(-i)}});
  }
  return m;
}

std::shared_ptr<const GroupModel> GroupModel::cyclic_quotient(int64_t modulus) {
  if (modulus < 2) throw ValidationError("cyclic modulus must be >= 2");
  auto m = std::shared_ptr<GroupModel>(new GroupModel(GroupKind::CyclicQuotient, 1, modulus));
  m->generators_.push_back(GroupElement{m->tag_, {1}});
  m->generators_.push_back(GroupElement{m->tag_, {static_cast<int32_t>(modulus - 1)}});
  return m;
}

std::shared_ptr<const GroupModel> GroupModel::sol_lattice() {
  auto m = std::shared_ptr<GroupModel>(new GroupModel(GroupKind::SolLattice, 3, 0));
  for (int i = 0; i < 3; ++i) {
    for (int s : {+1, -1}) {
      GroupElement e{m->tag_, {0, 0, 0}};
      e.w[i] = s;
      m->generators_.push_back(std::move(e));
    }
  }
  return m;
}

GroupElement GroupModel::identity() const {
  switch (kind_) {
    case GroupKind::FreeGroup: return GroupElement{tag_, {}};
    case GroupKind::CyclicQuotient: return GroupElement{tag_, {0}};
    default: return GroupElement{tag_, std::vector<int32_t>(static_cast<size_t>(dim_), 0)};
  }
}

void GroupModel::check_tag(const GroupElement& g, const char* op) const {
  if (g.tag != tag_)
    throw ModelMismatchError(std::string(op) + ": element does not belong to " + name_);
}

GroupElement GroupModel::mul(const GroupElement& a, const GroupElement& b) const {
  check_tag(a, "mul");
  check_tag(b, "mul");
  switch (kind_) {
    case GroupKind::IntegerLattice: {
      GroupElement r{tag_, a.w};
      for (size_t i = 0; i < r.w.size(); ++i) r.w[i] += b.w[i];
      return r;
    }
    case GroupKind::Heisenberg: {
      // (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')
      GroupElement r{tag_, {a.w[0] + b.w[0], a.w[1] + b.w[1],
                            a.w[2] + b.w[2] + a.w[0] * b.w[1]}};
      return r;
    }
    case GroupKind::FreeGroup: {
      GroupElement r{tag_, a.w};
      for (int32_t letter : b.w) {
        if (!r.w.empty() && r.w.back() == -letter)
          r.w.pop_back();
        else
          r.w.push_back(letter);
      }
      return r;
    }
    case GroupKind::CyclicQuotient: {
      int64_t s = (static_cast<int64_t>(a.w[0]) + b.w[0]) % modulus_;
      return GroupElement{tag_, {static_cast<int32_t>(s)}};
    }
    case GroupKind::SolLattice: {
      // (t,v)(t',v') = (t+t', v + A^t v')
      int64_t x = b.w[1], y = b.w[2];
      sol_apply(a.w[0], x, y);
      return GroupElement{tag_, {a.w[0] + b.w[0], static_cast<int32_t>(a.w[1] + x),
                                 static_cast<int32_t>(a.w[2] + y)}};
    }
  }
  throw std::logic_error("unreachable");
}

GroupElement GroupModel::inv(const GroupElement& a) const {
  check_tag(a, "inv");
  switch (kind_) {
    case GroupKind::IntegerLattice: {
      GroupElement r{tag_, a.w};
      for (auto& x : r.w) x = -x;
      return r;
    }
    case GroupKind::Heisenberg:
      // (a,b,c)^{-1} = (-a,-b,-c+ab)
      return GroupElement{tag_, {-a.w[0], -a.w[1], -a.w[2] + a.w[0] * a.w[1]}};
    case GroupKind::FreeGroup: {
      GroupElement r{tag_, {}};
      r.w.reserve(a.w.size());
      for (auto it = a.w.rbegin(); it != a.w.rend(); ++it) r.w.push_back(-*it);
      return r;
    }
    case GroupKind::CyclicQuotient: {
      int64_t s = (modulus_ - a.w[0]) % modulus_;
      return GroupElement{tag_, {static_cast<int32_t>(s)}};
    }
    case GroupKind::SolLattice: {
      int64_t x = -a.w[1], y = -a.w[2];
      sol_apply(-a.w[0], x, y);
      return GroupElement{tag_, {-a.w[0], static_cast<int32_t>(x), static_cast<int32_t>(y)}};
    }
  }
  throw std::logic_error("unreachable");
}

bool GroupModel::has_gauge_fallback() const {
  return kind_ == GroupKind::Heisenberg || kind_ == GroupKind::SolLattice;
}

WordLength GroupModel::word_length(const GroupElement& g) const {
  check_tag(g, "word_length");
  switch (kind_) {
    case GroupKind::IntegerLattice: {
      int64_t s = 0;
      for (auto x : g.w) s += iabs64(x);
      return {static_cast<int>(s), false};
    }
    case GroupKind::FreeGroup:
      return {static_cast<int>(g.w.size()), false};
    case GroupKind::CyclicQuotient: {
      int64_t r = g.w[0];
      return {static_cast<int>(std::min(r, modulus_ - r)), false};
    }
    case GroupKind::Heisenberg: {
      auto it = length_table_.find(g);
      if (it != length_table_.end()) return {it->second, false};
      // Guivarc'h-style gauge, bi-Lipschitz to the word metric.
      int64_t a = iabs64(g.w[0]), b = iabs64(g.w[1]), c = iabs64(g.w[2]);
      int gauge = static_cast<int>(a + b + static_cast<int64_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(c)))));
      return {gauge, true};
    }
    case GroupKind::SolLattice: {
      int64_t t = iabs64(g.w[0]);
      double vn = static_cast<double>(iabs64(g.w[1]) + iabs64(g.w[2]));
      int gauge = static_cast<int>(t + std::ceil(2.0 * std::log1p(vn) / std::log(2.0 + std::sqrt(3.0))));
      return {gauge, true};
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<std::pair<GroupElement, int>> GroupModel::ball(int radius, size_t budget_atoms) const {
  std::vector<std::pair<GroupElement, int>> out;
  std::unordered_map<GroupElement, int, ElementHash> seen;
  std::deque<GroupElement> frontier;
  GroupElement e = identity();
  seen.emplace(e, 0);
  out.emplace_back(e, 0);
  frontier.push_back(e);
  for (int r = 1; r <= radius; ++r) {
    std::deque<GroupElement> next;
    for (const auto& g : frontier) {
      for (const auto& s : generators_) {
        GroupElement h = mul(g, s);
        if (seen.emplace(h, r).second) {
          if (seen.size() > budget_atoms)
            throw BudgetError("ball enumeration exceeded atom budget", r - 1);
          out.emplace_back(h, r);
          next.push_back(std::move(h));
        }
      }
    }
    frontier.swap(next);
  }
  return out;
}

std::vector<size_t> GroupModel::ball_counts(int radius, size_t budget_atoms) const {
  auto b = ball(radius, budget_atoms);
  std::vector<size_t> counts(static_cast<size_t>(radius) + 1, 0);
  for (const auto& [g, r] : b) counts[static_cast<size_t>(r)]++;
  for (size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  return counts;
}

std::vector<int64_t> GroupModel::abelianize(const GroupElement& g) const {
  check_tag(g, "abelianize");
  switch (kind_) {
    case GroupKind::IntegerLattice:
      return std::vector<int64_t>(g.w.begin(), g.w.end());
    case GroupKind::Heisenberg:
      return {g.w[0], g.w[1]};
    case GroupKind::FreeGroup: {
      std::vector<int64_t> counts(static_cast<size_t>(dim_), 0);
      for (int32_t letter : g.w) {
        if (letter > 0)
          counts[static_cast<size_t>(letter - 1)]++;
        else
          counts[static_cast<size_t>(-letter - 1)]--;
      }
      return counts;
    }
    case GroupKind::CyclicQuotient:
      return {g.w[0]};
    case GroupKind::SolLattice:
      // (A - I) is unimodular, so the abelianization is Z in the t coordinate.
      return {g.w[0]};
  }
  throw std::logic_error("unreachable");
}

void GroupModel::build_length_table(int radius) const {
  if (kind_ != GroupKind::Heisenberg) return;
  if (radius <= table_radius_) return;
  length_table_.clear();
  for (auto& [g, r] : ball(radius)) length_table_.emplace(g, r);
  table_radius_ = radius;
}

std::string GroupModel::encode(const GroupElement& g) const {
  check_tag(g, "encode");
  std::string out;
  uint32_t n = static_cast<uint32_t>(g.w.size());
  out.append(reinterpret_cast<const char*>(&n), 4);
  for (int32_t x : g.w) out.append(reinterpret_cast<const char*>(&x), 4);
  return out;
}

std::string GroupModel::render(const GroupElement& g) const {
  check_tag(g, "render");
  switch (kind_) {
    case GroupKind::FreeGroup: {
      if (g.w.empty()) return "e";
      std::string s;
      for (int32_t letter : g.w) {
        char base = static_cast<char>('a' + (letter > 0 ? letter : -letter) - 1);
        s.push_back(letter > 0 ? base : static_cast<char>(base - 'a' + 'A'));
      }
      return s;
    }
    case GroupKind::CyclicQuotient:
      return "(" + std::to_string(g.w[0]) + ")";
    default: {
      std::string s = "(";
      for (size_t i = 0; i < g.w.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(g.w[i]);
      }
      return s + ")";
    }
  }
}

GroupElement GroupModel::parse(std::string_view text) const {
  if (kind_ == GroupKind::FreeGroup) {
    if (text == "e") return identity();
    GroupElement g{tag_, {}};
    for (char c : text) {
      int32_t letter;
      if (c >= 'a' && c < 'a' + dim_)
        letter = c - 'a' + 1;
      else if (c >= 'A' && c < 'A' + dim_)
        letter = -(c - 'A' + 1);
      else
        throw ValidationError("bad free-group letter in '" + std::string(text) + "'");
      if (!g.w.empty() && g.w.back() == -letter)
        throw ValidationError("word is not reduced: '" + std::string(text) + "'");
      g.w.push_back(letter);
    }
    return g;
  }
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw ValidationError("expected tuple element text, got '" + std::string(text) + "'");
  std::string body(text.substr(1, text.size() - 2));
  std::vector<int32_t> coords;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) coords.push_back(static_cast<int32_t>(std::stoll(tok)));
  size_t expect = kind_ == GroupKind::CyclicQuotient ? 1 : static_cast<size_t>(dim_);
  if (coords.size() != expect)
    throw ValidationError("wrong arity for " + name_ + ": '" + std::string(text) + "'");
  if (kind_ == GroupKind::CyclicQuotient) {
    int64_t r = ((coords[0] % modulus_) + modulus_) % modulus_;
    coords[0] = static_cast<int32_t>(r);
  }
  return GroupElement{tag_, std::move(coords)};
}

}  // namespace groupwalk
