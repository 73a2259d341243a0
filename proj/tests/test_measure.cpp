#include <doctest.h>

#include <cmath>
#include <sstream>

#include "groupwalk/measure.hpp"
#include "groupwalk/rng.hpp"

using namespace groupwalk;

namespace {

GroupElement random_element(const GroupModel& m, Rng& rng, int len) {
  GroupElement g = m.identity();
  const auto& gens = m.generators();
  int k = static_cast<int>(rng.next() % (len + 1));
  for (int i = 0; i < k; ++i) g = m.mul(g, gens[rng.next() % gens.size()]);
  return g;
}

SparseMeasure random_measure(const ModelPtr& m, Rng& rng, int support, int len) {
  SparseMeasure::AtomMap atoms;
  // Small groups (or short words) may not have `support` reachable elements;
  // settle for fewer after enough draws rather than spinning.
  for (int draws = 0; static_cast<int>(atoms.size()) < support && draws < 200 * support; ++draws)
    atoms[random_element(*m, rng, len)] = 0.0;
  double total = 0.0;
  for (auto& [g, mass] : atoms) {
    mass = 0.05 + rng.uniform();
    total += mass;
  }
  for (auto& [g, mass] : atoms) mass /= total;
  return SparseMeasure(m, std::move(atoms), 0.0);
}

// The O(|mu| * |nu|) definition, accumulated independently of convolve's path.
SparseMeasure brute_convolve(const SparseMeasure& mu, const SparseMeasure& nu) {
  const auto& m = *mu.model();
  SparseMeasure::AtomMap out;
  for (const auto& [h, p] : mu.atoms())
    for (const auto& [g, q] : nu.atoms()) out[m.mul(h, g)] += p * q;
  return SparseMeasure(mu.model(), std::move(out), mu.dropped_mass() + nu.dropped_mass());
}

}  // namespace

TEST_CASE("sparse convolution equals the brute-force double loop") {
  Rng rng(101);
  auto z = GroupModel::integer_lattice(1);
  auto f2 = GroupModel::free_group(2);
  for (int trial = 0; trial < 300; ++trial) {
    const ModelPtr& m = (trial % 2) ? f2 : z;
    auto mu = random_measure(m, rng, 2 + rng.next() % 20, 6);
    auto nu = random_measure(m, rng, 2 + rng.next() % 20, 6);
    auto fast = convolve(mu, nu);
    auto slow = brute_convolve(mu, nu);
    REQUIRE(fast.support_size() == slow.support_size());
    for (const auto& [g, mass] : slow.atoms())
      REQUIRE(std::abs(fast.mass_of(g) - mass) <= 1e-12);
  }
}

TEST_CASE("convolution with a point mass is translation") {
  Rng rng(102);
  auto f2 = GroupModel::free_group(2);
  auto mu = random_measure(f2, rng, 15, 5);
  GroupElement g = random_element(*f2, rng, 5);
  auto delta = SparseMeasure::point_mass(f2, g);
  auto conv = convolve(delta, mu);
  auto trans = translate(g, mu);
  for (const auto& [x, mass] : trans.atoms())
    REQUIRE(std::abs(conv.mass_of(x) - mass) <= 1e-12);
  // (g mu)(g x) == mu(x)
  for (const auto& [x, mass] : mu.atoms())
    REQUIRE(std::abs(trans.mass_of(f2->mul(g, x)) - mass) <= 1e-12);
}

TEST_CASE("tv distance: identity, symmetry, triangle, disjoint supports give 2") {
  Rng rng(103);
  auto z = GroupModel::integer_lattice(1);
  auto a = random_measure(z, rng, 10, 4);
  auto b = random_measure(z, rng, 10, 4);
  auto c = random_measure(z, rng, 10, 4);
  REQUIRE(tv_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  REQUIRE(tv_distance(a, b) == doctest::Approx(tv_distance(b, a)).epsilon(1e-12));
  REQUIRE(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12);
  auto d1 = SparseMeasure::point_mass(z, z->parse("(1)"));
  auto d2 = SparseMeasure::point_mass(z, z->parse("(2)"));
  REQUIRE(tv_distance(d1, d2) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("entropy: uniform support of size k has entropy ln k; point mass zero") {
  auto f2 = GroupModel::free_group(2);
  std::vector<GroupElement> sup;
  for (auto s : {"a", "A", "b", "B"}) sup.push_back(f2->parse(s));
  REQUIRE(entropy(SparseMeasure::uniform(f2, sup)) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  REQUIRE(entropy(SparseMeasure::point_mass(f2, f2->parse("ab"))) == doctest::Approx(0.0));
}

TEST_CASE("first moment and barycenter") {
  auto z = GroupModel::integer_lattice(1);
  auto mu = SparseMeasure::from_atoms(
      z, {{z->parse("(-1)"), 0.25}, {z->parse("(0)"), 0.5}, {z->parse("(1)"), 0.25}});
  REQUIRE(first_moment(mu).value == doctest::Approx(0.5));
  REQUIRE(barycenter(mu)[0] == doctest::Approx(0.0));
  REQUIRE(is_centered(mu));
  auto drift = SparseMeasure::point_mass(z, z->parse("(3)"));
  REQUIRE_FALSE(is_centered(drift));
  REQUIRE(first_moment(drift).value == doctest::Approx(3.0));
}

TEST_CASE("prune removes the smallest atoms, renormalizes, and is deterministic") {
  auto z = GroupModel::integer_lattice(1);
  auto mu = SparseMeasure::from_atoms(z, {{z->parse("(0)"), 0.6},
                                          {z->parse("(1)"), 0.3},
                                          {z->parse("(2)"), 0.094},
                                          {z->parse("(3)"), 0.006}});
  auto p = prune(mu, 0.01);
  REQUIRE(p.support_size() == 3);  // only the 0.006 atom fits under eps
  REQUIRE(p.mass_of(z->parse("(3)")) == 0.0);
  REQUIRE(p.dropped_mass() == doctest::Approx(0.006));
  REQUIRE(p.total_mass() == doctest::Approx(1.0 - 0.006).epsilon(1e-12));
  // deterministic: same call gives atom-identical output
  auto p2 = prune(mu, 0.01);
  for (const auto& [g, mass] : p.atoms()) REQUIRE(p2.mass_of(g) == mass);
  // eps = 0 is the identity
  auto p0 = prune(mu, 0.0);
  REQUIRE(p0.support_size() == mu.support_size());
}

TEST_CASE("measure CSV round-trips atom-exactly") {
  Rng rng(104);
  auto h = GroupModel::heisenberg();
  auto mu = random_measure(h, rng, 25, 6);
  std::stringstream ss;
  write_measure_csv(ss, mu);
  auto back = read_measure_csv(ss, h);
  REQUIRE(back.support_size() == mu.support_size());
  REQUIRE(back.dropped_mass() == doctest::Approx(mu.dropped_mass()));
  for (const auto& [g, mass] : mu.atoms())
    REQUIRE(back.mass_of(g) == doctest::Approx(mass).epsilon(1e-15));
}

TEST_CASE("sorted_atoms is the deterministic encoded-key order") {
  Rng rng(105);
  auto f2 = GroupModel::free_group(2);
  auto mu = random_measure(f2, rng, 30, 6);
  auto v = mu.sorted_atoms();
  for (size_t i = 1; i < v.size(); ++i)
    REQUIRE(f2->encode(v[i - 1].first) < f2->encode(v[i].first));
}

TEST_CASE("non-normalized or negative masses are rejected") {
  auto z = GroupModel::integer_lattice(1);
  SparseMeasure::AtomMap bad{{z->parse("(0)"), 0.7}};
  REQUIRE_THROWS_AS(SparseMeasure(z, bad, 0.0), ValidationError);
  SparseMeasure::AtomMap neg{{z->parse("(0)"), 1.5}, {z->parse("(1)"), -0.5}};
  REQUIRE_THROWS_AS(SparseMeasure(z, neg, 0.0), ValidationError);
}
