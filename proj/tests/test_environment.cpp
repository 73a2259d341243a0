#include <doctest.h>

#include <cmath>
#include <vector>

#include "groupwalk/environment.hpp"
#include "groupwalk/rng.hpp"

using namespace groupwalk;

namespace {

SparseMeasure lazy_z(const ModelPtr& z) {
  return SparseMeasure::from_atoms(
      z, {{z->parse("(-1)"), 0.25}, {z->parse("(0)"), 0.5}, {z->parse("(1)"), 0.25}});
}

SparseMeasure step_z(const ModelPtr& z) {
  return SparseMeasure::from_atoms(z, {{z->parse("(-1)"), 0.5}, {z->parse("(1)"), 0.5}});
}

}  // namespace

TEST_CASE("frozen environment serves one measure at every index") {
  auto z = GroupModel::integer_lattice(1);
  auto env = EnvironmentModel::frozen(lazy_z(z));
  REQUIRE(env->kind() == EnvKind::Frozen);
  REQUIRE(env->num_symbols() == 1);
  for (int64_t i : {-5L, 0L, 3L, 100L}) REQUIRE(env->symbol_at(77, i) == 0);
}

TEST_CASE("periodic environment cycles through its table, two-sided") {
  auto z = GroupModel::integer_lattice(1);
  auto env = EnvironmentModel::periodic({lazy_z(z), step_z(z)});
  REQUIRE(env->periodic_base());
  for (int64_t i = -6; i <= 6; ++i) {
    int expect = static_cast<int>(((i % 2) + 2) % 2);
    REQUIRE(env->symbol_at(5, i) == expect);
  }
}

TEST_CASE("iid symbol frequencies match the probabilities") {
  auto z = GroupModel::integer_lattice(1);
  auto env = EnvironmentModel::iid({lazy_z(z), step_z(z)}, {0.3, 0.7});
  size_t hits = 0;
  const int64_t N = 40000;
  for (int64_t i = -N / 2; i < N / 2; ++i) hits += (env->symbol_at(1234, i) == 1);
  double freq = static_cast<double>(hits) / N;
  REQUIRE(freq == doctest::Approx(0.7).epsilon(0.02));
  // a different seed gives a different realization, same statistics
  size_t hits2 = 0;
  for (int64_t i = 0; i < N; ++i) hits2 += (env->symbol_at(99, i) == 1);
  REQUIRE(static_cast<double>(hits2) / N == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("symbol_at is a pure function of (seed, index)") {
  auto z = GroupModel::integer_lattice(1);
  auto env = EnvironmentModel::markov({lazy_z(z), step_z(z)}, {{0.8, 0.2}, {0.4, 0.6}},
                                      {2.0 / 3.0, 1.0 / 3.0});
  std::vector<int> first, second;
  for (int64_t i = -50; i <= 50; ++i) first.push_back(env->symbol_at(2024, i));
  // query in a scrambled order; lazily built orbits must not depend on it
  for (int64_t i = 50; i >= -50; --i) second.push_back(env->symbol_at(2024, i));
  for (size_t k = 0; k < first.size(); ++k) REQUIRE(first[k] == second[second.size() - 1 - k]);
}

TEST_CASE("markov realizations have the right transition and marginal statistics") {
  auto z = GroupModel::integer_lattice(1);
  std::vector<std::vector<double>> P{{0.8, 0.2}, {0.4, 0.6}};
  std::vector<double> pi{2.0 / 3.0, 1.0 / 3.0};  // pi P = pi
  auto env = EnvironmentModel::markov({lazy_z(z), step_z(z)}, P, pi);

  // aggregate over many independent realizations, including negative indices
  // (the backward kernel must reproduce the same forward statistics)
  size_t n00 = 0, n0 = 0, n11 = 0, n1 = 0, ones = 0, total = 0;
  for (uint64_t seed = 0; seed < 400; ++seed) {
    int prev = env->symbol_at(seed, -26);
    for (int64_t i = -25; i <= 25; ++i) {
      int cur = env->symbol_at(seed, i);
      if (prev == 0) { ++n0; n00 += (cur == 0); }
      else { ++n1; n11 += (cur == 1); }
      ones += cur;
      ++total;
      prev = cur;
    }
  }
  REQUIRE(static_cast<double>(ones) / total == doctest::Approx(pi[1]).epsilon(0.05));
  REQUIRE(static_cast<double>(n00) / n0 == doctest::Approx(P[0][0]).epsilon(0.05));
  REQUIRE(static_cast<double>(n11) / n1 == doctest::Approx(P[1][1]).epsilon(0.05));
}

TEST_CASE("EnvState navigation: step, step_back and advanced agree") {
  auto z = GroupModel::integer_lattice(1);
  auto env = EnvironmentModel::periodic({lazy_z(z), step_z(z)});
  EnvState s(env, 7, 0);
  REQUIRE(s.step().index() == 1);
  REQUIRE(s.step().step_back().index() == 0);
  REQUIRE(s.advanced(5).index() == 5);
  REQUIRE(s.advanced(5).symbol() == env->symbol_at(7, 5));
  REQUIRE(&measure_at(s) == &env->measure(s.symbol()));
}

TEST_CASE("convolution stream reproduces direct iterated convolution") {
  auto z = GroupModel::integer_lattice(1);
  auto env = EnvironmentModel::periodic({lazy_z(z), step_z(z)});
  EnvState start(env, 0, 0);

  ConvolutionStream stream(start);
  SparseMeasure direct = measure_at(start);
  REQUIRE(stream.index() == 0);
  for (int n = 1; n < 12; ++n) {
    stream.advance();
    direct = convolve(direct, measure_at(start.advanced(n)));
    REQUIRE(stream.index() == n);
    REQUIRE(stream.current().support_size() == direct.support_size());
    for (const auto& [g, mass] : direct.atoms())
      REQUIRE(stream.current().mass_of(g) == doctest::Approx(mass).epsilon(1e-12));
  }

  auto terms = convolution_stream(start, 12);
  REQUIRE(terms.size() == 12);
  for (const auto& [g, mass] : terms.back().atoms())
    REQUIRE(stream.current().mass_of(g) == doctest::Approx(mass).epsilon(1e-12));
}

TEST_CASE("environment construction validates its inputs") {
  auto z = GroupModel::integer_lattice(1);
  auto f2 = GroupModel::free_group(2);
  // mismatched group models across the table
  std::vector<GroupElement> sup{f2->parse("a"), f2->parse("A")};
  REQUIRE_THROWS_AS(EnvironmentModel::iid({lazy_z(z), SparseMeasure::uniform(f2, sup)}, {0.5, 0.5}),
                    ModelMismatchError);
  // non-stochastic transition row
  REQUIRE_THROWS_AS(EnvironmentModel::markov({lazy_z(z), step_z(z)}, {{0.9, 0.2}, {0.4, 0.6}},
                                             {0.5, 0.5}),
                    ValidationError);
  // stationary vector that is not stationary for the kernel
  REQUIRE_THROWS_AS(EnvironmentModel::markov({lazy_z(z), step_z(z)}, {{0.8, 0.2}, {0.4, 0.6}},
                                             {0.5, 0.5}),
                    ValidationError);
  // iid probabilities must sum to one
  REQUIRE_THROWS_AS(EnvironmentModel::iid({lazy_z(z), step_z(z)}, {0.3, 0.3}), ValidationError);
}
