#include "doctest.h"

#include <random>

#include "wopkit/orbits.hpp"

using namespace wopkit;

namespace {

Poly T() { return Poly::monomial(1, 1); }

// Orbit of the block-diagonal element with the given block orbits.
OrbitDatum direct_sum(const Levi& levi, const std::vector<OrbitDatum>& orbits) {
  std::vector<MatQ> blocks;
  std::vector<Poly> polys;
  for (auto& o : orbits) {
    blocks.push_back(standard_representative(o));
    for (auto& b : o.blocks) polys.push_back(b.poly);
  }
  std::sort(polys.begin(), polys.end(), poly_less);
  polys.erase(std::unique(polys.begin(), polys.end()), polys.end());
  return orbit_of_matrix(assemble(levi, blocks), orbits.front().p, polys);
}

}  // namespace

TEST_CASE("partitions") {
  CHECK(partitions_of(4).size() == 5);
  CHECK(partitions_of(5).size() == 7);
  CHECK(transpose({3, 1}) == Partition{2, 1, 1});
  CHECK(transpose(transpose({4, 2, 2, 1})) == Partition{4, 2, 2, 1});
}

TEST_CASE("polynomial order") {
  CHECK(poly_less(Poly::linear(1), Poly::linear(2)));
  CHECK(poly_less(Poly::linear(-3), Poly::linear(0)));
  CHECK(poly_less(Poly::linear(5), Poly({Rat(1), Rat(0), Rat(1)})));
}

TEST_CASE("induce_orbit examples") {
  const long p = 3;
  OrbitDatum z1 = zero_orbit(p, 1), z2 = zero_orbit(p, 2);
  OrbitDatum r = induce_orbit(torus_levi(2), {z1, z1});
  REQUIRE(r.blocks.size() == 1);
  CHECK(r.blocks[0].partition == Partition{2});
  OrbitDatum x = make_orbit(p, {{Poly::linear(1), {1}}, {Poly::linear(2), {1}}});
  CHECK(induce_orbit(full_levi(2), {x}) == x);
  CHECK(induce_orbit(standard_levi({2, 1}), {z2, z1}).blocks[0].partition == Partition{2, 1});
  CHECK_THROWS_AS(induce_orbit(standard_levi({2, 1}), {z1, z1}), std::invalid_argument);
  CHECK_THROWS_AS(induce_orbit(torus_levi(2), {z1, zero_orbit(5, 1)}), std::invalid_argument);
}

TEST_CASE("induce_orbit agrees with the generic-element Jordan type") {
  std::mt19937_64 rng(17);
  const long p = 2;
  for (int n = 2; n <= 4; ++n)
    for (auto& m : all_levis(n)) {
      std::vector<OrbitDatum> orbits;
      for (auto& b : m) {
        auto parts = partitions_of(static_cast<int>(b.size()));
        orbits.push_back(nilpotent_orbit(p, parts[rng() % parts.size()]));
      }
      MatQ y = generic_induced_element(m, orbits, rng);
      CHECK(orbit_of_matrix(y, p, {T()}) == induce_orbit(m, orbits));
    }
  // Mixed polynomials.
  Poly q({Rat(1), Rat(0), Rat(1)});
  OrbitDatum a = make_orbit(3, {{T(), {1}}, {q, {1}}});
  OrbitDatum b = make_orbit(3, {{T(), {1}}, {Poly::linear(1), {1}}});
  Levi m = standard_levi({3, 2});
  MatQ y = generic_induced_element(m, {a, b}, rng);
  OrbitDatum ind = induce_orbit(m, {a, b});
  CHECK(orbit_of_matrix(y, 3, {T(), Poly::linear(1), q}) == ind);
  CHECK(ind.blocks[0].partition == Partition{2});
}

TEST_CASE("orbit_codim examples and preservation") {
  CHECK(orbit_codim(zero_orbit(2, 2)) == 4);
  CHECK(orbit_codim(nilpotent_orbit(2, {2})) == 2);
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);
    auto levis = all_levis(n);
    Levi m = levis[rng() % levis.size()];
    std::vector<OrbitDatum> orbits;
    for (auto& b : m) {
      auto parts = partitions_of(static_cast<int>(b.size()));
      orbits.push_back(nilpotent_orbit(5, parts[rng() % parts.size()]));
    }
    OrbitDatum ind = induce_orbit(m, orbits);
    CHECK(orbit_codim(orbits, m) == orbit_codim(ind));
    // Independent side: centralizer of a generic element by rank.
    MatQ y = generic_induced_element(m, orbits, rng);
    CHECK(centralizer_dim(y) == orbit_codim(orbits, m));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("standard_representative") {
  MatQ r = standard_representative(nilpotent_orbit(3, {2}));
  MatQ e(2, 2);
  e << 0, 1, 0, 0;
  CHECK(r == e);
  OrbitDatum ss = make_orbit(3, {{Poly::linear(2), {1}}, {Poly::linear(1), {1}}});
  MatQ d(2, 2);
  d << 1, 0, 0, 2;
  CHECK(standard_representative(ss) == d);
  MatQ r21 = standard_representative(nilpotent_orbit(3, {2, 1}));
  MatQ e13 = MatQ::Zero(3, 3);
  e13(0, 2) = 1;
  CHECK(r21 == e13);
  // Round trip on mixed data.
  Poly q({Rat(-2), Rat(0), Rat(1)});
  OrbitDatum mixed = make_orbit(3, {{q, {2, 1}}, {Poly::linear(1), {3, 1}}, {T(), {2}}});
  MatQ x = standard_representative(mixed);
  CHECK(orbit_of_matrix(x, 3, {q, Poly::linear(1), T()}) == mixed);
  CHECK(charpoly(x) == poly_pow(q, 3) * poly_pow(Poly::linear(1), 4) * poly_pow(T(), 2));
  CHECK_THROWS_AS(make_orbit(7, {{q, {1}}}), std::invalid_argument);
}

TEST_CASE("round trip over all nilpotent orbits n <= 5") {
  for (int n = 1; n <= 5; ++n)
    for (auto& lam : partitions_of(n)) {
      OrbitDatum d = nilpotent_orbit(2, lam);
      MatQ x = standard_representative(d);
      CHECK(orbit_of_matrix(x, 2, {T()}) == d);
      CHECK(centralizer_dim(x) == centralizer_dim(d));
      // Upper triangular representative.
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) CHECK(x(i, j) == 0);
    }
}

TEST_CASE("regular_locus_test") {
  OrbitDatum z = zero_orbit(3, 1);
  CHECK(regular_locus_test({torus_levi(2), {z, z}, {Rat(1), Rat(2)}}));
  CHECK_FALSE(regular_locus_test({torus_levi(2), {z, z}, {Rat(1), Rat(1)}}));
  OrbitDatum o1 = make_orbit(3, {{Poly::linear(1), {1}}});
  OrbitDatum o2 = make_orbit(3, {{Poly::linear(2), {1}}});
  CHECK_FALSE(regular_locus_test({torus_levi(2), {o1, o2}, {Rat(1), Rat(0)}}));
  CHECK(regular_locus_test({torus_levi(2), {o1, o2}, {Rat(0), Rat(0)}}));
}

TEST_CASE("regular_locus_test matches the centralizer criterion") {
  std::mt19937_64 rng(31);
  Poly q({Rat(1), Rat(0), Rat(1)});
  std::vector<OrbitDatum> pool1 = {zero_orbit(3, 1), make_orbit(3, {{Poly::linear(1), {1}}}),
                                   make_orbit(3, {{Poly::linear(-1), {1}}})};
  std::vector<OrbitDatum> pool2 = {zero_orbit(3, 2), nilpotent_orbit(3, {2}),
                                   make_orbit(3, {{q, {1}}}),
                                   make_orbit(3, {{Poly::linear(1), {1}}, {T(), {1}}})};
  int agree = 0, positives = 0, negatives = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Levi m = (trial % 2) ? standard_levi({2, 1}) : torus_levi(3);
    std::vector<OrbitDatum> orbits;
    for (auto& b : m) orbits.push_back(b.size() == 1 ? pool1[rng() % 3] : pool2[rng() % 4]);
    std::vector<Rat> a;
    for (size_t b = 0; b < m.size(); ++b) a.push_back(Rat(static_cast<long>(rng() % 3) - 1));
    RegLocusQuery q{m, orbits, a};
    bool r = regular_locus_test(q);
    CHECK(r == regular_locus_by_centralizer(q));
    agree += (r == regular_locus_by_centralizer(q));
    (r ? positives : negatives)++;
  }
  CHECK(agree == 300);
  CHECK(positives > 20);
  CHECK(negatives > 20);
}

TEST_CASE("X in Ind_M^G(X) iff induction returns the direct sum") {
  Poly q({Rat(1), Rat(0), Rat(1)});
  std::vector<OrbitDatum> pool1 = {zero_orbit(3, 1), make_orbit(3, {{Poly::linear(1), {1}}})};
  std::vector<OrbitDatum> pool2 = {zero_orbit(3, 2), nilpotent_orbit(3, {2}),
                                   make_orbit(3, {{q, {1}}}),
                                   make_orbit(3, {{Poly::linear(1), {1}}, {T(), {1}}})};
  for (auto& a : pool2)
    for (auto& b : pool1)
      for (auto& c : pool1) {
        Levi m = standard_levi({2, 1, 1});
        std::vector<OrbitDatum> orbits = {a, b, c};
        bool reg = regular_locus_test({m, orbits, {Rat(0), Rat(0), Rat(0)}});
        CHECK(reg == (induce_orbit(m, orbits) == direct_sum(m, orbits)));
      }
}

TEST_CASE("weyl_discriminant_val") {
  const long p = 3;
  CHECK(weyl_discriminant_val(standard_representative(nilpotent_orbit(p, {2, 1})), p) == 0);
  MatQ d(2, 2);
  d << 1, 0, 0, 1 + p;
  CHECK(weyl_discriminant_val(d, p) == 1);
  CHECK(weyl_discriminant_val_oracle(d, p) == 1);
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> dist(-2, 2);
  Poly q({Rat(-3), Rat(0), Rat(1)});
  OrbitDatum mixed = make_orbit(p, {{q, {1}}, {Poly::linear(9), {2}}, {Poly::linear(0), {1}}});
  MatQ x = standard_representative(mixed);
  Rat base = weyl_discriminant_val(x, p);
  CHECK(base == weyl_discriminant_val_oracle(x, p));
  for (int trial = 0; trial < 10; ++trial) {
    MatQ g(5, 5);
    do {
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) g(i, j) = Rat(dist(rng));
    } while (exact_det<Rat>(g) == 0);
    CHECK(weyl_discriminant_val(g * x * exact_inverse<Rat>(g), p) == base);
  }
}
