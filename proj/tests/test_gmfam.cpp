#include "doctest.h"

#include <random>

#include "wopkit/gmfam.hpp"

using namespace wopkit;

namespace {

VecQ vec(std::initializer_list<long> xs) {
  VecQ v(xs.size());
  int i = 0;
  for (long x : xs) v(i++) = Rat(x);
  return v;
}

LPoly ell(const Rat& a) { return Poly::monomial(a, 1); }

Surd sqrt_int(long r) { return Surd::sqrt_of(Rat(r)); }

// GL2 torus family exp(l <lambda, Y_P>) with Y_B = k alpha^vee and Y_Bbar = 0.
ExpPolyFamily gl2_pair(long k) {
  return orthogonal_family(torus_levi(2), {{upper_borel(2), vec({k, -k})}, {lower_borel(2), vec({0, 0})}});
}

std::vector<Levi> sample_levis(int n) {
  std::vector<Levi> out;
  for (auto& m : all_levis(n))
    if (m.size() >= 2) out.push_back(m);
  return out;
}

}  // namespace

TEST_CASE("surd arithmetic") {
  CHECK(sqrt_int(2) * sqrt_int(2) == Surd(Rat(2)));
  CHECK(sqrt_int(8) == Surd(Rat(2)) * sqrt_int(2));
  CHECK(Surd::sqrt_of(Rat(1, 2)) == Surd(Rat(1, 2)) * sqrt_int(2));
  CHECK(sqrt_int(6) == sqrt_int(2) * sqrt_int(3));
  CHECK((sqrt_int(2) - sqrt_int(2)).is_zero());
  CHECK(sqrt_int(9) == Surd(Rat(3)));
  CHECK_THROWS_AS(Surd::sqrt_of(Rat(-1)), std::invalid_argument);
  CHECK(to_string(Surd(ell(Rat(3, 2)))) == "3/2*l");
  CHECK(std::abs(sqrt_int(2).eval(0) - 1.41421356) < 1e-6);
}

TEST_CASE("theta_eval") {
  const Rat s(3, 7);
  VecQ lam = vec({1, -1}) * s;
  CHECK(theta_eval(upper_borel(2), lam) == Surd(Rat(2) * s) * Surd::sqrt_of(Rat(1, 2)));
  CHECK(theta_eval(upper_borel(2), lam) == Surd(s) * sqrt_int(2));
  CHECK(theta_eval(lower_borel(2), lam) == Surd(Rat(-1)) * theta_eval(upper_borel(2), lam));
  VecQ l3 = vec({5, -2, -3});
  // (5 + 2)(-2 + 3) / sqrt(3)
  CHECK(theta_eval(upper_borel(3), l3) == Surd(Rat(7, 3)) * sqrt_int(3));
  CHECK(lattice_volume(simple_coroots(upper_borel(3), whole_group(3))) == sqrt_int(3));
  // Coweights are dual to the simple roots.
  auto cw = simple_coweights(upper_borel(3), whole_group(3));
  REQUIRE(cw.size() == 2);
  CHECK(cw[0](0) - cw[0](1) == 1);
  CHECK(cw[0](1) - cw[0](2) == 0);
  CHECK(cw[1](1) - cw[1](2) == 1);
}

TEST_CASE("cM_limit examples") {
  ExpPolyFamily one = constant_family(torus_levi(3), Poly::constant(1));
  CHECK(cM(one) == Surd());
  CHECK(cM(constant_family(full_levi(3), Poly::constant(1))) == Surd(Rat(1)));
  for (auto& q : enumerate_F(torus_levi(3)))
    CHECK(cM_limit(one, torus_levi(3), q) == Surd(q.size() == 3 ? Rat(1) : Rat(0)));
  for (long k = 0; k <= 4; ++k) CHECK(cM(gl2_pair(k)) == Surd(ell(Rat(k))) * sqrt_int(2));
  CHECK(cM(constant_family(torus_levi(2), LPoly())).is_zero());
  // The same family through the coroot parametrization.
  ExpPolyFamily f = gl2_pair(3);
  CHECK(cM_limit(f, full_levi(2), whole_group(2)) == Surd(Rat(1)));
}

TEST_CASE("non-families are rejected") {
  ExpPolyFamily bad = orthogonal_family(
      torus_levi(3), {{{{0}, {1}, {2}}, vec({1, 0, 0})},
                      {{{1}, {0}, {2}}, vec({0, 0, 0})},
                      {{{0}, {2}, {1}}, vec({0, 0, 1})},
                      {{{1}, {2}, {0}}, vec({0, 2, 0})},
                      {{{2}, {0}, {1}}, vec({0, 0, 0})},
                      {{{2}, {1}, {0}}, vec({5, 0, 0})}});
  CHECK_FALSE(adjacency_holds(bad));
  CHECK_THROWS_AS(validate_family(bad), std::invalid_argument);
  CHECK_THROWS_AS(cM(bad), std::invalid_argument);
}

TEST_CASE("random families are (G,M)-families with lambda-independent limits") {
  std::mt19937_64 rng(5);
  int calls = 0;
  for (int n = 2; n <= 4; ++n)
    for (auto& m : sample_levis(n)) {
      ExpPolyFamily f = random_family(m, rng, 2);
      CHECK_NOTHROW(validate_family(f));
      for (auto& l : enumerate_L(m))
        for (auto& q : enumerate_F(l)) {
          CHECK_NOTHROW(cM_limit(f, l, q));
          ++calls;
        }
    }
  CHECK(calls > 100);
}

TEST_CASE("cQprime") {
  ExpPolyFamily one = constant_family(torus_levi(3), Poly::constant(1));
  for (auto& q : enumerate_F(torus_levi(3)))
    CHECK(cQprime(one, q) == Surd(q.size() == 1 ? Rat(1) : Rat(0)));
  for (long k = -2; k <= 3; ++k) {
    CHECK(cQprime(gl2_pair(k), upper_borel(2)) == Surd(ell(Rat(k))) * sqrt_int(2));
    CHECK(cQprime(gl2_pair(k), lower_borel(2)).is_zero());
    CHECK(cQprime(gl2_pair(k), whole_group(2)) == Surd(Rat(1)));
  }
  // Conjugation equivariance.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    Levi m = trial % 2 ? torus_levi(3) : standard_levi({2, 1, 1});
    ExpPolyFamily f = random_family(m, rng, 2);
    auto perms = all_permutations(levi_rank(m));
    Permutation w = perms[rng() % perms.size()];
    ExpPolyFamily g = conjugate_family(w, f);
    CHECK_NOTHROW(validate_family(g));
    CHECK(cM(g) == cM(f));
    for (auto& q : enumerate_F(f.m)) CHECK(cQprime(g, conj(w, q)) == cQprime(f, q));
  }
}

TEST_CASE("d_M^G and the section") {
  Levi t3 = torus_levi(3);
  CHECK(dMG(t3, {t3, full_levi(3)}) == Surd(Rat(1)));
  auto s = section_s(t3, {t3, full_levi(3)});
  CHECK(s[1] == whole_group(3));
  CHECK(levi_of(s[0]) == t3);
  Levi a = {{0, 1}, {2}}, b = {{0}, {1, 2}};
  CHECK(dMG(t3, {a, a}).is_zero());
  CHECK(dMG(t3, {a, b}) == Surd(Rat(1, 2)) * sqrt_int(3));
  CHECK(dMG(t3, {full_levi(3), full_levi(3)}).is_zero());
  auto sab = section_s(t3, {a, b});
  CHECK(levi_of(sab[0]) == a);
  CHECK(levi_of(sab[1]) == b);
  CHECK_THROWS_AS(section_s(t3, {a, a}), std::invalid_argument);
  // Three places.
  CHECK(dMG(t3, {a, b, t3}) == dMG(t3, {a, b}));
  CHECK(dMG(t3, {a, b, full_levi(3)}).is_zero());
  CHECK(dMG(t3, {t3, t3, full_levi(3)}) == Surd(Rat(1)));
}

TEST_CASE("product, descent and splitting identities") {
  std::mt19937_64 rng(77);
  int prod = 0, desc = 0, split = 0, prime = 0;
  for (int trial = 0; trial < 120; ++trial) {
    int n = 2 + trial % 3;
    auto levis = sample_levis(n);
    Levi m = levis[rng() % levis.size()];
    ExpPolyFamily c = random_family(m, rng, 2), d = random_family(m, rng, 1);
    auto r1 = product_identity(c, d);
    CHECK_MESSAGE(r1.holds, to_string(r1.lhs), " vs ", to_string(r1.rhs));
    prod += r1.holds;
    auto r2 = product_identity_prime(c, d);
    CHECK_MESSAGE(r2.holds, to_string(r2.lhs), " vs ", to_string(r2.rhs));
    prime += r2.holds;
    auto ls = enumerate_L(m);
    auto r3 = descent_identity(c, ls[rng() % ls.size()]);
    CHECK_MESSAGE(r3.holds, to_string(r3.lhs), " vs ", to_string(r3.rhs));
    desc += r3.holds;
    if (n <= 3) {
      ExpPolyFamily e = random_family(m, rng, 1);
      auto r4 = splitting_identity({c, d, e});
      CHECK_MESSAGE(r4.holds, to_string(r4.lhs), " vs ", to_string(r4.rhs));
      split += r4.holds;
    } else {
      split += product_identity(d, c).holds;
    }
  }
  CHECK(prod == 120);
  CHECK(prime == 120);
  CHECK(desc == 120);
  CHECK(split == 120);
}

TEST_CASE("cQprime avoids coweight walls on repeated calls") {
  std::mt19937_64 rng(4);
  ExpPolyFamily f = random_family(torus_levi(4), rng, 1);
  auto qs = enumerate_F(torus_levi(4));
  int calls = 0;
  for (int rep = 0; rep < 40; ++rep)
    for (auto& q : qs) {
      CHECK_NOTHROW(cQprime(f, q));
      ++calls;
    }
  CHECK(calls > 2000);
}
