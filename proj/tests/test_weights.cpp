#include "doctest.h"

#include <random>

#include "wopkit/weights.hpp"

using namespace wopkit;

namespace {

VecQ vec(std::initializer_list<long> xs) {
  VecQ v(xs.size());
  int i = 0;
  for (long x : xs) v(i++) = Rat(x);
  return v;
}

MatQ mat(int n, std::initializer_list<Rat> xs) {
  MatQ m(n, n);
  int i = 0;
  for (auto& x : xs) {
    m(i / n, i % n) = x;
    ++i;
  }
  return m;
}

LPoly ell(const Rat& a) { return Poly::monomial(a, 1); }

// Permutation action on a_0: (w H)(w(i)) = H(i).
VecQ act(const Permutation& w, const VecQ& h) {
  VecQ out(h.size());
  for (int i = 0; i < h.size(); ++i) out(w[i]) = h(i);
  return out;
}

std::vector<OrbitDatum> small_orbits(long p) {
  std::vector<OrbitDatum> out;
  for (int n = 2; n <= 4; ++n)
    for (auto& lam : partitions_of(n))
      if (lam.size() < static_cast<size_t>(n)) out.push_back(nilpotent_orbit(p, lam));
  out.push_back(make_orbit(p, {{Poly::monomial(1, 1), {2}}, {Poly::linear(1), {1}}}));
  out.push_back(make_orbit(p, {{Poly::monomial(1, 1), {2, 1}}, {Poly::linear(2), {1}}}));
  return out;
}

LeviOrbit zero_on(const Levi& m, long p) {
  std::vector<OrbitDatum> z;
  for (auto& b : m) z.push_back(zero_orbit(p, static_cast<int>(b.size())));
  return make_levi_orbit(m, z);
}

}  // namespace

TEST_CASE("iwasawa_HP examples") {
  for (long p : {2L, 3L, 5L}) {
    CHECK(iwasawa_HP(mat(2, {Rat(p), 0, 0, 1}), upper_borel(2), p) == vec({-1, 0}));
    CHECK(iwasawa_HP(mat(2, {1, Rat(1, p), 0, 1}), lower_borel(2), p) == vec({1, -1}));
    std::mt19937_64 rng(p);
    for (int n = 1; n <= 4; ++n)
      CHECK(iwasawa_HP(random_K(n, p, rng), upper_borel(n), p).isZero());
  }
  CHECK_THROWS_AS(iwasawa_HP(mat(2, {1, 1, 1, 1}), upper_borel(2), 2), std::invalid_argument);
  CHECK_THROWS_AS(iwasawa_HP(mat(2, {1, 0, 0, 1}), upper_borel(2), 4), std::invalid_argument);
}

TEST_CASE("iwasawa decomposition cross-check and equivariance") {
  std::mt19937_64 rng(3);
  const long primes[] = {2, 3, 5};
  for (int trial = 0; trial < 120; ++trial) {
    long p = primes[trial % 3];
    int n = 2 + trial % 3;
    auto ps = all_parabolics(n);
    Parabolic par = ps[rng() % ps.size()];
    MatQ g = random_GL(n, p, rng);
    VecQ h = iwasawa_HP(g, par, p);
    Iwasawa dec = iwasawa_decompose(g, par, p);
    CHECK(dec.p_part * dec.k_part == g);
    CHECK(in_lie_algebra(dec.p_part, par));
    CHECK(in_K(dec.k_part, p));
    CHECK(levi_H(dec.p_part, par, p) == h);
    CHECK(iwasawa_HP(g * random_K(n, p, rng), par, p) == h);
    MatQ m = random_levi_element(par, p, rng);
    CHECK(iwasawa_HP(m * g, par, p) == levi_H(m, par, p) + h);
  }
}

TEST_CASE("R_P examples and properties") {
  const long p = 3;
  OrbitDatum reg = nilpotent_orbit(p, {2});
  WeightQuery q{reg, torus_levi(2), mat(2, {1, 0, 0, Rat(p)})};
  CHECK(RP(q, upper_borel(2)) == vec({0, -1}));
  CHECK(RP(q, lower_borel(2)) == vec({-1, 0}));
  std::mt19937_64 rng(17);
  for (auto& x : small_orbits(p)) {
    MatQ xr = standard_representative(x);
    for (auto& m : richardson_levis(x)) {
      WeightQuery qk{x, m, random_K(x.n, p, rng)};
      for (auto& par : enumerate_F(m)) CHECK(RP(qk, par).isZero());
      MatQ g = random_GL(x.n, p, rng);
      MatQ h = random_centralizer(xr, p, rng);
      CHECK(h * xr == xr * h);
      WeightQuery qg{x, m, g}, qh{x, m, h}, qhg{x, m, h * g};
      ExpPolyFamily f = v_family(qg);
      CHECK(is_orthogonal_family(f));
      CHECK(adjacency_holds(f));
      VecQ shift;
      for (auto& par : enumerate_P(canonical_levi(m))) {
        VecQ d = RP(qhg, par) - RP(qg, par);
        CHECK(d == RP(qh, par));
        if (shift.size() == 0) shift = d;
        CHECK(d == shift);
      }
      // Normalizer equivariance over W_X.
      ChunkLayout lay = chunk_layout(x);
      Levi mc = canonical_levi(m);
      for (auto& w : weyl_of_x(lay)) {
        if (canonical_levi(conj_levi(w, mc)) != mc) continue;
        for (auto& par : enumerate_P(mc))
          CHECK(RP(qg, par) == act(w, RP(qg, conj_inverse(w, par))));
      }
    }
  }
}

TEST_CASE("weight_vLXQ") {
  const long p = 2;
  OrbitDatum reg = nilpotent_orbit(p, {2});
  Levi t2 = torus_levi(2);
  for (long k = 0; k <= 4; ++k) {
    WeightQuery q{reg, t2, mat(2, {1, 0, 0, rat_pow(p, -k)})};
    CHECK(weight_vLXQ(q, t2, whole_group(2)) == Surd(ell(Rat(k))) * Surd::sqrt_of(Rat(2)));
    // Upper unipotents lie in G_X and carry the trivial weight.
    WeightQuery u{reg, t2, mat(2, {1, rat_pow(p, -k), 0, 1})};
    CHECK(weight_vLXQ(u, t2, whole_group(2)).is_zero());
    for (auto& b : enumerate_P(t2)) CHECK(weight_vLXQ(q, t2, b) == Surd(Rat(1)));
  }
  std::mt19937_64 rng(23);
  for (auto& x : small_orbits(p)) {
    if (x.n > 3) continue;
    MatQ xr = standard_representative(x);
    for (auto& m : richardson_levis(x)) {
      MatQ g = random_GL(x.n, p, rng);
      WeightQuery q{x, m, g};
      WeightQuery ql{x, m, random_centralizer(xr, p, rng) * g};
      WeightQuery qr{x, m, g * random_K(x.n, p, rng)};
      for (auto& l : enumerate_L(canonical_levi(m)))
        for (auto& big : enumerate_F(l)) {
          Surd v = weight_vLXQ(q, l, big);
          CHECK(weight_vLXQ(ql, l, big) == v);
          CHECK(weight_vLXQ(qr, l, big) == v);
          if (big.size() == l.size()) CHECK(v == Surd(Rat(1)));
        }
    }
  }
}

TEST_CASE("n_square") {
  const long p = 3;
  Parabolic b = upper_borel(2);
  MatQ z = MatQ::Zero(2, 2);
  MatQ a = mat(2, {5, 0, 0, 2});
  CHECK(n_square(a, z, z, b) == MatQ::Identity(2, 2));
  MatQ v = mat(2, {0, 7, 0, 0});
  CHECK(n_square(a, z, v, b) == mat(2, {1, Rat(7, 3), 0, 1}));
  CHECK_THROWS_AS(n_square(z, z, v, b), NotRegular);
  CHECK_THROWS_AS(n_square(a, z, mat(2, {0, 0, 1, 0}), b), std::invalid_argument);
  std::mt19937_64 rng(4);
  LeviOrbit o = make_levi_orbit(standard_levi({2, 1}),
                                {nilpotent_orbit(p, {2}), zero_orbit(p, 1)});
  MatQ y = levi_representative(o);
  for (auto& pb : enumerate_P(o.m)) {
    MatQ am = scalar_matrix(o.m, {Rat(1), Rat(4)});
    MatQ vv = random_nilradical_element(pb, p, rng);
    MatQ n = n_square(am, y, vv, pb);
    CHECK(exact_inverse<Rat>(n) * (am + y) * n == am + y + vv);
    CHECK(in_lie_algebra(n, pb));
  }
}

TEST_CASE("rho by slope detection") {
  for (long p : {2L, 3L}) {
    for (int n : {2, 3}) {
      LeviOrbit o = zero_on(torus_levi(n), p);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a == b) continue;
          RhoResult r = rho(o, a, b);
          CHECK(r.rho == 1);
          CHECK(r.stable_from <= 3);
          CHECK(rho(o, b, a).rho == r.rho);
        }
    }
    // Regular semisimple, M_Y = G_Y.
    LeviOrbit rs = make_levi_orbit(torus_levi(3), {make_orbit(p, {{Poly::linear(0), {1}}}),
                                                  make_orbit(p, {{Poly::linear(1), {1}}}),
                                                  make_orbit(p, {{Poly::linear(3), {1}}})});
    for (auto& [ab, v] : rho_table(rs)) CHECK(v == 0);
  }
  CHECK_THROWS_AS(rho(zero_on(torus_levi(2), 2), 0, 0), std::invalid_argument);
}

TEST_CASE("r and w families") {
  const long p = 2;
  LeviOrbit o2 = zero_on(torus_levi(2), p);
  RhoTable t2 = rho_table(o2);
  std::vector<Rat> a = {Rat(8), Rat(0)};
  ExpPolyFamily r = r_family(o2.m, t2, a, p);
  CHECK(r.c.at(upper_borel(2))[0].y == vec({-3, 3}) * Rat(1, 2));
  CHECK(r_levi_independent(r));
  // V = 0 with M_Y = G_Y gives the trivial family.
  LeviOrbit rs = make_levi_orbit(torus_levi(2), {make_orbit(p, {{Poly::linear(0), {1}}}),
                                                make_orbit(p, {{Poly::linear(1), {1}}})});
  ExpPolyFamily w0 = w_family(rs, rho_table(rs), {Rat(2), Rat(0)}, MatQ::Zero(2, 2), upper_borel(2));
  for (auto& [par, terms] : w0.c) CHECK(terms[0].y.isZero());

  std::mt19937_64 rng(8);
  std::vector<LeviOrbit> cases = {
      zero_on(torus_levi(3), p), zero_on(standard_levi({2, 1}), p),
      make_levi_orbit(standard_levi({2, 1}), {nilpotent_orbit(p, {2}), zero_orbit(p, 1)}),
      make_levi_orbit(torus_levi(3), {make_orbit(p, {{Poly::linear(1), {1}}}),
                                      make_orbit(p, {{Poly::linear(1), {1}}}),
                                      make_orbit(p, {{Poly::linear(0), {1}}})})};
  for (auto& o : cases) {
    RhoTable t = rho_table(o);
    for (int trial = 0; trial < 4; ++trial) {
      auto dir = regular_point(o, 4, 100 + trial);
      std::vector<Rat> aa;
      for (auto& x : dir) aa.push_back(x * rat_pow(p, 1 + trial));
      auto ps = enumerate_P(o.m);
      Parabolic pb = ps[rng() % ps.size()];
      MatQ v = random_nilradical_element(pb, p, rng);
      CHECK(r_levi_independent(r_family(o.m, t, aa, p)));
      auto rep = r_v_product_identity(o, t, aa, v, pb);
      CHECK_MESSAGE(rep.holds, to_string(rep.lhs), " vs ", to_string(rep.rhs));
      Parabolic p2 = ps[rng() % ps.size()];
      CHECK(cocycle_holds(o, t, aa, v, pb, p2));
      CHECK(adjacency_holds(w_family(o, t, aa, v, pb)));
    }
  }
}

TEST_CASE("adjacent difference") {
  const long p = 2;
  OrbitDatum reg = nilpotent_orbit(p, {2});
  WeightQuery q{reg, torus_levi(2), mat(2, {1, 0, 0, Rat(p)})};
  auto rep = adjacent_difference(q, upper_borel(2), lower_borel(2));
  CHECK(rep.holds);
  CHECK(rep.lhs == vec({-1, 1}));
  CHECK(rep.u13 == mat(1, {Rat(p)}));
  std::mt19937_64 rng(12);
  for (auto& lam : std::vector<Partition>{{2, 1}, {3}, {2, 2}, {3, 1}}) {
    OrbitDatum x = nilpotent_orbit(p, lam);
    for (auto& m : richardson_levis(x)) {
      Levi mc = canonical_levi(m);
      for (int trial = 0; trial < 3; ++trial) {
        MatQ g = trial == 0 ? MatQ::Identity(x.n, x.n) : random_GL(x.n, p, rng);
        WeightQuery qq{x, m, g};
        for (auto& p1 : enumerate_P(mc))
          for (size_t k = 0; k + 1 < p1.size(); ++k) {
            Parabolic p2 = p1;
            std::swap(p2[k], p2[k + 1]);
            auto r = adjacent_difference(qq, p1, p2);
            CHECK(r.holds);
            if (trial == 0) {
              CHECK(r.lhs.isZero());
              CHECK(valuation(exact_det<Rat>(r.u13), p) == 0);
            }
          }
      }
    }
  }
  CHECK_THROWS_AS(adjacent_difference(q, upper_borel(2), upper_borel(2)), std::invalid_argument);
}

TEST_CASE("weight comparison") {
  const long p = 2;
  OrbitDatum reg = nilpotent_orbit(p, {2});
  MatQ v = mat(2, {0, Rat(p), 0, 0});
  auto rep = weight_compare(reg, torus_levi(2), upper_borel(2), v, MatQ::Identity(2, 2));
  CHECK(rep.holds);
  CHECK(rep.lhs.at(upper_borel(2)).isZero());
  CHECK(rep.lhs.at(lower_borel(2)) == vec({1, -1}));
  std::mt19937_64 rng(31);
  for (auto& lam : std::vector<Partition>{{2, 1}, {3}}) {
    OrbitDatum x = nilpotent_orbit(p, lam);
    for (auto& m : richardson_levis(x))
      for (auto& pb : enumerate_P(canonical_levi(m))) {
        MatQ vv = random_nilradical_element(pb, p, rng);
        auto r = weight_compare(x, m, pb, vv, random_K(x.n, p, rng));
        CHECK(r.holds);
        CHECK(r.lhs.at(pb).isZero());
      }
  }
}

TEST_CASE("r-family by descent") {
  const long p = 3;
  std::vector<Rat> a3 = {Rat(3), Rat(0), Rat(-3)};
  auto nil = r_descent_equal(zero_on(torus_levi(3), p), a3);
  CHECK(nil.holds);
  // diag(1, 1 + p^2): distinct polynomials, every rho vanishes.
  LeviOrbit d = make_levi_orbit(torus_levi(2), {make_orbit(p, {{Poly::linear(1), {1}}}),
                                               make_orbit(p, {{Poly::linear(10), {1}}})});
  auto rd = r_descent_equal(d, {Rat(3), Rat(0)});
  CHECK(rd.holds);
  for (auto& [ab, v] : rd.direct) CHECK(v == 0);
  // Elliptic quadratic on two blocks of GL4.
  Poly f({Rat(1), Rat(0), Rat(1)});  // T^2 + 1, irreducible over Q_3
  OrbitDatum e = make_orbit(p, {{f, {1}}});
  LeviOrbit q4 = make_levi_orbit(standard_levi({2, 2}), {e, e});
  auto rq = r_descent_equal(q4, {Rat(3), Rat(0)});
  CHECK(rq.holds);
  CHECK(rq.descent.at({0, 1}) == rq.direct.at({0, 1}));
  LeviOrbit mixed = make_levi_orbit(standard_levi({2, 1}), {e, zero_orbit(p, 1)});
  CHECK(r_descent_equal(mixed, {Rat(3), Rat(0)}).holds);
}
