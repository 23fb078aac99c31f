#include "doctest.h"

#include <algorithm>
#include <set>

#include "wopkit/paracomb.hpp"

using namespace wopkit;

namespace {

Poly T() { return Poly::monomial(1, 1); }

// X lies in Ind_P(X_ss): X in p, semisimple Levi part, induced orbit equals the orbit of X.
bool induces_x(const OrbitDatum& x, const Parabolic& p) {
  MatQ xr = standard_representative(x);
  if (!in_lie_algebra(xr, p)) return false;
  std::vector<Poly> polys;
  for (auto& b : x.blocks) polys.push_back(b.poly);
  std::vector<OrbitDatum> orbits;
  for (auto& blk : p) {
    MatQ y = extract_block(xr, blk, blk);
    std::vector<Poly> used;
    for (auto& f : polys)
      if (partition_along(y, f).size() > 0) used.push_back(f);
    OrbitDatum o = orbit_of_matrix(y, x.p, used);
    for (auto& b : o.blocks)
      for (int part : b.partition)
        if (part != 1) return false;
    orbits.push_back(o);
  }
  return induce_orbit(p, orbits) == x;
}

// Exhaustive oracle over all r x |J| zero-one tables.
std::vector<EpsilonTable> epsilon_oracle(const Partition& lam) {
  std::set<int> js(lam.begin(), lam.end());
  std::vector<int> J(js.begin(), js.end());
  const int r = J.back(), c = static_cast<int>(J.size());
  std::vector<EpsilonTable> out;
  for (long mask = 0; mask < (1L << (r * c)); ++mask) {
    EpsilonTable t;
    t.r = r;
    t.J = J;
    t.e.assign(r, std::vector<int>(c, 0));
    for (int k = 0; k < r; ++k)
      for (int jj = 0; jj < c; ++jj) t.e[k][jj] = (mask >> (k * c + jj)) & 1;
    if (is_valid_epsilon(t)) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> block_sizes(const Parabolic& p) {
  std::vector<int> s;
  for (auto& b : p) s.push_back(static_cast<int>(b.size()));
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<OrbitDatum> sample_orbits() {
  std::vector<OrbitDatum> out;
  for (int n = 1; n <= 5; ++n)
    for (auto& lam : partitions_of(n)) out.push_back(nilpotent_orbit(3, lam));
  Poly q({Rat(1), Rat(0), Rat(1)});
  out.push_back(make_orbit(3, {{T(), {2, 1}}, {Poly::linear(1), {1}}}));
  out.push_back(make_orbit(3, {{T(), {2}}, {Poly::linear(1), {2}}}));
  out.push_back(make_orbit(3, {{q, {1, 1}}, {T(), {1}}}));
  out.push_back(make_orbit(3, {{q, {2}}}));
  return out;
}

}  // namespace

TEST_CASE("parabolic enumeration") {
  CHECK(enumerate_P(torus_levi(2)).size() == 2);
  CHECK(enumerate_P(torus_levi(3)).size() == 6);
  CHECK(enumerate_P(torus_levi(4)).size() == 24);
  auto f = enumerate_F(standard_levi({2, 1}));
  CHECK(f.size() == 3);
  std::set<Parabolic> expect = {{{0, 1}, {2}}, {{2}, {0, 1}}, {{0, 1, 2}}};
  CHECK(std::set<Parabolic>(f.begin(), f.end()) == expect);
  // Ordered set partitions of 3 points: 13 (Fubini number).
  CHECK(all_parabolics(3).size() == 13);
  CHECK(all_parabolics(4).size() == 75);
  CHECK(enumerate_F(torus_levi(3), Parabolic{{0, 1}, {2}}).size() == 3);
  CHECK(enumerate_P(torus_levi(3), Parabolic{{0, 1}, {2}}).size() == 2);
  CHECK(enumerate_L(torus_levi(3)).size() == 5);
  CHECK(parabolic_contains(whole_group(3), upper_borel(3)));
  CHECK_FALSE(parabolic_contains(upper_borel(3), lower_borel(3)));
}

TEST_CASE("epsilon_set examples and exhaustive oracle") {
  CHECK(epsilon_set(Partition{2, 1}).size() == 2);
  auto reg = epsilon_set(Partition{4});
  REQUIRE(reg.size() == 1);
  for (auto& row : reg[0].e) CHECK(row == std::vector<int>{1});
  CHECK(epsilon_set(Partition{1, 1, 1}).size() == 1);
  for (int n = 1; n <= 6; ++n)
    for (auto& lam : partitions_of(n)) CHECK(epsilon_set(lam) == epsilon_oracle(lam));
}

TEST_CASE("sr_action") {
  auto eps = epsilon_set(Partition{2, 1});
  CHECK(sr_action({0, 1}, eps[0]) == eps[0]);
  CHECK(sr_action({1, 0}, eps[0]) == eps[1]);
  CHECK(sr_action({1, 0}, eps[1]) == eps[0]);
  EpsilonTable bad = eps[0];
  bad.e[0][0] = 1 - bad.e[0][0];
  CHECK_THROWS_AS(sr_action({0, 1}, bad), NotInE);
  // Transitivity and the action property.
  for (int n = 1; n <= 5; ++n)
    for (auto& lam : partitions_of(n)) {
      auto all = epsilon_set(lam);
      std::set<EpsilonTable> orbit;
      auto perms = all_permutations(all[0].r);
      for (auto& s : perms) orbit.insert(sr_action(s, all[0]));
      CHECK(orbit.size() == all.size());
      for (auto& s : perms)
        for (auto& t : perms)
          CHECK(sr_action(compose(s, t), all.back()) == sr_action(s, sr_action(t, all.back())));
    }
}

TEST_CASE("richardson_set examples") {
  auto r2 = richardson_set(nilpotent_orbit(3, {2}));
  REQUIRE(r2.size() == 1);
  CHECK(r2[0] == upper_borel(2));
  auto z = richardson_set(zero_orbit(3, 4));
  REQUIRE(z.size() == 1);
  CHECK(z[0] == whole_group(4));
  auto r21 = richardson_set(nilpotent_orbit(3, {2, 1}));
  CHECK(r21.size() == 2);
  for (auto& p : r21) CHECK(block_sizes(p) == std::vector<int>{1, 2});
}

TEST_CASE("richardson_set induces X and matches brute force") {
  for (auto& x : sample_orbits()) {
    auto rs = richardson_set(x);
    std::set<std::vector<int>> shapes;
    std::set<std::vector<std::vector<int>>> types;
    for (auto& p : rs) {
      CHECK(induces_x(x, p));
      shapes.insert(block_sizes(p));
      types.insert(conjugacy_type(x, p));
    }
    // Pairwise associated; the conjugacy type separates elements.
    CHECK(shapes.size() == 1);
    CHECK(types.size() == rs.size());
    if (x.is_nilpotent()) CHECK(richardson_brute_force(x) == rs);
  }
}

TEST_CASE("r_map fibers are torsors") {
  for (auto& x : sample_orbits())
    for (auto& m : richardson_levis(x)) {
      auto sizes = r_fiber_sizes(x, m);
      long nq = normalizer_quotient_size(x, m);
      for (long s : sizes) CHECK(s == nq);
      CHECK(r_fibers_are_torsors(x, m));
    }
  OrbitDatum x21 = nilpotent_orbit(3, {2, 1});
  CHECK(normalizer_quotient_size(x21, richardson_levi(x21)) == 1);
  OrbitDatum x22 = nilpotent_orbit(3, {2, 2});
  CHECK(normalizer_quotient_size(x22, richardson_levi(x22)) == 2);
  OrbitDatum x111 = nilpotent_orbit(3, {3});
  CHECK(normalizer_quotient_size(x111, richardson_levi(x111)) == 6);
}

TEST_CASE("ls_map") {
  OrbitDatum reg = nilpotent_orbit(3, {2});
  CHECK(ls_map(reg, torus_levi(2), whole_group(2)) == whole_group(2));
  CHECK(ls_map(reg, torus_levi(2), lower_borel(2)) == upper_borel(2));
  CHECK(ls_map(reg, torus_levi(2), upper_borel(2)) == upper_borel(2));
  CHECK_THROWS_AS(ls_map(reg, full_levi(2), whole_group(2)), std::invalid_argument);
  for (auto& x : sample_orbits()) {
    auto rs = richardson_set(x);
    MatQ xr = standard_representative(x);
    for (auto& m : richardson_levis(x)) {
      auto fm = enumerate_F(m);
      for (auto& p : enumerate_P(m)) CHECK(ls_map(x, m, p) == r_map(x, m, p));
      for (auto& q : fm) {
        Parabolic img = ls_map(x, m, q);
        CHECK(in_lie_algebra(xr, img));
        CHECK(block_sizes(img) == block_sizes(q));
        bool has_r = std::any_of(rs.begin(), rs.end(),
                                 [&](const Parabolic& r) { return parabolic_contains(img, r); });
        CHECK(has_r);
        for (auto& q2 : fm)
          if (parabolic_contains(q2, q)) CHECK(parabolic_contains(ls_map(x, m, q2), img));
      }
    }
  }
}

TEST_CASE("w_P") {
  OrbitDatum reg = nilpotent_orbit(3, {2});
  CHECK(w_P(reg, torus_levi(2), lower_borel(2)) == Permutation{1, 0});
  CHECK(w_P(reg, torus_levi(2), upper_borel(2)) == Permutation{0, 1});
  for (auto& x : sample_orbits()) {
    if (x.n > 4) continue;
    ChunkLayout lay = chunk_layout(x);
    auto wx = weyl_of_x(lay);
    for (auto& m : richardson_levis(x))
      for (auto& q : enumerate_F(m)) {
        Permutation w = w_P(x, m, q);
        CHECK(in_weyl_of_x(lay, w));
        Parabolic img = conj_inverse(w, q);
        CHECK(img == ls_map(x, m, q));
        // Lexicographically minimal in its coset.
        Permutation best;
        for (auto& pi : wx)
          if (conj_inverse(pi, q) == img && (best.empty() || pi < best)) best = pi;
        CHECK(w == best);
      }
    for (auto& p : richardson_set(x)) {
      Permutation id(x.n);
      for (int i = 0; i < x.n; ++i) id[i] = i;
      CHECK(w_P(x, levi_of(p), p) == id);
    }
  }
}

TEST_CASE("conjugation helpers") {
  Permutation pi = {2, 0, 1};
  MatQ w = permutation_matrix(pi);
  CHECK(w(2, 0) == 1);
  Parabolic b = upper_borel(3);
  CHECK(conj_inverse(pi, conj(pi, b)) == b);
  CHECK(compose(pi, inverse(pi)) == Permutation{0, 1, 2});
  CHECK_THROWS_AS(inverse({0, 0, 1}), std::invalid_argument);
}
