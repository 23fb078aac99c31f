#include "wopkit/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "wopkit/integrals.hpp"

namespace wopkit {

namespace {

class Tally {
 public:
  Tally(int id, std::string name, double limit) : t0_(std::chrono::steady_clock::now()) {
    r_.id = id;
    r_.name = std::move(name);
    r_.limit_seconds = limit;
  }
  void check(bool ok, const std::string& what) {
    ++r_.instances;
    if (!ok && r_.failures++ == 0) first_ = what;
  }
  // Runs body and records an exception as one failure.
  template <class F>
  void guard(const std::string& what, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(false, what + ": " + e.what());
    }
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  CriterionResult finish() {
    r_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    r_.detail = notes_;
    if (!first_.empty()) r_.detail += (r_.detail.empty() ? "" : "; ") + ("first failure: " + first_);
    return r_;
  }

 private:
  CriterionResult r_;
  std::chrono::steady_clock::time_point t0_;
  std::string first_, notes_;
};

bool full(SuiteLevel l) { return l == SuiteLevel::Full; }

// Depth bound for the A -> 0 slope and limit detection in the battery.
constexpr int kDepth = 16;

Poly T() { return Poly::monomial(1, 1); }

std::string str(const OrbitDatum& x) {
  std::ostringstream os;
  os << "p=" << x.p;
  for (auto& b : x.blocks) {
    os << " [" << to_string(b.poly) << ":";
    for (int v : b.partition) os << " " << v;
    os << "]";
  }
  return os.str();
}

std::vector<std::vector<OrbitDatum>> nilpotent_tuples(const Levi& m, long p) {
  std::vector<std::vector<OrbitDatum>> out = {{}};
  for (auto& b : m) {
    std::vector<std::vector<OrbitDatum>> next;
    for (auto& t : out)
      for (auto& lam : partitions_of(static_cast<int>(b.size()))) {
        auto u = t;
        u.push_back(nilpotent_orbit(p, lam));
        next.push_back(u);
      }
    out = std::move(next);
  }
  return out;
}

// Ind_M^L blockwise, in the local coordinates of every block of L.
std::vector<OrbitDatum> induce_to(const Levi& m, const std::vector<OrbitDatum>& o, const Levi& l) {
  std::vector<OrbitDatum> out;
  for (auto blk : l) {
    std::sort(blk.begin(), blk.end());
    Levi local;
    std::vector<OrbitDatum> lo;
    for (size_t i = 0; i < m.size(); ++i) {
      if (!std::binary_search(blk.begin(), blk.end(), m[i].front())) continue;
      std::vector<int> pos;
      for (int c : m[i])
        pos.push_back(static_cast<int>(std::lower_bound(blk.begin(), blk.end(), c) - blk.begin()));
      local.push_back(pos);
      lo.push_back(o[i]);
    }
    out.push_back(induce_orbit(local, lo));
  }
  return out;
}

std::vector<OrbitDatum> nilpotent_orbits(int lo, int hi, long p, bool skip_zero) {
  std::vector<OrbitDatum> out;
  for (int n = lo; n <= hi; ++n)
    for (auto& lam : partitions_of(n))
      if (!skip_zero || lam.size() < static_cast<size_t>(n)) out.push_back(nilpotent_orbit(p, lam));
  return out;
}

OrbitDatum single(long p, const Poly& f, Partition lam) {
  return make_orbit(p, {OrbitBlock{f, std::move(lam)}});
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 3) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

}  // namespace

CriterionResult check_induction(SuiteLevel level) {
  Tally t(1, "induction transitivity and codimension", full(level) ? 10.0 : 0.0);
  const int nmax = full(level) ? 5 : 4;
  const long p = 2;
  long tuples = 0;
  for (int n = 1; n <= nmax; ++n)
    for (auto& m : all_levis(n))
      for (auto& o : nilpotent_tuples(m, p)) {
        ++tuples;
        t.guard("induce", [&] {
          OrbitDatum direct = induce_orbit(m, o);
          const int codim = orbit_codim(o, m);
          t.check(codim == orbit_codim(direct), "codimension on Levi " + std::to_string(m.size()));
          for (auto& l : coarsenings(m, full_levi(n))) {
            auto mid = induce_to(m, o, l);
            t.check(induce_orbit(l, mid) == direct, "transitivity to " + str(direct));
            t.check(orbit_codim(mid, l) == codim, "codimension through L");
          }
        });
      }
  // Independent oracle: Jordan type of a generic element of o + n_P.
  std::mt19937_64 rng(41);
  long generic = 0;
  for (int n = 2; n <= 4; ++n)
    for (auto& m : all_levis(n))
      for (auto& o : nilpotent_tuples(m, p)) {
        MatQ y = generic_induced_element(m, o, rng);
        t.check(orbit_of_matrix(y, p, {T()}) == induce_orbit(m, o), "generic element Jordan type");
        ++generic;
      }
  t.note("n <= " + std::to_string(nmax) + ", " + std::to_string(tuples) + " orbit tuples, " +
         std::to_string(generic) + " generic-element oracles");
  return t.finish();
}

CriterionResult check_richardson(SuiteLevel level) {
  Tally t(2, "Richardson sets, S_r transitivity, (R) fibers", full(level) ? 30.0 : 0.0);
  const int nmax = full(level) ? 5 : 4;
  long orbits = 0;
  for (auto& x : nilpotent_orbits(1, nmax, 3, false)) {
    ++orbits;
    t.guard(str(x), [&] {
      auto eps = epsilon_set(x, 0);
      auto rs = richardson_set(x), brute = richardson_brute_force(x);
      t.check(eps.size() == brute.size(), "|E| vs brute force for " + str(x));
      std::sort(rs.begin(), rs.end());
      std::sort(brute.begin(), brute.end());
      t.check(rs == brute, "Richardson set vs brute force for " + str(x));
      std::set<EpsilonTable> all(eps.begin(), eps.end()), orbit;
      for (auto& s : all_permutations(eps.front().r)) orbit.insert(sr_action(s, eps.front()));
      t.check(orbit == all, "S_r transitivity for " + str(x));
      for (auto& m : richardson_levis(x)) {
        long nq = normalizer_quotient_size(x, m);
        for (long s : r_fiber_sizes(x, m)) t.check(s == nq, "fiber size for " + str(x));
        t.check(r_fibers_are_torsors(x, m), "torsor for " + str(x));
      }
    });
  }
  t.note(std::to_string(orbits) + " nilpotent orbits, n <= " + std::to_string(nmax));
  return t.finish();
}

CriterionResult check_iwasawa(SuiteLevel level) {
  Tally t(3, "Iwasawa H_P invariance and equivariance", full(level) ? 30.0 : 0.0);
  const int trials = full(level) ? 600 : 60;
  std::mt19937_64 rng(3);
  const long primes[] = {2, 3, 5};
  for (int i = 0; i < trials; ++i) {
    long p = primes[i % 3];
    int n = 1 + (i / 3) % 4;
    auto ps = all_parabolics(n);
    Parabolic par = ps[rng() % ps.size()];
    t.guard("instance", [&] {
      MatQ g = random_GL(n, p, rng);
      VecQ h = iwasawa_HP(g, par, p);
      Iwasawa dec = iwasawa_decompose(g, par, p);
      bool ok = dec.p_part * dec.k_part == g && in_lie_algebra(dec.p_part, par) &&
                in_K(dec.k_part, p) && levi_H(dec.p_part, par, p) == h;
      ok = ok && iwasawa_HP(g * random_K(n, p, rng), par, p) == h;
      MatQ m = random_levi_element(par, p, rng);
      ok = ok && iwasawa_HP(m * g, par, p) == levi_H(m, par, p) + h;
      t.check(ok, "n=" + std::to_string(n) + " p=" + std::to_string(p));
    });
  }
  t.note(std::to_string(trials) + " random (g, P, p) with p in {2,3,5}, n <= 4");
  return t.finish();
}

CriterionResult check_orthogonality(SuiteLevel level) {
  Tally t(4, "orthogonality of -R_P and weight invariance", 0.0);
  const int reps = full(level) ? 8 : 1;
  std::mt19937_64 rng(17);
  long pairs = 0;
  for (long p : {2L, 3L}) {
    auto orbits = nilpotent_orbits(2, 4, p, true);
    orbits.push_back(make_orbit(p, {{T(), {2}}, {Poly::linear(1), {1}}}));
    orbits.push_back(make_orbit(p, {{T(), {2, 1}}, {Poly::linear(2), {1}}}));
    orbits.push_back(make_orbit(p, {{T(), {1}}, {Poly::linear(1), {1}}, {Poly::linear(3), {1}}}));
    orbits.push_back(make_orbit(p, {{Poly({Rat(1), Rat(0), Rat(1)}), {1}}, {T(), {2}}}));
    for (auto& x : orbits) {
      MatQ xr = standard_representative(x);
      for (auto& m : richardson_levis(x))
        for (int r = 0; r < reps; ++r)
          t.guard(str(x), [&] {
            MatQ g = random_GL(x.n, p, rng);
            WeightQuery q{x, m, g};
            WeightQuery ql{x, m, random_centralizer(xr, p, rng) * g};
            WeightQuery qr{x, m, g * random_K(x.n, p, rng)};
            ExpPolyFamily f = v_family(q), fl = v_family(ql), fr = v_family(qr);
            bool ok = is_orthogonal_family(f) && adjacency_holds(f);
            Levi mc = canonical_levi(m);
            Parabolic whole = whole_group(x.n);
            ok = ok && weight_vLXQ(ql, mc, whole) == weight_vLXQ(q, mc, whole);
            for (auto& l : enumerate_L(mc))
              for (auto& big : enumerate_F(l)) {
                Surd v = cM_limit(f, l, big);
                ok = ok && cM_limit(fl, l, big) == v && cM_limit(fr, l, big) == v;
                ++pairs;
              }
            t.check(ok, str(x));
          });
    }
  }
  t.note("nilpotent and mixed orbits n <= 4, " + std::to_string(pairs) + " (L, Q) weights compared");
  return t.finish();
}

CriterionResult check_adjacent(SuiteLevel level) {
  Tally t(5, "adjacent-parabolic identity", 0.0);
  std::mt19937_64 rng(12);
  const int gs = full(level) ? 5 : 2;
  for (long p : {2L, 3L}) {
    for (auto& x : nilpotent_orbits(2, 3, p, true))
      for (auto& m : richardson_levis(x)) {
        Levi mc = canonical_levi(m);
        for (int trial = 0; trial < gs; ++trial) {
          MatQ g = trial == 0 ? MatQ::Identity(x.n, x.n) : random_GL(x.n, p, rng);
          WeightQuery q{x, m, g};
          for (auto& p1 : enumerate_P(mc))
            for (size_t k = 0; k + 1 < p1.size(); ++k)
              t.guard(str(x), [&] {
                Parabolic p2 = p1;
                std::swap(p2[k], p2[k + 1]);
                t.check(adjacent_difference(q, p1, p2).holds, "exhaustive " + str(x));
              });
        }
      }
    auto four = nilpotent_orbits(4, 4, p, true);
    const int trials = full(level) ? 40 : 6;
    for (int i = 0; i < trials; ++i) {
      auto& x = four[i % four.size()];
      auto ms = richardson_levis(x);
      Levi mc = canonical_levi(ms[rng() % ms.size()]);
      auto ps = enumerate_P(mc);
      Parabolic p1 = ps[rng() % ps.size()];
      if (p1.size() < 2) continue;
      size_t k = rng() % (p1.size() - 1);
      Parabolic p2 = p1;
      std::swap(p2[k], p2[k + 1]);
      t.guard(str(x), [&] {
        WeightQuery q{x, mc, random_GL(4, p, rng)};
        t.check(adjacent_difference(q, p1, p2).holds, "random n=4 " + str(x));
      });
    }
  }
  t.note("exhaustive nilpotent n <= 3 over all adjacent pairs, random n = 4, p in {2,3}");
  return t.finish();
}

CriterionResult check_comparison(SuiteLevel level) {
  Tally t(6, "weight comparison and r-family descent", 0.0);
  std::mt19937_64 rng(31);
  const int reps = full(level) ? 3 : 1;
  long cmp = 0, desc = 0;
  for (long p : {2L, 3L}) {
    for (auto& x : nilpotent_orbits(2, 3, p, true))
      for (auto& m : richardson_levis(x))
        for (auto& pb : enumerate_P(canonical_levi(m)))
          for (int r = 0; r < reps; ++r)
            t.guard(str(x), [&] {
              MatQ v = random_nilradical_element(pb, p, rng);
              auto rep = weight_compare(x, m, pb, v, random_K(x.n, p, rng), kDepth);
              t.check(rep.holds, "comparison " + str(x));
              ++cmp;
            });
    // Nilpotent orbits on every Levi of GL_3.
    for (auto& m : all_levis(3)) {
      if (m.size() < 2) continue;
      for (auto& o : nilpotent_tuples(m, p))
        t.guard("descent", [&] {
          LeviOrbit lo = make_levi_orbit(m, o);
          auto a = regular_point(lo, 4, 3);
          std::vector<Rat> aa;
          for (auto& v : a) aa.push_back(v * p);
          t.check(r_descent_equal(lo, aa).holds, "descent nilpotent");
          ++desc;
        });
    }
    // Random mixed GL_3 orbits, one polynomial per block.
    Poly ell2({Rat(1), Rat(0), Rat(1)});  // T^2 + 1, irreducible over Q_2 and Q_3
    const int trials = full(level) ? 24 : 4;
    for (int i = 0; i < trials; ++i) {
      std::vector<Levi> levis;
      for (auto& l : all_levis(3))
        if (l.size() >= 2) levis.push_back(l);
      Levi m = levis[rng() % levis.size()];
      std::vector<OrbitDatum> o;
      for (auto& b : m) {
        long a = static_cast<long>(rng() % 4);
        if (b.size() == 1) {
          o.push_back(single(p, Poly::linear(a), {1}));
        } else {
          switch (rng() % 4) {
            case 0: o.push_back(single(p, ell2, {1})); break;
            case 1: o.push_back(single(p, Poly::linear(a), {2})); break;
            case 2: o.push_back(single(p, Poly::linear(a), {1, 1})); break;
            default: o.push_back(nilpotent_orbit(p, {2})); break;
          }
        }
      }
      t.guard("descent mixed", [&] {
        LeviOrbit lo = make_levi_orbit(m, o);
        auto a = regular_point(lo, 4, 5 + i);
        std::vector<Rat> aa;
        for (auto& v : a) aa.push_back(v * rat_pow(p, 1 + i % 3));
        t.check(r_descent_equal(lo, aa).holds, "descent mixed");
        ++desc;
      });
    }
  }
  t.note(std::to_string(cmp) + " comparisons over all P_box for nilpotent n <= 3, " +
         std::to_string(desc) + " descent instances (nilpotent and mixed GL3)");
  return t.finish();
}

CriterionResult check_rho(SuiteLevel level) {
  Tally t(7, "rho values and slope stabilization", 0.0);
  (void)level;
  long ones = 0, zeros = 0;
  for (long p : {2L, 3L}) {
    for (int n : {2, 3}) {
      std::vector<OrbitDatum> z;
      for (int i = 0; i < n; ++i) z.push_back(zero_orbit(p, 1));
      LeviOrbit o = make_levi_orbit(torus_levi(n), z);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (a != b)
            t.guard("rho zero orbit", [&] {
              RhoResult r = rho(o, a, b);
              t.check(r.rho == 1 && r.stable_from <= 3, "rho(alpha, 0) on GL" + std::to_string(n));
              ++ones;
            });
    }
    Poly q({Rat(1), Rat(0), Rat(1)}), c({Rat(1), Rat(1), Rat(1)});
    auto lin = [p](long a) { return single(p, Poly::linear(a), {1}); };
    std::vector<LeviOrbit> regular = {
        make_levi_orbit(torus_levi(2), {lin(0), lin(1)}),
        make_levi_orbit(torus_levi(3), {lin(0), lin(1), lin(3)}),
        make_levi_orbit(standard_levi({2, 1}), {single(p, q, {1}), lin(0)}),
        make_levi_orbit(standard_levi({2, 2}), {single(p, q, {1}), single(p, c, {1})}),
        make_levi_orbit(standard_levi({2, 1}), {single(p, Poly::linear(1), {2}), lin(0)})};
    for (auto& o : regular)
      t.guard("rho regular locus", [&] {
        RegLocusQuery rq{o.m, o.orbits, std::vector<Rat>(o.m.size(), Rat(0))};
        t.check(regular_locus_test(rq), "resultant nonzero at A = 0");
        const int r = static_cast<int>(o.m.size());
        for (int a = 0; a < r; ++a)
          for (int b = 0; b < r; ++b)
            if (a != b) {
              RhoResult res = rho(o, a, b);
              t.check(res.rho == 0 && res.stable_from <= 3, "rho = 0 on the regular locus");
              ++zeros;
            }
      });
  }
  t.note(std::to_string(ones) + " roots with rho = 1, " + std::to_string(zeros) +
         " with rho = 0, stabilization by depth 3 required");
  return t.finish();
}

CriterionResult check_gl2_numerics(SuiteLevel level) {
  Tally t(8, "GL2 limit and homogeneity numerics", 0.0);
  const int coarse = full(level) ? 12 : 8, fine = full(level) ? 16 : 10;
  double worst_limit = 0, worst_homog = 0;
  for (long p : {2L, 3L}) {
    NormalizationContext ctx(p);
    std::vector<std::pair<Rat, Rat>> ys = {{0, 0}, {1, 1}, {1, 1 + p}};
    auto t0 = std::chrono::steady_clock::now();
    for (auto [y1, y2] : ys)
      t.guard("limit", [&] {
        auto a = arthur_limit_check(y1, y2, TruncationSpec{coarse}, ctx);
        auto b = arthur_limit_check(y1, y2, TruncationSpec{fine}, ctx);
        t.check(a.holds && b.holds, "limit check at p=" + std::to_string(p));
        double tc = numeric(a.direct.tail, ctx), tf = numeric(b.direct.tail, ctx);
        double moved = std::fabs(numeric(b.direct.value - a.direct.value, ctx));
        t.check((tc == 0 ? tf == 0 : tf < tc) && moved <= tc * (1 + 1e-9) + 1e-15,
                "limit tightening at p=" + std::to_string(p));
      });
    double dl = elapsed_since(t0);
    worst_limit = std::max(worst_limit, dl);
    t.check(dl < 60, "limit checks over 60 s");
    t0 = std::chrono::steady_clock::now();
    for (Rat tt : {Rat(1), Rat(p), Rat(p * p)})
      t.guard("homogeneity", [&] {
        auto a = homogeneity_check(tt, TruncationSpec{coarse}, ctx);
        auto b = homogeneity_check(tt, TruncationSpec{fine}, ctx);
        t.check(a.holds && b.holds, "homogeneity at p=" + std::to_string(p));
        double tc = numeric(a.lhs.tail, ctx), tf = numeric(b.lhs.tail, ctx);
        double moved = std::fabs(numeric(b.lhs.value - a.lhs.value, ctx));
        t.check(tf < tc && moved <= tc * (1 + 1e-9), "homogeneity tightening");
      });
    for (bool w : {false, true}) t.check(depth_stability(Gl2Orbit::scalar(0), w, coarse, fine, ctx).holds, "stability");
    double dh = elapsed_since(t0);
    worst_homog = std::max(worst_homog, dh);
    t.check(dh < 60, "homogeneity checks over 60 s");
  }
  t.note("depth " + std::to_string(coarse) + " then " + std::to_string(fine) +
         ", p in {2,3}, gap <= tail bound (1e-9 relative slack); slowest limit batch " +
         fmt(worst_limit) + " s, homogeneity batch " + fmt(worst_homog) + " s");
  return t.finish();
}

CriterionResult check_families(SuiteLevel level) {
  Tally t(9, "(G,M)-family product, descent and splitting", 0.0);
  const std::uint64_t before = cm_limit_calls();
  const int trials = full(level) ? 120 : 20;
  std::mt19937_64 rng(77);
  for (int i = 0; i < trials; ++i) {
    int n = 2 + i % 3;
    std::vector<Levi> levis;
    for (auto& m : all_levis(n))
      if (m.size() >= 2) levis.push_back(m);
    Levi m = levis[rng() % levis.size()];
    t.guard("family", [&] {
      ExpPolyFamily c = random_family(m, rng, 2), d = random_family(m, rng, 1);
      t.check(product_identity(c, d).holds, "product");
      t.check(product_identity_prime(c, d).holds, "product prime");
      auto ls = enumerate_L(m);
      t.check(descent_identity(c, ls[rng() % ls.size()]).holds, "descent");
      if (n <= 3) {
        ExpPolyFamily e = random_family(m, rng, 1);
        t.check(splitting_identity({c, d, e}).holds, "splitting");
      } else {
        ExpPolyFamily o = random_orthogonal_family(m, rng);
        t.check(splitting_identity({c, o}).holds, "splitting");
      }
    });
  }
  t.note(std::to_string(trials) + " random families, n <= 4; " +
         std::to_string(cm_limit_calls() - before) +
         " cM_limit calls, each checked for lambda-independence");
  return t.finish();
}

std::vector<CriterionResult> run_suite(SuiteLevel level) {
  return {check_induction(level),   check_richardson(level),  check_iwasawa(level),
          check_orthogonality(level), check_adjacent(level),  check_comparison(level),
          check_rho(level),         check_gl2_numerics(level), check_families(level)};
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << r.id << " " << (r.passed() ? "PASS" : "FAIL") << " " << r.name
     << " | checks=" << r.instances << " failures=" << r.failures << " time=" << fmt(r.seconds)
     << "s";
  if (r.limit_seconds > 0) os << " (limit " << fmt(r.limit_seconds) << "s)";
  if (!r.detail.empty()) os << " | " << r.detail;
  return os.str();
}

}  // namespace wopkit
