#include "wopkit/gmfam.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>

namespace wopkit {

// l-polynomials

std::string to_string_ell(const LPoly& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = f.degree(); k >= 0; --k) {
    Rat a = f.coeff(k);
    if (a == 0) continue;
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << "-";
    Rat b = a < 0 ? Rat(-a) : a;
    if (k == 0) os << to_string(b);
    else {
      if (b != 1) os << to_string(b) << "*";
      os << "l";
      if (k > 1) os << "^" << k;
    }
    first = false;
  }
  return os.str();
}

double eval_ell(const LPoly& f, double ell) {
  double s = 0;
  for (int k = f.degree(); k >= 0; --k) s = s * ell + f.coeff(k).convert_to<double>();
  return s;
}

// Surds

namespace {

// m = s^2 k with k squarefree.
std::pair<Int, Int> split_square(Int m) {
  Int s = 1, k = 1;
  for (Int d = 2; d * d <= m; ++d) {
    while (m % (d * d) == 0) {
      m /= d * d;
      s *= d;
    }
    if (m % d == 0) {
      m /= d;
      k *= d;
    }
  }
  return {s, k * m};
}

}  // namespace

Surd::Surd(const Rat& r) {
  if (r != 0) t_[Int(1)] = Poly::constant(r);
}

Surd::Surd(const LPoly& f) {
  if (!f.is_zero()) t_[Int(1)] = f;
}

Surd Surd::sqrt_of(const Rat& r) {
  if (r < 0) throw std::invalid_argument("square root of a negative rational");
  Surd out;
  if (r == 0) return out;
  Int num = numerator(r), den = denominator(r);
  auto [s, k] = split_square(num * den);
  out.t_[k] = Poly::constant(Rat(s) / Rat(den));
  return out;
}

void Surd::add_term(const Int& r, const LPoly& c) {
  LPoly v = t_.count(r) ? t_[r] + c : c;
  if (v.is_zero()) t_.erase(r);
  else t_[r] = v;
}

bool Surd::is_poly() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first == 1); }

LPoly Surd::as_poly() const {
  if (!is_poly()) throw std::invalid_argument("value is irrational: " + to_string(*this));
  return t_.empty() ? LPoly() : t_.begin()->second;
}

double Surd::eval(double ell) const {
  double s = 0;
  for (auto& [r, c] : t_) s += eval_ell(c, ell) * std::sqrt(r.convert_to<double>());
  return s;
}

Surd operator+(const Surd& a, const Surd& b) {
  Surd out = a;
  for (auto& [r, c] : b.t_) out.add_term(r, c);
  return out;
}

Surd operator-(const Surd& a, const Surd& b) {
  Surd out = a;
  for (auto& [r, c] : b.t_) out.add_term(r, -c);
  return out;
}

Surd operator*(const Surd& a, const Surd& b) {
  Surd out;
  for (auto& [r1, c1] : a.t_)
    for (auto& [r2, c2] : b.t_) {
      Int g = gcd(r1, r2);
      out.add_term((r1 / g) * (r2 / g), Rat(g) * (c1 * c2));
    }
  return out;
}

std::string to_string(const Surd& s) {
  if (s.is_zero()) return "0";
  std::string out;
  for (auto& [r, c] : s.terms()) {
    if (!out.empty()) out += " + ";
    if (r == 1) out += to_string_ell(c);
    else out += "sqrt(" + r.str() + ")*(" + to_string_ell(c) + ")";
  }
  return out;
}

// Root data

Rat dot(const VecQ& a, const VecQ& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rat s = 0;
  for (int i = 0; i < a.size(); ++i) s += a(i) * b(i);
  return s;
}

VecQ block_indicator(const Levi& l, int a, int n) {
  VecQ v = VecQ::Zero(n);
  for (int i : l.at(a)) v(i) = 1;
  return v;
}

VecQ coroot(const Levi& l, int a, int b) {
  const int n = levi_rank(l);
  return block_indicator(l, a, n) / Rat(static_cast<long>(l.at(a).size())) -
         block_indicator(l, b, n) / Rat(static_cast<long>(l.at(b).size()));
}

bool in_a(const VecQ& v, const Levi& l) {
  for (auto& b : l)
    for (int i : b)
      if (v(i) != v(b.front())) return false;
  return true;
}

VecQ project_to_a(const VecQ& v, const Levi& l) {
  VecQ out(v.size());
  for (auto& b : l) {
    Rat s = 0;
    for (int i : b) s += v(i);
    s /= Rat(static_cast<long>(b.size()));
    for (int i : b) out(i) = s;
  }
  return out;
}

std::vector<VecQ> simple_coroots(const Parabolic& r, const Parabolic& q) {
  auto bq = block_index(q);
  std::vector<VecQ> out;
  for (size_t k = 0; k + 1 < r.size(); ++k)
    if (bq[r[k].front()] == bq[r[k + 1].front()])
      out.push_back(coroot(r, static_cast<int>(k), static_cast<int>(k + 1)));
  return out;
}

std::vector<VecQ> simple_coweights(const Parabolic& q, const Parabolic& r) {
  const int n = parabolic_rank(q);
  auto br = block_index(r);
  std::vector<VecQ> out;
  size_t k = 0;
  while (k < q.size()) {
    size_t e = k;
    while (e + 1 < q.size() && br[q[e + 1].front()] == br[q[k].front()]) ++e;
    const int m = static_cast<int>(e - k + 1);
    // Unknown x_t on the t-th q-block of this r-block: x_t - x_{t+1} = delta, sum n_t x_t = 0.
    for (int i = 0; i + 1 < m; ++i) {
      MatQ a = MatQ::Zero(m, m), rhs = MatQ::Zero(m, 1);
      for (int t = 0; t + 1 < m; ++t) {
        a(t, t) = 1;
        a(t, t + 1) = -1;
      }
      for (int t = 0; t < m; ++t) a(m - 1, t) = Rat(static_cast<long>(q[k + t].size()));
      rhs(i, 0) = 1;
      MatQ x = exact_solve<Rat>(a, rhs);
      VecQ v = VecQ::Zero(n);
      for (int t = 0; t < m; ++t)
        for (int c : q[k + t]) v(c) = x(t, 0);
      out.push_back(v);
    }
    k = e + 1;
  }
  return out;
}

Surd lattice_volume(const std::vector<VecQ>& basis) {
  const int d = static_cast<int>(basis.size());
  if (d == 0) return Surd(Rat(1));
  MatQ g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = dot(basis[i], basis[j]);
  return Surd::sqrt_of(exact_det<Rat>(g));
}

Surd theta_eval(const Parabolic& p, const VecQ& lambda) {
  auto cor = simple_coroots(p, whole_group(parabolic_rank(p)));
  Rat prod = 1, g = 1;
  for (auto& a : cor) prod *= dot(lambda, a);
  if (!cor.empty()) {
    MatQ gm(cor.size(), cor.size());
    for (size_t i = 0; i < cor.size(); ++i)
      for (size_t j = 0; j < cor.size(); ++j) gm(i, j) = dot(cor[i], cor[j]);
    g = exact_det<Rat>(gm);
  }
  return Surd(prod) * Surd::sqrt_of(Rat(1) / g);
}

// Families

namespace {

using Key = std::vector<Rat>;

Key key_of(const VecQ& v) { return Key(v.data(), v.data() + v.size()); }

VecQ vec_of(const Key& k) {
  VecQ v(k.size());
  for (size_t i = 0; i < k.size(); ++i) v(i) = k[i];
  return v;
}

std::map<Key, LPoly> aggregate(const std::vector<ExpTerm>& terms) {
  std::map<Key, LPoly> out;
  for (auto& t : terms) {
    Key k = key_of(t.y);
    LPoly v = out.count(k) ? out[k] + t.coeff : t.coeff;
    if (v.is_zero()) out.erase(k);
    else out[k] = v;
  }
  return out;
}

std::vector<ExpTerm> combine(const std::vector<ExpTerm>& terms) {
  std::vector<ExpTerm> out;
  for (auto& [k, c] : aggregate(terms)) out.push_back({c, vec_of(k)});
  return out;
}

Rat rat_power(const Rat& x, int k) {
  Rat r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Rat factorial(int k) {
  Rat r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

Rat random_rat(std::mt19937_64& rng, int range) {
  std::uniform_int_distribution<int> d(-range, range);
  return Rat(d(rng));
}

// Index of each block of `small` inside the blocks of `big`.
std::vector<int> containing_block(const Levi& small, const std::vector<std::vector<int>>& big) {
  auto bi = block_index(big);
  std::vector<int> out;
  for (auto& b : small) {
    int owner = bi.at(b.front());
    for (int i : b)
      if (bi.at(i) != owner) throw std::invalid_argument("Levi block is not contained in a block");
    out.push_back(owner);
  }
  return out;
}

// Element of P(M) refining the ordered blocks r (M blocks in canonical order inside each).
Parabolic refine(const Levi& m, const Parabolic& r) {
  auto own = containing_block(m, r);
  Parabolic p;
  for (size_t k = 0; k < r.size(); ++k)
    for (size_t b = 0; b < m.size(); ++b)
      if (own[b] == static_cast<int>(k)) p.push_back(m[b]);
  return p;
}

void check_family_shape(const ExpPolyFamily& f) {
  if (canonical_levi(f.m) != f.m) throw std::invalid_argument("family Levi is not canonical");
  auto ps = enumerate_P(f.m);
  if (f.c.size() != ps.size()) throw std::invalid_argument("family must have one entry per P in P(M)");
  for (auto& p : ps) {
    auto it = f.c.find(p);
    if (it == f.c.end()) throw std::invalid_argument("family is missing a parabolic");
    for (auto& t : it->second)
      if (t.y.size() != f.n || !in_a(t.y, f.m))
        throw std::invalid_argument("family exponent is not in a_M");
  }
}

}  // namespace

ExpPolyFamily constant_family(const Levi& m0, const LPoly& value) {
  ExpPolyFamily f;
  f.m = canonical_levi(m0);
  f.n = levi_rank(f.m);
  for (auto& p : enumerate_P(f.m)) {
    f.c[p] = {};
    if (!value.is_zero()) f.c[p].push_back({value, VecQ::Zero(f.n)});
  }
  return f;
}

ExpPolyFamily orthogonal_family(const Levi& m0, const std::map<Parabolic, VecQ>& y) {
  ExpPolyFamily f;
  f.m = canonical_levi(m0);
  f.n = levi_rank(f.m);
  for (auto& p : enumerate_P(f.m)) f.c[p] = {{Poly::constant(1), y.at(p)}};
  return f;
}

ExpPolyFamily family_product(const ExpPolyFamily& a, const ExpPolyFamily& b) {
  if (a.m != b.m) throw std::invalid_argument("families over different Levis");
  ExpPolyFamily f{a.m, a.n, {}};
  for (auto& [p, ta] : a.c) {
    std::vector<ExpTerm> terms;
    for (auto& s : ta)
      for (auto& t : b.c.at(p)) terms.push_back({s.coeff * t.coeff, VecQ(s.y + t.y)});
    f.c[p] = combine(terms);
  }
  return f;
}

ExpPolyFamily family_sum(const ExpPolyFamily& a, const ExpPolyFamily& b) {
  if (a.m != b.m) throw std::invalid_argument("families over different Levis");
  ExpPolyFamily f{a.m, a.n, {}};
  for (auto& [p, ta] : a.c) {
    std::vector<ExpTerm> terms = ta;
    for (auto& t : b.c.at(p)) terms.push_back(t);
    f.c[p] = combine(terms);
  }
  return f;
}

ExpPolyFamily conjugate_family(const Permutation& w, const ExpPolyFamily& f) {
  ExpPolyFamily g{conj_levi(w, f.m), f.n, {}};
  for (auto& [p, terms] : f.c) {
    std::vector<ExpTerm> moved;
    for (auto& t : terms) {
      VecQ y(f.n);
      for (int i = 0; i < f.n; ++i) y(w[i]) = t.y(i);
      moved.push_back({t.coeff, y});
    }
    Parabolic wp;
    for (auto& b : p) {
      std::vector<int> nb;
      for (int i : b) nb.push_back(w[i]);
      std::sort(nb.begin(), nb.end());
      wp.push_back(nb);
    }
    g.c[wp] = combine(moved);
  }
  return g;
}

bool adjacency_holds(const ExpPolyFamily& f) {
  for (auto& [p, terms] : f.c)
    for (size_t k = 0; k + 1 < p.size(); ++k) {
      Parabolic q = p;
      std::swap(q[k], q[k + 1]);
      VecQ a = coroot(p, static_cast<int>(k), static_cast<int>(k + 1));
      Rat aa = dot(a, a);
      auto wall = [&](const std::vector<ExpTerm>& ts) {
        std::vector<ExpTerm> out;
        for (auto& t : ts) out.push_back({t.coeff, VecQ(t.y - a * (dot(t.y, a) / aa))});
        return aggregate(out);
      };
      if (wall(terms) != wall(f.c.at(q))) return false;
    }
  return true;
}

void validate_family(const ExpPolyFamily& f) {
  check_family_shape(f);
  if (!adjacency_holds(f))
    throw std::invalid_argument("not a (G,M)-family: adjacent chambers disagree on their wall");
}

ExpPolyFamily random_orthogonal_family(const Levi& m0, std::mt19937_64& rng, int range) {
  Levi m = canonical_levi(m0);
  const int n = levi_rank(m), nb = static_cast<int>(m.size());
  VecQ z = VecQ::Zero(n);
  for (int a = 0; a < nb; ++a) z += block_indicator(m, a, n) * random_rat(rng, range);
  std::vector<std::vector<Rat>> r(nb, std::vector<Rat>(nb));
  for (auto& row : r)
    for (auto& x : row) x = random_rat(rng, range);
  // Weyl orbit of a generic point: Y_{wB} = w T, projected to a_M from any Borel inside P.
  std::vector<Rat> pt(n);
  for (auto& x : pt) x = random_rat(rng, 4 * range);
  std::map<Parabolic, VecQ> y;
  for (auto& p : enumerate_P(m)) {
    VecQ orbit_pt(n);
    int pos = 0;
    for (auto& b : p)
      for (int i : b) orbit_pt(i) = pt[pos++];
    // Block positions of P among the blocks of m.
    std::vector<int> idx;
    for (auto& b : p) idx.push_back(static_cast<int>(std::find(m.begin(), m.end(), b) - m.begin()));
    VecQ v = z + project_to_a(orbit_pt, m);
    for (size_t s = 0; s < idx.size(); ++s)
      for (size_t t = s + 1; t < idx.size(); ++t) v += coroot(m, idx[s], idx[t]) * r[idx[s]][idx[t]];
    y[p] = v;
  }
  return orthogonal_family(m, y);
}

ExpPolyFamily random_family(const Levi& m, std::mt19937_64& rng, int terms) {
  ExpPolyFamily f = constant_family(m, LPoly());
  for (int t = 0; t < terms; ++t) {
    LPoly c({random_rat(rng, 3), random_rat(rng, 2)});
    if (c.is_zero()) c = Poly::constant(1);
    ExpPolyFamily g = family_product(constant_family(m, c), random_orthogonal_family(m, rng));
    f = family_sum(f, g);
  }
  return f;
}

// Limits

namespace {

std::mt19937_64& lambda_rng() {
  static thread_local std::mt19937_64 rng(20240611);
  return rng;
}

// Generic lambda in a_L^{M_Q}: constant on L-blocks, zero sum on each Q-block, distinct values
// on distinct L-blocks of a Q-block.
VecQ generic_lambda(const Levi& l, const Parabolic& q) {
  const int n = levi_rank(l);
  auto own = containing_block(l, q);
  auto& rng = lambda_rng();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    VecQ v = VecQ::Zero(n);
    for (size_t a = 0; a < l.size(); ++a)
      v += block_indicator(l, static_cast<int>(a), n) * random_rat(rng, 1000);
    v -= project_to_a(v, levi_of(q));
    bool ok = true;
    for (size_t a = 0; a < l.size() && ok; ++a)
      for (size_t b = a + 1; b < l.size() && ok; ++b)
        if (own[a] == own[b] && v(l[a].front()) == v(l[b].front())) ok = false;
    if (ok) return v;
  }
  throw std::runtime_error("no generic point found");
}

void perms_rec(const std::vector<std::vector<int>>& groups, size_t g, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (g == groups.size()) {
    out.push_back(cur);
    return;
  }
  auto grp = groups[g];
  std::sort(grp.begin(), grp.end());
  do {
    cur.insert(cur.end(), grp.begin(), grp.end());
    perms_rec(groups, g + 1, cur, out);
    cur.resize(cur.size() - grp.size());
  } while (std::next_permutation(grp.begin(), grp.end()));
}

// Rational part of the limit formula at one lambda; caller multiplies by vol / p!.
LPoly limit_sum(const ExpPolyFamily& f, const Levi& l, const Parabolic& q,
                const std::vector<Parabolic>& rs, const VecQ& lambda, int p) {
  LPoly acc;
  for (auto& r : rs) {
    Rat den = 1;
    for (auto& a : simple_coroots(r, q)) den *= dot(lambda, a);
    const auto& terms = f.c.at(refine(f.m, r));
    for (auto& t : terms) acc = acc + (rat_power(dot(lambda, t.y), p) / den) * t.coeff;
  }
  (void)l;
  return acc * Poly::monomial(1, p);
}

}  // namespace

namespace {
std::atomic<std::uint64_t> g_cm_calls{0};
}  // namespace

std::uint64_t cm_limit_calls() { return g_cm_calls.load(); }

Surd cM_limit(const ExpPolyFamily& f, const Levi& l0, const Parabolic& q) {
  ++g_cm_calls;
  check_family_shape(f);
  Levi l = canonical_levi(l0);
  if (!levi_contains(l, f.m)) throw std::invalid_argument("L does not contain M");
  if (parabolic_rank(q) != f.n) throw std::invalid_argument("parabolic has wrong rank");
  auto own = containing_block(l, q);
  std::vector<std::vector<int>> groups(q.size());
  for (size_t a = 0; a < l.size(); ++a) groups[own[a]].push_back(static_cast<int>(a));
  std::vector<std::vector<int>> orders;
  std::vector<int> cur;
  perms_rec(groups, 0, cur, orders);
  std::vector<Parabolic> rs;
  for (auto& o : orders) {
    Parabolic r;
    for (int a : o) r.push_back(l[a]);
    rs.push_back(r);
  }
  const int p = static_cast<int>(l.size() - q.size());
  VecQ l1 = generic_lambda(l, q), l2 = generic_lambda(l, q);
  LPoly v1 = limit_sum(f, l, q, rs, l1, p), v2 = limit_sum(f, l, q, rs, l2, p);
  if (v1 != v2) throw std::invalid_argument("limit depends on lambda: input is not a (G,M)-family");
  return lattice_volume(simple_coroots(rs.front(), q)) * Surd(Rat(1) / factorial(p) * v1);
}

Surd cM(const ExpPolyFamily& f) { return cM_limit(f, f.m, whole_group(f.n)); }

namespace {

Rat gram_det(const std::vector<VecQ>& basis) {
  if (basis.empty()) return 1;
  MatQ g(basis.size(), basis.size());
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j) g(i, j) = dot(basis[i], basis[j]);
  return exact_det<Rat>(g);
}


// Parabolics R containing q with Levi a coarsening of M_q (consecutive groupings).
std::vector<Parabolic> parabolics_above(const Parabolic& q) {
  std::vector<Parabolic> out;
  const int gaps = static_cast<int>(q.size()) - 1;
  for (int mask = 0; mask < (1 << std::max(gaps, 0)); ++mask) {
    Parabolic r;
    std::vector<int> blk = q[0];
    for (int k = 0; k < gaps; ++k) {
      if (mask & (1 << k)) blk.insert(blk.end(), q[k + 1].begin(), q[k + 1].end());
      else {
        std::sort(blk.begin(), blk.end());
        r.push_back(blk);
        blk = q[k + 1];
      }
    }
    std::sort(blk.begin(), blk.end());
    r.push_back(blk);
    out.push_back(r);
  }
  return out;
}

// Every coroot and coweight pairing in prime_sum is nonzero.
bool prime_generic(const ExpPolyFamily& f, const Parabolic& q, const VecQ& lambda) {
  for (auto& r : parabolics_above(q)) {
    for (auto& a : simple_coroots(r, whole_group(f.n)))
      if (dot(lambda, a) == 0) return false;
    for (auto& w : simple_coweights(q, r))
      if (dot(lambda, w) == 0) return false;
  }
  return true;
}

VecQ prime_lambda(const ExpPolyFamily& f, const Parabolic& q) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    VecQ l = generic_lambda(levi_of(q), whole_group(f.n));
    if (prime_generic(f, q, l)) return l;
  }
  throw std::runtime_error("no generic point found");
}

Surd prime_sum(const ExpPolyFamily& f, const Parabolic& q, const VecQ& lambda) {
  const int qd = static_cast<int>(q.size()) - 1;
  const Parabolic p = refine(f.m, q);
  Surd acc;
  for (auto& r : parabolics_above(q)) {
    auto cor = simple_coroots(r, whole_group(f.n));
    auto cow = simple_coweights(q, r);
    Rat den = 1;
    for (auto& a : cor) den *= dot(lambda, a);
    for (auto& w : cow) den *= dot(lambda, w);
    VecQ lr = project_to_a(lambda, levi_of(r));
    LPoly num;
    for (auto& t : f.c.at(p)) num = num + rat_power(dot(lr, t.y), qd) * t.coeff;
    Rat sign = ((q.size() - r.size()) % 2) ? -1 : 1;
    acc = acc + lattice_volume(cor) * lattice_volume(cow) *
                    Surd(sign / (den * factorial(qd)) * num * Poly::monomial(1, qd));
  }
  return acc;
}

}  // namespace

Surd cQprime(const ExpPolyFamily& f, const Parabolic& q) {
  check_family_shape(f);
  containing_block(f.m, q);
  VecQ l1 = prime_lambda(f, q), l2 = prime_lambda(f, q);
  Surd v1 = prime_sum(f, q, l1), v2 = prime_sum(f, q, l2);
  if (v1 != v2) throw std::invalid_argument("limit depends on lambda: input is not a (G,M)-family");
  return v1;
}

// Descent data

namespace {

// Basis of a_M^L: coroots between consecutive M-blocks inside each L-block.
std::vector<VecQ> relative_basis(const Levi& m, const Levi& l) {
  auto own = containing_block(m, l);
  std::vector<VecQ> out;
  for (size_t g = 0; g < l.size(); ++g) {
    int prev = -1;
    for (size_t b = 0; b < m.size(); ++b)
      if (own[b] == static_cast<int>(g)) {
        if (prev >= 0) out.push_back(coroot(m, prev, static_cast<int>(b)));
        prev = static_cast<int>(b);
      }
  }
  return out;
}

std::vector<Levi> canonical_all(const std::vector<Levi>& ls) {
  std::vector<Levi> out;
  for (auto& l : ls) out.push_back(canonical_levi(l));
  return out;
}

}  // namespace

Surd dMG(const Levi& m0, const std::vector<Levi>& ls0) {
  Levi m = canonical_levi(m0);
  auto ls = canonical_all(ls0);
  std::vector<VecQ> all;
  Rat prod = 1;
  for (auto& l : ls) {
    if (!levi_contains(l, m)) throw std::invalid_argument("Levi does not contain M");
    auto b = relative_basis(m, l);
    all.insert(all.end(), b.begin(), b.end());
    prod *= gram_det(b);
  }
  if (static_cast<int>(all.size()) != static_cast<int>(m.size()) - 1) return Surd();
  Rat g = gram_det(all);
  if (g == 0) return Surd();
  return Surd::sqrt_of(g / prod);
}

std::vector<Parabolic> section_s(const Levi& m0, const std::vector<Levi>& ls0) {
  Levi m = canonical_levi(m0);
  auto ls = canonical_all(ls0);
  if (dMG(m, ls).is_zero()) throw std::invalid_argument("section undefined: d_M^G vanishes");
  const int n = levi_rank(m);
  const size_t s = ls.size();
  auto zb = relative_basis(m, full_levi(n));
  std::vector<std::vector<VecQ>> hb;
  for (auto& l : ls) hb.push_back(relative_basis(l, full_levi(n)));
  // Fixed generic points xi_v in a_M^G.
  std::mt19937_64 rng(97);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<VecQ> xi;
    for (size_t v = 0; v < s; ++v) {
      VecQ x = VecQ::Zero(n);
      for (auto& b : zb) x += b * random_rat(rng, 1000);
      xi.push_back(x);
    }
    // Unknowns: coefficients of Z, then of each H_v; equations xi_v = Z + H_v.
    int cols = static_cast<int>(zb.size());
    for (auto& h : hb) cols += static_cast<int>(h.size());
    MatQ a = MatQ::Zero(static_cast<int>(s) * n, cols), rhs(static_cast<int>(s) * n, 1);
    int off = static_cast<int>(zb.size());
    for (size_t v = 0; v < s; ++v) {
      for (int i = 0; i < n; ++i) {
        const int row = static_cast<int>(v) * n + i;
        rhs(row, 0) = xi[v](i);
        for (size_t c = 0; c < zb.size(); ++c) a(row, c) = zb[c](i);
        for (size_t c = 0; c < hb[v].size(); ++c) a(row, off + c) = hb[v][c](i);
      }
      off += static_cast<int>(hb[v].size());
    }
    MatQ sol = exact_solve<Rat>(a, rhs);
    std::vector<Parabolic> out;
    bool regular = true;
    off = static_cast<int>(zb.size());
    for (size_t v = 0; v < s && regular; ++v) {
      VecQ h = VecQ::Zero(n);
      for (size_t c = 0; c < hb[v].size(); ++c) h += hb[v][c] * sol(off + c, 0);
      off += static_cast<int>(hb[v].size());
      // Chamber of H_v: blocks ordered by decreasing value.
      Parabolic q = ls[v];
      std::stable_sort(q.begin(), q.end(), [&](const std::vector<int>& x, const std::vector<int>& y) {
        return h(x.front()) > h(y.front());
      });
      for (size_t k = 0; k + 1 < q.size(); ++k)
        if (h(q[k].front()) == h(q[k + 1].front())) regular = false;
      out.push_back(q);
    }
    if (regular) return out;
  }
  throw std::runtime_error("no regular point for the section");
}

DescentData dMG_section(const Levi& m, const std::vector<Levi>& ls) {
  DescentData out;
  out.d = dMG(m, ls);
  if (!out.d.is_zero()) out.s = section_s(m, ls);
  return out;
}

// Identities

namespace {

IdentityReport report(const Surd& lhs, const Surd& rhs) { return {lhs, rhs, lhs == rhs}; }

void tuples_rec(const std::vector<Levi>& levis, size_t s, std::vector<Levi>& cur,
                std::vector<std::vector<Levi>>& out) {
  if (cur.size() == s) {
    out.push_back(cur);
    return;
  }
  for (auto& l : levis) {
    cur.push_back(l);
    tuples_rec(levis, s, cur, out);
    cur.pop_back();
  }
}

}  // namespace

IdentityReport product_identity(const ExpPolyFamily& c, const ExpPolyFamily& d) {
  return splitting_identity({c, d});
}

IdentityReport product_identity_prime(const ExpPolyFamily& c, const ExpPolyFamily& d) {
  Surd lhs = cM(family_product(c, d));
  Surd rhs;
  for (auto& q : enumerate_F(c.m)) rhs = rhs + cM_limit(c, c.m, q) * cQprime(d, q);
  return report(lhs, rhs);
}

IdentityReport descent_identity(const ExpPolyFamily& c, const Levi& l) {
  Surd lhs = cM_limit(c, l, whole_group(c.n));
  Surd rhs;
  for (auto& l2 : enumerate_L(c.m)) {
    auto dd = dMG_section(c.m, {l, l2});
    if (dd.d.is_zero()) continue;
    rhs = rhs + dd.d * cM_limit(c, c.m, dd.s[1]);
  }
  return report(lhs, rhs);
}

IdentityReport splitting_identity(const std::vector<ExpPolyFamily>& fams) {
  if (fams.empty()) throw std::invalid_argument("no families");
  ExpPolyFamily prod = fams[0];
  for (size_t v = 1; v < fams.size(); ++v) prod = family_product(prod, fams[v]);
  Surd lhs = cM(prod);
  const Levi& m = fams[0].m;
  std::vector<std::vector<Levi>> tuples;
  std::vector<Levi> cur;
  tuples_rec(enumerate_L(m), fams.size(), cur, tuples);
  Surd rhs;
  for (auto& t : tuples) {
    auto dd = dMG_section(m, t);
    if (dd.d.is_zero()) continue;
    Surd term = dd.d;
    for (size_t v = 0; v < fams.size(); ++v) term = term * cM_limit(fams[v], m, dd.s[v]);
    rhs = rhs + term;
  }
  return report(lhs, rhs);
}

}  // namespace wopkit
