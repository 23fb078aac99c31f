#include "wopkit/weights.hpp"

#include <algorithm>
#include <set>

namespace wopkit {

namespace {

int dim_of(const MatQ& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("square matrix required");
  return static_cast<int>(g.rows());
}

void require_invertible(const MatQ& g) {
  if (exact_det<Rat>(g) == 0) throw std::invalid_argument("singular matrix");
}

void require_shape(const Parabolic& p, int n) {
  auto idx = block_index(p);
  if (static_cast<int>(idx.size()) != n) throw std::invalid_argument("parabolic does not match size");
  for (int b : idx)
    if (b < 0) throw std::invalid_argument("parabolic does not cover all coordinates");
}

void combinations_rec(int n, int r, int start, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == r) {
    out.push_back(cur);
    return;
  }
  for (int c = start; c <= n - (r - static_cast<int>(cur.size())); ++c) {
    cur.push_back(c);
    combinations_rec(n, r, c + 1, cur, out);
    cur.pop_back();
  }
}

long min_minor_val(const MatQ& g, const std::vector<int>& rows, long prime) {
  const int n = static_cast<int>(g.cols());
  std::vector<std::vector<int>> cols;
  std::vector<int> cur;
  combinations_rec(n, static_cast<int>(rows.size()), 0, cur, cols);
  long best = kInfVal;
  for (auto& c : cols) {
    Rat d = exact_det<Rat>(extract_block(g, rows, c));
    if (d != 0) best = std::min(best, valuation(d, prime));
  }
  if (best == kInfVal) throw std::invalid_argument("singular matrix");
  return best;
}

Rat random_unit_scaled(std::mt19937_64& rng, long prime, int lo, int hi, int spread) {
  std::uniform_int_distribution<int> c(lo, hi), e(-spread, spread);
  return Rat(c(rng)) * rat_pow(prime, spread > 0 ? e(rng) : 0);
}

Levi canonical_checked(const Levi& m) {
  Levi c = canonical_levi(m);
  validate_levi(c, levi_rank(c));
  return c;
}

int block_position(const Levi& m, const std::vector<int>& blk) {
  for (size_t i = 0; i < m.size(); ++i)
    if (m[i] == blk) return static_cast<int>(i);
  throw std::invalid_argument("block is not a block of the Levi");
}

std::vector<int> sorted_block(std::vector<int> b) {
  std::sort(b.begin(), b.end());
  return b;
}

bool is_multiple_of(const VecQ& v, const VecQ& c) {
  int i = -1;
  for (int k = 0; k < c.size(); ++k)
    if (c(k) != 0) {
      i = k;
      break;
    }
  if (i < 0) return v.isZero();
  Rat r = v(i) / c(i);
  for (int k = 0; k < c.size(); ++k)
    if (v(k) != r * c(k)) return false;
  return true;
}

// Position k with q obtained from p by swapping blocks k and k+1; -1 if not adjacent.
int adjacent_position(const Parabolic& p, const Parabolic& q) {
  if (p.size() != q.size()) return -1;
  for (size_t k = 0; k + 1 < p.size(); ++k) {
    Parabolic s = p;
    std::swap(s[k], s[k + 1]);
    if (s == q) return static_cast<int>(k);
  }
  return -1;
}

std::vector<Rat> scaled(const std::vector<Rat>& t, long prime, int k) {
  std::vector<Rat> a;
  Rat f = rat_pow(prime, k);
  for (auto& x : t) a.push_back(f * x);
  return a;
}

VecQ w_exponent(const Levi& m, const RhoTable& rho, const std::vector<Rat>& a, const MatQ& n,
                const Parabolic& p, const Parabolic& p_box, long prime) {
  VecQ y = -iwasawa_HP(n, p, prime);
  auto box = positive_roots(m, p_box);
  std::set<std::pair<int, int>> box_set(box.begin(), box.end());
  for (auto [i, j] : positive_roots(m, p))
    if (box_set.count({j, i}))
      y -= coroot(m, i, j) * (rho.at({i, j}) * Rat(valuation(a[i] - a[j], prime)));
  return y;
}

// First index from which all later entries coincide; requires a window of three.
template <typename T>
int stable_index(const std::vector<T>& xs) {
  int s = static_cast<int>(xs.size()) - 1;
  while (s > 0 && xs[s - 1] == xs.back()) --s;
  if (static_cast<int>(xs.size()) - s < 3) return -1;
  return s;
}

}  // namespace

VecQ iwasawa_HP(const MatQ& g, const Parabolic& p, long prime) {
  require_prime(prime);
  const int n = dim_of(g);
  require_shape(p, n);
  require_invertible(g);
  const int m = static_cast<int>(p.size());
  std::vector<long> v(m + 1, 0);
  std::vector<int> rows;
  for (int j = m - 1; j >= 0; --j) {
    rows.insert(rows.end(), p[j].begin(), p[j].end());
    std::sort(rows.begin(), rows.end());
    v[j] = min_minor_val(g, rows, prime);
  }
  VecQ h(n);
  for (int j = 0; j < m; ++j)
    for (int c : p[j]) h(c) = -Rat(v[j] - v[j + 1]) / Rat(static_cast<long>(p[j].size()));
  return h;
}

Iwasawa iwasawa_decompose(const MatQ& g, const Parabolic& p, long prime) {
  require_prime(prime);
  const int n = dim_of(g);
  require_shape(p, n);
  require_invertible(g);
  MatQ h = g, c = MatQ::Identity(n, n);
  std::vector<bool> free_col(n, true);
  std::vector<int> target(n, -1);  // pivot column -> coordinate
  for (int j = static_cast<int>(p.size()) - 1; j >= 0; --j) {
    std::vector<int> piv;
    for (int r : p[j]) {
      int best = -1;
      long bv = kInfVal;
      for (int col = 0; col < n; ++col) {
        if (!free_col[col] || h(r, col) == 0) continue;
        long v = valuation(h(r, col), prime);
        if (v < bv) {
          bv = v;
          best = col;
        }
      }
      if (best < 0) throw std::invalid_argument("singular matrix");
      for (int col = 0; col < n; ++col) {
        if (!free_col[col] || col == best || h(r, col) == 0) continue;
        Rat f = h(r, col) / h(r, best);
        h.col(col) -= h.col(best) * f;
        c.col(col) -= c.col(best) * f;
      }
      free_col[best] = false;
      piv.push_back(best);
    }
    std::sort(piv.begin(), piv.end());
    auto coords = sorted_block(p[j]);
    for (size_t i = 0; i < piv.size(); ++i) target[piv[i]] = coords[i];
  }
  MatQ hp(n, n), cp(n, n);
  for (int col = 0; col < n; ++col) {
    hp.col(target[col]) = h.col(col);
    cp.col(target[col]) = c.col(col);
  }
  return {hp, exact_inverse<Rat>(cp)};
}

VecQ levi_H(const MatQ& m, const Parabolic& p, long prime) {
  const int n = dim_of(m);
  require_shape(p, n);
  VecQ h(n);
  for (auto& blk : p) {
    auto b = sorted_block(blk);
    Rat d = exact_det<Rat>(extract_block(m, b, b));
    if (d == 0) throw std::invalid_argument("singular Levi component");
    for (int c : b) h(c) = -Rat(valuation(d, prime)) / Rat(static_cast<long>(b.size()));
  }
  return h;
}

MatQ random_K(int n, long prime, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-4, 4);
  for (;;) {
    MatQ k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k(i, j) = Rat(d(rng));
    Rat det = exact_det<Rat>(k);
    if (det != 0 && valuation(det, prime) == 0) return k;
  }
}

MatQ random_GL(int n, long prime, std::mt19937_64& rng, int spread) {
  for (;;) {
    MatQ g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = random_unit_scaled(rng, prime, -3, 3, spread);
    if (exact_det<Rat>(g) != 0) return g;
  }
}

MatQ random_levi_element(const Parabolic& p, long prime, std::mt19937_64& rng, int spread) {
  const int n = parabolic_rank(p);
  MatQ m = MatQ::Zero(n, n);
  for (auto& blk : p) {
    auto b = sorted_block(blk);
    MatQ x = random_GL(static_cast<int>(b.size()), prime, rng, spread);
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) m(b[i], b[j]) = x(i, j);
  }
  return m;
}

MatQ random_centralizer(const MatQ& x, long prime, std::mt19937_64& rng, int spread) {
  const int n = dim_of(x);
  MatQ sys = MatQ::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        sys(i * n + j, k * n + j) += x(i, k);
        sys(i * n + j, i * n + k) -= x(k, j);
      }
  MatQ basis = exact_nullspace<Rat>(sys);
  for (;;) {
    MatQ h = MatQ::Zero(n, n);
    for (int b = 0; b < basis.cols(); ++b) {
      Rat c = random_unit_scaled(rng, prime, -3, 3, spread);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) += c * basis(i * n + j, b);
    }
    if (exact_det<Rat>(h) != 0) return h;
  }
}

void validate_query(const WeightQuery& q) {
  if (dim_of(q.g) != q.x.n) throw std::invalid_argument("g does not match the orbit size");
  require_invertible(q.g);
  Levi m = canonical_levi(q.m_r);
  for (auto& l : richardson_levis(q.x))
    if (canonical_levi(l) == m) return;
  throw std::invalid_argument("Levi is not a Richardson Levi of the orbit");
}

VecQ RP(const WeightQuery& q, const Parabolic& p) {
  Permutation w = w_P(q.x, canonical_levi(q.m_r), p);
  return iwasawa_HP(permutation_matrix(w) * q.g, p, q.x.p);
}

ExpPolyFamily v_family(const WeightQuery& q) {
  validate_query(q);
  Levi m = canonical_levi(q.m_r);
  std::map<Parabolic, VecQ> y;
  for (auto& p : enumerate_P(m)) y[p] = -RP(q, p);
  return orthogonal_family(m, y);
}

bool is_orthogonal_family(const ExpPolyFamily& f) {
  for (auto& [p, terms] : f.c) {
    if (terms.size() != 1) return false;
    for (size_t k = 0; k + 1 < p.size(); ++k) {
      Parabolic q = p;
      std::swap(q[k], q[k + 1]);
      auto it = f.c.find(q);
      if (it == f.c.end() || it->second.size() != 1) return false;
      if (terms[0].coeff != it->second[0].coeff) return false;
      int a = block_position(f.m, p[k]), b = block_position(f.m, p[k + 1]);
      if (!is_multiple_of(terms[0].y - it->second[0].y, coroot(f.m, a, b))) return false;
    }
  }
  return true;
}

Surd weight_vLXQ(const WeightQuery& q, const Levi& l, const Parabolic& big_q) {
  return cM_limit(v_family(q), l, big_q);
}

MatQ n_square(const MatQ& a, const MatQ& y, const MatQ& v, const Parabolic& p_box) {
  const int n = dim_of(a);
  if (dim_of(y) != n || dim_of(v) != n) throw std::invalid_argument("shape mismatch");
  require_shape(p_box, n);
  if (!in_nilradical(v, p_box)) throw std::invalid_argument("V is not in the nilradical");
  auto bi = block_index(p_box);
  std::vector<std::pair<int, int>> pos;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (bi[r] < bi[c]) pos.push_back({r, c});
  MatQ z = a + y;
  const int u = static_cast<int>(pos.size());
  MatQ sys = MatQ::Zero(n * n, u), rhs(n * n, 1);
  // (Z u - u Z - u V)_{ij} = V_{ij}
  for (int t = 0; t < u; ++t) {
    auto [r, c] = pos[t];
    for (int i = 0; i < n; ++i) sys(i * n + c, t) += z(i, r);
    for (int j = 0; j < n; ++j) sys(r * n + j, t) -= z(c, j) + v(c, j);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rhs(i * n + j, 0) = v(i, j);
  MatQ sol;
  try {
    sol = exact_solve<Rat>(sys, rhs);
  } catch (const std::invalid_argument&) {
    throw NotRegular("A + Y is not regular for the orbit");
  }
  MatQ nn = MatQ::Identity(n, n);
  for (int t = 0; t < u; ++t) nn(pos[t].first, pos[t].second) = sol(t, 0);
  return nn;
}

LeviOrbit make_levi_orbit(const Levi& m, std::vector<OrbitDatum> orbits) {
  if (m.size() != orbits.size()) throw std::invalid_argument("one orbit per Levi block required");
  std::vector<std::pair<std::vector<int>, OrbitDatum>> pairs;
  for (size_t i = 0; i < m.size(); ++i) {
    if (orbits[i].n != static_cast<int>(m[i].size()))
      throw std::invalid_argument("orbit size does not match its block");
    if (orbits[i].p != orbits[0].p) throw std::invalid_argument("orbits over different primes");
    pairs.push_back({sorted_block(m[i]), orbits[i]});
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  LeviOrbit o;
  for (auto& [b, d] : pairs) {
    o.m.push_back(b);
    o.orbits.push_back(d);
  }
  validate_levi(o.m, levi_rank(o.m));
  return o;
}

MatQ levi_representative(const LeviOrbit& o) {
  std::vector<MatQ> blocks;
  for (auto& d : o.orbits) blocks.push_back(standard_representative(d));
  return assemble(o.m, blocks);
}

MatQ scalar_matrix(const Levi& m, const std::vector<Rat>& a) { return scalar_levi_element(m, a); }

std::vector<Rat> regular_point(const LeviOrbit& o, int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int r = static_cast<int>(o.m.size());
  std::uniform_int_distribution<int> d(-3 * r - 3, 3 * r + 3);
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<Rat> t;
    std::set<int> seen;
    while (static_cast<int>(t.size()) < r) {
      int x = d(rng);
      if (seen.insert(x).second) t.push_back(Rat(x));
    }
    bool ok = true;
    for (int k = 1; k <= depth && ok; ++k)
      ok = regular_locus_test({o.m, o.orbits, scaled(t, o.prime(), k)});
    if (ok) return t;
  }
  throw NotRegular("no regular direction found");
}

VecQ block_coroot(const Levi& m, int a, int b) { return coroot(m, a, b); }

std::vector<std::pair<int, int>> positive_roots(const Levi& m, const Parabolic& p) {
  std::vector<int> idx;
  for (auto& blk : p) idx.push_back(block_position(m, sorted_block(blk)));
  if (idx.size() != m.size()) throw std::invalid_argument("parabolic is not in P(M)");
  std::vector<std::pair<int, int>> out;
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = i + 1; j < idx.size(); ++j) out.push_back({idx[i], idx[j]});
  return out;
}

RhoResult rho(const LeviOrbit& o, int a, int b, int depth, bool descent, std::uint64_t seed) {
  const int r = static_cast<int>(o.m.size());
  if (a < 0 || b < 0 || a >= r || b >= r || a == b) throw std::invalid_argument("invalid root");
  if (depth < 4) throw std::invalid_argument("depth must be at least 4");
  const long prime = o.prime();
  const int n = levi_rank(o.m);
  Parabolic p_box = {o.m[b], o.m[a]}, p = {o.m[a], o.m[b]};
  for (int i = 0; i < r; ++i)
    if (i != a && i != b) {
      p_box.push_back(o.m[i]);
      p.push_back(o.m[i]);
    }
  MatQ y = levi_representative(o);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(1, 5);
  // Root space Hom(block a, block b) inside n_box.
  std::vector<std::pair<int, int>> pos;
  for (int i : o.m[b])
    for (int j : o.m[a]) pos.push_back({i, j});
  MatQ basis = MatQ::Identity(static_cast<int>(pos.size()), static_cast<int>(pos.size()));
  if (descent) {
    MatQ ys = semisimple_part(y);
    MatQ sys = MatQ::Zero(n * n, static_cast<int>(pos.size()));
    for (size_t t = 0; t < pos.size(); ++t) {
      auto [i, j] = pos[t];
      for (int k = 0; k < n; ++k) {
        sys(k * n + j, t) += ys(k, i);
        sys(i * n + k, t) -= ys(j, k);
      }
    }
    basis = exact_nullspace<Rat>(sys);
  }
  RhoResult res;
  res.a = a;
  res.b = b;
  if (basis.cols() == 0) {
    // No root of the centralizer restricts to alpha.
    res.rho = 0;
    res.stable_from = 1;
    return res;
  }
  MatQ v = MatQ::Zero(n, n);
  for (int c = 0; c < basis.cols(); ++c) {
    Rat coef(d(rng));
    for (size_t t = 0; t < pos.size(); ++t) v(pos[t].first, pos[t].second) += coef * basis(t, c);
  }
  auto t = regular_point(o, depth, seed);
  VecQ cr = coroot(o.m, a, b);
  const Rat na(static_cast<long>(o.m[a].size()));
  for (int k = 1; k <= depth; ++k) {
    MatQ nn = n_square(scalar_matrix(o.m, scaled(t, prime, k)), y, v, p_box);
    VecQ h = iwasawa_HP(nn, p, prime);
    Rat s = h(o.m[a][0]) * na;
    if (h != cr * s) throw std::logic_error("H_P(n_box) is not on the coroot line");
    res.s.push_back(s);
  }
  std::vector<Rat> diffs;
  for (size_t k = 0; k + 1 < res.s.size(); ++k) diffs.push_back(res.s[k + 1] - res.s[k]);
  int st = stable_index(diffs);
  if (st < 0) throw SlopeNotStable("slope did not stabilize within the depth bound");
  res.stable_from = st + 1;
  res.rho = -diffs.back();
  if (res.rho < 0) throw SlopeNotStable("negative slope");
  return res;
}

RhoTable rho_table(const LeviOrbit& o, int depth, bool descent) {
  RhoTable t;
  const int r = static_cast<int>(o.m.size());
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      if (a != b) t[{a, b}] = rho(o, a, b, depth, descent).rho;
  return t;
}

ExpPolyFamily r_family(const Levi& m0, const RhoTable& rho, const std::vector<Rat>& a, long prime) {
  Levi m = canonical_checked(m0);
  if (a.size() != m.size()) throw std::invalid_argument("one scalar per Levi block required");
  std::map<Parabolic, VecQ> y;
  for (auto& p : enumerate_P(m)) {
    VecQ e = VecQ::Zero(levi_rank(m));
    for (auto [i, j] : positive_roots(m, p)) {
      if (a[i] == a[j]) throw NotRegular("alpha(A) vanishes");
      e -= coroot(m, i, j) * (rho.at({i, j}) * Rat(valuation(a[i] - a[j], prime)) / Rat(2));
    }
    y[p] = e;
  }
  return orthogonal_family(m, y);
}

ExpPolyFamily v_family_of(const Levi& m0, const MatQ& x, long prime) {
  Levi m = canonical_checked(m0);
  std::map<Parabolic, VecQ> y;
  for (auto& p : enumerate_P(m)) y[p] = -iwasawa_HP(x, p, prime);
  return orthogonal_family(m, y);
}

ExpPolyFamily w_family(const LeviOrbit& o, const RhoTable& rho, const std::vector<Rat>& a,
                       const MatQ& v, const Parabolic& p_box) {
  MatQ nn = n_square(scalar_matrix(o.m, a), levi_representative(o), v, p_box);
  std::map<Parabolic, VecQ> y;
  for (auto& p : enumerate_P(o.m)) y[p] = w_exponent(o.m, rho, a, nn, p, p_box, o.prime());
  return orthogonal_family(o.m, y);
}

ExpPolyFamily w_limit(const LeviOrbit& o, const RhoTable& rho, const MatQ& v,
                      const Parabolic& p_box, int depth) {
  auto t = regular_point(o, depth);
  std::vector<std::map<Parabolic, VecQ>> seq;
  for (int k = 1; k <= depth; ++k) {
    ExpPolyFamily f = w_family(o, rho, scaled(t, o.prime(), k), v, p_box);
    std::map<Parabolic, VecQ> y;
    for (auto& [p, terms] : f.c) y[p] = terms.at(0).y;
    seq.push_back(y);
  }
  if (stable_index(seq) < 0) throw SlopeNotStable("w-family did not stabilize within the depth bound");
  return orthogonal_family(o.m, seq.back());
}

MatQ random_nilradical_element(const Parabolic& p_box, long prime, std::mt19937_64& rng) {
  const int n = parabolic_rank(p_box);
  auto bi = block_index(p_box);
  std::uniform_int_distribution<int> c(1, 4), e(0, 2), sign(0, 1);
  MatQ v = MatQ::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col)
      if (bi[r] < bi[col]) v(r, col) = Rat(sign(rng) ? c(rng) : -c(rng)) * rat_pow(prime, e(rng));
  return v;
}

IdentityReport r_v_product_identity(const LeviOrbit& o, const RhoTable& rho,
                                    const std::vector<Rat>& a, const MatQ& v,
                                    const Parabolic& p_box) {
  ExpPolyFamily r = r_family(o.m, rho, a, o.prime());
  MatQ nn = n_square(scalar_matrix(o.m, a), levi_representative(o), v, p_box);
  Surd lhs;
  for (auto& l : enumerate_L(o.m)) {
    Surd rl = cM_limit(r, o.m, enumerate_P(l).front());
    if (rl.is_zero()) continue;
    lhs = lhs + rl * cM(v_family_of(l, nn, o.prime()));
  }
  Surd rhs = cM(w_family(o, rho, a, v, p_box));
  return {lhs, rhs, lhs == rhs};
}

bool r_levi_independent(const ExpPolyFamily& r) {
  for (auto& l : enumerate_L(r.m)) {
    auto qs = enumerate_P(l);
    Surd first = cM_limit(r, r.m, qs.front());
    for (auto& q : qs)
      if (cM_limit(r, r.m, q) != first) return false;
  }
  return true;
}

bool cocycle_holds(const LeviOrbit& o, const RhoTable& rho, const std::vector<Rat>& a,
                   const MatQ& v1, const Parabolic& p1, const Parabolic& p2) {
  const long prime = o.prime();
  MatQ am = scalar_matrix(o.m, a), y1 = levi_representative(o);
  MatQ n1 = n_square(am, y1, v1, p1);
  Iwasawa dec = iwasawa_decompose(n1, p2, prime);
  const int n = dim_of(n1);
  MatQ mp = MatQ::Zero(n, n);
  for (auto& blk : p2)
    for (int i : blk)
      for (int j : blk) mp(i, j) = dec.p_part(i, j);
  MatQ mpi = exact_inverse<Rat>(mp);
  MatQ n2 = mpi * dec.p_part;
  MatQ y2 = mpi * y1 * mp;
  MatQ v2 = exact_inverse<Rat>(n2) * (am + y2) * n2 - am - y2;
  if (!in_nilradical(v2, p2)) throw std::logic_error("base change left the nilradical");
  // The unique solution for (Y2, V2) is n2 itself.
  if (n_square(am, y2, v2, p2) != n2) throw std::logic_error("n_box is not unique");
  for (auto& p3 : enumerate_P(o.m)) {
    VecQ w31 = w_exponent(o.m, rho, a, n1, p3, p1, prime);
    VecQ w32 = w_exponent(o.m, rho, a, n2, p3, p2, prime);
    VecQ w21 = w_exponent(o.m, rho, a, n1, p2, p1, prime);
    if (w31 != w32 + w21) return false;
  }
  return true;
}

AdjacentReport adjacent_difference(const WeightQuery& q, const Parabolic& p1, const Parabolic& p2) {
  validate_query(q);
  if (q.x.blocks.size() != 1 || q.x.blocks[0].poly.degree() != 1)
    throw std::invalid_argument("adjacent_difference needs a single polynomial of degree one");
  Levi m = canonical_levi(q.m_r);
  const int k = adjacent_position(p1, p2);
  if (k < 0) throw std::invalid_argument("parabolics are not adjacent");
  Parabolic t1 = r_map(q.x, m, p1), t2 = r_map(q.x, m, p2);
  auto a1 = sorted_block(t1[k]), a2 = sorted_block(t2[k]);
  std::vector<int> w1, w2, w3;
  if (std::includes(a2.begin(), a2.end(), a1.begin(), a1.end())) {
    w1 = a1;
    std::set_difference(a2.begin(), a2.end(), a1.begin(), a1.end(), std::back_inserter(w2));
    w3 = sorted_block(t2[k + 1]);
  } else if (std::includes(a1.begin(), a1.end(), a2.begin(), a2.end())) {
    w1 = a2;
    std::set_difference(a1.begin(), a1.end(), a2.begin(), a2.end(), std::back_inserter(w2));
    w3 = sorted_block(t1[k + 1]);
  } else {
    throw std::invalid_argument("Richardson flags are not nested");
  }
  Parabolic pm(t1.begin(), t1.begin() + k);
  pm.push_back(w1);
  if (!w2.empty()) pm.push_back(w2);
  pm.push_back(w3);
  pm.insert(pm.end(), t1.begin() + k + 2, t1.end());
  MatQ x = standard_representative(q.x);
  MatQ y = exact_inverse<Rat>(q.g) * x * q.g;
  Iwasawa dec = iwasawa_decompose(q.g, pm, q.x.p);
  MatQ u = dec.k_part * y * exact_inverse<Rat>(dec.k_part);
  AdjacentReport rep;
  rep.u13 = extract_block(u, w1, w3);
  Rat det = exact_det<Rat>(rep.u13);
  if (det == 0) throw std::invalid_argument("U13 is singular");
  VecQ cr = coroot(m, block_position(m, sorted_block(p1[k])), block_position(m, sorted_block(p1[k + 1])));
  rep.lhs = -RP(q, p1) + RP(q, p2);
  rep.rhs = cr * Rat(-valuation(det, q.x.p));
  rep.holds = rep.lhs == rep.rhs;
  return rep;
}

CompareReport weight_compare(const OrbitDatum& x, const Levi& m_r, const Parabolic& p_box,
                             const MatQ& v, const MatQ& k, int depth) {
  if (!x.is_nilpotent()) throw std::invalid_argument("weight_compare needs a nilpotent orbit");
  if (!in_K(k, x.p)) throw std::invalid_argument("k is not in K");
  Levi m = canonical_levi(m_r);
  std::vector<OrbitDatum> zeros;
  for (auto& blk : m) zeros.push_back(zero_orbit(x.p, static_cast<int>(blk.size())));
  LeviOrbit o = make_levi_orbit(m, zeros);
  MatQ xr = standard_representative(x);
  MatQ vk = exact_inverse<Rat>(k) * v * k;
  CompareReport rep;
  try {
    rep.g = conjugator(xr, vk);
  } catch (const NotConjugate&) {
    throw NotConjugate("V is not in the orbit of X");
  }
  WeightQuery q{x, m, rep.g};
  validate_query(q);
  RhoTable rt = rho_table(o, depth);
  ExpPolyFamily w = w_limit(o, rt, v, p_box, depth);
  VecQ rbox = RP(q, p_box);
  rep.holds = true;
  for (auto& p : enumerate_P(m)) {
    rep.lhs[p] = w.c.at(p).at(0).y;
    rep.rhs[p] = rbox - RP(q, p);
    rep.holds = rep.holds && rep.lhs[p] == rep.rhs[p];
  }
  return rep;
}

DescentReport r_descent_equal(const LeviOrbit& o, const std::vector<Rat>& a, int depth) {
  for (auto& d : o.orbits)
    if (d.blocks.size() != 1)
      throw std::invalid_argument("each Levi block must carry a single polynomial");
  DescentReport rep;
  rep.direct = rho_table(o, depth, false);
  rep.descent = rho_table(o, depth, true);
  ExpPolyFamily fd = r_family(o.m, rep.direct, a, o.prime());
  ExpPolyFamily fs = r_family(o.m, rep.descent, a, o.prime());
  rep.holds = rep.direct == rep.descent;
  for (auto& l : enumerate_L(o.m)) {
    Parabolic q = enumerate_P(l).front();
    rep.r_direct[l] = cM_limit(fd, o.m, q);
    rep.r_descent[l] = cM_limit(fs, o.m, q);
    rep.holds = rep.holds && rep.r_direct[l] == rep.r_descent[l];
  }
  return rep;
}

}  // namespace wopkit
