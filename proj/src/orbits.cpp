#include "wopkit/orbits.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace wopkit {

bool OrbitDatum::is_nilpotent() const {
  return blocks.size() == 1 && blocks[0].poly == Poly::monomial(1, 1);
}

bool poly_less(const Poly& a, const Poly& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = a.degree() - 1; i >= 0; --i) {
    Rat x = -a.coeff(i), y = -b.coeff(i);
    if (x != y) return x < y;
  }
  return false;
}

Partition normalize_partition(Partition lam) {
  lam.erase(std::remove(lam.begin(), lam.end(), 0), lam.end());
  for (int x : lam)
    if (x < 0) throw std::invalid_argument("negative part in partition");
  std::sort(lam.begin(), lam.end(), std::greater<int>());
  return lam;
}

Partition transpose(const Partition& lam) {
  Partition t;
  if (lam.empty()) return t;
  for (int k = 1; k <= lam.front(); ++k) {
    int c = 0;
    for (int x : lam)
      if (x >= k) ++c;
    t.push_back(c);
  }
  return t;
}

int partition_size(const Partition& lam) { return std::accumulate(lam.begin(), lam.end(), 0); }

namespace {

void partitions_rec(int n, int maxpart, Partition& cur, std::vector<Partition>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int k = std::min(n, maxpart); k >= 1; --k) {
    cur.push_back(k);
    partitions_rec(n - k, k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Partition> partitions_of(int n) {
  std::vector<Partition> out;
  Partition cur;
  partitions_rec(n, n, cur, out);
  return out;
}

OrbitDatum make_orbit(long p, std::vector<OrbitBlock> blocks, bool certify) {
  require_prime(p);
  OrbitDatum d;
  d.p = p;
  for (auto& b : blocks) {
    if (b.poly.degree() < 1) throw std::invalid_argument("orbit polynomial must be nonconstant");
    b.poly = monic(b.poly);
    b.partition = normalize_partition(b.partition);
    if (b.partition.empty()) throw std::invalid_argument("empty partition in orbit datum");
    if (certify && !qp_irreducible(b.poly, p))
      throw std::invalid_argument("polynomial not irreducible over Q_p: " + to_string(b.poly));
    d.n += b.poly.degree() * partition_size(b.partition);
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const OrbitBlock& x, const OrbitBlock& y) { return poly_less(x.poly, y.poly); });
  for (size_t i = 1; i < blocks.size(); ++i)
    if (blocks[i].poly == blocks[i - 1].poly)
      throw std::invalid_argument("repeated polynomial in orbit datum");
  d.blocks = std::move(blocks);
  return d;
}

OrbitDatum zero_orbit(long p, int n) { return nilpotent_orbit(p, Partition(n, 1)); }

OrbitDatum nilpotent_orbit(long p, const Partition& lam) {
  return make_orbit(p, {OrbitBlock{Poly::monomial(1, 1), lam}}, false);
}

Levi full_levi(int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return {all};
}

Levi torus_levi(int n) {
  Levi m;
  for (int i = 0; i < n; ++i) m.push_back({i});
  return m;
}

Levi standard_levi(const std::vector<int>& sizes) {
  Levi m;
  int at = 0;
  for (int s : sizes) {
    if (s <= 0) throw std::invalid_argument("nonpositive Levi block size");
    std::vector<int> b(s);
    std::iota(b.begin(), b.end(), at);
    at += s;
    m.push_back(b);
  }
  return m;
}

int levi_rank(const Levi& m) {
  int n = 0;
  for (auto& b : m) n += static_cast<int>(b.size());
  return n;
}

void validate_levi(const Levi& m, int n) {
  std::vector<int> seen(n, 0);
  for (auto& b : m) {
    if (b.empty()) throw std::invalid_argument("empty Levi block");
    for (int i : b) {
      if (i < 0 || i >= n) throw std::invalid_argument("Levi index out of range");
      if (seen[i]++) throw std::invalid_argument("Levi blocks not disjoint");
    }
  }
  for (int i = 0; i < n; ++i)
    if (!seen[i]) throw std::invalid_argument("Levi blocks do not cover all indices");
}

Levi canonical_levi(Levi m) {
  for (auto& b : m) std::sort(b.begin(), b.end());
  std::sort(m.begin(), m.end());
  return m;
}

namespace {

void set_partitions_rec(int i, int n, Levi& cur, std::vector<Levi>& out) {
  if (i == n) {
    out.push_back(canonical_levi(cur));
    return;
  }
  for (size_t b = 0; b < cur.size(); ++b) {
    cur[b].push_back(i);
    set_partitions_rec(i + 1, n, cur, out);
    cur[b].pop_back();
  }
  cur.push_back({i});
  set_partitions_rec(i + 1, n, cur, out);
  cur.pop_back();
}

// Set partitions of the index list of blocks.
void block_groupings_rec(size_t i, size_t nb, std::vector<std::vector<int>>& cur,
                         std::vector<std::vector<std::vector<int>>>& out) {
  if (i == nb) {
    out.push_back(cur);
    return;
  }
  for (size_t g = 0; g < cur.size(); ++g) {
    cur[g].push_back(static_cast<int>(i));
    block_groupings_rec(i + 1, nb, cur, out);
    cur[g].pop_back();
  }
  cur.push_back({static_cast<int>(i)});
  block_groupings_rec(i + 1, nb, cur, out);
  cur.pop_back();
}

int block_of(const Levi& m, int idx) {
  for (size_t b = 0; b < m.size(); ++b)
    if (std::find(m[b].begin(), m[b].end(), idx) != m[b].end()) return static_cast<int>(b);
  throw std::invalid_argument("index not in Levi");
}

}  // namespace

std::vector<Levi> all_levis(int n) {
  std::vector<Levi> out;
  Levi cur;
  set_partitions_rec(0, n, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

bool levi_contains(const Levi& big, const Levi& small) {
  for (auto& b : small) {
    int owner = block_of(big, b.front());
    for (int i : b)
      if (block_of(big, i) != owner) return false;
  }
  return true;
}

std::vector<Levi> coarsenings(const Levi& m, const Levi& ambient) {
  std::vector<std::vector<std::vector<int>>> groupings;
  std::vector<std::vector<int>> cur;
  block_groupings_rec(0, m.size(), cur, groupings);
  std::set<Levi> out;
  for (auto& g : groupings) {
    Levi l;
    for (auto& grp : g) {
      std::vector<int> blk;
      for (int b : grp) blk.insert(blk.end(), m[b].begin(), m[b].end());
      l.push_back(blk);
    }
    l = canonical_levi(l);
    if (levi_contains(ambient, l)) out.insert(l);
  }
  return {out.begin(), out.end()};
}

OrbitDatum induce_orbit(const Levi& levi, const std::vector<OrbitDatum>& orbits) {
  if (levi.size() != orbits.size()) throw std::invalid_argument("one orbit per Levi block required");
  if (orbits.empty()) throw std::invalid_argument("empty Levi");
  const long p = orbits.front().p;
  std::vector<std::pair<Poly, Partition>> acc;
  for (size_t b = 0; b < levi.size(); ++b) {
    if (orbits[b].p != p) throw std::invalid_argument("mixed primes in induction");
    if (orbits[b].n != static_cast<int>(levi[b].size()))
      throw std::invalid_argument("orbit size does not match Levi block size");
    for (auto& ob : orbits[b].blocks) {
      auto it = std::find_if(acc.begin(), acc.end(),
                             [&](const auto& e) { return e.first == ob.poly; });
      if (it == acc.end()) {
        acc.emplace_back(ob.poly, ob.partition);
        continue;
      }
      Partition& s = it->second;
      if (s.size() < ob.partition.size()) s.resize(ob.partition.size(), 0);
      for (size_t i = 0; i < ob.partition.size(); ++i) s[i] += ob.partition[i];
    }
  }
  std::vector<OrbitBlock> blocks;
  for (auto& [f, lam] : acc) blocks.push_back({f, lam});
  return make_orbit(p, std::move(blocks), false);
}

int centralizer_dim(const OrbitDatum& d) {
  int s = 0;
  for (auto& b : d.blocks) {
    int t = 0;
    for (int x : transpose(b.partition)) t += x * x;
    s += b.poly.degree() * t;
  }
  return s;
}

int orbit_codim(const OrbitDatum& d) { return centralizer_dim(d); }

int orbit_codim(const std::vector<OrbitDatum>& orbits, const Levi& levi) {
  if (orbits.size() != levi.size()) throw std::invalid_argument("one orbit per Levi block required");
  int s = 0;
  for (size_t b = 0; b < levi.size(); ++b) {
    if (orbits[b].n != static_cast<int>(levi[b].size()))
      throw std::invalid_argument("orbit size does not match Levi block size");
    s += orbit_codim(orbits[b]);
  }
  return s;
}

std::vector<std::array<int, 3>> chunk_order(const Partition& lam) {
  std::map<int, int> mult;
  for (int x : lam) ++mult[x];
  std::vector<std::array<int, 3>> out;
  if (lam.empty()) return out;
  for (int i = 1; i <= lam.front(); ++i)
    for (auto it = mult.rbegin(); it != mult.rend(); ++it)
      if (it->first >= i)
        for (int k = 1; k <= it->second; ++k) out.push_back({i, it->first, k});
  return out;
}

namespace {

MatQ poly_block_representative(const Poly& f, const Partition& lam) {
  const int d = f.degree();
  auto chunks = chunk_order(lam);
  const int m = static_cast<int>(chunks.size());
  MatQ x = MatQ::Zero(m * d, m * d);
  MatQ c = companion(f);
  for (int a = 0; a < m; ++a) {
    x.block(a * d, a * d, d, d) = c;
    if (chunks[a][0] == 1) continue;
    for (int b = 0; b < m; ++b)
      if (chunks[b][0] == chunks[a][0] - 1 && chunks[b][1] == chunks[a][1] &&
          chunks[b][2] == chunks[a][2])
        x.block(b * d, a * d, d, d) = MatQ::Identity(d, d);
  }
  return x;
}

}  // namespace

MatQ standard_representative(const OrbitDatum& d) {
  MatQ x = MatQ::Zero(d.n, d.n);
  int at = 0;
  for (auto& b : d.blocks) {
    if (!qp_irreducible(b.poly, d.p))
      throw std::invalid_argument("uncertified polynomial: " + to_string(b.poly));
    MatQ blk = poly_block_representative(b.poly, b.partition);
    x.block(at, at, blk.rows(), blk.cols()) = blk;
    at += static_cast<int>(blk.rows());
  }
  return x;
}

MatQ assemble(const Levi& levi, const std::vector<MatQ>& blocks) {
  const int n = levi_rank(levi);
  MatQ x = MatQ::Zero(n, n);
  for (size_t b = 0; b < levi.size(); ++b) {
    if (blocks[b].rows() != static_cast<int>(levi[b].size()))
      throw std::invalid_argument("block size mismatch in assemble");
    for (size_t r = 0; r < levi[b].size(); ++r)
      for (size_t c = 0; c < levi[b].size(); ++c) x(levi[b][r], levi[b][c]) = blocks[b](r, c);
  }
  return x;
}

MatQ extract_block(const MatQ& x, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatQ out(rows.size(), cols.size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < cols.size(); ++c) out(r, c) = x(rows[r], cols[c]);
  return out;
}

Partition partition_along(const MatQ& x, const Poly& f) {
  const int n = static_cast<int>(x.rows());
  const int d = f.degree();
  MatQ fx = eval(f, x);
  MatQ pw = MatQ::Identity(n, n);
  std::vector<int> at_least;  // number of chains of length >= k
  int prev_rank = n;
  while (true) {
    pw = (pw * fx).eval();
    int r = exact_rank<Rat>(pw);
    if (r == prev_rank) break;
    at_least.push_back((prev_rank - r) / d);
    prev_rank = r;
  }
  // at_least is the transposed partition.
  return transpose(normalize_partition(at_least));
}

OrbitDatum orbit_of_matrix(const MatQ& x, long p, const std::vector<Poly>& polys) {
  std::vector<OrbitBlock> blocks;
  int total = 0;
  for (auto& f : polys) {
    Partition lam = partition_along(x, monic(f));
    if (lam.empty()) continue;
    total += f.degree() * partition_size(lam);
    blocks.push_back({monic(f), lam});
  }
  if (total != x.rows())
    throw std::invalid_argument("candidate polynomials do not exhaust the characteristic polynomial");
  return make_orbit(p, std::move(blocks), false);
}

MatQ generic_induced_element(const Levi& ordered_levi, const std::vector<OrbitDatum>& orbits,
                             std::mt19937_64& rng) {
  std::vector<MatQ> blocks;
  for (auto& o : orbits) blocks.push_back(standard_representative(o));
  MatQ x = assemble(ordered_levi, blocks);
  std::uniform_int_distribution<long> dist(-40, 40);
  for (size_t a = 0; a < ordered_levi.size(); ++a)
    for (size_t b = a + 1; b < ordered_levi.size(); ++b)
      for (int r : ordered_levi[a])
        for (int c : ordered_levi[b]) x(r, c) = Rat(dist(rng));
  return x;
}

MatQ scalar_levi_element(const Levi& levi, const std::vector<Rat>& a) {
  if (a.size() != levi.size()) throw std::invalid_argument("one scalar per Levi block required");
  const int n = levi_rank(levi);
  MatQ x = MatQ::Zero(n, n);
  for (size_t b = 0; b < levi.size(); ++b)
    for (int i : levi[b]) x(i, i) = a[b];
  return x;
}

namespace {

void validate_query(const RegLocusQuery& q) {
  if (q.levi.size() != q.orbits.size() || q.levi.size() != q.a.size())
    throw std::invalid_argument("regular locus query: inconsistent block counts");
  for (size_t b = 0; b < q.levi.size(); ++b)
    if (q.orbits[b].n != static_cast<int>(q.levi[b].size()))
      throw std::invalid_argument("regular locus query: orbit size mismatch");
}

}  // namespace

bool regular_locus_test(const RegLocusQuery& q) {
  validate_query(q);
  for (size_t i = 0; i < q.levi.size(); ++i)
    for (size_t j = 0; j < q.levi.size(); ++j) {
      if (i == j) continue;
      Rat t = q.a[i] - q.a[j];
      for (auto& bi : q.orbits[i].blocks)
        for (auto& bj : q.orbits[j].blocks)
          if (resultant(bi.poly, shift(bj.poly, t)) == 0) return false;
    }
  return true;
}

bool regular_locus_by_centralizer(const RegLocusQuery& q) {
  validate_query(q);
  std::vector<MatQ> blocks;
  int inside = 0;
  for (size_t b = 0; b < q.levi.size(); ++b) {
    MatQ ys = semisimple_part(standard_representative(q.orbits[b]));
    blocks.push_back(ys);
    inside += centralizer_dim(ys);
  }
  MatQ z = assemble(q.levi, blocks) + scalar_levi_element(q.levi, q.a);
  return centralizer_dim(z) == inside;
}

Rat weyl_discriminant_val(const MatQ& x, long p) {
  auto dec = squarefree_decomposition(charpoly(x));
  Rat total = 0;
  for (size_t a = 0; a < dec.size(); ++a)
    for (size_t b = 0; b < dec.size(); ++b) {
      const auto& [sa, ma] = dec[a];
      const auto& [sb, mb] = dec[b];
      Rat r = (a == b) ? resultant(sa, derivative(sa)) : resultant(sa, sb);
      if (a == b && sa.degree() == 1) continue;
      total += Rat(static_cast<long>(ma) * mb) * Rat(valuation(r, p));
    }
  return total / 2;
}

Rat weyl_discriminant_val_oracle(const MatQ& x, long p) {
  const int n = static_cast<int>(x.rows());
  MatQ s = semisimple_part(x);
  MatQ ad = MatQ::Zero(n * n, n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (int k = 0; k < n; ++k) {
        ad(r + n * c, k + n * c) += s(r, k);
        ad(r + n * c, r + n * k) -= s(k, c);
      }
  Poly cp = charpoly(ad);
  for (int i = 0; i <= cp.degree(); ++i)
    if (cp.c[i] != 0) return Rat(valuation(cp.c[i], p)) / 2;
  return 0;
}

}  // namespace wopkit
