#include "wopkit/paracomb.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace wopkit {

Parabolic canonical_parabolic(Parabolic p) {
  for (auto& b : p) std::sort(b.begin(), b.end());
  return p;
}

Levi levi_of(const Parabolic& p) { return canonical_levi(p); }

int parabolic_rank(const Parabolic& p) { return levi_rank(p); }

std::vector<int> block_index(const Parabolic& p) {
  const int n = parabolic_rank(p);
  std::vector<int> idx(n, -1);
  for (size_t b = 0; b < p.size(); ++b)
    for (int i : p[b]) {
      if (i < 0 || i >= n || idx[i] != -1) throw std::invalid_argument("malformed parabolic");
      idx[i] = static_cast<int>(b);
    }
  return idx;
}

bool parabolic_contains(const Parabolic& big, const Parabolic& small) {
  auto bb = block_index(big), bs = block_index(small);
  if (bb.size() != bs.size()) return false;
  for (size_t r = 0; r < bs.size(); ++r)
    for (size_t c = 0; c < bs.size(); ++c)
      if (bs[r] <= bs[c] && bb[r] > bb[c]) return false;
  return true;
}

bool in_lie_algebra(const MatQ& x, const Parabolic& p) {
  auto bi = block_index(p);
  for (int r = 0; r < x.rows(); ++r)
    for (int c = 0; c < x.cols(); ++c)
      if (bi[r] > bi[c] && x(r, c) != 0) return false;
  return true;
}

bool in_nilradical(const MatQ& x, const Parabolic& p) {
  auto bi = block_index(p);
  for (int r = 0; r < x.rows(); ++r)
    for (int c = 0; c < x.cols(); ++c)
      if (bi[r] >= bi[c] && x(r, c) != 0) return false;
  return true;
}

Parabolic upper_borel(int n) { return torus_levi(n); }

Parabolic lower_borel(int n) {
  Parabolic p = torus_levi(n);
  std::reverse(p.begin(), p.end());
  return p;
}

Parabolic whole_group(int n) { return full_levi(n); }

namespace {

void groupings_rec(size_t i, size_t nb, std::vector<std::vector<int>>& cur,
                   std::vector<std::vector<std::vector<int>>>& out) {
  if (i == nb) {
    out.push_back(cur);
    return;
  }
  for (size_t g = 0; g < cur.size(); ++g) {
    cur[g].push_back(static_cast<int>(i));
    groupings_rec(i + 1, nb, cur, out);
    cur[g].pop_back();
  }
  cur.push_back({static_cast<int>(i)});
  groupings_rec(i + 1, nb, cur, out);
  cur.pop_back();
}

std::vector<int> merge_blocks(const Levi& m, const std::vector<int>& group) {
  std::vector<int> blk;
  for (int b : group) blk.insert(blk.end(), m[b].begin(), m[b].end());
  std::sort(blk.begin(), blk.end());
  return blk;
}

}  // namespace

std::vector<Permutation> all_permutations(int n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<Parabolic> enumerate_P(const Levi& m0) {
  Levi m = canonical_levi(m0);
  std::vector<Parabolic> out;
  for (auto& perm : all_permutations(static_cast<int>(m.size()))) {
    Parabolic p;
    for (int b : perm) p.push_back(m[b]);
    out.push_back(p);
  }
  return out;
}

std::vector<Parabolic> enumerate_F(const Levi& m0) {
  Levi m = canonical_levi(m0);
  std::vector<std::vector<std::vector<int>>> groupings;
  std::vector<std::vector<int>> cur;
  groupings_rec(0, m.size(), cur, groupings);
  std::set<Parabolic> out;
  for (auto& g : groupings)
    for (auto& perm : all_permutations(static_cast<int>(g.size()))) {
      Parabolic p;
      for (int gi : perm) p.push_back(merge_blocks(m, g[gi]));
      out.insert(p);
    }
  return {out.begin(), out.end()};
}

std::vector<Parabolic> enumerate_F(const Levi& m, const Parabolic& ambient) {
  std::vector<Parabolic> out;
  for (auto& p : enumerate_F(m))
    if (parabolic_contains(ambient, p)) out.push_back(p);
  return out;
}

std::vector<Parabolic> enumerate_P(const Levi& m, const Parabolic& ambient) {
  std::vector<Parabolic> out;
  for (auto& p : enumerate_P(m))
    if (parabolic_contains(ambient, p)) out.push_back(p);
  return out;
}

std::vector<Levi> enumerate_L(const Levi& m) { return coarsenings(m, full_levi(levi_rank(m))); }

std::vector<Parabolic> all_parabolics(int n) { return enumerate_F(torus_levi(n)); }

// Epsilon tables

bool is_valid_epsilon(const EpsilonTable& t) {
  if (t.r <= 0 || static_cast<int>(t.e.size()) != t.r) return false;
  for (size_t jj = 0; jj < t.J.size(); ++jj) {
    int s = 0;
    for (int k = 0; k < t.r; ++k) {
      if (t.e[k].size() != t.J.size()) return false;
      if (t.e[k][jj] != 0 && t.e[k][jj] != 1) return false;
      s += t.e[k][jj];
    }
    if (s != t.J[jj]) return false;
  }
  for (int k = 0; k < t.r; ++k)
    for (size_t jj = 1; jj < t.J.size(); ++jj)
      if (t.e[k][jj] < t.e[k][jj - 1]) return false;
  return true;
}

std::vector<EpsilonTable> epsilon_set(const Partition& lam0) {
  Partition lam = normalize_partition(lam0);
  if (lam.empty()) throw std::invalid_argument("epsilon set of empty partition");
  std::set<int> js(lam.begin(), lam.end());
  std::vector<int> J(js.begin(), js.end());
  const int r = J.back();
  // Each row is an up-set of J, fixed by its threshold index.
  std::vector<int> thresholds;
  for (size_t jj = 0; jj < J.size(); ++jj) {
    int count = J[jj] - (jj == 0 ? 0 : J[jj - 1]);
    for (int c = 0; c < count; ++c) thresholds.push_back(static_cast<int>(jj));
  }
  std::vector<EpsilonTable> out;
  do {
    EpsilonTable t;
    t.r = r;
    t.J = J;
    t.e.assign(r, std::vector<int>(J.size(), 0));
    for (int k = 0; k < r; ++k)
      for (size_t jj = thresholds[k]; jj < J.size(); ++jj) t.e[k][jj] = 1;
    out.push_back(t);
  } while (std::next_permutation(thresholds.begin(), thresholds.end()));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EpsilonTable> epsilon_set(const OrbitDatum& x, int poly_index) {
  if (poly_index < 0 || poly_index >= static_cast<int>(x.blocks.size()))
    throw std::invalid_argument("polynomial index out of range");
  return epsilon_set(x.blocks[poly_index].partition);
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw std::invalid_argument("permutation size mismatch");
  Permutation c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

Permutation inverse(const Permutation& a) {
  Permutation c(a.size(), -1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= static_cast<int>(a.size()) || c[a[i]] != -1)
      throw std::invalid_argument("not a permutation");
    c[a[i]] = static_cast<int>(i);
  }
  return c;
}

EpsilonTable sr_action(const Permutation& sigma, const EpsilonTable& eps) {
  if (!is_valid_epsilon(eps)) throw NotInE("input is not an epsilon table");
  if (static_cast<int>(sigma.size()) != eps.r) throw std::invalid_argument("sigma has wrong size");
  Permutation inv = inverse(sigma);
  EpsilonTable out = eps;
  for (int k = 0; k < eps.r; ++k) out.e[k] = eps.e[inv[k]];
  if (!is_valid_epsilon(out)) throw NotInE("image is not an epsilon table");
  return out;
}

// Layout

ChunkLayout chunk_layout(const OrbitDatum& x) {
  ChunkLayout lay;
  lay.n = x.n;
  lay.chunk_of.assign(x.n, -1);
  int at = 0;
  for (size_t q = 0; q < x.blocks.size(); ++q) {
    const int d = x.blocks[q].poly.degree();
    lay.by_poly.emplace_back();
    for (auto& c : chunk_order(x.blocks[q].partition)) {
      int idx = static_cast<int>(lay.chunks.size());
      lay.chunks.push_back({static_cast<int>(q), c[0], c[1], c[2], at, d});
      lay.by_poly.back().push_back(idx);
      for (int t = 0; t < d; ++t) lay.chunk_of[at + t] = idx;
      at += d;
    }
  }
  return lay;
}

std::vector<std::vector<int>> epsilon_flag_blocks(const ChunkLayout& lay, int poly,
                                                  const EpsilonTable& eps) {
  std::vector<std::vector<int>> blocks;
  std::vector<int> cum(eps.J.size(), 0);
  for (int k = 0; k < eps.r; ++k) {
    std::vector<int> blk;
    for (size_t jj = 0; jj < eps.J.size(); ++jj) {
      cum[jj] += eps.e[k][jj];
      if (!eps.e[k][jj]) continue;
      for (int ci : lay.by_poly[poly]) {
        const Chunk& c = lay.chunks[ci];
        if (c.j == eps.J[jj] && c.i == cum[jj])
          for (int t = 0; t < c.size; ++t) blk.push_back(c.start + t);
      }
    }
    std::sort(blk.begin(), blk.end());
    blocks.push_back(blk);
  }
  return blocks;
}

namespace {

void shuffles_rec(const std::vector<std::vector<std::vector<int>>>& seqs, std::vector<size_t>& pos,
                  Parabolic& cur, std::set<Parabolic>& out) {
  bool done = true;
  for (size_t s = 0; s < seqs.size(); ++s) {
    if (pos[s] == seqs[s].size()) continue;
    done = false;
    cur.push_back(seqs[s][pos[s]]);
    ++pos[s];
    shuffles_rec(seqs, pos, cur, out);
    --pos[s];
    cur.pop_back();
  }
  if (done) out.insert(cur);
}

}  // namespace

std::vector<Parabolic> richardson_set(const OrbitDatum& x) {
  ChunkLayout lay = chunk_layout(x);
  const size_t np = x.blocks.size();
  std::vector<std::vector<EpsilonTable>> choices;
  for (size_t q = 0; q < np; ++q) choices.push_back(epsilon_set(x.blocks[q].partition));
  std::set<Parabolic> out;
  std::vector<size_t> idx(np, 0);
  while (true) {
    std::vector<std::vector<std::vector<int>>> seqs;
    for (size_t q = 0; q < np; ++q)
      seqs.push_back(epsilon_flag_blocks(lay, static_cast<int>(q), choices[q][idx[q]]));
    std::vector<size_t> pos(np, 0);
    Parabolic cur;
    shuffles_rec(seqs, pos, cur, out);
    size_t q = 0;
    while (q < np && ++idx[q] == choices[q].size()) idx[q++] = 0;
    if (q == np) break;
  }
  return {out.begin(), out.end()};
}

std::vector<Levi> richardson_levis(const OrbitDatum& x) {
  std::set<Levi> out;
  for (auto& p : richardson_set(x)) out.insert(levi_of(p));
  return {out.begin(), out.end()};
}

Levi richardson_levi(const OrbitDatum& x) { return levi_of(richardson_set(x).front()); }

std::vector<std::vector<int>> conjugacy_type(const OrbitDatum& x, const Parabolic& p) {
  ChunkLayout lay = chunk_layout(x);
  auto bi = block_index(p);
  if (static_cast<int>(bi.size()) != x.n) throw std::invalid_argument("parabolic has wrong rank");
  std::vector<std::vector<int>> t(p.size(), std::vector<int>(x.blocks.size(), 0));
  for (auto& c : lay.chunks) {
    int b = bi[c.start];
    for (int s = 1; s < c.size; ++s)
      if (bi[c.start + s] != b) throw std::invalid_argument("parabolic splits a chunk");
    ++t[b][c.poly];
  }
  return t;
}

namespace {

void require_richardson_levi(const OrbitDatum& x, const Levi& m_r) {
  auto levis = richardson_levis(x);
  if (std::find(levis.begin(), levis.end(), canonical_levi(m_r)) == levis.end())
    throw std::invalid_argument("Levi is not a Richardson Levi for this orbit");
}

}  // namespace

Parabolic r_map(const OrbitDatum& x, const Levi& m_r, const Parabolic& p) {
  require_richardson_levi(x, m_r);
  if (levi_of(p) != canonical_levi(m_r)) throw std::invalid_argument("parabolic not in P(M_R)");
  auto t = conjugacy_type(x, p);
  Parabolic found;
  int hits = 0;
  for (auto& r : richardson_set(x))
    if (conjugacy_type(x, r) == t) {
      found = r;
      ++hits;
    }
  if (hits != 1) throw std::logic_error("R-map image not unique");
  return found;
}

Parabolic ls_map(const OrbitDatum& x, const Levi& m_r0, const Parabolic& q) {
  Levi m_r = canonical_levi(m_r0);
  require_richardson_levi(x, m_r);
  // P in P(M_R) contained in q, blocks ordered canonically inside each q-block.
  Parabolic p;
  std::vector<int> counts;
  auto bq = block_index(q);
  if (static_cast<int>(bq.size()) != x.n) throw std::invalid_argument("parabolic has wrong rank");
  for (size_t k = 0; k < q.size(); ++k) {
    int c = 0;
    for (auto& b : m_r) {
      int owner = bq[b.front()];
      for (int i : b)
        if (bq[i] != owner) throw std::invalid_argument("parabolic does not contain M_R");
      if (owner == static_cast<int>(k)) {
        p.push_back(b);
        ++c;
      }
    }
    counts.push_back(c);
  }
  Parabolic pt = r_map(x, m_r, p);
  Parabolic out;
  size_t at = 0;
  for (int c : counts) {
    std::vector<int> blk;
    for (int t = 0; t < c; ++t, ++at) blk.insert(blk.end(), pt[at].begin(), pt[at].end());
    std::sort(blk.begin(), blk.end());
    out.push_back(blk);
  }
  return out;
}

bool in_weyl_of_x(const ChunkLayout& lay, const Permutation& pi) {
  if (static_cast<int>(pi.size()) != lay.n) return false;
  for (auto& c : lay.chunks) {
    int target = lay.chunk_of[pi[c.start]];
    const Chunk& tc = lay.chunks[target];
    if (tc.poly != c.poly || tc.start != pi[c.start]) return false;
    for (int s = 0; s < c.size; ++s)
      if (pi[c.start + s] != tc.start + s) return false;
  }
  return true;
}

std::vector<Permutation> weyl_of_x(const ChunkLayout& lay) {
  std::vector<Permutation> out;
  Permutation id(lay.n);
  std::iota(id.begin(), id.end(), 0);
  out.push_back(id);
  for (auto& chunks : lay.by_poly) {
    std::vector<Permutation> next;
    for (auto& sigma : all_permutations(static_cast<int>(chunks.size())))
      for (auto& base : out) {
        Permutation pi = base;
        for (size_t a = 0; a < chunks.size(); ++a) {
          const Chunk& from = lay.chunks[chunks[a]];
          const Chunk& to = lay.chunks[chunks[sigma[a]]];
          for (int s = 0; s < from.size; ++s) pi[from.start + s] = to.start + s;
        }
        next.push_back(pi);
      }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Permutation w_P(const OrbitDatum& x, const Levi& m_r, const Parabolic& p) {
  Parabolic target = ls_map(x, m_r, p);
  auto bp = block_index(p), bt = block_index(target);
  ChunkLayout lay = chunk_layout(x);
  // Lexicographically least chunk permutation sending each block of target into the matching block of p.
  std::vector<bool> used(lay.chunks.size(), false);
  Permutation pi(x.n, -1);
  for (auto& c : lay.chunks) {
    int dest = -1;
    for (int ci : lay.by_poly[c.poly]) {
      const Chunk& d = lay.chunks[ci];
      if (!used[ci] && bp[d.start] == bt[c.start] && (dest < 0 || d.start < lay.chunks[dest].start))
        dest = ci;
    }
    if (dest < 0) throw std::logic_error("no chunk permutation onto the LS image");
    used[dest] = true;
    for (int s = 0; s < c.size; ++s) pi[c.start + s] = lay.chunks[dest].start + s;
  }
  return pi;
}

Parabolic conj_inverse(const Permutation& pi, const Parabolic& p) {
  auto bi = block_index(p);
  Parabolic out(p.size());
  for (size_t i = 0; i < pi.size(); ++i) out[bi[pi[i]]].push_back(static_cast<int>(i));
  return canonical_parabolic(out);
}

Parabolic conj(const Permutation& pi, const Parabolic& p) {
  Parabolic out;
  for (auto& b : p) {
    std::vector<int> nb;
    for (int i : b) nb.push_back(pi[i]);
    out.push_back(nb);
  }
  return canonical_parabolic(out);
}

Levi conj_levi(const Permutation& pi, const Levi& m) {
  Levi out;
  for (auto& b : m) {
    std::vector<int> nb;
    for (int i : b) nb.push_back(pi[i]);
    out.push_back(nb);
  }
  return canonical_levi(out);
}

MatQ permutation_matrix(const Permutation& pi) {
  const int n = static_cast<int>(pi.size());
  MatQ w = MatQ::Zero(n, n);
  for (int i = 0; i < n; ++i) w(pi[i], i) = 1;
  return w;
}

long normalizer_quotient_size(const OrbitDatum& x, const Levi& m_r0) {
  Levi m_r = canonical_levi(m_r0);
  ChunkLayout lay = chunk_layout(x);
  long norm = 0, inside = 0;
  for (auto& pi : weyl_of_x(lay)) {
    if (conj_levi(pi, m_r) != m_r) continue;
    ++norm;
    bool fixes = true;
    for (auto& b : m_r) {
      std::vector<int> img;
      for (int i : b) img.push_back(pi[i]);
      std::sort(img.begin(), img.end());
      if (img != b) fixes = false;
    }
    if (fixes) ++inside;
  }
  return norm / inside;
}

std::vector<long> r_fiber_sizes(const OrbitDatum& x, const Levi& m_r) {
  auto rset = richardson_set(x);
  std::vector<long> sizes(rset.size(), 0);
  for (auto& p : enumerate_P(m_r)) {
    Parabolic img = r_map(x, m_r, p);
    auto it = std::find(rset.begin(), rset.end(), img);
    ++sizes[it - rset.begin()];
  }
  return sizes;
}

bool r_fibers_are_torsors(const OrbitDatum& x, const Levi& m_r0) {
  Levi m_r = canonical_levi(m_r0);
  ChunkLayout lay = chunk_layout(x);
  // Induced permutations of the blocks of M_R, one per normalizer coset.
  std::set<std::vector<int>> block_perms;
  for (auto& pi : weyl_of_x(lay)) {
    if (conj_levi(pi, m_r) != m_r) continue;
    std::vector<int> sigma;
    for (auto& b : m_r) {
      std::vector<int> img;
      for (int i : b) img.push_back(pi[i]);
      std::sort(img.begin(), img.end());
      sigma.push_back(static_cast<int>(std::find(m_r.begin(), m_r.end(), img) - m_r.begin()));
    }
    block_perms.insert(sigma);
  }
  std::map<Parabolic, std::set<Parabolic>> fibers;
  for (auto& p : enumerate_P(m_r)) fibers[r_map(x, m_r, p)].insert(p);
  for (auto& [img, fiber] : fibers) {
    const Parabolic& p0 = *fiber.begin();
    std::set<Parabolic> orbit;
    for (auto& sigma : block_perms) {
      Parabolic moved;
      for (auto& blk : p0) {
        auto it = std::find(m_r.begin(), m_r.end(), blk);
        moved.push_back(m_r[sigma[it - m_r.begin()]]);
      }
      orbit.insert(moved);
    }
    if (orbit != fiber || orbit.size() != block_perms.size()) return false;
  }
  return true;
}

std::vector<Parabolic> richardson_brute_force(const OrbitDatum& x) {
  if (!x.is_nilpotent()) throw std::invalid_argument("brute-force search needs a nilpotent orbit");
  MatQ xr = standard_representative(x);
  std::vector<Parabolic> cands;
  for (auto& p : all_parabolics(x.n)) {
    if (!in_nilradical(xr, p)) continue;
    std::vector<OrbitDatum> zeros;
    for (auto& b : p) zeros.push_back(zero_orbit(x.p, static_cast<int>(b.size())));
    if (induce_orbit(p, zeros) == x) cands.push_back(p);
  }
  std::vector<Parabolic> out;
  for (auto& p : cands) {
    bool minimal = true;
    for (auto& q : cands)
      if (q != p && parabolic_contains(p, q)) minimal = false;
    if (minimal) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace wopkit
