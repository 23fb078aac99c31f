#pragma once

#include <vector>

#include "wopkit/orbits.hpp"

namespace wopkit {

// Ordered disjoint index blocks covering {0..n-1}: the flag of partial unions.
// The Lie algebra is {(r,c) : block(r) <= block(c)}, so ({0},{1},...) is the upper Borel.
using Parabolic = std::vector<std::vector<int>>;
// Image list: pi[i] is the image of i. Matrix convention W(pi[i], i) = 1.
using Permutation = std::vector<int>;

class NotInE : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ParabolicKind { P, F, L };

Parabolic canonical_parabolic(Parabolic p);
Levi levi_of(const Parabolic& p);
int parabolic_rank(const Parabolic& p);
// Block index of every coordinate.
std::vector<int> block_index(const Parabolic& p);
bool parabolic_contains(const Parabolic& big, const Parabolic& small);
bool in_lie_algebra(const MatQ& x, const Parabolic& p);
bool in_nilradical(const MatQ& x, const Parabolic& p);
Parabolic upper_borel(int n);
Parabolic lower_borel(int n);
Parabolic whole_group(int n);

// P(M): orderings of the blocks of M; F(M): ordered groupings; contained in ambient if given.
std::vector<Parabolic> enumerate_P(const Levi& m);
std::vector<Parabolic> enumerate_F(const Levi& m);
std::vector<Parabolic> enumerate_F(const Levi& m, const Parabolic& ambient);
std::vector<Parabolic> enumerate_P(const Levi& m, const Parabolic& ambient);
std::vector<Levi> enumerate_L(const Levi& m);
std::vector<Parabolic> all_parabolics(int n);

// Epsilon tables for one polynomial block.
struct EpsilonTable {
  int r = 0;
  std::vector<int> J;               // ascending part sizes
  std::vector<std::vector<int>> e;  // e[k][jj] for part size J[jj]
  bool operator==(const EpsilonTable& o) const { return r == o.r && J == o.J && e == o.e; }
  bool operator<(const EpsilonTable& o) const { return e < o.e; }
};

bool is_valid_epsilon(const EpsilonTable& t);
std::vector<EpsilonTable> epsilon_set(const Partition& lam);
// The epsilon set of the block of X along its idx-th polynomial.
std::vector<EpsilonTable> epsilon_set(const OrbitDatum& x, int poly_index);
// sigma acts by (k, j) -> e[sigma^{-1}(k)][j]; sigma is a permutation of {0..r-1}.
EpsilonTable sr_action(const Permutation& sigma, const EpsilonTable& eps);
Permutation compose(const Permutation& a, const Permutation& b);  // a after b
Permutation inverse(const Permutation& a);
std::vector<Permutation> all_permutations(int n);

// Coordinates of the standard representative grouped in chunks of size deg p.
struct Chunk {
  int poly;   // index into OrbitDatum::blocks
  int i, j, k;
  int start;  // first coordinate
  int size;   // degree of the polynomial
};

struct ChunkLayout {
  std::vector<Chunk> chunks;            // in coordinate order
  std::vector<int> chunk_of;            // coordinate -> chunk index
  std::vector<std::vector<int>> by_poly;  // chunk indices per polynomial, chunk order
  int n = 0;
};

ChunkLayout chunk_layout(const OrbitDatum& x);

// Blocks of the flag V(eps) for one polynomial, as coordinate sets.
std::vector<std::vector<int>> epsilon_flag_blocks(const ChunkLayout& lay, int poly,
                                                  const EpsilonTable& eps);
// Richardson set: product of epsilon choices and interleavings across polynomials.
std::vector<Parabolic> richardson_set(const OrbitDatum& x);
// Levi factors of the Richardson parabolics.
std::vector<Levi> richardson_levis(const OrbitDatum& x);
Levi richardson_levi(const OrbitDatum& x);

// Per block, number of chunks of each polynomial.
std::vector<std::vector<int>> conjugacy_type(const OrbitDatum& x, const Parabolic& p);

// Map (R): P(M_R) -> R(X).
Parabolic r_map(const OrbitDatum& x, const Levi& m_r, const Parabolic& p);
// Map (LS): F(M_R) -> LS(X).
Parabolic ls_map(const OrbitDatum& x, const Levi& m_r, const Parabolic& q);

// Chunk permutations within each polynomial.
bool in_weyl_of_x(const ChunkLayout& lay, const Permutation& pi);
std::vector<Permutation> weyl_of_x(const ChunkLayout& lay);
// Canonical w_P with (Ad w^{-1}) P in LS(X).
Permutation w_P(const OrbitDatum& x, const Levi& m_r, const Parabolic& p);
// (Ad w^{-1}) P and (Ad w) P.
Parabolic conj_inverse(const Permutation& pi, const Parabolic& p);
Parabolic conj(const Permutation& pi, const Parabolic& p);
Levi conj_levi(const Permutation& pi, const Levi& m);
MatQ permutation_matrix(const Permutation& pi);

// |Norm(M_X_ss)/M_X_ss| restricted to chunk permutations, by brute force.
long normalizer_quotient_size(const OrbitDatum& x, const Levi& m_r);
// Fiber sizes of (R) over each element of R(X), in richardson_set order.
std::vector<long> r_fiber_sizes(const OrbitDatum& x, const Levi& m_r);
// Normalizer acts simply transitively on every fiber of (R).
bool r_fibers_are_torsors(const OrbitDatum& x, const Levi& m_r);

// Nilpotent X: minimal parabolics with X in n_P and Ind_{M_P}(0) = orbit of X.
std::vector<Parabolic> richardson_brute_force(const OrbitDatum& x);

}  // namespace wopkit
