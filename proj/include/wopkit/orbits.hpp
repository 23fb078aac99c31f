#pragma once

#include <array>
#include <random>
#include <vector>

#include "wopkit/exactnum.hpp"

namespace wopkit {

// Weakly decreasing positive parts.
using Partition = std::vector<int>;
// Disjoint 0-based index sets covering {0..n-1}; one GL block each.
using Levi = std::vector<std::vector<int>>;

struct OrbitBlock {
  Poly poly;  // monic, irreducible over Q_p
  Partition partition;
  bool operator==(const OrbitBlock& o) const {
    return poly == o.poly && partition == o.partition;
  }
};

// Rational conjugacy class: blocks sorted by poly_less.
struct OrbitDatum {
  long p = 2;
  int n = 0;
  std::vector<OrbitBlock> blocks;
  bool operator==(const OrbitDatum& o) const {
    return p == o.p && n == o.n && blocks == o.blocks;
  }
  bool operator!=(const OrbitDatum& o) const { return !(*this == o); }
  bool is_nilpotent() const;
};

// Total order on monic irreducibles: degree, then (-c_{d-1}, ..., -c_0) lexicographically.
bool poly_less(const Poly& a, const Poly& b);

Partition normalize_partition(Partition lam);
Partition transpose(const Partition& lam);
int partition_size(const Partition& lam);
std::vector<Partition> partitions_of(int n);

// Validates, certifies irreducibility and sorts.
OrbitDatum make_orbit(long p, std::vector<OrbitBlock> blocks, bool certify = true);
OrbitDatum zero_orbit(long p, int n);
OrbitDatum nilpotent_orbit(long p, const Partition& lam);

Levi full_levi(int n);
Levi torus_levi(int n);
// Contiguous blocks of the given sizes.
Levi standard_levi(const std::vector<int>& sizes);
int levi_rank(const Levi& m);
void validate_levi(const Levi& m, int n);
// Blocks sorted internally and by smallest element.
Levi canonical_levi(Levi m);
std::vector<Levi> all_levis(int n);
// Levis L with M contained in L contained in ambient.
std::vector<Levi> coarsenings(const Levi& m, const Levi& ambient);
bool levi_contains(const Levi& big, const Levi& small);

OrbitDatum induce_orbit(const Levi& levi, const std::vector<OrbitDatum>& orbits);
int centralizer_dim(const OrbitDatum& d);
int orbit_codim(const OrbitDatum& d);
// Codimension of the product orbit inside the Levi subalgebra.
int orbit_codim(const std::vector<OrbitDatum>& orbits_on_blocks, const Levi& levi);

// Chunks (i, j, k) of the basis: i-th vector of the k-th Jordan chain of length j,
// ordered by i ascending, j descending, k ascending.
std::vector<std::array<int, 3>> chunk_order(const Partition& lam);
MatQ standard_representative(const OrbitDatum& d);
// Block-diagonal matrix with the given blocks placed on the Levi coordinates.
MatQ assemble(const Levi& levi, const std::vector<MatQ>& blocks);
MatQ extract_block(const MatQ& x, const std::vector<int>& rows, const std::vector<int>& cols);

// Partition of Jordan multiplicities of x along the irreducible f.
Partition partition_along(const MatQ& x, const Poly& f);
// Orbit datum of x using the candidate irreducibles (must exhaust the charpoly).
OrbitDatum orbit_of_matrix(const MatQ& x, long p, const std::vector<Poly>& polys);

// Element of o + n_P for the parabolic with Levi blocks in the given order.
MatQ generic_induced_element(const Levi& ordered_levi, const std::vector<OrbitDatum>& orbits,
                             std::mt19937_64& rng);

struct RegLocusQuery {
  Levi levi;
  std::vector<OrbitDatum> orbits;  // one per Levi block
  std::vector<Rat> a;              // one scalar per Levi block
};

bool regular_locus_test(const RegLocusQuery& q);
// Independent check: G_{A+Y_ss} contained in M by centralizer dimensions.
bool regular_locus_by_centralizer(const RegLocusQuery& q);
MatQ scalar_levi_element(const Levi& levi, const std::vector<Rat>& a);

// Half the valuation of det(ad X_ss on g / g_{X_ss}).
Rat weyl_discriminant_val(const MatQ& x, long p);
// Oracle: lowest nonzero coefficient of the characteristic polynomial of ad X_ss.
Rat weyl_discriminant_val_oracle(const MatQ& x, long p);

}  // namespace wopkit
