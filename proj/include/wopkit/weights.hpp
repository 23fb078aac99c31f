#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wopkit/gmfam.hpp"

namespace wopkit {

class NotRegular : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SlopeNotStable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vectors of a_0 are in units of l; coordinates are minus valuations.

// H_P(g) by minimal valuations of maximal minors of the trailing rows.
VecQ iwasawa_HP(const MatQ& g, const Parabolic& p, long prime);

// g = p_part * k_part with p_part in P and k_part in GL_n(Z_p).
struct Iwasawa {
  MatQ p_part;
  MatQ k_part;
};
// Column reduction with valuation pivoting.
Iwasawa iwasawa_decompose(const MatQ& g, const Parabolic& p, long prime);
// H_{M_P} of the Levi component of an element of P.
VecQ levi_H(const MatQ& m, const Parabolic& p, long prime);

// Random generators; entries have p-power denominators of bounded size.
MatQ random_K(int n, long prime, std::mt19937_64& rng);
MatQ random_GL(int n, long prime, std::mt19937_64& rng, int spread = 2);
MatQ random_levi_element(const Parabolic& p, long prime, std::mt19937_64& rng, int spread = 2);
// Invertible element commuting with x.
MatQ random_centralizer(const MatQ& x, long prime, std::mt19937_64& rng, int spread = 2);

struct WeightQuery {
  OrbitDatum x;
  Levi m_r;  // Richardson Levi of x
  MatQ g;
};

void validate_query(const WeightQuery& q);
// R_P(g) = H_P(w_P g) for P in F(M_R).
VecQ RP(const WeightQuery& q, const Parabolic& p);
// y_P = -R_P(g) on P(M_R).
ExpPolyFamily v_family(const WeightQuery& q);
// Difference along every adjacent pair lies on the shared coroot.
bool is_orthogonal_family(const ExpPolyFamily& f);
// v_{L,X}^Q(g).
Surd weight_vLXQ(const WeightQuery& q, const Levi& l, const Parabolic& big_q);

// Unique unipotent n in N_box with n^{-1}(A+Y)n = A+Y+V; throws NotRegular.
MatQ n_square(const MatQ& a, const MatQ& y, const MatQ& v, const Parabolic& p_box);

// Orbit on M given blockwise; Y is the assembled standard representative.
struct LeviOrbit {
  Levi m;
  std::vector<OrbitDatum> orbits;  // one per block of m
  long prime() const { return orbits.at(0).p; }
};
LeviOrbit make_levi_orbit(const Levi& m, std::vector<OrbitDatum> orbits);
MatQ levi_representative(const LeviOrbit& o);
MatQ scalar_matrix(const Levi& m, const std::vector<Rat>& a);
// Integral direction t with p^k t regular for k = 1..depth; throws NotRegular.
std::vector<Rat> regular_point(const LeviOrbit& o, int depth, std::uint64_t seed = 1);

// Coroot of h_a - h_b for blocks a, b of m.
VecQ block_coroot(const Levi& m, int a, int b);
// Roots (a, b) with a before b in P.
std::vector<std::pair<int, int>> positive_roots(const Levi& m, const Parabolic& p);

struct RhoResult {
  int a = 0, b = 0;
  Rat rho;
  std::vector<Rat> s;  // alpha^vee coefficient of H_P(n_box) at depths 1, 2, ...
  int stable_from = 0;  // first depth from which the slope is constant
};
// Slope detection along A_k with val(alpha(A_k)) = k.
// With descent, V is taken in the centralizer of Y_ss.
RhoResult rho(const LeviOrbit& o, int a, int b, int depth = 8, bool descent = false,
              std::uint64_t seed = 11);
using RhoTable = std::map<std::pair<int, int>, Rat>;
RhoTable rho_table(const LeviOrbit& o, int depth = 8, bool descent = false);

// r_P(lambda, A) = prod_{alpha in Sigma(P)} |alpha(A)|^{rho <lambda/2, alpha^vee>}.
ExpPolyFamily r_family(const Levi& m, const RhoTable& rho, const std::vector<Rat>& a, long prime);
// exp(-<lambda, H_P(x)>).
ExpPolyFamily v_family_of(const Levi& m, const MatQ& x, long prime);
// w_{P|P_box}(lambda, A, Y, V).
ExpPolyFamily w_family(const LeviOrbit& o, const RhoTable& rho, const std::vector<Rat>& a,
                       const MatQ& v, const Parabolic& p_box);
// Limit A -> 0 along p^k A_1; throws SlopeNotStable.
ExpPolyFamily w_limit(const LeviOrbit& o, const RhoTable& rho, const MatQ& v,
                      const Parabolic& p_box, int depth = 8);
// Random V in n_box.
MatQ random_nilradical_element(const Parabolic& p_box, long prime, std::mt19937_64& rng);

// sum_L r_M^L(A,Y) v_L^G(n_box(A,Y,V)) = w_M^G(A,Y,V).
IdentityReport r_v_product_identity(const LeviOrbit& o, const RhoTable& rho,
                                    const std::vector<Rat>& a, const MatQ& v,
                                    const Parabolic& p_box);
// r_M^L is independent of Q in P(L).
bool r_levi_independent(const ExpPolyFamily& r);

// w_{P3|P1} = w_{P3|P2} w_{P2|P1} with (Y2, V2, k2) built from an Iwasawa decomposition.
bool cocycle_holds(const LeviOrbit& o, const RhoTable& rho, const std::vector<Rat>& a,
                   const MatQ& v1, const Parabolic& p1, const Parabolic& p2);

struct AdjacentReport {
  VecQ lhs;  // -R_{P1}(g) + R_{P2}(g)
  VecQ rhs;  // -val(det U13) alpha^vee
  MatQ u13;
  bool holds = false;
};
// One polynomial of degree one; P1, P2 adjacent in P(M_R).
AdjacentReport adjacent_difference(const WeightQuery& q, const Parabolic& p1, const Parabolic& p2);

struct CompareReport {
  std::map<Parabolic, VecQ> lhs;  // limit exponent of w_{P|P_box}(lambda, 0, 0, V)
  std::map<Parabolic, VecQ> rhs;  // R_{P_box}(g) - R_P(g)
  MatQ g;
  bool holds = false;
};
// X nilpotent; V in n_box generic, k in K; g from k^{-1} V k = g^{-1} X g.
CompareReport weight_compare(const OrbitDatum& x, const Levi& m_r, const Parabolic& p_box,
                             const MatQ& v, const MatQ& k, int depth = 8);

struct DescentReport {
  RhoTable direct, descent;
  std::map<Levi, Surd> r_direct, r_descent;  // r_M^L for every L
  bool holds = false;
};
// Each block of the orbit must carry one polynomial.
DescentReport r_descent_equal(const LeviOrbit& o, const std::vector<Rat>& a, int depth = 8);

}  // namespace wopkit
