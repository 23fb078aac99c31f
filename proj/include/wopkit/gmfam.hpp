#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wopkit/paracomb.hpp"

namespace wopkit {

// Polynomial in the formal unit l = log q.
using LPoly = Poly;
std::string to_string_ell(const LPoly& f);
double eval_ell(const LPoly& f, double ell);

// Finite sum of coeff(l) * sqrt(r) over distinct squarefree radicands r >= 1.
class Surd {
 public:
  Surd() = default;
  Surd(const Rat& r);    // NOLINT: implicit on purpose
  Surd(const LPoly& f);  // NOLINT
  static Surd sqrt_of(const Rat& r);

  const std::map<Int, LPoly>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_poly() const;
  LPoly as_poly() const;
  double eval(double ell) const;
  bool operator==(const Surd& o) const { return t_ == o.t_; }
  bool operator!=(const Surd& o) const { return t_ != o.t_; }

  friend Surd operator+(const Surd& a, const Surd& b);
  friend Surd operator-(const Surd& a, const Surd& b);
  friend Surd operator*(const Surd& a, const Surd& b);

 private:
  std::map<Int, LPoly> t_;
  void add_term(const Int& r, const LPoly& c);
};
std::string to_string(const Surd& s);

// Euclidean pairing on R^n, identifying a_0 with its dual.
Rat dot(const VecQ& a, const VecQ& b);
// Indicator of block a of the Levi.
VecQ block_indicator(const Levi& l, int a, int n);
// Coroot of the root h_a - h_b of A_L: u_a/n_a - u_b/n_b.
VecQ coroot(const Levi& l, int a, int b);
// Constant on the Levi blocks.
bool in_a(const VecQ& v, const Levi& l);
// Orthogonal projection onto a_L (block averages).
VecQ project_to_a(const VecQ& v, const Levi& l);
// Simple coroots of r relative to q: consecutive blocks of r lying in one block of q.
std::vector<VecQ> simple_coroots(const Parabolic& r, const Parabolic& q);
// Basis of a_Q^R dual to the simple roots of q inside r.
std::vector<VecQ> simple_coweights(const Parabolic& q, const Parabolic& r);
// Covolume sqrt(det Gram) of the lattice spanned by the vectors.
Surd lattice_volume(const std::vector<VecQ>& basis);
// theta_P(lambda) = vol^{-1} prod lambda(alpha^vee) over simple roots of P.
Surd theta_eval(const Parabolic& p, const VecQ& lambda);

struct ExpTerm {
  LPoly coeff;
  VecQ y;  // exponent: the term is coeff * exp(l <lambda, y>)
};

// (G,M)-family: c_P(lambda) = sum coeff * exp(l <lambda, y>), for P in P(M).
struct ExpPolyFamily {
  Levi m;
  int n = 0;
  std::map<Parabolic, std::vector<ExpTerm>> c;
};

ExpPolyFamily constant_family(const Levi& m, const LPoly& value);
// Single exponential with the given exponent on each P.
ExpPolyFamily orthogonal_family(const Levi& m, const std::map<Parabolic, VecQ>& y);
ExpPolyFamily family_product(const ExpPolyFamily& a, const ExpPolyFamily& b);
ExpPolyFamily family_sum(const ExpPolyFamily& a, const ExpPolyFamily& b);
// (w c)_{wP}(lambda) = c_P(w^{-1} lambda).
ExpPolyFamily conjugate_family(const Permutation& w, const ExpPolyFamily& f);

// Agreement on every wall between adjacent chambers.
bool adjacency_holds(const ExpPolyFamily& f);
// Keys, exponent support and adjacency; throws std::invalid_argument.
void validate_family(const ExpPolyFamily& f);

// Orthogonal family y_P = Z + proj_M(w_P T) + sum_{alpha in Sigma(P)} r_alpha alpha^vee, random data.
ExpPolyFamily random_orthogonal_family(const Levi& m, std::mt19937_64& rng, int range = 3);
// Sum of terms random polynomial(l) * random orthogonal family.
ExpPolyFamily random_family(const Levi& m, std::mt19937_64& rng, int terms = 2);

// c_L^Q for L containing M and Q in F(L). Evaluated at two generic points; throws if they differ.
Surd cM_limit(const ExpPolyFamily& f, const Levi& l, const Parabolic& q);
Surd cM(const ExpPolyFamily& f);
// cM_limit calls so far; every call compares two generic lambdas.
std::uint64_t cm_limit_calls();
// c'_Q at lambda = 0 for Q in F(M).
Surd cQprime(const ExpPolyFamily& f, const Parabolic& q);

// d_M^G(L_1, ..., L_S): 0 unless the a_M^{L_v} span a_M^G as a direct sum.
Surd dMG(const Levi& m, const std::vector<Levi>& ls);
// Section s(L_1, ..., L_S), Q_v in P(L_v); requires dMG != 0.
std::vector<Parabolic> section_s(const Levi& m, const std::vector<Levi>& ls);

struct DescentData {
  Surd d;
  std::vector<Parabolic> s;  // empty when d = 0
};
DescentData dMG_section(const Levi& m, const std::vector<Levi>& ls);

struct IdentityReport {
  Surd lhs, rhs;
  bool holds = false;
};
// (c d)_M = sum d_M^G(L1, L2) c_M^{Q1} d_M^{Q2}.
IdentityReport product_identity(const ExpPolyFamily& c, const ExpPolyFamily& d);
// (c d)_M = sum_Q c_M^Q d'_Q.
IdentityReport product_identity_prime(const ExpPolyFamily& c, const ExpPolyFamily& d);
// c_L = sum_{L'} d_M^G(L, L') c_M^{Q'}.
IdentityReport descent_identity(const ExpPolyFamily& c, const Levi& l);
// (prod_v c_v)_M = sum d_M^G((L_v)) prod_v c_{v,M}^{Q_v}.
IdentityReport splitting_identity(const std::vector<ExpPolyFamily>& fams);

}  // namespace wopkit
