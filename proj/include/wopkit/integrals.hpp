#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wopkit/weights.hpp"

namespace wopkit {

// GL_2(Q_p) evaluator for f = characteristic function of gl_2(Z_p).

class NotConvergent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NormalizationContext {
  long p = 2;
  explicit NormalizationContext(long prime);
  // vol(Z_p) = 1; vol(GL_n(Z_p)) = prod_{i=1..n} (1 - p^{-i}).
  Rat vol_K(int n = 2) const;
  // vol(T(Z_p)) with T the diagonal torus of GL_2.
  Rat vol_torus_K() const;
  // gamma^G(B): dg = gamma dm dn dk with dk of total mass vol(K).
  Rat gamma_borel() const;
  // gamma^G(B) vol(K): density of T\G and of Z N\G against dn dk / dm dk, dk of mass 1.
  Rat quotient_constant() const;
  double ell() const;  // l = log p
};

struct TruncationSpec {
  int depth = 12;  // largest valuation radius enumerated
  // Rejects depth < 1; reads WOPKIT_DEPTH when depth is not given.
  static TruncationSpec from_env(int fallback = 12);
  void validate() const;
};

// Conjugacy class in gl_2(Q_p) of a split element.
// Split regular: diag(a, b), a != b, induced from itself on the torus.
// Scalar: y + E_12, the orbit induced from diag(y, y) on the torus (y = 0: regular nilpotent).
struct Gl2Orbit {
  enum class Kind { SplitRegular, ScalarInduced } kind = Kind::ScalarInduced;
  Rat a, b;  // for ScalarInduced, a = b = y
  static Gl2Orbit split(const Rat& a, const Rat& b);
  static Gl2Orbit scalar(const Rat& y);
  // "nilpotent", "scalar:y", "split:a,b".
  static Gl2Orbit parse(const std::string& s);
  std::string to_string() const;
};

// |exact - value| <= tail once l is set to log p; both exact in l.
struct Approx {
  Surd value;
  Surd tail;
};
double numeric(const Surd& s, const NormalizationContext& ctx);

struct EvalOptions {
  // Same integral through random shell representatives, random k in K on the right
  // and f replaced by f o Ad(k0) for a random k0 in K.
  bool randomize = false;
  std::uint64_t seed = 1;
  // Standard representative replaced by [[y, t], [0, y]] (scalar orbits only).
  Rat t = Rat(1);
};

// weighted = false: J_G^G(X, f). weighted = true: J_T^G(X, f) with the torus weight
// (the weight v_T on T\G for split regular X, v_{T,X}^G from R_P for scalar orbits).
Approx orbital_integral_gl2(const Gl2Orbit& x, bool weighted, const TruncationSpec& trunc,
                            const NormalizationContext& ctx, const EvalOptions& opt = {});
// J_T^Q(X, f) for Q in F(T); Q = G is the weighted case, Q in P(T) has weight 1.
Approx orbital_integral_gl2(const Gl2Orbit& x, const Parabolic& q, const TruncationSpec& trunc,
                            const NormalizationContext& ctx, const EvalOptions& opt = {});

// r_T^G(A, Y) for Y = diag(y1, y2) and A = diag(a1, a2), through rho and r_family.
Surd r_torus_gl2(const Rat& y1, const Rat& y2, const Rat& a1, const Rat& a2,
                 const NormalizationContext& ctx);

struct LimitReport {
  Gl2Orbit orbit;
  std::vector<int> ks;         // val(alpha(A_k)) = k
  std::vector<Surd> sequence;  // sum_L r_T^L(A_k) J_L^G(A_k + Y)
  double ratio = 0;            // last measured successive-difference ratio
  Approx extrapolated;
  Approx direct;               // weighted integral of the orbit itself
  Approx unweighted_limit;     // J_G^G(A_k + Y) at the last k
  Approx unweighted_direct;    // J_G^G(Ind(Y))
  double gap = 0, bound = 0;
  bool holds = false;
};
// Orbit o = diag(y1, y2) on the torus; A_k = diag(p^k, 0), k = depth-4..depth-1.
LimitReport arthur_limit_check(const Rat& y1, const Rat& y2, const TruncationSpec& trunc,
                               const NormalizationContext& ctx);

struct HomogeneityReport {
  Rat t;
  Approx lhs;      // J_T^G(0, f)_t
  Approx j1, jgg;  // J_T^G(0, f)_1 and J_G^G(Ind(0), f)
  Surd kappa;      // v(diag(t,1) h) - v(h) = kappa log|t|, from the weights
  Approx rhs;      // |t|^{-1} J_1 + kappa |t|^{-1} log|t| J_G^G
  Surd kappa_isolated;  // l-linear part of |t| J_t - J_1 over log|t| J_G^G (val t != 0)
  double gap = 0, bound = 0;
  bool holds = false;
};
HomogeneityReport homogeneity_check(const Rat& t, const TruncationSpec& trunc,
                                    const NormalizationContext& ctx);

struct DescentTerm {
  Levi m1;
  Surd d;
  Parabolic q;  // empty when d = 0
  Approx j;     // J_T^{Q}(Z, f)
};
struct InductionDescentReport {
  Gl2Orbit orbit;  // Ind_T^G(Z)
  Approx lhs;      // J_G^G(Ind(Z), f)
  std::vector<DescentTerm> terms;
  Approx rhs;
  double gap = 0, bound = 0;
  bool holds = false;
};
// L = Q = G, M = T, Z = diag(z1, z2).
InductionDescentReport induction_descent_check(const Rat& z1, const Rat& z2,
                                               const TruncationSpec& trunc,
                                               const NormalizationContext& ctx);

struct StabilityReport {
  Approx coarse, fine;
  double gap = 0;
  bool holds = false;  // |fine - coarse| <= coarse.tail and fine.tail <= coarse.tail
};
StabilityReport depth_stability(const Gl2Orbit& x, bool weighted, int coarse, int fine,
                                const NormalizationContext& ctx);

}  // namespace wopkit
