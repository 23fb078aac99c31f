#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <climits>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wopkit {

using Int = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                          boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                          boost::multiprecision::et_off>;
using MatQ = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using VecQ = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;

// Valuation of zero.
constexpr long kInfVal = LONG_MAX;

class NotConjugate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool is_prime(long p);
void require_prime(long p);

long valuation(const Int& x, long p);
long valuation(const Rat& x, long p);
// Minimum entry valuation of a matrix.
long valuation(const MatQ& m, long p);
// p^k for any integer k.
Rat rat_pow(long p, long k);
std::string to_string(const Rat& x);
Rat parse_rat(const std::string& s);

// Exact Gaussian elimination over a field.
template <typename Scalar>
using DMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Reduced row echelon form; returns pivot columns.
template <typename Scalar>
std::vector<int> rref_inplace(DMat<Scalar>& a) {
  std::vector<int> piv;
  int r = 0;
  for (int c = 0; c < a.cols() && r < a.rows(); ++c) {
    int s = -1;
    for (int i = r; i < a.rows(); ++i)
      if (a(i, c) != 0) {
        s = i;
        break;
      }
    if (s < 0) continue;
    a.row(r).swap(a.row(s));
    Scalar inv = Scalar(1) / a(r, c);
    for (int j = c; j < a.cols(); ++j) a(r, j) *= inv;
    for (int i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      Scalar f = a(i, c);
      for (int j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

template <typename Scalar>
int exact_rank(DMat<Scalar> a) {
  return static_cast<int>(rref_inplace(a).size());
}

template <typename Scalar>
Scalar exact_det(DMat<Scalar> a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("det: non-square matrix");
  const int n = static_cast<int>(a.rows());
  Scalar d = 1;
  for (int c = 0; c < n; ++c) {
    int s = -1;
    for (int i = c; i < n; ++i)
      if (a(i, c) != 0) {
        s = i;
        break;
      }
    if (s < 0) return Scalar(0);
    if (s != c) {
      a.row(c).swap(a.row(s));
      d = -d;
    }
    d *= a(c, c);
    for (int i = c + 1; i < n; ++i) {
      if (a(i, c) == 0) continue;
      Scalar f = a(i, c) / a(c, c);
      for (int j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return d;
}

template <typename Scalar>
DMat<Scalar> exact_inverse(const DMat<Scalar>& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: non-square matrix");
  const int n = static_cast<int>(a.rows());
  DMat<Scalar> aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n) = DMat<Scalar>::Identity(n, n);
  auto piv = rref_inplace(aug);
  if (static_cast<int>(piv.size()) < n || piv.back() >= n)
    throw std::invalid_argument("inverse: singular matrix");
  return aug.rightCols(n);
}

// Columns form a basis of the right kernel.
template <typename Scalar>
DMat<Scalar> exact_nullspace(DMat<Scalar> a) {
  const int m = static_cast<int>(a.cols());
  auto piv = rref_inplace(a);
  std::vector<bool> is_piv(m, false);
  for (int c : piv) is_piv[c] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < m; ++c)
    if (!is_piv[c]) free_cols.push_back(c);
  DMat<Scalar> ker = DMat<Scalar>::Zero(m, static_cast<int>(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    int f = free_cols[k];
    ker(f, k) = 1;
    for (size_t r = 0; r < piv.size(); ++r) ker(piv[r], k) = -a(r, f);
  }
  return ker;
}

// Unique solution of a x = b; throws if none or not unique.
template <typename Scalar>
DMat<Scalar> exact_solve(const DMat<Scalar>& a, const DMat<Scalar>& b) {
  const int n = static_cast<int>(a.cols());
  DMat<Scalar> aug(a.rows(), n + b.cols());
  aug.leftCols(n) = a;
  aug.rightCols(b.cols()) = b;
  auto piv = rref_inplace(aug);
  if (!piv.empty() && piv.back() >= n) throw std::invalid_argument("solve: inconsistent system");
  if (static_cast<int>(piv.size()) != n)
    throw std::invalid_argument("solve: system not uniquely solvable");
  for (int r = n; r < aug.rows(); ++r)
    for (int j = n; j < aug.cols(); ++j)
      if (aug(r, j) != 0) throw std::invalid_argument("solve: inconsistent system");
  return aug.topRightCorner(n, b.cols());
}

// Univariate polynomial over Q, constant term first.
struct Poly {
  std::vector<Rat> c;

  Poly() = default;
  explicit Poly(std::vector<Rat> coeffs);
  static Poly constant(const Rat& a);
  static Poly monomial(const Rat& a, int k);
  // T - a
  static Poly linear(const Rat& a);

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  const Rat& lead() const;
  Rat coeff(int i) const;
  void normalize();
  bool operator==(const Poly& o) const { return c == o.c; }
  bool operator!=(const Poly& o) const { return c != o.c; }
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator-(const Poly& a);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(const Rat& s, const Poly& a);
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly poly_gcd(Poly a, Poly b);  // monic
Poly monic(const Poly& a);
Poly derivative(const Poly& a);
Poly poly_pow(const Poly& a, int k);
Rat eval(const Poly& f, const Rat& x);
MatQ eval(const Poly& f, const MatQ& x);
// f(T + s)
Poly shift(const Poly& f, const Rat& s);
std::string to_string(const Poly& f);

// Yun decomposition: pairs (s_m, m) with f = lc * prod s_m^m, s_m squarefree coprime.
std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& f);
Poly squarefree_part(const Poly& f);

// Determinant of the Sylvester matrix, f rows first.
Rat resultant(const Poly& f, const Poly& g);
MatQ sylvester_matrix(const Poly& f, const Poly& g);

// Monic characteristic polynomial det(T - m).
Poly charpoly(const MatQ& m);
MatQ companion(const Poly& f);
MatQ semisimple_part(const MatQ& x);
int centralizer_dim(const MatQ& x);
// Returns g with g * y * g^{-1} = x; throws NotConjugate.
MatQ conjugator(const MatQ& x, const MatQ& y, std::uint64_t seed = 7);

// Membership in GL_n(Z_p).
bool in_K(const MatQ& g, long p);

// True if irreducible over Q_p, false if reducible; throws if undecided.
bool qp_irreducible(const Poly& f, long p, int precision = 64);
// True if f has a root in Q_p.
bool qp_has_root(const Poly& f, long p, int precision = 64);

}  // namespace wopkit
