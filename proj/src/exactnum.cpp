#include "wopkit/exactnum.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace wopkit {

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

void require_prime(long p) {
  if (!is_prime(p)) throw std::invalid_argument("not a prime: " + std::to_string(p));
}

long valuation(const Int& x, long p) {
  if (x == 0) return kInfVal;
  Int y = boost::multiprecision::abs(x);
  long v = 0;
  const Int P(p);
  while (y % P == 0) {
    y /= P;
    ++v;
  }
  return v;
}

long valuation(const Rat& x, long p) {
  if (x == 0) return kInfVal;
  Int num = boost::multiprecision::numerator(x);
  Int den = boost::multiprecision::denominator(x);
  return valuation(num, p) - valuation(den, p);
}

long valuation(const MatQ& m, long p) {
  long v = kInfVal;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v = std::min(v, valuation(m(i, j), p));
  return v;
}

Rat rat_pow(long p, long k) {
  Int q = boost::multiprecision::pow(Int(p), static_cast<unsigned>(k < 0 ? -k : k));
  if (k >= 0) return Rat(q);
  return Rat(Int(1), q);
}

std::string to_string(const Rat& x) { return x.str(); }

Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rat(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational: " + s);
  }
}

// Poly

Poly::Poly(std::vector<Rat> coeffs) : c(std::move(coeffs)) { normalize(); }

Poly Poly::constant(const Rat& a) { return Poly(std::vector<Rat>{a}); }

Poly Poly::monomial(const Rat& a, int k) {
  std::vector<Rat> v(k + 1, Rat(0));
  v[k] = a;
  return Poly(std::move(v));
}

Poly Poly::linear(const Rat& a) { return Poly(std::vector<Rat>{-a, Rat(1)}); }

const Rat& Poly::lead() const {
  if (c.empty()) throw std::invalid_argument("leading coefficient of zero polynomial");
  return c.back();
}

Rat Poly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(c.size())) return Rat(0);
  return c[i];
}

void Poly::normalize() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
  for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
  return Poly(std::move(r));
}

Poly operator-(const Poly& a) {
  Poly r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  std::vector<Rat> r(a.c.size() + b.c.size() - 1, Rat(0));
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
  return Poly(std::move(r));
}

Poly operator*(const Rat& s, const Poly& a) {
  Poly r = a;
  for (auto& x : r.c) x *= s;
  r.normalize();
  return r;
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::invalid_argument("polynomial division by zero");
  Poly r = a;
  int db = b.degree();
  if (r.degree() < db) return {Poly(), r};
  std::vector<Rat> q(r.degree() - db + 1, Rat(0));
  while (!r.is_zero() && r.degree() >= db) {
    int k = r.degree() - db;
    Rat f = r.lead() / b.lead();
    q[k] = f;
    for (int i = 0; i <= db; ++i) r.c[i + k] -= f * b.c[i];
    r.normalize();
  }
  return {Poly(std::move(q)), r};
}

Poly monic(const Poly& a) {
  if (a.is_zero()) return a;
  return (Rat(1) / a.lead()) * a;
}

Poly poly_gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

Poly derivative(const Poly& a) {
  if (a.degree() < 1) return Poly();
  std::vector<Rat> r(a.c.size() - 1);
  for (size_t i = 1; i < a.c.size(); ++i) r[i - 1] = a.c[i] * Rat(static_cast<long>(i));
  return Poly(std::move(r));
}

Poly poly_pow(const Poly& a, int k) {
  Poly r = Poly::constant(1);
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

Rat eval(const Poly& f, const Rat& x) {
  Rat r = 0;
  for (int i = f.degree(); i >= 0; --i) r = r * x + f.c[i];
  return r;
}

MatQ eval(const Poly& f, const MatQ& x) {
  const int n = static_cast<int>(x.rows());
  MatQ r = MatQ::Zero(n, n);
  for (int i = f.degree(); i >= 0; --i) {
    r = (r * x).eval();
    for (int j = 0; j < n; ++j) r(j, j) += f.c[i];
  }
  return r;
}

Poly shift(const Poly& f, const Rat& s) {
  Poly r;
  Poly lin(std::vector<Rat>{s, Rat(1)});
  for (int i = f.degree(); i >= 0; --i) r = r * lin + Poly::constant(f.c[i]);
  return r;
}

std::string to_string(const Poly& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = f.degree(); i >= 0; --i) {
    const Rat& a = f.c[i];
    if (a == 0) continue;
    Rat m = boost::multiprecision::abs(a);
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << "-";
    if (m != 1 || i == 0) os << m.str();
    if (i > 0) os << (m != 1 ? "*T" : "T");
    if (i > 1) os << "^" << i;
    first = false;
  }
  return os.str();
}

std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& f) {
  std::vector<std::pair<Poly, int>> out;
  if (f.degree() < 1) return out;
  Poly a = monic(f);
  Poly da = derivative(a);
  Poly b = poly_gcd(a, da);
  Poly c = divmod(a, b).first;
  Poly d = divmod(da, b).first - derivative(c);
  for (int m = 1; c.degree() > 0; ++m) {
    Poly s = poly_gcd(c, d);
    if (s.degree() > 0) out.emplace_back(s, m);
    c = divmod(c, s).first;
    d = divmod(d, s).first - derivative(c);
  }
  return out;
}

Poly squarefree_part(const Poly& f) {
  Poly r = Poly::constant(1);
  for (auto& [s, m] : squarefree_decomposition(f)) r = r * s;
  return r;
}

MatQ sylvester_matrix(const Poly& f, const Poly& g) {
  const int m = f.degree(), n = g.degree();
  MatQ s = MatQ::Zero(m + n, m + n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) s(i, i + k) = f.c[m - k];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) s(n + i, i + k) = g.c[n - k];
  return s;
}

Rat resultant(const Poly& f, const Poly& g) {
  if (f.is_zero() || g.is_zero()) throw std::invalid_argument("resultant of zero polynomial");
  if (f.degree() == 0 && g.degree() == 0) return Rat(1);
  return exact_det<Rat>(sylvester_matrix(f, g));
}

Poly charpoly(const MatQ& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("charpoly: non-square matrix");
  const int n = static_cast<int>(a.rows());
  std::vector<Rat> c(n + 1, Rat(0));
  c[n] = 1;
  MatQ mk = MatQ::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    MatQ t = a * mk;
    for (int i = 0; i < n; ++i) t(i, i) += c[n - k + 1];
    mk = t;
    MatQ am = a * mk;
    c[n - k] = -am.trace() / Rat(k);
  }
  return Poly(std::move(c));
}

MatQ companion(const Poly& f) {
  Poly g = monic(f);
  const int d = g.degree();
  if (d < 1) throw std::invalid_argument("companion of constant polynomial");
  MatQ m = MatQ::Zero(d, d);
  for (int i = 1; i < d; ++i) m(i, i - 1) = 1;
  for (int i = 0; i < d; ++i) m(i, d - 1) = -g.c[i];
  return m;
}

MatQ semisimple_part(const MatQ& x) {
  Poly s = squarefree_part(charpoly(x));
  Poly ds = derivative(s);
  MatQ y = x;
  for (int it = 0; it < 64; ++it) {
    MatQ sy = eval(s, y);
    if (sy.isZero()) return y;
    y = (y - sy * exact_inverse<Rat>(eval(ds, y))).eval();
  }
  throw std::runtime_error("semisimple_part: Newton iteration did not terminate");
}

namespace {

// Matrix of g -> g*y - x*g acting on column-major vec(g).
MatQ intertwiner_system(const MatQ& x, const MatQ& y) {
  const int n = static_cast<int>(x.rows());
  MatQ s = MatQ::Zero(n * n, n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int eq = r + n * c;
      for (int k = 0; k < n; ++k) {
        s(eq, r + n * k) += y(k, c);
        s(eq, k + n * c) -= x(r, k);
      }
    }
  return s;
}

}  // namespace

int centralizer_dim(const MatQ& x) {
  const int n = static_cast<int>(x.rows());
  return n * n - exact_rank<Rat>(intertwiner_system(x, x));
}

MatQ conjugator(const MatQ& x, const MatQ& y, std::uint64_t seed) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw std::invalid_argument("conjugator: shape mismatch");
  const int n = static_cast<int>(x.rows());
  if (charpoly(x) != charpoly(y)) throw NotConjugate("characteristic polynomials differ");
  MatQ basis = exact_nullspace<Rat>(intertwiner_system(x, y));
  const int k = static_cast<int>(basis.cols());
  if (k != centralizer_dim(x) || k != centralizer_dim(y))
    throw NotConjugate("canonical forms differ");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 400; ++attempt) {
    long range = 2 + attempt / 20;
    std::uniform_int_distribution<long> dist(-range, range);
    VecQ v(n * n);
    v.setZero();
    for (int j = 0; j < k; ++j) {
      Rat a(dist(rng));
      v += a * basis.col(j);
    }
    MatQ g(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) g(r, c) = v(r + n * c);
    if (exact_det<Rat>(g) == 0) continue;
    if (g * y * exact_inverse<Rat>(g) != x) throw std::logic_error("conjugator: verification failed");
    return g;
  }
  throw NotConjugate("no invertible intertwiner found");
}

bool in_K(const MatQ& g, long p) {
  if (g.rows() != g.cols()) return false;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      if (valuation(g(i, j), p) < 0) return false;
  return valuation(exact_det<Rat>(g), p) == 0;
}

// Irreducibility over Q_p.

namespace {

using IntPoly = std::vector<Int>;

// Monic integral polynomial N^d f(T/N) with the same splitting behaviour as f.
IntPoly integral_model(const Poly& f, long) {
  Poly g = monic(f);
  const int d = g.degree();
  Int n = 1;
  for (auto& a : g.c) n = boost::multiprecision::lcm(n, boost::multiprecision::denominator(a));
  IntPoly out(d + 1);
  Int scale = 1;
  for (int i = d; i >= 0; --i) {
    out[i] = boost::multiprecision::numerator(g.c[i] * Rat(scale));
    scale *= n;
  }
  return out;
}

Int eval_int(const IntPoly& f, const Int& x) {
  Int r = 0;
  for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) r = r * x + f[i];
  return r;
}

IntPoly deriv_int(const IntPoly& f) {
  IntPoly r;
  for (size_t i = 1; i < f.size(); ++i) r.push_back(f[i] * Int(static_cast<long>(i)));
  return r;
}

bool has_root_int(const IntPoly& f, long p, int precision) {
  IntPoly df = deriv_int(f);
  struct Node {
    Int c;
    int k;
  };
  std::vector<Node> stack{{Int(0), 0}};
  const Int P(p);
  while (!stack.empty()) {
    Node nd = stack.back();
    stack.pop_back();
    Int fc = eval_int(f, nd.c);
    long vf = valuation(fc, p);
    if (vf == kInfVal) return true;
    long vd = valuation(eval_int(df, nd.c), p);
    if (vd != kInfVal && vf > 2 * vd) return true;
    if (vf < nd.k) continue;
    if (nd.k >= precision) throw std::runtime_error("cannot certify root existence at this precision");
    Int pk = boost::multiprecision::pow(P, static_cast<unsigned>(nd.k));
    for (long j = 0; j < p; ++j) stack.push_back({nd.c + Int(j) * pk, nd.k + 1});
  }
  return false;
}

// Polynomials over F_p, constant term first.
using FpPoly = std::vector<long long>;

void fp_norm(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

long long fp_inv(long long a, long long p) {
  long long r = 1, e = p - 2, b = ((a % p) + p) % p;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

FpPoly fp_mod(FpPoly a, const FpPoly& m, long long p) {
  fp_norm(a);
  const int dm = static_cast<int>(m.size()) - 1;
  long long il = fp_inv(m.back(), p);
  while (static_cast<int>(a.size()) - 1 >= dm && !a.empty()) {
    int k = static_cast<int>(a.size()) - 1 - dm;
    long long f = a.back() * il % p;
    for (int i = 0; i <= dm; ++i) a[i + k] = ((a[i + k] - f * m[i]) % p + p) % p;
    fp_norm(a);
  }
  return a;
}

FpPoly fp_mul(const FpPoly& a, const FpPoly& b, long long p) {
  if (a.empty() || b.empty()) return {};
  FpPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  fp_norm(r);
  return r;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, long long p) {
  fp_norm(a);
  fp_norm(b);
  while (!b.empty()) {
    FpPoly r = fp_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    long long il = fp_inv(a.back(), p);
    for (auto& x : a) x = x * il % p;
  }
  return a;
}

FpPoly fp_powmod(FpPoly base, long long e, const FpPoly& m, long long p) {
  FpPoly r{1};
  base = fp_mod(base, m, p);
  while (e > 0) {
    if (e & 1) r = fp_mod(fp_mul(r, base, p), m, p);
    base = fp_mod(fp_mul(base, base, p), m, p);
    e >>= 1;
  }
  return r;
}

FpPoly fp_sub(FpPoly a, const FpPoly& b, long long p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = ((a[i] - b[i]) % p + p) % p;
  fp_norm(a);
  return a;
}

FpPoly fp_div(const FpPoly& a, const FpPoly& m, long long p) {
  FpPoly r = a;
  fp_norm(r);
  const int dm = static_cast<int>(m.size()) - 1;
  if (static_cast<int>(r.size()) - 1 < dm) return {};
  FpPoly q(r.size() - dm, 0);
  long long il = fp_inv(m.back(), p);
  while (!r.empty() && static_cast<int>(r.size()) - 1 >= dm) {
    int k = static_cast<int>(r.size()) - 1 - dm;
    long long f = r.back() * il % p;
    q[k] = f;
    for (int i = 0; i <= dm; ++i) r[i + k] = ((r[i + k] - f * m[i]) % p + p) % p;
    fp_norm(r);
  }
  return q;
}

enum class ModPVerdict { Irreducible, Reducible, PowerOfIrreducible };

ModPVerdict classify_mod_p(const IntPoly& f, long p) {
  FpPoly fb(f.size());
  const Int P(p);
  for (size_t i = 0; i < f.size(); ++i) {
    Int r = f[i] % P;
    if (r < 0) r += P;
    fb[i] = r.convert_to<long long>();
  }
  fp_norm(fb);
  const int d = static_cast<int>(fb.size()) - 1;
  FpPoly x{0, 1};
  FpPoly xp = x;
  for (int i = 1; i <= d; ++i) {
    xp = fp_powmod(xp, p, fb, p);
    FpPoly g = fp_gcd(fb, fp_sub(xp, x, p), p);
    if (g.size() <= 1) continue;
    int dg = static_cast<int>(g.size()) - 1;
    if (dg > i) return ModPVerdict::Reducible;
    FpPoly rest = fb;
    int e = 0;
    while (true) {
      FpPoly r = fp_mod(rest, g, p);
      if (!r.empty()) break;
      rest = fp_div(rest, g, p);
      ++e;
    }
    if (rest.size() > 1) return ModPVerdict::Reducible;
    return e == 1 ? ModPVerdict::Irreducible : ModPVerdict::PowerOfIrreducible;
  }
  return ModPVerdict::Irreducible;
}

long gcd_long(long a, long b) {
  while (b) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

// Single Newton slope with denominator d after some shift.
bool totally_ramified_shift(const IntPoly& f, long p) {
  const int d = static_cast<int>(f.size()) - 1;
  Poly fq;
  {
    std::vector<Rat> cc;
    for (auto& a : f) cc.push_back(Rat(a));
    fq = Poly(cc);
  }
  for (long s = 0; s < p; ++s) {
    Poly h = shift(fq, Rat(s));
    long v0 = valuation(h.c[0], p);
    if (v0 == kInfVal || gcd_long(v0, d) != 1) continue;
    bool ok = true;
    for (int i = 1; i < d && ok; ++i) {
      long vi = valuation(h.c[i], p);
      // Point (i, vi) must lie on or above the segment from (0, v0) to (d, 0).
      if (vi != kInfVal && vi * d < v0 * (d - i)) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool qp_has_root(const Poly& f, long p, int precision) {
  require_prime(p);
  if (f.degree() < 1) return false;
  Poly s = squarefree_part(f);
  return has_root_int(integral_model(s, p), p, precision);
}

bool qp_irreducible(const Poly& f, long p, int precision) {
  require_prime(p);
  if (f.degree() < 1) throw std::invalid_argument("irreducibility of a constant polynomial");
  if (f.degree() == 1) return true;
  if (poly_gcd(f, derivative(f)).degree() > 0) return false;
  IntPoly g = integral_model(f, p);
  if (has_root_int(g, p, precision)) return false;
  if (f.degree() <= 3) return true;
  switch (classify_mod_p(g, p)) {
    case ModPVerdict::Irreducible:
      return true;
    case ModPVerdict::Reducible:
      return false;
    case ModPVerdict::PowerOfIrreducible:
      break;
  }
  if (totally_ramified_shift(g, p)) return true;
  throw std::runtime_error("cannot certify irreducibility of " + to_string(f) + " over Q_" +
                           std::to_string(p));
}

}  // namespace wopkit
