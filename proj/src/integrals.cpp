#include "wopkit/integrals.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

namespace wopkit {

namespace {

constexpr double kEps = 1e-9;

Surd scale(const Surd& s, const Rat& r) { return s * Surd(r); }

Surd abs_at(const Surd& s, double ell) { return s.eval(ell) < 0 ? Surd(Rat(0)) - s : s; }

Surd ell_times(const Rat& r) { return Surd(LPoly::monomial(r, 1)); }

// s / l; every coefficient must vanish at l = 0.
Surd divide_by_ell(const Surd& s) {
  Surd out;
  for (auto& [r, c] : s.terms()) {
    if (c.coeff(0) != 0) throw std::invalid_argument("not divisible by l");
    std::vector<Rat> v(c.c.begin() + 1, c.c.end());
    out = out + Surd(LPoly(v)) * Surd::sqrt_of(Rat(r));
  }
  return out;
}

bool integral(const MatQ& m, long p) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (m(i) != 0 && valuation(m(i), p) < 0) return false;
  return true;
}

bool in_Zp(const Rat& x, long p) { return x == 0 || valuation(x, p) >= 0; }

MatQ diag2(const Rat& a, const Rat& b) {
  MatQ d = MatQ::Zero(2, 2);
  d(0, 0) = a;
  d(1, 1) = b;
  return d;
}

Rat random_unit(std::mt19937_64& rng, long p) {
  std::uniform_int_distribution<long> d(1, p * p * p);
  for (;;) {
    long u = d(rng);
    if (u % p != 0) return Rat(rng() % 2 ? u : -u);
  }
}

// sum_{m > d} m x^m with x = 1/p.
Rat tail_m_sum(long p, int d) {
  Rat x = Rat(1) / Rat(p);
  Rat xd1 = rat_pow(p, -(d + 1));
  return xd1 * (Rat(d + 1) - Rat(d) * x) / ((1 - x) * (1 - x));
}

struct Integrand {
  const Gl2Orbit& x;
  const Parabolic* q;  // null: unweighted
  const NormalizationContext& ctx;
  const EvalOptions& opt;
  std::mt19937_64 rng;
  MatQ k0, k0inv;
  Levi torus = torus_levi(2);

  Integrand(const Gl2Orbit& xx, const Parabolic* qq, const NormalizationContext& c,
            const EvalOptions& o)
      : x(xx), q(qq), ctx(c), opt(o), rng(o.seed) {
    k0 = opt.randomize ? random_K(2, ctx.p, rng) : MatQ::Identity(2, 2);
    k0inv = exact_inverse<Rat>(k0);
  }

  MatQ right_k() { return opt.randomize ? random_K(2, ctx.p, rng) : MatQ::Identity(2, 2); }

  bool f_at(const MatQ& xrep, const MatQ& g) {
    MatQ y = exact_inverse<Rat>(g) * xrep * g;
    return integral(k0 * y * k0inv, ctx.p);
  }
};

Approx split_regular(const Gl2Orbit& x, const Parabolic* q, const TruncationSpec& trunc,
                     const NormalizationContext& ctx, const EvalOptions& opt) {
  const long p = ctx.p;
  if (!in_Zp(x.a, p) || !in_Zp(x.b, p)) return {};
  MatQ xrep = diag2(x.a, x.b);
  const Rat dhalf = weyl_discriminant_val(xrep, p);
  const Rat c = ctx.quotient_constant() * rat_pow(p, -static_cast<long>(dhalf));
  Integrand in(x, q, ctx, opt);
  Surd sum;
  bool last_supported = false;
  // j = 0 is the shell Z_p of volume 1; j >= 1 has val x = -j and volume p^j (1 - 1/p).
  for (int j = 0; j <= trunc.depth; ++j) {
    Rat xx = j == 0 ? Rat(opt.randomize ? static_cast<long>(in.rng() % 97) : 0)
                    : rat_pow(p, -j) * (opt.randomize ? random_unit(in.rng, p) : Rat(1));
    MatQ n = MatQ::Identity(2, 2);
    n(0, 1) = xx;
    MatQ g = n * in.right_k();
    if (opt.randomize) {
      std::uniform_int_distribution<int> e(-3, 3);
      g = diag2(random_unit(in.rng, p) * rat_pow(p, e(in.rng)),
                random_unit(in.rng, p) * rat_pow(p, e(in.rng))) * g;
    }
    last_supported = in.f_at(xrep, g);
    if (!last_supported) continue;
    Rat vol = j == 0 ? Rat(1) : rat_pow(p, j) * (1 - Rat(1) / Rat(p));
    Surd w = q ? cM_limit(v_family_of(in.torus, g, p), in.torus, *q) : Surd(Rat(1));
    sum = sum + scale(w, vol);
  }
  // The support in x is {val(x (a - b)) >= 0}: nothing beyond the first empty shell.
  if (last_supported) throw std::invalid_argument("depth must exceed val(a - b)");
  return {scale(sum, c), Surd()};
}

Approx scalar_induced(const Gl2Orbit& x, const Parabolic* q, const TruncationSpec& trunc,
                      const NormalizationContext& ctx, const EvalOptions& opt) {
  const long p = ctx.p;
  if (!in_Zp(x.a, p)) return {};
  if (opt.t == 0) throw std::invalid_argument("t must be nonzero");
  const Rat y = x.a;
  OrbitDatum datum = make_orbit(p, {OrbitBlock{Poly::linear(y), {2}}});
  MatQ xrep = standard_representative(datum);
  xrep(0, 1) = opt.t;
  const Rat dhalf = weyl_discriminant_val(xrep, p);
  const Rat c = ctx.quotient_constant() * rat_pow(p, -static_cast<long>(dhalf));
  Integrand in(x, q, ctx, opt);
  WeightQuery wq{datum, richardson_levi(datum), MatQ()};
  const int m0 = -static_cast<int>(valuation(opt.t, p));
  Surd sum, gamma;
  double gamma_num = 0;
  // Z N \ G = {diag(1, s)} x K; the shell val s = m has volume (1 - 1/p) and
  // modular factor delta_B(diag(1, s))^{-1} = p^{-m}.
  for (int m = std::min(m0, 0); m <= trunc.depth; ++m) {
    Rat s = rat_pow(p, m) * (opt.randomize ? random_unit(in.rng, p) : Rat(1));
    MatQ g = diag2(1, s) * in.right_k();
    MatQ h = MatQ::Identity(2, 2);
    if (opt.randomize) {
      // Left factor in G_X = Z N.
      std::uniform_int_distribution<int> e(-3, 3);
      MatQ nn = MatQ::Identity(2, 2);
      nn(0, 1) = random_unit(in.rng, p) * rat_pow(p, e(in.rng));
      h = nn * random_unit(in.rng, p) * rat_pow(p, e(in.rng));
    }
    MatQ hg = h * g;
    if (!in.f_at(xrep, hg)) continue;
    Rat vol = (1 - Rat(1) / Rat(p)) * rat_pow(p, -m);
    Surd w(Rat(1));
    if (q) {
      wq.g = hg;
      w = weight_vLXQ(wq, wq.m_r, *q);
      if (m != 0) {
        double r = std::fabs(w.eval(ctx.ell()) / m);
        if (r > gamma_num) {
          gamma_num = r;
          gamma = scale(abs_at(w, ctx.ell()), Rat(1) / Rat(std::abs(m)));
        }
      }
    }
    sum = sum + scale(w, vol);
  }
  Approx out;
  out.value = scale(sum, c);
  const Rat base = c * (1 - Rat(1) / Rat(p));
  if (q) {
    out.tail = scale(gamma, base * tail_m_sum(p, trunc.depth));
  } else {
    out.tail = Surd(c * rat_pow(p, -(trunc.depth + 1)));
  }
  return out;
}

// r_T^G(A, Y) from rho on the torus orbit of Y.
struct TorusR {
  LeviOrbit o;
  RhoTable rho;
};

TorusR torus_r(const Rat& y1, const Rat& y2, long p) {
  auto one = [p](const Rat& y) { return make_orbit(p, {OrbitBlock{Poly::linear(y), {1}}}); };
  TorusR t;
  t.o = make_levi_orbit(torus_levi(2), {one(y1), one(y2)});
  t.rho = rho_table(t.o);
  return t;
}

Surd r_value(const TorusR& t, const Rat& a1, const Rat& a2, long p) {
  Levi m = torus_levi(2);
  return cM_limit(r_family(m, t.rho, {a1, a2}, p), m, whole_group(2));
}

Gl2Orbit orbit_of(const Rat& y1, const Rat& y2) {
  return y1 == y2 ? Gl2Orbit::scalar(y1) : Gl2Orbit::split(y1, y2);
}

double tol(double a, double b) { return kEps * (1 + std::fabs(a) + std::fabs(b)); }

}  // namespace

NormalizationContext::NormalizationContext(long prime) : p(prime) { require_prime(prime); }

Rat NormalizationContext::vol_K(int n) const {
  Rat v = 1;
  for (int i = 1; i <= n; ++i) v *= 1 - rat_pow(p, -i);
  return v;
}

Rat NormalizationContext::vol_torus_K() const {
  Rat u = 1 - Rat(1) / Rat(p);
  return u * u;
}

Rat NormalizationContext::gamma_borel() const { return Rat(1) / vol_torus_K(); }

Rat NormalizationContext::quotient_constant() const { return gamma_borel() * vol_K(2); }

double NormalizationContext::ell() const { return std::log(static_cast<double>(p)); }

double numeric(const Surd& s, const NormalizationContext& ctx) { return s.eval(ctx.ell()); }

TruncationSpec TruncationSpec::from_env(int fallback) {
  TruncationSpec t;
  t.depth = fallback;
  if (const char* e = std::getenv("WOPKIT_DEPTH")) {
    try {
      t.depth = std::stoi(e);
    } catch (const std::exception&) {
      throw std::invalid_argument("WOPKIT_DEPTH is not an integer");
    }
  }
  t.validate();
  return t;
}

void TruncationSpec::validate() const {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (depth > 200) throw std::invalid_argument("depth above 200 is not supported");
}

Gl2Orbit Gl2Orbit::split(const Rat& a, const Rat& b) {
  if (a == b) throw std::invalid_argument("split regular orbit needs a != b");
  Gl2Orbit o;
  o.kind = Kind::SplitRegular;
  o.a = a;
  o.b = b;
  return o;
}

Gl2Orbit Gl2Orbit::scalar(const Rat& y) {
  Gl2Orbit o;
  o.kind = Kind::ScalarInduced;
  o.a = o.b = y;
  return o;
}

Gl2Orbit Gl2Orbit::parse(const std::string& s) {
  if (s == "nilpotent" || s == "zero") return scalar(0);
  auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown orbit: " + s);
  std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
  if (kind == "scalar") return scalar(parse_rat(rest));
  if (kind == "split") {
    auto comma = rest.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("split orbit needs a,b");
    return split(parse_rat(rest.substr(0, comma)), parse_rat(rest.substr(comma + 1)));
  }
  throw std::invalid_argument("unknown orbit kind: " + kind);
}

std::string Gl2Orbit::to_string() const {
  if (kind == Kind::SplitRegular) return "split:" + wopkit::to_string(a) + "," + wopkit::to_string(b);
  return "scalar:" + wopkit::to_string(a);
}

Approx orbital_integral_gl2(const Gl2Orbit& x, bool weighted, const TruncationSpec& trunc,
                            const NormalizationContext& ctx, const EvalOptions& opt) {
  trunc.validate();
  Parabolic g = whole_group(2);
  const Parabolic* q = weighted ? &g : nullptr;
  if (x.kind == Gl2Orbit::Kind::SplitRegular) {
    if (opt.t != 1) throw std::invalid_argument("t applies to scalar orbits only");
    return split_regular(x, q, trunc, ctx, opt);
  }
  return scalar_induced(x, q, trunc, ctx, opt);
}

Approx orbital_integral_gl2(const Gl2Orbit& x, const Parabolic& q, const TruncationSpec& trunc,
                            const NormalizationContext& ctx, const EvalOptions& opt) {
  trunc.validate();
  bool ok = false;
  for (auto& f : enumerate_F(torus_levi(2)))
    if (f == canonical_parabolic(q)) ok = true;
  if (!ok) throw std::invalid_argument("Q must contain the diagonal torus");
  Parabolic qc = canonical_parabolic(q);
  if (x.kind == Gl2Orbit::Kind::SplitRegular) {
    if (opt.t != 1) throw std::invalid_argument("t applies to scalar orbits only");
    return split_regular(x, &qc, trunc, ctx, opt);
  }
  return scalar_induced(x, &qc, trunc, ctx, opt);
}

Surd r_torus_gl2(const Rat& y1, const Rat& y2, const Rat& a1, const Rat& a2,
                 const NormalizationContext& ctx) {
  return r_value(torus_r(y1, y2, ctx.p), a1, a2, ctx.p);
}

LimitReport arthur_limit_check(const Rat& y1, const Rat& y2, const TruncationSpec& trunc,
                               const NormalizationContext& ctx) {
  trunc.validate();
  if (trunc.depth < 5) throw std::invalid_argument("limit check needs depth >= 5");
  const long p = ctx.p;
  const double ell = ctx.ell();
  LimitReport rep;
  rep.orbit = orbit_of(y1, y2);
  TorusR tr = torus_r(y1, y2, p);
  Approx jgg_last;
  for (int k = trunc.depth - 4; k < trunc.depth; ++k) {
    Rat a1 = rat_pow(p, k);
    if (y1 + a1 == y2) throw std::invalid_argument("A_k + Y is not regular");
    Gl2Orbit ak = Gl2Orbit::split(y1 + a1, y2);
    Approx jt = orbital_integral_gl2(ak, true, trunc, ctx);
    Approx jg = orbital_integral_gl2(ak, false, trunc, ctx);
    Surd r = r_value(tr, a1, 0, p);
    rep.ks.push_back(k);
    rep.sequence.push_back(jt.value + r * jg.value);
    jgg_last = jg;
  }
  const auto& s = rep.sequence;
  const size_t n = s.size();
  Surd d_last = s[n - 1] - s[n - 2], d_prev = s[n - 2] - s[n - 3];
  double dl = d_last.eval(ell), dp = d_prev.eval(ell);
  rep.ratio = std::fabs(dp) < 1e-300 ? 0.0 : dl / dp;
  if (std::fabs(dl) > 1e-300 && (rep.ratio < 0 || rep.ratio > 1.0 / static_cast<double>(p) + 1e-6))
    throw NotConvergent("limit sequence does not contract geometrically (ratio " +
                        std::to_string(rep.ratio) + ")");
  // Geometric tail with ratio 1/p: the limit is s_last + d_last / (p - 1).
  Rat inv = Rat(1) / Rat(p - 1);
  rep.extrapolated = {s[n - 1] + scale(d_last, inv), scale(abs_at(d_last, ell), inv)};
  rep.direct = orbital_integral_gl2(rep.orbit, true, trunc, ctx);
  rep.unweighted_limit = jgg_last;
  rep.unweighted_direct = orbital_integral_gl2(rep.orbit, false, trunc, ctx);
  rep.gap = std::fabs(numeric(rep.extrapolated.value - rep.direct.value, ctx));
  rep.bound = numeric(rep.extrapolated.tail + rep.direct.tail, ctx);
  double ugap = std::fabs(numeric(rep.unweighted_limit.value - rep.unweighted_direct.value, ctx));
  double ubound = numeric(rep.unweighted_limit.tail + rep.unweighted_direct.tail, ctx);
  rep.holds = rep.gap <= rep.bound + tol(rep.gap, rep.bound) && ugap <= ubound + tol(ugap, ubound);
  return rep;
}

HomogeneityReport homogeneity_check(const Rat& t, const TruncationSpec& trunc,
                                    const NormalizationContext& ctx) {
  trunc.validate();
  if (t == 0) throw std::invalid_argument("t must be nonzero");
  const long p = ctx.p;
  const double ell = ctx.ell();
  HomogeneityReport rep;
  rep.t = t;
  Gl2Orbit zero = Gl2Orbit::scalar(0);
  EvalOptions ot;
  ot.t = t;
  rep.lhs = orbital_integral_gl2(zero, true, trunc, ctx, ot);
  rep.j1 = orbital_integral_gl2(zero, true, trunc, ctx);
  rep.jgg = orbital_integral_gl2(zero, false, trunc, ctx);

  // kappa from the weight shift v(diag(p,1) h) - v(h) = kappa log|p| on sample h.
  OrbitDatum datum = make_orbit(p, {OrbitBlock{Poly::linear(0), {2}}});
  WeightQuery wq{datum, richardson_levi(datum), MatQ()};
  Parabolic g = whole_group(2);
  auto v = [&](const MatQ& h) {
    wq.g = h;
    return weight_vLXQ(wq, wq.m_r, g);
  };
  std::mt19937_64 rng(5);
  bool kappa_const = true;
  for (int i = 0; i < 6; ++i) {
    MatQ h = diag2(1, rat_pow(p, i - 2)) * random_K(2, p, rng);
    Surd diff = v(diag2(p, 1) * h) - v(h);
    Surd k = divide_by_ell(scale(diff, Rat(-1)));  // log|p| = -l
    if (i == 0)
      rep.kappa = k;
    else if (k != rep.kappa)
      kappa_const = false;
    if (t != 1 && valuation(t, p) != 0) {
      Surd dt = v(diag2(t, 1) * h) - v(h);
      Surd expect = rep.kappa * ell_times(Rat(-valuation(t, p)));
      if (dt != expect) kappa_const = false;
    }
  }

  const long tau = t == 0 ? 0 : valuation(t, p);
  const Rat abs_inv = rat_pow(p, tau);  // |t|^{-1}
  const Surd log_abs = ell_times(Rat(-tau));
  Surd coef = rep.kappa * log_abs * Surd(abs_inv);
  rep.rhs.value = scale(rep.j1.value, abs_inv) + coef * rep.jgg.value;
  rep.rhs.tail = scale(rep.j1.tail, abs_inv) + abs_at(coef, ell) * rep.jgg.tail;
  if (tau != 0) {
    Surd num = scale(rep.lhs.value, rat_pow(p, -tau)) - rep.j1.value;
    Rat jgg = rep.jgg.value.as_poly().coeff(0);
    rep.kappa_isolated = scale(divide_by_ell(num), Rat(1) / (Rat(-tau) * jgg));
  }
  rep.gap = std::fabs(numeric(rep.lhs.value - rep.rhs.value, ctx));
  rep.bound = numeric(rep.lhs.tail + rep.rhs.tail, ctx);
  rep.holds = kappa_const && rep.gap <= rep.bound + tol(rep.gap, rep.bound);
  return rep;
}

InductionDescentReport induction_descent_check(const Rat& z1, const Rat& z2,
                                               const TruncationSpec& trunc,
                                               const NormalizationContext& ctx) {
  trunc.validate();
  InductionDescentReport rep;
  rep.orbit = orbit_of(z1, z2);
  rep.lhs = orbital_integral_gl2(rep.orbit, false, trunc, ctx);
  Levi t = torus_levi(2), g = full_levi(2);
  for (auto& m1 : enumerate_L(t)) {
    DescentTerm term;
    term.m1 = m1;
    auto dd = dMG_section(t, {g, m1});
    term.d = dd.d;
    if (!dd.d.is_zero()) {
      term.q = dd.s.at(1);
      term.j = orbital_integral_gl2(rep.orbit, term.q, trunc, ctx);
      rep.rhs.value = rep.rhs.value + term.d * term.j.value;
      rep.rhs.tail = rep.rhs.tail + abs_at(term.d, ctx.ell()) * term.j.tail;
    }
    rep.terms.push_back(term);
  }
  rep.gap = std::fabs(numeric(rep.lhs.value - rep.rhs.value, ctx));
  rep.bound = numeric(rep.lhs.tail + rep.rhs.tail, ctx);
  rep.holds = rep.gap <= rep.bound + tol(rep.gap, rep.bound);
  return rep;
}

StabilityReport depth_stability(const Gl2Orbit& x, bool weighted, int coarse, int fine,
                                const NormalizationContext& ctx) {
  if (fine <= coarse) throw std::invalid_argument("fine depth must exceed coarse depth");
  StabilityReport rep;
  rep.coarse = orbital_integral_gl2(x, weighted, TruncationSpec{coarse}, ctx);
  rep.fine = orbital_integral_gl2(x, weighted, TruncationSpec{fine}, ctx);
  rep.gap = std::fabs(numeric(rep.fine.value - rep.coarse.value, ctx));
  double tc = numeric(rep.coarse.tail, ctx), tf = numeric(rep.fine.tail, ctx);
  bool tighter = tc == 0 ? tf == 0 : tf < tc;
  rep.holds = tighter && rep.gap <= tc + tol(rep.gap, tc);
  return rep;
}

}  // namespace wopkit
