#include "wopkit/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "wopkit/integrals.hpp"
#include "wopkit/verify.hpp"

namespace wopkit {

// Conversions

Json rat_to_json(const Rat& x) { return to_string(x); }

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) {
    try {
      return parse_rat(j.get<std::string>());
    } catch (const std::exception&) {
      throw SchemaError("not a rational: " + j.dump());
    }
  }
  throw SchemaError("expected a rational string or integer, got " + j.dump());
}

Json mat_to_json(const MatQ& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(rat_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

MatQ mat_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("matrix must be a nonempty list of rows");
  const auto n = j.size();
  MatQ m(n, n);
  for (size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) throw SchemaError("matrix must be square");
    for (size_t k = 0; k < n; ++k) m(i, k) = rat_from_json(j[i][k]);
  }
  return m;
}

Json vec_to_json(const VecQ& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(rat_to_json(v(i)));
  return out;
}

namespace {

Json poly_to_json(const Poly& f) {
  Json out = Json::array();
  for (auto& c : f.c) out.push_back(rat_to_json(c));
  return out;
}

Poly poly_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("polynomial must be a coefficient list");
  std::vector<Rat> c;
  for (auto& x : j) c.push_back(rat_from_json(x));
  return Poly(c);
}

template <typename T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("bad type for field '") + key + "'");
  }
}

Partition partition_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("partition must be a nonempty list");
  Partition lam;
  for (auto& x : j) {
    if (!x.is_number_integer() || x.get<int>() <= 0) throw SchemaError("partition parts must be positive");
    lam.push_back(x.get<int>());
  }
  return lam;
}

std::vector<std::vector<int>> index_lists(const Json& j) {
  const Json& src = j.is_object() ? j.at("flag") : j;
  try {
    return src.get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError("expected a list of index lists, got " + src.dump());
  }
}

std::vector<int> sizes_of(const std::vector<std::vector<int>>& blocks) {
  std::vector<int> s;
  for (auto& b : blocks) s.push_back(static_cast<int>(b.size()));
  return s;
}

}  // namespace

Json orbit_to_json(const OrbitDatum& d) {
  Json blocks = Json::array();
  for (auto& b : d.blocks) blocks.push_back({{"poly", poly_to_json(b.poly)}, {"partition", b.partition}});
  return {{"p", d.p}, {"n", d.n}, {"blocks", blocks}};
}

OrbitDatum orbit_from_json(const Json& j, long p) {
  if (!j.is_object()) throw SchemaError("orbit must be an object");
  if (j.contains("p")) p = get_field<long>(j, "p");
  OrbitDatum d;
  if (j.contains("nilpotent")) {
    d = nilpotent_orbit(p, partition_from_json(j.at("nilpotent")));
  } else if (j.contains("zero")) {
    d = zero_orbit(p, get_field<int>(j, "zero"));
  } else if (j.contains("blocks")) {
    std::vector<OrbitBlock> blocks;
    for (auto& b : j.at("blocks"))
      blocks.push_back({poly_from_json(b.at("poly")), partition_from_json(b.at("partition"))});
    d = make_orbit(p, blocks);
  } else {
    throw SchemaError("orbit needs one of 'blocks', 'nilpotent', 'zero'");
  }
  if (j.contains("n") && get_field<int>(j, "n") != d.n) throw SchemaError("orbit size disagrees with 'n'");
  return d;
}

Json parabolic_to_json(const Parabolic& p) { return {{"flag", p}, {"sizes", sizes_of(p)}}; }

Parabolic parabolic_from_json(const Json& j, int n) {
  Parabolic p = canonical_parabolic(index_lists(j));
  try {
    validate_levi(p, n);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("bad parabolic: ") + e.what());
  }
  return p;
}

Levi levi_from_json(const Json& j, int n) {
  Levi m = index_lists(j);
  try {
    validate_levi(m, n);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("bad Levi: ") + e.what());
  }
  return canonical_levi(m);
}

Json surd_to_json(const Surd& s, long p) {
  Json terms = Json::array();
  for (auto& [r, c] : s.terms()) terms.push_back({{"sqrt", r.str()}, {"poly_in_l", poly_to_json(c)}});
  std::ostringstream dec;
  dec << std::setprecision(15) << s.eval(std::log(static_cast<double>(p)));
  return {{"exact", to_string(s)}, {"decimal", dec.str()}, {"terms", terms}};
}

Json family_to_json(const ExpPolyFamily& f) {
  Json c = Json::array();
  for (auto& [par, terms] : f.c) {
    Json ts = Json::array();
    for (auto& t : terms) ts.push_back({{"coeff_in_l", poly_to_json(t.coeff)}, {"y", vec_to_json(t.y)}});
    c.push_back({{"parabolic", parabolic_to_json(par)}, {"terms", ts}});
  }
  return {{"m", f.m}, {"n", f.n}, {"c", c}};
}

// Dispatch

namespace {

struct Payload {
  std::string inline_json;
  std::string path;
  Json get() const {
    std::string text = inline_json;
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw SchemaError("cannot read " + path);
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    if (text.empty()) throw SchemaError("no payload: pass --json or --input");
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
  }
};

long prime_of(const Json& j) {
  long p = get_field<long>(j, "p");
  if (!is_prime(p)) throw SchemaError("p must be prime");
  return p;
}

OrbitDatum orbit_field(const Json& j, long p, const char* key = "orbit") {
  if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  return orbit_from_json(j.at(key), p);
}

Levi richardson_field(const Json& j, const OrbitDatum& x) {
  return j.contains("m_r") ? levi_from_json(j.at("m_r"), x.n) : canonical_levi(richardson_levi(x));
}

Json induce(const Json& j) {
  long p = prime_of(j);
  auto blocks = get_field<Json>(j, "levi");
  int n = 0;
  for (auto& b : blocks) n += static_cast<int>(b.size());
  Levi m = index_lists(blocks);
  try {
    validate_levi(m, n);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("bad Levi: ") + e.what());
  }
  std::vector<OrbitDatum> orbits;
  if (j.contains("orbits")) {
    for (auto& o : j.at("orbits")) orbits.push_back(orbit_from_json(o, p));
  } else {
    for (auto& b : m) orbits.push_back(zero_orbit(p, static_cast<int>(b.size())));
  }
  if (orbits.size() != m.size()) throw SchemaError("one orbit per Levi block required");
  OrbitDatum x = induce_orbit(m, orbits);
  Json out = {{"orbit", orbit_to_json(x)},
              {"codim", orbit_codim(x)},
              {"levi_codim", orbit_codim(orbits, m)}};
  if (x.is_nilpotent()) out["partition"] = x.blocks.at(0).partition;
  return out;
}

Json standard_rep(const Json& j) {
  OrbitDatum x = orbit_field(j, prime_of(j));
  return {{"orbit", orbit_to_json(x)}, {"matrix", mat_to_json(standard_representative(x))}};
}

Json richardson(const Json& j) {
  OrbitDatum x = orbit_field(j, prime_of(j));
  Json set = Json::array(), levis = Json::array();
  for (auto& q : richardson_set(x)) set.push_back(parabolic_to_json(q));
  for (auto& m : richardson_levis(x)) levis.push_back(parabolic_to_json(m));
  Levi mr = canonical_levi(richardson_levi(x));
  return {{"orbit", orbit_to_json(x)},
          {"richardson_set", set},
          {"richardson_levis", levis},
          {"m_r", parabolic_to_json(mr)},
          {"r_fiber_sizes", r_fiber_sizes(x, mr)}};
}

Json ls_map_cmd(const Json& j) {
  OrbitDatum x = orbit_field(j, prime_of(j));
  Levi mr = richardson_field(j, x);
  Parabolic q = parabolic_from_json(get_field<Json>(j, "q"), x.n);
  Json out = {{"q", parabolic_to_json(q)}, {"ls", parabolic_to_json(ls_map(x, mr, q))}};
  if (levi_of(q) == mr) out["r"] = parabolic_to_json(r_map(x, mr, q));
  return out;
}

Json wp(const Json& j) {
  OrbitDatum x = orbit_field(j, prime_of(j));
  Levi mr = richardson_field(j, x);
  Parabolic q = parabolic_from_json(get_field<Json>(j, "parabolic"), x.n);
  Permutation w = w_P(x, mr, q);
  return {{"parabolic", parabolic_to_json(q)},
          {"w", w},
          {"w_inverse_P", parabolic_to_json(conj_inverse(w, q))}};
}

Json hp(const Json& j) {
  long p = prime_of(j);
  MatQ g = mat_from_json(get_field<Json>(j, "g"));
  Parabolic q = parabolic_from_json(get_field<Json>(j, "parabolic"), static_cast<int>(g.rows()));
  Iwasawa d = iwasawa_decompose(g, q, p);
  return {{"H_P", vec_to_json(iwasawa_HP(g, q, p))},
          {"p_part", mat_to_json(d.p_part)},
          {"k_part", mat_to_json(d.k_part)}};
}

WeightQuery weight_query(const Json& j) {
  WeightQuery q;
  q.x = orbit_field(j, prime_of(j));
  q.m_r = richardson_field(j, q.x);
  q.g = j.contains("g") ? mat_from_json(j.at("g")) : MatQ(MatQ::Identity(q.x.n, q.x.n));
  if (q.g.rows() != q.x.n) throw SchemaError("g has the wrong size");
  validate_query(q);
  return q;
}

Json rp(const Json& j) {
  WeightQuery q = weight_query(j);
  Parabolic par = parabolic_from_json(get_field<Json>(j, "parabolic"), q.x.n);
  return {{"parabolic", parabolic_to_json(par)}, {"R_P", vec_to_json(RP(q, par))}};
}

Json weight(const Json& j) {
  WeightQuery q = weight_query(j);
  Levi l = j.contains("l") ? levi_from_json(j.at("l"), q.x.n) : q.m_r;
  Parabolic big = j.contains("q") ? parabolic_from_json(j.at("q"), q.x.n) : whole_group(q.x.n);
  Surd w = weight_vLXQ(q, l, big);
  Json out = {{"weight", surd_to_json(w, q.x.p)},
              {"family", family_to_json(v_family(q))},
              {"l", parabolic_to_json(l)},
              {"q", parabolic_to_json(big)}};
  out["weight_poly_in_l"] = w.is_poly() ? poly_to_json(w.as_poly()) : Json(nullptr);
  return out;
}

Json nsquare(const Json& j) {
  MatQ a = mat_from_json(get_field<Json>(j, "a"));
  MatQ y = mat_from_json(get_field<Json>(j, "y"));
  MatQ v = mat_from_json(get_field<Json>(j, "v"));
  Parabolic box = parabolic_from_json(get_field<Json>(j, "p_box"), static_cast<int>(a.rows()));
  return {{"n", mat_to_json(n_square(a, y, v, box))}};
}

LeviOrbit levi_orbit(const Json& j) {
  long p = prime_of(j);
  auto blocks = get_field<Json>(j, "levi");
  int n = 0;
  for (auto& b : blocks) n += static_cast<int>(b.size());
  Levi m = levi_from_json(blocks, n);
  std::vector<OrbitDatum> orbits;
  for (auto& o : get_field<Json>(j, "orbits")) orbits.push_back(orbit_from_json(o, p));
  return make_levi_orbit(index_lists(blocks), orbits);
}

Json rho_cmd(const Json& j) {
  LeviOrbit o = levi_orbit(j);
  int depth = j.contains("depth") ? get_field<int>(j, "depth") : 8;
  bool descent = j.contains("descent") && get_field<bool>(j, "descent");
  auto root = get_field<std::vector<int>>(j, "root");
  if (root.size() != 2) throw SchemaError("root must be a pair of block indices");
  RhoResult r = rho(o, root[0], root[1], depth, descent);
  Json s = Json::array();
  for (auto& x : r.s) s.push_back(rat_to_json(x));
  return {{"levi", o.m}, {"root", root}, {"rho", rat_to_json(r.rho)}, {"slopes", s},
          {"stable_from", r.stable_from}, {"depth", depth}};
}

Json compare_weights(const Json& j) {
  OrbitDatum x = orbit_field(j, prime_of(j));
  Levi mr = richardson_field(j, x);
  Parabolic box = parabolic_from_json(get_field<Json>(j, "p_box"), x.n);
  MatQ v = mat_from_json(get_field<Json>(j, "v"));
  MatQ k = j.contains("k") ? mat_from_json(j.at("k")) : MatQ(MatQ::Identity(x.n, x.n));
  int depth = j.contains("depth") ? get_field<int>(j, "depth") : 16;
  CompareReport r = weight_compare(x, mr, box, v, k, depth);
  Json rows = Json::array();
  for (auto& [par, lhs] : r.lhs)
    rows.push_back({{"parabolic", parabolic_to_json(par)},
                    {"w_limit_exponent", vec_to_json(lhs)},
                    {"R_box_minus_R_P", vec_to_json(r.rhs.at(par))}});
  return {{"g", mat_to_json(r.g)}, {"rows", rows}, {"holds", r.holds}};
}

Json approx_json(const Approx& a, long p) {
  return {{"value", surd_to_json(a.value, p)}, {"tail", surd_to_json(a.tail, p)}};
}

struct Gl2Args {
  long p = 2;
  std::string orbit = "nilpotent";
  int depth = 0;
  std::string check;
  std::string t;
};

std::pair<Rat, Rat> torus_pair(const Gl2Orbit& x) { return {x.a, x.b}; }

Json eval_gl2(const Gl2Args& a) {
  NormalizationContext ctx(a.p);
  TruncationSpec tr = a.depth > 0 ? TruncationSpec{a.depth} : TruncationSpec::from_env(12);
  tr.validate();
  Gl2Orbit x = Gl2Orbit::parse(a.orbit);
  std::ostringstream ell;
  ell << std::setprecision(15) << ctx.ell();
  Json out = {{"p", a.p}, {"depth", tr.depth}, {"orbit", x.to_string()}, {"l", ell.str()},
              {"c", rat_to_json(ctx.quotient_constant())}};
  auto [y1, y2] = torus_pair(x);
  if (a.check.empty()) {
    out["unweighted"] = approx_json(orbital_integral_gl2(x, false, tr, ctx), a.p);
    out["weighted"] = approx_json(orbital_integral_gl2(x, true, tr, ctx), a.p);
  } else if (a.check == "limit") {
    LimitReport r = arthur_limit_check(y1, y2, tr, ctx);
    Json seq = Json::array();
    for (auto& s : r.sequence) seq.push_back(surd_to_json(s, a.p));
    out["check"] = {{"ks", r.ks}, {"sequence", seq}, {"extrapolated", approx_json(r.extrapolated, a.p)},
                    {"direct", approx_json(r.direct, a.p)}, {"gap", r.gap}, {"bound", r.bound},
                    {"holds", r.holds}};
  } else if (a.check == "homogeneity") {
    if (x.kind != Gl2Orbit::Kind::ScalarInduced || x.a != 0)
      throw std::invalid_argument("homogeneity applies to the nilpotent orbit");
    Rat t = a.t.empty() ? Rat(a.p) : parse_rat(a.t);
    HomogeneityReport r = homogeneity_check(t, tr, ctx);
    out["check"] = {{"t", rat_to_json(t)}, {"lhs", approx_json(r.lhs, a.p)}, {"rhs", approx_json(r.rhs, a.p)},
                    {"kappa", surd_to_json(r.kappa, a.p)},
                    {"kappa_isolated", surd_to_json(r.kappa_isolated, a.p)}, {"gap", r.gap},
                    {"bound", r.bound}, {"holds", r.holds}};
  } else if (a.check == "descent") {
    InductionDescentReport r = induction_descent_check(y1, y2, tr, ctx);
    Json terms = Json::array();
    for (auto& t : r.terms)
      terms.push_back({{"m1", t.m1}, {"d", surd_to_json(t.d, a.p)},
                       {"q", t.q.empty() ? Json(nullptr) : parabolic_to_json(t.q)},
                       {"j", approx_json(t.j, a.p)}});
    out["check"] = {{"lhs", approx_json(r.lhs, a.p)}, {"terms", terms}, {"rhs", approx_json(r.rhs, a.p)},
                    {"gap", r.gap}, {"bound", r.bound}, {"holds", r.holds}};
  } else {
    throw SchemaError("unknown check '" + a.check + "'");
  }
  return out;
}

Json selftest(const std::string& level, bool timings, bool& all_pass) {
  SuiteLevel lv = level == "full" ? SuiteLevel::Full : SuiteLevel::Quick;
  Json rows = Json::array();
  int passed = 0, failed = 0;
  for (auto& r : run_suite(lv)) {
    Json row = {{"id", r.id}, {"name", r.name}, {"checks", r.instances}, {"failures", r.failures},
                {"passed", r.passed()}};
    if (timings) row["seconds"] = r.seconds;
    rows.push_back(row);
    (r.passed() ? passed : failed) += 1;
  }
  all_pass = failed == 0;
  return {{"level", level}, {"criteria", rows}, {"passed", passed}, {"failed", failed}};
}

void flatten(const Json& j, const std::string& path, std::ostream& out) {
  if (j.is_object()) {
    for (auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out << path << "\t" << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

Json error_json(const std::string& type, const std::string& message) {
  return {{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted orbital integral toolkit for gl_n over Q_p", "wopkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  app.add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));

  Payload payload;
  std::map<std::string, std::function<Json(const Json&)>> json_cmds = {
      {"induce", induce},   {"standard-rep", standard_rep}, {"richardson", richardson},
      {"ls-map", ls_map_cmd}, {"wp", wp},                   {"hp", hp},
      {"rp", rp},           {"weight", weight},             {"nsquare", nsquare},
      {"rho", rho_cmd},     {"compare-weights", compare_weights}};
  std::map<std::string, CLI::App*> subs;
  std::string levi_sizes;
  long induce_p = 0;
  for (auto& [name, fn] : json_cmds) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--json", payload.inline_json, "inline JSON payload");
    s->add_option("--input", payload.path, "JSON payload file")->check(CLI::ExistingFile);
    subs[name] = s;
  }
  subs["induce"]->add_option("--levi-sizes", levi_sizes, "block sizes, zero orbits, e.g. 1,1");
  subs["induce"]->add_option("--p", induce_p, "prime for --levi-sizes");

  Gl2Args g;
  CLI::App* gl2 = app.add_subcommand("eval-gl2", "GL_2 orbital integrals of 1_{gl_2(Z_p)}");
  gl2->add_option("--p", g.p, "prime")->check(CLI::Range(2L, 1000000L));
  gl2->add_option("--orbit", g.orbit, "nilpotent | scalar:y | split:a,b");
  gl2->add_option("--depth", g.depth, "truncation depth (default WOPKIT_DEPTH or 12)");
  gl2->add_option("--check", g.check, "limit | homogeneity | descent")
      ->check(CLI::IsMember({"limit", "homogeneity", "descent"}));
  gl2->add_option("--t", g.t, "scaling for the homogeneity check (default p)");

  std::string level = "quick";
  bool timings = false;
  CLI::App* st = app.add_subcommand("selftest", "run the invariant suites");
  st->add_option("--level", level)->check(CLI::IsMember({"quick", "full"}));
  st->add_flag("--timings", timings, "report seconds per suite");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()).dump() << "\n" << app.help();
    return 2;
  }

  auto emit = [&](const Json& j) {
    if (format == "table") flatten(j, "", out);
    else out << j.dump(2) << "\n";
  };
  try {
    bool ok = true;
    Json result;
    if (gl2->parsed()) {
      result = eval_gl2(g);
      ok = !result.contains("check") || result["check"]["holds"].get<bool>();
    } else if (st->parsed()) {
      result = selftest(level, timings, ok);
    } else {
      for (auto& [name, s] : subs) {
        if (!s->parsed()) continue;
        if (name == "induce" && !levi_sizes.empty()) {
          std::vector<int> sizes;
          std::stringstream ss(levi_sizes);
          for (std::string tok; std::getline(ss, tok, ',');) {
            try {
              sizes.push_back(std::stoi(tok));
            } catch (const std::exception&) {
              throw SchemaError("bad --levi-sizes: " + levi_sizes);
            }
          }
          Json blocks = Json::array();
          int at = 0;
          for (int k : sizes) {
            if (k <= 0) throw SchemaError("block sizes must be positive");
            std::vector<int> b;
            for (int i = 0; i < k; ++i) b.push_back(at++);
            blocks.push_back(b);
          }
          result = induce({{"p", induce_p == 0 ? 2 : induce_p}, {"levi", blocks}});
        } else {
          result = json_cmds.at(name)(payload.get());
        }
      }
    }
    emit(result);
    return ok ? 0 : 1;
  } catch (const SchemaError& e) {
    emit(error_json("schema", e.what()));
    return 3;
  } catch (const NotRegular& e) {
    emit(error_json("not_regular", e.what()));
  } catch (const NotConvergent& e) {
    emit(error_json("not_convergent", e.what()));
  } catch (const SlopeNotStable& e) {
    emit(error_json("not_convergent", e.what()));
  } catch (const std::invalid_argument& e) {
    emit(error_json("invalid_argument", e.what()));
  } catch (const std::exception& e) {
    emit(error_json("runtime", e.what()));
  }
  return 1;
}

}  // namespace wopkit
