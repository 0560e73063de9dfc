#pragma once

// Scenario files: one JSON object describing a sequence and the parameters of each
// command. Field reference in docs/scenario_schema.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fatou/factorize.hpp"
#include "fatou/families.hpp"
#include "fatou/io.hpp"

namespace fatou {

struct SolverParams {
  std::optional<int> k0;  // default: least k0 of the declared bounds
  std::size_t horizon = 32;
  double tol = 1e-9;
  std::string normalize = "auto";  // auto | always | never
};

struct DynamicsParams {
  double R_cap = 0x1.0p40;
  double rTilde = 0.0;  // 0: certify from the sequence
  std::size_t maxiter = 200;
  std::size_t samples = 2000;
  std::size_t steps = 16;
  double tol = 1e-9;
  std::vector<std::size_t> periods{1, 2, 3};
};

struct Scenario {
  int schema = 1;
  int k = 0;
  std::string family;
  std::uint64_t seed = 1;
  std::optional<std::size_t> period;
  std::optional<AttractionBounds> bounds;
  AutoSequence seq;
  std::optional<WeakShiftFamily> weak;         // weakshift / perturbed
  std::optional<PerturbedFamily> perturbed;    // perturbed
  SolverParams solver;
  DynamicsParams dynamics;
  std::optional<RenderWindow> render;
  std::vector<Point> points;
  std::string out = "out";
  unsigned threads = 0;
  json source;
};

// Command-line values; each one set replaces the corresponding file field.
struct ScenarioOverrides {
  std::optional<double> tol;
  std::optional<std::size_t> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
};

namespace detail {

inline std::string at(const std::string& p, std::size_t i) { return p + "[" + std::to_string(i) + "]"; }

inline std::size_t count(const json& v, const std::string& path, std::size_t lo = 0) {
  long long x = io::integer(v, path);
  if (x < static_cast<long long>(lo)) throw schema_error(path, "must be >= " + std::to_string(lo));
  return static_cast<std::size_t>(x);
}

inline double positive(const json& v, const std::string& path) {
  double x = io::number(v, path);
  if (!(x > 0.0)) throw schema_error(path, "must be positive");
  return x;
}

inline const json& elements(const json& coeffs, const std::string& path) {
  const json& e = io::field(coeffs, "elements", path);
  if (!e.is_array() || e.empty()) throw schema_error(path + ".elements", "expected a non-empty list");
  return e;
}

inline AutoSequence cyclic(const std::vector<Automorphism>& elems, std::optional<std::size_t> period,
                    std::optional<AttractionBounds> b, const std::string& path) {
  std::size_t P = period.value_or(elems.size());
  if (P > elems.size()) throw schema_error(path, "period exceeds the number of listed elements");
  std::vector<Automorphism> used(elems.begin(), elems.begin() + static_cast<std::ptrdiff_t>(P));
  return AutoSequence::periodic(std::move(used), b);
}

inline WeakShift weak_element(const json& e, const std::string& path, int k, int dtilde) {
  cplx a = io::complex(io::field(e, "a", path), path + ".a");
  Polynomial p = io::polynomial(io::field(e, "p", path), path + ".p", k, dtilde);
  try {
    return WeakShift(k, a, p, dtilde);
  } catch (const error& err) {
    throw schema_error(path, err.what());
  }
}

inline WeakShiftFamily weak_family(const json& c, const std::string& path, int k, std::uint64_t seed,
                                   std::optional<std::size_t> period) {
  long long dt = io::integer(io::field(c, "dtilde", path), path + ".dtilde");
  if (dt < 1) throw schema_error(path + ".dtilde", "must be >= 1");
  const int dtilde = static_cast<int>(dt);
  WeakShiftFamily fam;
  if (c.contains("random")) {
    const std::string rp = path + ".random";
    const json& r = c["random"];
    const json& a = io::field(r, "a", rp);
    if (!a.is_array() || a.size() != 2) throw schema_error(rp + ".a", "expected [lo, hi]");
    double lo = io::number(a[0], rp + ".a[0]"), hi = io::number(a[1], rp + ".a[1]");
    if (!(0.0 < lo && lo <= hi)) throw schema_error(rp + ".a", "need 0 < lo <= hi");
    double cb = positive(io::field(r, "coeff", rp), rp + ".coeff");
    fam = random_weak_shift_family(k, dtilde, lo, hi, cb, seed);
    if (period) {
      auto el = fam.element;
      std::size_t P = *period;
      fam.element = [el, P](std::size_t n) { return el(((n - 1) % P) + 1); };
    }
  } else {
    const json& es = elements(c, path);
    std::vector<WeakShift> list;
    double amin = std::numeric_limits<double>::infinity(), top = 0.0;
    for (std::size_t i = 0; i < es.size(); ++i) {
      list.push_back(weak_element(es[i], at(path + ".elements", i), k, dtilde));
      amin = std::min(amin, std::abs(list.back().a));
      top = std::max({top, std::abs(list.back().a), list.back().p.max_abs_coeff()});
    }
    std::size_t P = period.value_or(list.size());
    if (P > list.size()) throw schema_error(path, "period exceeds the number of listed elements");
    list.erase(list.begin() + static_cast<std::ptrdiff_t>(P), list.end());
    fam.mtilde = 0.5 * amin;
    fam.Mtilde = 1.5 * top + 1e-12;
    fam.element = [list](std::size_t n) { return list[(n - 1) % list.size()]; };
  }
  fam.k = k;
  fam.dtilde = dtilde;
  fam.period = period;
  if (!period && c.contains("elements")) fam.period = c["elements"].size();
  return fam;
}

}  // namespace detail

inline Scenario parse_scenario(json j, const ScenarioOverrides& ov = {}) {
  const std::string R = "$";
  if (!j.is_object()) throw schema_error(R, "scenario must be a JSON object");
  // flag > file > default
  if (ov.seed) j["seed"] = *ov.seed;
  if (ov.tol) j["solver"]["tol"] = *ov.tol, j["dynamics"]["tol"] = *ov.tol;
  if (ov.horizon) j["solver"]["horizon"] = *ov.horizon;
  if (ov.threads) j["threads"] = *ov.threads;
  if (ov.out) j["out"] = *ov.out;

  Scenario s;
  s.source = j;
  if (j.contains("schema")) {
    s.schema = static_cast<int>(io::integer(j["schema"], "$.schema"));
    if (s.schema != 1) throw schema_error("$.schema", "unsupported schema version");
  }
  long long k = io::integer(io::field(j, "k", R), "$.k");
  if (k < 2 || k > kMaxDim) throw schema_error("$.k", "dimension must be in 2.." + std::to_string(kMaxDim));
  s.k = static_cast<int>(k);
  const json& fam = io::field(j, "family", R);
  if (!fam.is_string()) throw schema_error("$.family", "expected a string");
  s.family = fam.get<std::string>();
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw schema_error("$.seed", "expected a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("period") && !j["period"].is_null()) s.period = detail::count(j["period"], "$.period", 1);
  if (j.contains("bounds")) {
    const json& b = j["bounds"];
    AttractionBounds ab{io::number(io::field(b, "A", "$.bounds"), "$.bounds.A"),
                        io::number(io::field(b, "B", "$.bounds"), "$.bounds.B"),
                        b.contains("r") ? io::number(b["r"], "$.bounds.r") : 0.1};
    try {
      ab.validate();
    } catch (const error& e) {
      throw schema_error("$.bounds", e.what());
    }
    s.bounds = ab;
  }
  if (j.contains("threads")) s.threads = static_cast<unsigned>(detail::count(j["threads"], "$.threads"));
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw schema_error("$.out", "expected a string");
    s.out = j["out"].get<std::string>();
  }

  const json empty = json::object();
  const json& c = j.contains("coeffs") ? j["coeffs"] : empty;
  const std::string cp = "$.coeffs";
  if (!c.is_object()) throw schema_error(cp, "expected an object");

  if (s.family == "henon") {
    if (s.k != 2) throw schema_error("$.k", "henon family needs k = 2");
    const json& es = detail::elements(c, cp);
    std::vector<Automorphism> list;
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string ep = detail::at(cp + ".elements", i);
      cplx delta = io::complex(io::field(es[i], "delta", ep), ep + ".delta");
      Polynomial P = io::polynomial(io::field(es[i], "P", ep), ep + ".P", 1);
      if (P.coeff(MultiIndex{0}) != cplx{}) throw schema_error(ep + ".P", "P(0) must vanish so the origin is fixed");
      try {
        list.push_back(HenonMap(delta, P).to_automorphism());
      } catch (const error& e) {
        throw schema_error(ep, e.what());
      }
    }
    s.seq = detail::cyclic(list, s.period, s.bounds, cp);
    // a single Henon step never contracts |(0, y)|, so contracting sequences list pairs
    if (c.contains("block")) {
      std::size_t l = detail::count(c["block"], cp + ".block", 1);
      if (l > 1) s.seq = block_compose(s.seq, l).with_bounds(s.bounds);
    }
  } else if (s.family == "elementary") {
    const json& es = detail::elements(c, cp);
    std::vector<Automorphism> list;
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string ep = detail::at(cp + ".elements", i);
      const json& fs = io::field(es[i], "factors", ep);
      if (!fs.is_array() || fs.empty()) throw schema_error(ep + ".factors", "expected a non-empty list");
      std::optional<Automorphism> acc;
      for (std::size_t t = 0; t < fs.size(); ++t) {
        const std::string fp = detail::at(ep + ".factors", t);
        long long coord = io::integer(io::field(fs[t], "coord", fp), fp + ".coord");
        if (coord < 1 || coord > s.k) throw schema_error(fp + ".coord", "coordinate out of range");
        cplx a = fs[t].contains("a") ? io::complex(fs[t]["a"], fp + ".a") : cplx{1.0};
        Polynomial P = io::polynomial(io::field(fs[t], "P", fp), fp + ".P", s.k);
        if (P.coeff(MultiIndex(s.k)) != cplx{}) throw schema_error(fp + ".P", "constant term must vanish");
        try {
          Automorphism T = ElementaryMap(s.k, static_cast<int>(coord), a, P).to_automorphism();
          acc = acc ? compose(T, *acc) : T;
        } catch (const error& e) {
          throw schema_error(fp, e.what());
        }
      }
      if (es[i].contains("linear")) {
        try {
          acc = compose(Automorphism::linear(io::matrix(es[i]["linear"], ep + ".linear", s.k)), *acc);
        } catch (const domain_error& e) {
          throw schema_error(ep + ".linear", e.what());
        }
      }
      list.emplace_back(acc->factors(), acc->inverse_factors(), "elementary_product");
    }
    s.seq = detail::cyclic(list, s.period, s.bounds, cp);
  } else if (s.family == "weakshift" || s.family == "perturbed") {
    s.weak = detail::weak_family(c, cp, s.k, s.seed, s.period);
    if (s.family == "perturbed") {
      if (s.k < 3) throw schema_error("$.k", "perturbed family needs k >= 3");
      long long d = io::integer(io::field(c, "d", cp), cp + ".d");
      if (d < s.weak->dtilde + 2) throw schema_error(cp + ".d", "need d >= dtilde + 2");
      s.perturbed = perturb(*s.weak, static_cast<int>(d));
      s.seq = s.perturbed->sequence();
    } else {
      s.seq = s.weak->sequence();
    }
    if (s.bounds) s.seq = s.seq.with_bounds(s.bounds);
  } else if (s.family == "custom") {
    if (c.contains("germs")) {
      const json& gs = c["germs"];
      if (!gs.is_array() || gs.empty()) throw schema_error(cp + ".germs", "expected a non-empty list");
      std::vector<Automorphism> list;
      for (std::size_t i = 0; i < gs.size(); ++i) {
        const std::string gp = detail::at(cp + ".germs", i);
        GermMap g = io::germ(gs[i], gp);
        if (g.k != s.k) throw schema_error(gp + ".k", "germ dimension differs from $.k");
        if (g.has_constant_term()) throw schema_error(gp, "map must fix the origin");
        Eigen::FullPivLU<Matrix> lu(g.linear_part());
        if (!lu.isInvertible()) throw schema_error(gp, "linear part must be invertible");
        list.emplace_back(std::vector<PolyMap>{PolyMap::from_germ(g)}, std::nullopt, "custom");
      }
      s.seq = detail::cyclic(list, s.period, s.bounds, cp);
    } else if (c.contains("random_triangular")) {
      if (!s.bounds) throw schema_error("$.bounds", "random_triangular needs bounds");
      const std::string rp = cp + ".random_triangular";
      const json& r = c["random_triangular"];
      TriangularFamilyParams p;
      p.k = s.k;
      p.bounds = *s.bounds;
      p.seed = s.seed;
      if (r.contains("order")) p.order = static_cast<int>(detail::count(r["order"], rp + ".order", 2));
      if (r.contains("coeff_scale")) p.coeff_scale = io::number(r["coeff_scale"], rp + ".coeff_scale");
      if (r.contains("subdiag_scale")) p.subdiag_scale = io::number(r["subdiag_scale"], rp + ".subdiag_scale");
      s.seq = random_triangular_sequence(p);
    } else if (c.contains("diagonal")) {
      if (!s.bounds) throw schema_error("$.bounds", "diagonal family needs bounds");
      s.seq = random_diagonal_sequence(s.k, *s.bounds, s.seed);
    } else {
      throw schema_error(cp, "custom family needs one of germs, random_triangular, diagonal");
    }
  } else {
    throw schema_error("$.family", "unknown family '" + s.family + "'");
  }

  if (j.contains("solver")) {
    const json& v = j["solver"];
    const std::string p = "$.solver";
    if (!v.is_object()) throw schema_error(p, "expected an object");
    if (v.contains("k0")) s.solver.k0 = static_cast<int>(detail::count(v["k0"], p + ".k0", 2));
    if (v.contains("horizon")) s.solver.horizon = detail::count(v["horizon"], p + ".horizon", 1);
    if (v.contains("tol")) s.solver.tol = detail::positive(v["tol"], p + ".tol");
    if (v.contains("normalize")) {
      if (!v["normalize"].is_string()) throw schema_error(p + ".normalize", "expected a string");
      s.solver.normalize = v["normalize"].get<std::string>();
      if (s.solver.normalize != "auto" && s.solver.normalize != "always" && s.solver.normalize != "never")
        throw schema_error(p + ".normalize", "expected auto, always or never");
    }
  }
  if (j.contains("dynamics")) {
    const json& v = j["dynamics"];
    const std::string p = "$.dynamics";
    if (!v.is_object()) throw schema_error(p, "expected an object");
    if (v.contains("R_cap")) s.dynamics.R_cap = detail::positive(v["R_cap"], p + ".R_cap");
    if (v.contains("rTilde")) s.dynamics.rTilde = io::number(v["rTilde"], p + ".rTilde");
    if (s.dynamics.rTilde < 0.0) throw schema_error(p + ".rTilde", "must be >= 0");
    if (v.contains("maxiter")) s.dynamics.maxiter = detail::count(v["maxiter"], p + ".maxiter", 1);
    if (v.contains("samples")) s.dynamics.samples = detail::count(v["samples"], p + ".samples", 1);
    if (v.contains("steps")) s.dynamics.steps = detail::count(v["steps"], p + ".steps", 1);
    if (v.contains("tol")) s.dynamics.tol = detail::positive(v["tol"], p + ".tol");
    if (v.contains("periods")) {
      const json& ps = v["periods"];
      if (!ps.is_array()) throw schema_error(p + ".periods", "expected a list");
      s.dynamics.periods.clear();
      for (std::size_t i = 0; i < ps.size(); ++i) s.dynamics.periods.push_back(detail::count(ps[i], detail::at(p + ".periods", i), 1));
    }
  }
  if (j.contains("render")) {
    const json& v = j["render"];
    const std::string p = "$.render";
    RenderWindow w;
    w.base = io::point(io::field(v, "base", p), p + ".base", s.k);
    w.u = io::point(io::field(v, "u", p), p + ".u", s.k);
    w.v = io::point(io::field(v, "v", p), p + ".v", s.k);
    auto range = [&](const char* key, double& lo, double& hi) {
      if (!v.contains(key)) return;
      const json& r = v[key];
      const std::string rp = p + "." + key;
      if (!r.is_array() || r.size() != 2) throw schema_error(rp, "expected [min, max]");
      lo = io::number(r[0], rp + "[0]");
      hi = io::number(r[1], rp + "[1]");
      if (!(lo < hi)) throw schema_error(rp, "need min < max");
    };
    range("s", w.s_min, w.s_max);
    range("t", w.t_min, w.t_max);
    if (v.contains("width")) w.width = detail::count(v["width"], p + ".width", 1);
    if (v.contains("height")) w.height = detail::count(v["height"], p + ".height", 1);
    s.render = w;
  }
  if (j.contains("points")) {
    const json& v = j["points"];
    if (!v.is_array()) throw schema_error("$.points", "expected a list of points");
    for (std::size_t i = 0; i < v.size(); ++i) s.points.push_back(io::point(v[i], detail::at("$.points", i), s.k));
  }
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& p, const ScenarioOverrides& ov = {}) {
  return parse_scenario(io::read_json(p), ov);
}

}  // namespace fatou
