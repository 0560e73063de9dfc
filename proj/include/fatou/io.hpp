#pragma once

// JSON, CSV and PGM encodings. Complex scalars parse from a number, [re, im] or
// {"re": .., "im": ..}; polynomials are term lists {"exponents": [..], "re": .., "im": ..}.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fatou/conjugation.hpp"
#include "fatou/dynamics.hpp"
#include "fatou/filtration.hpp"
#include "fatou/germ.hpp"
#include "fatou/polynomial.hpp"
#include "fatou/render.hpp"

namespace fatou {

using json = nlohmann::ordered_json;

namespace io {

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw schema_error(path + "." + key, "missing required field");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw schema_error(path, "expected a number");
  return v.get<double>();
}

inline long long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw schema_error(path, "expected an integer");
  return v.get<long long>();
}

inline cplx complex(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  if (v.is_object()) return {number(field(v, "re", path), path + ".re"), v.contains("im") ? number(v["im"], path + ".im") : 0.0};
  throw schema_error(path, "expected a complex number: x, [re, im] or {\"re\", \"im\"}");
}

inline json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline Point point(const json& v, const std::string& path, int k) {
  if (!v.is_array()) throw schema_error(path, "expected an array of complex numbers");
  if (k > 0 && static_cast<int>(v.size()) != k) throw schema_error(path, "expected " + std::to_string(k) + " entries");
  Point z;
  for (std::size_t i = 0; i < v.size(); ++i) z.push_back(complex(v[i], path + "[" + std::to_string(i) + "]"));
  return z;
}

inline json to_json(const Point& z) {
  json a = json::array();
  for (auto c : z) a.push_back(to_json(c));
  return a;
}

inline Matrix matrix(const json& v, const std::string& path, int k) {
  if (!v.is_array() || static_cast<int>(v.size()) != k) throw schema_error(path, "expected " + std::to_string(k) + " rows");
  Matrix M(k, k);
  for (int i = 0; i < k; ++i) {
    Point row = point(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]", k);
    for (int j = 0; j < k; ++j) M(i, j) = row[static_cast<std::size_t>(j)];
  }
  return M;
}

inline json to_json(const Matrix& M) {
  json a = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(to_json(M(i, j)));
    a.push_back(row);
  }
  return a;
}

// Dimension k; max_degree < 0 means "highest exponent present".
inline Polynomial polynomial(const json& v, const std::string& path, int k, int max_degree = -1) {
  if (!v.is_array()) throw schema_error(path, "expected a list of terms");
  std::vector<std::pair<MultiIndex, cplx>> terms;
  int top = 0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    const std::string tp = path + "[" + std::to_string(t) + "]";
    const json& e = field(v[t], "exponents", tp);
    if (!e.is_array() || static_cast<int>(e.size()) != k)
      throw schema_error(tp + ".exponents", "expected " + std::to_string(k) + " exponents");
    std::vector<int> ex;
    for (std::size_t j = 0; j < e.size(); ++j) {
      long long x = integer(e[j], tp + ".exponents[" + std::to_string(j) + "]");
      if (x < 0 || x > 255) throw schema_error(tp + ".exponents", "exponent out of range");
      ex.push_back(static_cast<int>(x));
    }
    MultiIndex m(ex);
    cplx c(number(field(v[t], "re", tp), tp + ".re"), v[t].contains("im") ? number(v[t]["im"], tp + ".im") : 0.0);
    top = std::max(top, m.degree());
    terms.emplace_back(m, c);
  }
  Polynomial p(k, max_degree < 0 ? top : max_degree);
  for (auto& [m, c] : terms) {
    if (m.degree() > p.max_degree()) throw schema_error(path, "term exceeds the allowed degree");
    p.add(m, c);
  }
  return p;
}

inline json to_json(const Polynomial& p) {
  json a = json::array();
  for (const auto& [m, c] : p.terms()) a.push_back({{"exponents", m.to_vector()}, {"re", c.real()}, {"im", c.imag()}});
  return a;
}

inline json to_json(const GermMap& g) {
  json comps = json::array();
  for (const auto& c : g.components) comps.push_back(to_json(c));
  return {{"k", g.k}, {"order", g.order}, {"components", comps}};
}

inline GermMap germ(const json& v, const std::string& path) {
  long long k = integer(field(v, "k", path), path + ".k");
  long long order = integer(field(v, "order", path), path + ".order");
  if (k < 1 || k > kMaxDim) throw schema_error(path + ".k", "dimension out of range");
  if (order < 1) throw schema_error(path + ".order", "order must be >= 1");
  const json& comps = field(v, "components", path);
  if (!comps.is_array() || static_cast<long long>(comps.size()) != k)
    throw schema_error(path + ".components", "expected k components");
  GermMap g(static_cast<int>(k), static_cast<int>(order));
  for (std::size_t i = 0; i < comps.size(); ++i)
    g.components[i] = (polynomial(comps[i], path + ".components[" + std::to_string(i) + "]", g.k, g.order));
  return g;
}

inline json to_json(const AttractionBounds& b) { return {{"A", b.A}, {"B", b.B}, {"r", b.r}}; }

inline json to_json(const ConjugationSolution& sol) {
  json slots = json::array();
  const std::size_t N = sol.horizon;
  for (std::size_t s = 0; s < sol.table.slots.size(); ++s) {
    const Slot& sl = sol.table.slots[s];
    json alpha = json::array(), rho = json::array();
    for (std::size_t n = 0; n < N; ++n) {
      alpha.push_back(to_json(sol.table.alpha[s][n]));
      rho.push_back(to_json(sol.table.rho[s][n]));
    }
    slots.push_back({{"coord", sl.coord},
                     {"exponents", sl.m.to_vector()},
                     {"kind", sl.kind == SlotKind::alpha ? "alpha" : "rho"},
                     {"alpha_fixed", sl.alpha_fixed},
                     {"alpha", alpha},
                     {"rho", rho}});
  }
  json g = json::array();
  for (std::size_t n = 1; n <= N; ++n) {
    if (sol.k == 2) {
      const HenonProduct& hp = sol.planar[n - 1];
      g.push_back({{"n", n}, {"a", to_json(hp.a)}, {"c", to_json(hp.c)}, {"p", to_json(hp.p)}, {"q", to_json(hp.q)}});
    } else {
      const TriangularProduct& tp = sol.triangular[n - 1];
      json u = json::array(), P = json::array();
      for (auto x : tp.u) u.push_back(to_json(x));
      for (const auto& p : tp.P) P.push_back(to_json(p));
      g.push_back({{"n", n}, {"u", u}, {"P", P}});
    }
  }
  return {{"k", sol.k},
          {"k0", sol.k0},
          {"horizon", sol.horizon},
          {"window", sol.window},
          {"tail", sol.tail},
          {"max_residual", sol.max_residual},
          {"degree_residuals", sol.degree_residuals},
          {"bound_constant", sol.bound_constant},
          {"expansion_inf", sol.expansion_inf},
          {"drive_sup", sol.drive_sup},
          {"tail_bound", sol.tail_bound},
          {"zero_top_coords", sol.zero_top_coords},
          {"slots", slots},
          {"g", g}};
}

inline json to_json(const FiltrationSpec& s) {
  return {{"k", s.k},           {"d", s.d},           {"dtilde", s.dtilde},
          {"R", s.R},           {"m", s.m_const},     {"M", s.M_const},
          {"Mtilde", s.Mtilde}, {"m_inv", s.m_inv},   {"M_inv", s.M_inv},
          {"coeff_bound", s.coeff_bound},             {"m0", s.m0},
          {"sampled_points", s.sampled_points},       {"sampled_steps", s.sampled_steps},
          {"inequalities", s.inequalities}};
}

inline json to_json(const Classification& c) { return {{"tag", to_string(c.tag)}, {"n", c.n}}; }

inline json to_json(const GreenEstimate& g) {
  json j = {{"value", g.value},
            {"n_used", g.n_used},
            {"tail_bound", g.tail_bound},
            {"status", to_string(g.status)},
            {"in_basin", g.in_basin}};
  j["entry"] = g.entry ? json(*g.entry) : json(nullptr);
  return j;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Columns n, |S(n)z|_sup, G_n, tail.
inline std::string green_csv(const GreenEstimate& g) {
  std::string out = "n,sup_norm,G_n,tail\n";
  for (const auto& s : g.trajectory) out += std::to_string(s.n) + "," + s.sup + "," + fmt(s.G) + "," + fmt(s.tail) + "\n";
  return out;
}

inline std::string degree_residual_csv(const ConjugationSolution& sol) {
  std::string out = "degree,residual\n";
  for (std::size_t d = 1; d < sol.degree_residuals.size(); ++d) out += std::to_string(d) + "," + fmt(sol.degree_residuals[d]) + "\n";
  return out;
}

inline std::string pgm(std::size_t w, std::size_t h, const std::vector<std::uint8_t>& plane) {
  if (plane.size() != w * h) throw parameter_error("PGM plane size mismatch");
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.append(reinterpret_cast<const char*>(plane.data()), plane.size());
  return out;
}

inline json to_json(const RenderWindow& w) {
  return {{"base", to_json(w.base)},
          {"u", to_json(w.u)},
          {"v", to_json(w.v)},
          {"s", {w.s_min, w.s_max}},
          {"t", {w.t_min, w.t_max}},
          {"width", w.width},
          {"height", w.height},
          {"row_order", "row 0 at t_max, left to right in s"}};
}

// Write to a sibling temporary, then rename over the target.
inline void write_file(const std::filesystem::path& p, const std::string& data) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw io_error("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open " + tmp.string() + " for writing");
    os.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!os) throw io_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p, ec);
  if (ec) throw io_error("cannot rename " + tmp.string() + " to " + p.string() + ": " + ec.message());
}

inline void write_json(const std::filesystem::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw io_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline json read_json(const std::filesystem::path& p) {
  std::string text = read_file(p);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw schema_error("$", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace io
}  // namespace fatou
