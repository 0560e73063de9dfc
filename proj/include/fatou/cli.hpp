#pragma once

// Command dispatch for the `fatou` tool. Every command reads one scenario, writes its
// artifacts into the output directory and a summary_<command>.json, and returns
//   0 all checks passed, 2 schema violation, 3 numeric failure, 4 I/O failure.

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fatou/acceptance.hpp"
#include "fatou/io.hpp"
#include "fatou/scenario.hpp"

namespace fatou::cli {

enum ExitCode : int { ok = 0, schema = 2, numeric = 3, io_failure = 4 };

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"normalize", "solve",    "factorize", "filtration",
                                             "green",     "classify", "render",    "suite"};
  return c;
}

struct Options {
  std::string command;
  std::string scenario;  // empty: suite without a pack
  ScenarioOverrides overrides;
  bool quiet = false;
};

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

// Collected while a command runs; becomes summary_<command>.json.
struct Report {
  std::string command;
  std::filesystem::path out;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  json info = json::object();

  void write(const std::string& name, const std::string& data) {
    io::write_file(out / name, data);
    artifacts.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void check(std::string name, bool pass, std::string detail) { checks.push_back({std::move(name), pass, std::move(detail)}); }
  bool passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline std::string timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void finish(Report& rep, int code, const std::string& error) {
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  json s = {{"command", rep.command},
            {"status", code == ok ? "pass" : "fail"},
            {"exit_code", code},
            {"checks", checks},
            {"artifacts", rep.artifacts},
            {"info", rep.info}};
  if (!error.empty()) s["error"] = error;
  s["timestamp"] = timestamp();
  io::write_json(rep.out / ("summary_" + rep.command + ".json"), s);
}

inline bool lower_triangular_window(const AutoSequence& f, std::size_t N) {
  for (std::size_t n = 1; n <= N; ++n) {
    Matrix L = f.at(n).linear_part();
    double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < L.rows(); ++i)
      for (Eigen::Index j = i + 1; j < L.cols(); ++j)
        if (std::abs(L(i, j)) > 1e-14 * scale) return false;
  }
  return true;
}

struct Prepared {
  AutoSequence seq;  // what the solver sees
  bool normalized = false;
  int k0 = 0;
};

inline Prepared prepare_solve(const Scenario& s, std::size_t window_hint) {
  Prepared p;
  if (s.solver.k0) {
    p.k0 = *s.solver.k0;
  } else if (s.bounds) {
    p.k0 = s.bounds->k0();
  } else {
    throw schema_error("$.solver.k0", "solve needs solver.k0 or bounds");
  }
  bool tri = s.solver.normalize != "always" && lower_triangular_window(s.seq, window_hint);
  if (s.solver.normalize == "never" && !tri) throw schema_error("$.solver.normalize", "linear parts are not lower triangular");
  if (tri) {
    p.seq = s.seq;
  } else {
    p.seq = lower_triangular_normalize(s.seq).sequence();
    p.normalized = true;
  }
  return p;
}

inline ConjugationSolution run_solver(const Scenario& s, Report& rep, Prepared& prep) {
  ConjugationOptions opt;
  opt.tol = s.solver.tol;
  opt.horizon = s.solver.horizon;
  ConjugationSolution sol = solve_conjugation(prep.seq, prep.k0, opt);
  rep.info["k0"] = prep.k0;
  rep.info["normalized"] = prep.normalized;
  rep.info["window"] = sol.window;
  return sol;
}

inline FiltrationSpec filtration_for(const Scenario& s) {
  if (!s.perturbed) throw schema_error("$.family", "this command needs family \"perturbed\"");
  FiltrationOptions fo;
  fo.R_cap = s.dynamics.R_cap;
  fo.samples = s.dynamics.samples;
  fo.steps = s.dynamics.steps;
  fo.seed = s.seed;
  return find_filtration_spec(*s.perturbed, fo);
}

inline double basin_radius(const Scenario& s, const FiltrationSpec& spec) {
  if (s.dynamics.rTilde > 0.0) {
    if (!(s.dynamics.rTilde < spec.R)) throw schema_error("$.dynamics.rTilde", "must be below R");
    return s.dynamics.rTilde;
  }
  return certify_basin_radius(s.seq, 0.5, static_cast<std::size_t>(s.k), 200, 60, s.seed);
}

inline std::vector<Point> points_or_default(const Scenario& s, double R) {
  if (!s.points.empty()) return s.points;
  return acceptance::detail::escaping_candidates(s.k, R, 8, s.seed);
}

}  // namespace detail

inline void cmd_normalize(const Scenario& s, Report& rep) {
  const std::size_t N = s.solver.horizon;
  Normalization norm = lower_triangular_normalize(s.seq);
  AutoSequence ns = norm.sequence();
  json rows = json::array();
  std::string csv = "n";
  for (int i = 1; i <= s.k; ++i) csv += ",abs_l" + std::to_string(i) + std::to_string(i);
  csv += "\n";
  double worst_upper = 0.0;
  double dmin = 1e300, dmax = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    Matrix L = ns.at(n).linear_part();
    double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < L.rows(); ++i)
      for (Eigen::Index j = i + 1; j < L.cols(); ++j) worst_upper = std::max(worst_upper, std::abs(L(i, j)) / scale);
    csv += std::to_string(n);
    json diag = json::array();
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
      double m = std::abs(L(i, i));
      dmin = std::min(dmin, m);
      dmax = std::max(dmax, m);
      diag.push_back(m);
      csv += "," + io::fmt(m);
    }
    csv += "\n";
    rows.push_back({{"n", n}, {"V", io::to_json(norm.V(n))}, {"linear_part", io::to_json(L)}, {"diag_moduli", diag}});
  }
  // V_1 = I, so orbit norms of the two sequences must agree at the same start point
  double norm_gap = 0.0;
  Rng rng(s.seed, 0x40Eu, 0);
  const double r0 = s.bounds ? s.bounds->r : 0.1;
  for (int t = 0; t < 16; ++t) {
    Point z = rng.sphere(s.k, r0 * rng.uniform(0.1, 1.0));
    Point a = z, b = z;
    for (std::size_t n = 1; n <= N; ++n) {
      a = s.seq.at(n)(a);
      b = ns.at(n)(b);
      if (!all_finite(a) || sup_norm(a) > 1e50) break;
      double na = euclid_norm(a), nb = euclid_norm(b);
      norm_gap = std::max(norm_gap, std::abs(na - nb) / std::max(na, 1e-300));
    }
  }
  json out = {{"k", s.k}, {"horizon", N}, {"elements", rows}};
  if (s.bounds) {
    try {
      AttractionEstimate est = estimate_attraction_bounds(s.seq, s.bounds->r, 64, N, s.seed);
      out["attraction_estimate"] = {{"r", s.bounds->r}, {"A_est", est.A_est}, {"B_est", est.B_est}};
      out["attraction_estimate"]["k0"] = est.k0 ? json(*est.k0) : json(nullptr);
    } catch (const overflow_error& e) {
      out["attraction_estimate"] = {{"error", e.what()}};
    }
  }
  rep.write_json("normalize.json", out);
  rep.write("normalize.csv", csv);
  rep.info["diag_moduli_range"] = {dmin, dmax};
  rep.check("lower_triangular", worst_upper <= 1e-12, "max |upper entry| / scale = " + io::fmt(worst_upper));
  rep.check("orbit_norms_preserved", norm_gap <= 1e-9, "max relative gap = " + io::fmt(norm_gap));
}

inline void cmd_solve(const Scenario& s, Report& rep) {
  auto prep = detail::prepare_solve(s, s.solver.horizon + 1);
  ConjugationSolution sol = detail::run_solver(s, rep, prep);
  rep.write_json("solution.json", io::to_json(sol));
  rep.write("residuals.csv", io::degree_residual_csv(sol));
  double lin = 0.0;
  for (std::size_t n = 1; n <= sol.horizon; ++n)
    lin = std::max(lin, (sol.g(n).linear_part() - prep.seq.at(n).linear_part()).cwiseAbs().maxCoeff());
  rep.info["max_residual"] = sol.max_residual;
  rep.info["bound_constant"] = sol.bound_constant;
  rep.check("residual", sol.max_residual <= s.solver.tol,
            io::fmt(sol.max_residual) + " <= " + io::fmt(s.solver.tol) + " over n = 1.." + std::to_string(sol.horizon));
  rep.check("linear_parts_match", lin <= 1e-12, "max |Dg_n(0) - Df_n(0)| = " + io::fmt(lin));
}

inline void cmd_factorize(const Scenario& s, Report& rep) {
  auto prep = detail::prepare_solve(s, s.solver.horizon + 1);
  ConjugationSolution sol = detail::run_solver(s, rep, prep);
  Rng rng(s.seed, 0xFAu, 0);
  double worst = 0.0;
  json out = json::array();
  for (std::size_t n = 1; n <= sol.horizon; ++n) {
    if (s.k == 2) {
      const HenonProduct& g = sol.planar[n - 1];
      HenonPair hp = henon_factorize_k2(g.a, g.c, g.p, g.q);
      json e = {{"n", n}};
      if (hp.henon_first) e["henon_first"] = {{"delta", io::to_json(hp.henon_first->delta)}, {"P", io::to_json(hp.henon_first->P)}};
      if (hp.henon_second) e["henon_second"] = {{"delta", io::to_json(hp.henon_second->delta)}, {"P", io::to_json(hp.henon_second->P)}};
      out.push_back(e);
      for (int t = 0; t < 32; ++t) {
        Point z{rng.disc(1.0), rng.disc(1.0)};
        worst = std::max(worst, acceptance::detail::rel_err(hp.first(hp.second(z)), acceptance::detail::planar_direct(g, z)));
      }
    } else {
      const TriangularProduct& g = sol.triangular[n - 1];
      auto shifts = shift_factorize(g);
      json e = {{"n", n}, {"shifts", json::array()}};
      for (const auto& S : shifts) e["shifts"].push_back({{"a", io::to_json(S.a)}, {"p", io::to_json(S.p)}, {"dtilde", S.dtilde}});
      out.push_back(e);
      for (int t = 0; t < 32; ++t) {
        Point z(static_cast<std::size_t>(s.k));
        for (auto& c : z) c = rng.disc(1.0);
        Point w = z;
        for (const auto& S : shifts) w = S.to_automorphism()(w);
        worst = std::max(worst, acceptance::detail::rel_err(w, acceptance::detail::triangular_direct(g, z)));
      }
    }
  }
  rep.write_json("factorize.json", {{"k", s.k}, {"factors", out}});
  rep.check("pointwise", worst <= 1e-10, "max relative error = " + io::fmt(worst) + " at 32 points per n");
}

inline void cmd_filtration(const Scenario& s, Report& rep) {
  FiltrationSpec spec = detail::filtration_for(s);
  rep.write_json("filtration.json", io::to_json(spec));
  rep.info["R"] = spec.R;
  rep.check("filtration_found", true, "R = " + io::fmt(spec.R));
}

inline void cmd_green(const Scenario& s, Report& rep) {
  FiltrationSpec spec = detail::filtration_for(s);
  GreenOptions opt;
  opt.tol = s.dynamics.tol;
  opt.maxiter = s.dynamics.maxiter;
  opt.rTilde = s.dynamics.rTilde;
  opt.record = true;
  auto pts = detail::points_or_default(s, spec.R);
  json list = json::array();
  std::size_t violations = 0;
  double fe_worst = 0.0;
  std::size_t fe_count = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    GreenEstimate g = green_estimate(s.seq, pts[i], spec, opt);
    const std::string csv = "green_" + std::to_string(i) + ".csv";
    rep.write(csv, io::green_csv(g));
    if (g.entry)
      for (std::size_t n = *g.entry; n + 1 < g.trajectory.size(); ++n)
        if (std::abs(g.trajectory[n + 1].step) > spec.Mtilde / std::pow(spec.d, static_cast<double>(n + 1))) ++violations;
    json e = {{"point", io::to_json(pts[i])}, {"estimate", io::to_json(g)}, {"csv", csv}, {"functional", json::array()}};
    for (std::size_t m : s.dynamics.periods) {
      FunctionalCheck fc = green_functional_check(s.seq, m, pts[i], spec, opt);
      e["functional"].push_back({{"m", m}, {"conclusive", fc.conclusive}, {"residual", fc.residual}, {"certified", fc.certified}});
      if (fc.conclusive) {
        fe_worst = std::max(fe_worst, fc.residual);
        ++fe_count;
      }
    }
    list.push_back(e);
  }
  rep.write_json("green.json", {{"filtration", io::to_json(spec)}, {"points", list}});
  rep.check("cauchy_rate", violations == 0, std::to_string(violations) + " consecutive differences above Mtilde/d^(n+1)");
  rep.check("functional_equation", fe_worst <= 1e-6,
            "max relative residual " + io::fmt(fe_worst) + " over " + std::to_string(fe_count) + " conclusive checks");
}

inline void cmd_classify(const Scenario& s, Report& rep) {
  FiltrationSpec spec = detail::filtration_for(s);
  double rt = detail::basin_radius(s, spec);
  auto pts = detail::points_or_default(s, spec.R);
  json list = json::array();
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& z : pts) {
    Classification c = classify_point(s.seq, z, spec, rt, s.dynamics.maxiter);
    ++counts[static_cast<int>(c.tag)];
    list.push_back({{"point", io::to_json(z)}, {"class", io::to_json(c)}});
  }
  rep.write_json("classify.json", {{"R", spec.R}, {"rTilde", rt}, {"maxiter", s.dynamics.maxiter}, {"points", list}});
  rep.info["counts"] = {{"InBasin", counts[0]}, {"Escaping", counts[1]}, {"Undecided", counts[2]}};
  rep.check("classified", true, std::to_string(pts.size()) + " points");
}

inline void cmd_render(const Scenario& s, Report& rep) {
  if (!s.render) throw schema_error("$.render", "render needs a render block");
  FiltrationSpec spec = detail::filtration_for(s);
  double rt = detail::basin_radius(s, spec);
  const RenderWindow& w = *s.render;
  RenderResult r = render_basin(s.seq, w, spec, rt, s.dynamics.maxiter, s.threads);
  rep.write("render.pgm", io::pgm(w.width, w.height, r.class_plane()));
  rep.write("render_time.pgm", io::pgm(w.width, w.height, r.time_plane()));
  rep.write_json("render.json", {{"window", io::to_json(w)},
                                 {"R", spec.R},
                                 {"rTilde", rt},
                                 {"maxiter", s.dynamics.maxiter},
                                 {"counts", {{"InBasin", r.basin}, {"Escaping", r.escaping}, {"Undecided", r.undecided}}},
                                 {"legend", {{"0", "InBasin"}, {"128", "Undecided"}, {"255", "Escaping"}}},
                                 {"time_legend", "escaping pixels 255 at step 0 down to 64 at the latest escape"},
                                 {"images", {"render.pgm", "render_time.pgm"}}});
  rep.check("rendered", true, std::to_string(w.width) + "x" + std::to_string(w.height));
}

inline int run(const Options& opt, std::ostream& log);

inline void cmd_suite(const Options& opt, Report& rep, std::ostream& log) {
  acceptance::Config cfg;
  json pack = json::array();
  std::filesystem::path base;
  if (!opt.scenario.empty()) {
    json j = io::read_json(opt.scenario);
    base = std::filesystem::path(opt.scenario).parent_path();
    if (!j.is_object()) throw schema_error("$", "suite file must be a JSON object");
    if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(io::integer(j["seed"], "$.seed"));
    if (j.contains("pack")) {
      pack = j["pack"];
      if (!pack.is_array()) throw schema_error("$.pack", "expected a list");
    }
  }
  if (opt.overrides.seed) cfg.seed = *opt.overrides.seed;
  if (opt.overrides.threads) cfg.threads = *opt.overrides.threads;

  json checks = json::array();
  for (std::size_t i = 0; i < acceptance::registry().size(); ++i) {
    acceptance::CheckResult c = acceptance::run_check(i, cfg);
    if (!opt.quiet) log << (c.pass ? "PASS " : "FAIL ") << "[" << c.id << "] " << c.name << ": " << c.detail << "\n";
    rep.check(c.name, c.pass, c.detail);
    checks.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  json runs = json::array();
  for (std::size_t i = 0; i < pack.size(); ++i) {
    const std::string p = "$.pack[" + std::to_string(i) + "]";
    const json& e = pack[i];
    const json& sc = io::field(e, "scenario", p);
    if (!sc.is_string()) throw schema_error(p + ".scenario", "expected a path");
    std::filesystem::path path = base / sc.get<std::string>();
    const json& cmds = io::field(e, "commands", p);
    if (!cmds.is_array()) throw schema_error(p + ".commands", "expected a list");
    for (std::size_t c = 0; c < cmds.size(); ++c) {
      if (!cmds[c].is_string()) throw schema_error(p + ".commands[" + std::to_string(c) + "]", "expected a command name");
      std::string name = cmds[c].get<std::string>();
      if (name == "suite" || std::find(commands().begin(), commands().end(), name) == commands().end())
        throw schema_error(p + ".commands[" + std::to_string(c) + "]", "unknown command '" + name + "'");
      Options sub;
      sub.command = name;
      sub.scenario = path.string();
      sub.overrides = opt.overrides;
      sub.overrides.seed.reset();
      sub.overrides.out = (rep.out / path.stem()).string();
      sub.quiet = true;
      std::ostringstream sublog;
      int code = run(sub, sublog);
      bool pass = code == ok;
      std::string label = path.filename().string() + ":" + name;
      if (!opt.quiet) log << (pass ? "PASS " : "FAIL ") << label << " (exit " << code << ")" << (pass ? "" : " " + sublog.str()) << "\n";
      rep.check(label, pass, "exit " + std::to_string(code));
      runs.push_back({{"scenario", sc}, {"command", name}, {"exit_code", code}, {"out", path.stem().string()}});
    }
  }
  rep.write_json("suite_report.json", {{"seed", cfg.seed}, {"acceptance", checks}, {"pack", runs}});
}

inline int run(const Options& opt, std::ostream& log) {
  Report rep;
  rep.command = opt.command;
  rep.out = opt.overrides.out.value_or("out");
  int code = ok;
  std::string message;
  try {
    if (std::find(commands().begin(), commands().end(), opt.command) == commands().end())
      throw schema_error("command", "unknown command '" + opt.command + "'");
    if (opt.command == "suite") {
      cmd_suite(opt, rep, log);
    } else {
      if (opt.scenario.empty()) throw schema_error("--scenario", "a scenario file is required");
      Scenario s = load_scenario(opt.scenario, opt.overrides);
      rep.out = s.out;
      if (opt.command == "normalize") cmd_normalize(s, rep);
      else if (opt.command == "solve") cmd_solve(s, rep);
      else if (opt.command == "factorize") cmd_factorize(s, rep);
      else if (opt.command == "filtration") cmd_filtration(s, rep);
      else if (opt.command == "green") cmd_green(s, rep);
      else if (opt.command == "classify") cmd_classify(s, rep);
      else if (opt.command == "render") cmd_render(s, rep);
    }
    if (!rep.passed()) code = numeric;
  } catch (const schema_error& e) {
    code = schema;
    message = std::string("schema error at ") + e.what();
  } catch (const io_error& e) {
    code = io_failure;
    message = std::string("I/O error: ") + e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    code = io_failure;
    message = std::string("I/O error: ") + e.what();
  } catch (const fatou::error& e) {
    code = numeric;
    message = std::string("numeric failure: ") + e.what();
  } catch (const std::exception& e) {
    code = numeric;
    message = std::string("failure: ") + e.what();
  }
  if (!message.empty()) log << message << "\n";
  for (const auto& c : rep.checks)
    if (!opt.quiet && opt.command != "suite") log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  if (code != schema) {
    try {
      detail::finish(rep, code, message);
    } catch (const io_error& e) {
      log << "I/O error: " << e.what() << "\n";
      code = io_failure;
    }
  }
  return code;
}

}  // namespace fatou::cli
