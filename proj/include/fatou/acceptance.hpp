#pragma once

// The ten acceptance checks. Shared by the acceptance test binary and `fatou suite`.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fatou/affine_orbit.hpp"
#include "fatou/conjugation.hpp"
#include "fatou/dynamics.hpp"
#include "fatou/factorize.hpp"
#include "fatou/families.hpp"
#include "fatou/filtration.hpp"
#include "fatou/multi_index.hpp"
#include "fatou/render.hpp"

namespace fatou::acceptance {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Config {
  std::uint64_t seed = 2026;
  unsigned threads = 0;  // render check compares 1 thread against this (and 3)
};

namespace detail {

inline std::string format(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// (x, y) -> (a x + p(y + q(x)/c), c y + q(x)), straight from the coefficients.
inline Point planar_direct(const HenonProduct& g, const Point& z) {
  auto ev = [](const Polynomial& p, cplx t) { return p.evaluate<cplx>(std::span<const cplx>(&t, 1)); };
  cplx qx = ev(g.q, z[0]);
  return {g.a * z[0] + ev(g.p, z[1] + qx / g.c), g.c * z[1] + qx};
}

// T^k o ... o T^1 applied coordinate by coordinate.
inline Point triangular_direct(const TriangularProduct& g, Point z) {
  for (int i = 1; i <= g.k; ++i) {
    const std::size_t j = static_cast<std::size_t>(i - 1);
    z[j] = g.u[j] * z[j] + g.P[j](z);
  }
  return z;
}

inline double rel_err(const Point& a, const Point& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

inline Point to_point_xs(const XPoint& w) {
  Point p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i].to_cplx();
  return p;
}

inline double log_sup(const XPoint& w) { return log_sup_norm(w); }

inline PerturbedFamily filtration_family(int d, std::uint64_t seed) {
  return perturb(random_weak_shift_family(3, 2, 0.2, 0.5, 0.3, seed), d);
}

// Points with sup norm in [R/2, 8R] and random direction; most of them escape.
inline std::vector<Point> escaping_candidates(int k, double R, std::size_t count, std::uint64_t seed) {
  std::vector<Point> out;
  Rng rng(seed, 0xE5Cu, 0);
  for (std::size_t s = 0; s < count; ++s) {
    Point z(static_cast<std::size_t>(k));
    for (auto& c : z) c = rng.disc(1.0);
    double sup = sup_norm(z);
    double target = R * std::exp2(rng.uniform(-1.0, 3.0));
    for (auto& c : z) c *= target / sup;
    out.push_back(z);
  }
  return out;
}

inline TriangularFamilyParams k2_params(std::uint64_t seed) {
  TriangularFamilyParams p;
  p.k = 2;
  p.bounds = {0.3, 0.6, 0.1};
  p.order = 3;
  p.seed = seed;
  return p;
}

inline TriangularFamilyParams k3_params(double A, std::uint64_t seed) {
  TriangularFamilyParams p;
  p.k = 3;
  p.bounds = {A, 0.6, 0.1};
  p.order = 5;
  p.coeff_scale = 0.2;
  p.subdiag_scale = 0.2;
  p.seed = seed;
  return p;
}

}  // namespace detail

// 1. k = 2, A = 0.3, B = 0.6: ten seeded sequences, residual over n < 20, time per solve.
inline CheckResult check_conjugation_k2(const Config& cfg) {
  CheckResult r{1, "germ_conjugation_k2", true, ""};
  const int k0 = least_k0(0.3, 0.6);
  double worst = 0.0, slowest = 0.0;
  if (k0 != 3) r.pass = false;
  for (std::uint64_t s = 0; s < 10; ++s) {
    detail::Timer t;
    AutoSequence f = random_triangular_sequence(detail::k2_params(cfg.seed + s));
    ConjugationSolution sol = solve_conjugation(f, k0);
    double res = residual(f, sol, 19);
    double secs = t.seconds();
    worst = std::max(worst, res);
    slowest = std::max(slowest, secs);
    if (!(res <= 1e-9) || secs > 10.0) r.pass = false;
  }
  r.detail = detail::format("k0=%d max residual=%.3e (<= 1e-9) slowest solve=%.3fs (<= 10s)", k0, worst, slowest);
  return r;
}

// 2. k = 3, k0 = 5. Run on A = 0.5, B = 0.6 and on A = 0.1, B = 0.6 (B^5 < A <= B^4).
inline CheckResult check_conjugation_k3(const Config& cfg) {
  CheckResult r{2, "germ_conjugation_k3", true, ""};
  const double B = 0.6;
  double worst = 0.0, worst_lin = 0.0;
  int worst_deg = 0;
  bool shape = true;
  const bool regime = std::pow(B, 5) < 0.1 && 0.1 <= std::pow(B, 4);
  if (!regime) r.pass = false;
  for (double A : {0.5, 0.1}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      AutoSequence f = random_triangular_sequence(detail::k3_params(A, cfg.seed + 100 + s));
      ConjugationSolution sol = solve_conjugation(f, 5);
      double res = residual(f, sol, 19);
      worst = std::max(worst, res);
      if (!(res <= 1e-9)) r.pass = false;
      for (std::size_t n = 1; n < 20; ++n) {
        const TriangularProduct& g = sol.triangular[n - 1];
        if (g.k != 3 || g.u.size() != 3 || g.P.size() != 3) shape = false;
        for (int i = 1; i <= 3; ++i) {
          const Polynomial& P = g.P[static_cast<std::size_t>(i - 1)];
          if (P.depends_on(i) || P.lowest_degree() == 0) shape = false;
          worst_deg = std::max(worst_deg, P.degree());
        }
        Matrix diff = sol.g(n).linear_part() - f.at(n).linear_part();
        worst_lin = std::max(worst_lin, diff.cwiseAbs().maxCoeff());
      }
    }
  }
  if (!shape || worst_deg > 5 || !(worst_lin <= 1e-12)) r.pass = false;
  r.detail = detail::format("max residual=%.3e (<= 1e-9) T3oT2oT1 shape=%s max deg P^i=%d (<= 5) |Dg-Df|=%.1e (<= 1e-12)",
                            worst, shape ? "yes" : "no", worst_deg, worst_lin);
  return r;
}

inline std::vector<MultiIndex> golden_J2_33() { return {{0, 1, 1}, {0, 2, 0}, {1, 0, 1}, {1, 1, 0}, {2, 0, 0}}; }
inline std::vector<MultiIndex> golden_J3_32() {
  return {{1, 1, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}, {3, 0, 0}};
}
inline std::vector<MultiIndex> golden_J4_32() {
  return {{1, 0, 3}, {1, 1, 2}, {1, 2, 1}, {1, 3, 0}, {2, 0, 2}, {2, 1, 1}, {2, 2, 0}, {3, 0, 1}, {3, 1, 0}, {4, 0, 0}};
}
inline std::vector<MultiIndex> golden_J5_32() {
  return {{1, 0, 4}, {1, 1, 3}, {1, 2, 2}, {1, 3, 1}, {1, 4, 0}, {2, 0, 3}, {2, 1, 2}, {2, 2, 1},
          {2, 3, 0}, {3, 0, 2}, {3, 1, 1}, {3, 2, 0}, {4, 0, 1}, {4, 1, 0}, {5, 0, 0}};
}

// 3. Printed orderings: three exact lists, one compared as a set.
inline CheckResult check_golden_orderings(const Config&) {
  CheckResult r{3, "golden_orderings", true, ""};
  bool a = phi_ordering(3, 2, 2) == golden_J2_33();
  bool b = phi_ordering(3, 4, 1) == golden_J4_32();
  bool c = phi_ordering(3, 5, 1) == golden_J5_32();
  auto got = phi_ordering(3, 3, 1);
  auto want = golden_J3_32();
  bool d = got.size() == want.size() &&
           std::set<MultiIndex>(got.begin(), got.end()) == std::set<MultiIndex>(want.begin(), want.end());
  r.pass = a && b && c && d;
  r.detail = detail::format("J^2_{3,3} exact=%s J^4_{3,2} exact=%s J^5_{3,2} exact=%s J^3_{3,2} as set=%s", a ? "yes" : "no",
                            b ? "yes" : "no", c ? "yes" : "no", d ? "yes" : "no");
  return r;
}

// 4. Bounded orbits of expanding affine recurrences.
inline CheckResult check_bounded_orbit(const Config& cfg) {
  CheckResult r{4, "bounded_affine_orbit", true, ""};
  double worst_rec = 0.0, worst_excess = -1e300;
  const std::size_t N = 40;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::uint64_t seed = cfg.seed + 7000 + s;
    AffineRecurrence rec{[seed](std::size_t n) { Rng g(seed, 0xBE7Au, n); return g.annulus(1.2, 3.0); },
                         [seed](std::size_t n) { Rng g(seed, 0x6A3Au, n); return g.disc(2.0); }};
    BoundedOrbit o = bounded_affine_orbit(rec, 1, N, 1e-13);
    for (std::size_t n = 1; n < N; ++n) {
      cplx lhs = o.at(n + 1), rhs = rec.beta(n) * o.at(n) + rec.gamma(n);
      worst_rec = std::max(worst_rec, std::abs(lhs - rhs));
    }
    for (std::size_t n = 1; n <= N; ++n) worst_excess = std::max(worst_excess, std::abs(o.at(n)) - o.bound);
  }
  if (!(worst_rec <= 1e-12) || !(worst_excess <= 1e-9)) r.pass = false;

  double closed = 0.0;
  auto run = [](std::function<cplx(std::size_t)> b, std::function<cplx(std::size_t)> g) {
    return bounded_affine_orbit({std::move(b), std::move(g)}, 1, 30, 1e-15);
  };
  BoundedOrbit one = run([](std::size_t) { return cplx{2.0}; }, [](std::size_t) { return cplx{1.0}; });
  BoundedOrbit zero = run([](std::size_t n) { return cplx{2.0 + 0.5 * static_cast<double>(n % 3)}; },
                          [](std::size_t) { return cplx{}; });
  BoundedOrbit alt = run([](std::size_t) { return cplx{2.0}; },
                         [](std::size_t n) { return cplx{n % 2 ? -1.0 : 1.0}; });
  for (std::size_t n = 1; n <= 30; ++n) {
    closed = std::max(closed, std::abs(one.at(n) - cplx{-1.0}));
    closed = std::max(closed, std::abs(zero.at(n)));
    // gamma_n = (-1)^n gives z_n = -(-1)^n / 3
    closed = std::max(closed, std::abs(alt.at(n) - cplx{(n % 2 ? 1.0 : -1.0) / 3.0}));
  }
  if (!(closed <= 1e-12)) r.pass = false;
  r.detail = detail::format("recurrence gap=%.1e (<= 1e-12) max |z|-C/(c-1)=%.2e (<= 1e-9) closed forms gap=%.1e (<= 1e-12)",
                            worst_rec, worst_excess, closed);
  return r;
}

// 5. Sandwich and inclusion on 10^4 points of V_R^+ for d = 4, 5.
inline CheckResult check_filtration(const Config& cfg) {
  CheckResult r{5, "filtration_sandwich", true, ""};
  std::string out;
  for (int d : {4, 5}) {
    PerturbedFamily fam = detail::filtration_family(d, cfg.seed + static_cast<std::uint64_t>(d));
    FiltrationSpec spec = find_filtration_spec(fam);
    const int k = spec.k;
    // up to half from the boundary shell [R, 4R], the rest log-uniform out to R^3
    std::vector<Point> pts;
    for (auto& z : sample_V_boundary(k, spec.R, 5000, cfg.seed + 31))
      if (in_V_plus(z, spec.R)) pts.push_back(z);
    Rng rng(cfg.seed, 0xF17u, static_cast<std::uint64_t>(d));
    while (pts.size() < 10000) {
      int i = 2 + static_cast<int>(rng.bits() % static_cast<std::uint64_t>(k - 1));
      double rho = spec.R * std::exp(rng.uniform(0.0, 2.0 * std::log(spec.R)));
      Point z(static_cast<std::size_t>(k));
      for (int j = 1; j <= k; ++j) z[static_cast<std::size_t>(j - 1)] = j == i ? rho * rng.phase() : rng.disc(rho / (k - 1.0));
      if (in_V_plus(z, spec.R)) pts.push_back(z);
    }
    std::size_t bad_sandwich = 0, bad_incl = 0;
    double lo = 1e300, hi = 0.0;
    const std::size_t members = 8;
    for (std::size_t n = 1; n <= members; ++n) {
      Automorphism S = fam.element(n).to_automorphism();
      for (const auto& z : pts) {
        XPoint w = S.apply<XComplex>(std::span<const XComplex>(to_xpoint(z)));
        double ratio = std::exp(detail::log_sup(w) - d * std::log(sup_norm(z)));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        if (ratio < spec.m_const || ratio > spec.M_const) ++bad_sandwich;
        if (!in_V(w, k, spec.R * spec.R)) ++bad_incl;
      }
    }
    if (bad_sandwich || bad_incl) r.pass = false;
    out += detail::format("%sd=%d R=%g points=%zu x %zu members ratio in [%.4f, %.4f] within [%.4f, %.4f] violations sandwich=%zu inclusion=%zu",
                          d == 4 ? "" : "; ", d, spec.R, pts.size(), members, lo, hi, spec.m_const, spec.M_const,
                          bad_sandwich, bad_incl);
  }
  r.detail = out;
  return r;
}

// 6. |G_n - G_{n+1}| <= Mtilde / d^{n+1} once S(n)z is in V_R^+, 10^3 trajectories per d.
inline CheckResult check_green_rate(const Config& cfg) {
  CheckResult r{6, "green_cauchy_rate", true, ""};
  std::string out;
  for (int d : {4, 5}) {
    PerturbedFamily fam = detail::filtration_family(d, cfg.seed + static_cast<std::uint64_t>(d));
    FiltrationSpec spec = find_filtration_spec(fam);
    AutoSequence seq = fam.sequence();
    GreenOptions opt;
    opt.tol = 1e-12;
    opt.maxiter = 60;
    opt.record = true;
    std::size_t trajectories = 0, steps = 0, violations = 0;
    double worst_ratio = 0.0;
    std::uint64_t batch = 0;
    while (trajectories < 1000 && batch < 20) {
      for (const auto& z : detail::escaping_candidates(3, spec.R, 500, cfg.seed + 50 * static_cast<std::uint64_t>(d) + batch)) {
        if (trajectories == 1000) break;
        GreenEstimate g = green_estimate(seq, z, spec, opt);
        if (!g.entry) continue;
        ++trajectories;
        for (std::size_t n = *g.entry; n + 1 < g.trajectory.size(); ++n) {
          double bound = spec.Mtilde / std::pow(static_cast<double>(d), static_cast<double>(n + 1));
          double diff = std::abs(g.trajectory[n + 1].step);
          worst_ratio = std::max(worst_ratio, diff / bound);
          if (diff > bound) ++violations;
          ++steps;
        }
      }
      ++batch;
    }
    if (trajectories < 1000 || violations) r.pass = false;
    out += detail::format("%sd=%d trajectories=%zu differences=%zu violations=%zu max ratio to bound=%.3f", d == 4 ? "" : "; ", d,
                          trajectories, steps, violations, worst_ratio);
  }
  r.detail = out;
  return r;
}

// 7. G_m(S(m) z) = d^m G_m(z) for the m-periodic restriction, m = 1, 2, 3, at 100 escaping points.
inline CheckResult check_functional_equation(const Config& cfg) {
  CheckResult r{7, "periodic_functional_equation", true, ""};
  const int d = 4;
  PerturbedFamily fam = detail::filtration_family(d, cfg.seed + 4);
  FiltrationSpec spec = find_filtration_spec(fam);
  AutoSequence seq = fam.sequence();
  GreenOptions opt;
  opt.tol = 1e-12;
  opt.maxiter = 80;
  double worst = 0.0;
  std::size_t used = 0, inconclusive = 0;
  auto cands = detail::escaping_candidates(3, spec.R, 400, cfg.seed + 77);
  for (const auto& z : cands) {
    if (used == 100) break;
    GreenEstimate probe = green_estimate(seq, z, spec, opt);
    if (!probe.entry || probe.value <= 0.0) continue;
    ++used;
    for (std::size_t m = 1; m <= 3; ++m) {
      FunctionalCheck fc = green_functional_check(seq, m, z, spec, opt);
      if (!fc.conclusive) {
        ++inconclusive;
        continue;
      }
      worst = std::max(worst, fc.residual);
    }
  }
  if (used < 100 || inconclusive || !(worst <= 1e-6)) r.pass = false;
  r.detail = detail::format("points=%zu periods=1,2,3 max relative residual=%.3e (<= 1e-6) inconclusive=%zu", used, worst,
                            inconclusive);
  return r;
}

// 8. Henon pair and shift factorization pointwise; perturbation invisible below degree d - 1.
inline CheckResult check_factorizations(const Config& cfg) {
  CheckResult r{8, "factorizations", true, ""};
  Rng rng(cfg.seed, 0xFAC7u, 0);

  AutoSequence f2 = random_triangular_sequence(detail::k2_params(cfg.seed + 300));
  ConjugationSolution s2 = solve_conjugation(f2, 3);
  double henon_err = 0.0;
  std::size_t henon_points = 0;
  bool henon_present = true;
  for (std::size_t n = 1; n <= 10; ++n) {
    const HenonProduct& g = s2.planar[n - 1];
    HenonPair hp = henon_factorize_k2(g.a, g.c, g.p, g.q);
    if (!hp.henon_first || !hp.henon_second) {
      henon_present = false;
      continue;
    }
    Automorphism H1 = hp.henon_first->to_automorphism(), H2 = hp.henon_second->to_automorphism();
    for (int t = 0; t < 100; ++t, ++henon_points) {
      Point z{rng.disc(1.0), rng.disc(1.0)};
      Point want = detail::planar_direct(g, z);
      Point via_pair = hp.first(hp.second(z));
      Point via_henon = swap_xy(H1(H2(swap_xy(z))));
      henon_err = std::max({henon_err, detail::rel_err(via_pair, want), detail::rel_err(via_henon, want)});
    }
  }

  AutoSequence f3 = random_triangular_sequence(detail::k3_params(0.1, cfg.seed + 301));
  ConjugationSolution s3 = solve_conjugation(f3, 5);
  double shift_err = 0.0;
  std::size_t shift_points = 0;
  std::vector<std::vector<WeakShift>> shifts;
  for (std::size_t n = 1; n <= 10; ++n) {
    const TriangularProduct& g = s3.triangular[n - 1];
    shifts.push_back(shift_factorize(g));
    for (int t = 0; t < 100; ++t, ++shift_points) {
      Point z{rng.disc(1.0), rng.disc(1.0), rng.disc(1.0)};
      Point w = z;
      for (const auto& S : shifts.back()) w = S.to_automorphism()(w);
      shift_err = std::max(shift_err, detail::rel_err(w, detail::triangular_direct(g, z)));
    }
  }

  // shifts as one sequence, element (n-1)k + l = S^l of g_n; then its k-blocks with and without perturbation
  int dt = 1;
  for (const auto& v : shifts)
    for (const auto& S : v) dt = std::max(dt, S.dtilde);
  const int d = dt + 2;
  auto flat = std::make_shared<std::vector<WeakShift>>();
  for (auto& v : shifts)
    for (auto& S : v) flat->push_back(WeakShift(S.k, S.a, S.p, dt));
  AutoSequence plain(3, [flat](std::size_t n) { return (*flat)[n - 1].to_automorphism(); });
  AutoSequence pert(3, [flat, d](std::size_t n) { return PerturbedWeakShift((*flat)[n - 1], d).to_automorphism(); });
  AutoSequence bp = block_compose(plain, 3), bq = block_compose(pert, 3);
  double germ_gap = 0.0;
  for (std::size_t n = 1; n <= 10; ++n) germ_gap = std::max(germ_gap, GermMap::max_abs_diff(bp.at(n).germ(d - 2), bq.at(n).germ(d - 2)));

  if (!henon_present || !(henon_err <= 1e-10) || !(shift_err <= 1e-10) || !(germ_gap <= 1e-12)) r.pass = false;
  r.detail = detail::format(
      "henon pair rel err=%.2e over %zu points, shift factorization rel err=%.2e over %zu points (<= 1e-10), "
      "order %d germ gap perturbed vs plain=%.1e (<= 1e-12)",
      henon_err, henon_points, shift_err, shift_points, d - 2, germ_gap);
  return r;
}

// 9. Diagonal linear input: h = identity, g = f, every nonlinear coefficient exactly zero.
inline CheckResult check_trivial_case(const Config& cfg) {
  CheckResult r{9, "trivial_case_exactness", true, ""};
  AutoSequence f = random_diagonal_sequence(3, {0.1, 0.6, 0.1}, cfg.seed + 900);
  ConjugationSolution sol = solve_conjugation(f, 5);
  std::size_t nonzero = 0, n_h = 0;
  for (std::size_t n = 1; n <= sol.horizon; ++n) {
    const GermMap& h = sol.h_at(n);
    for (int i = 1; i <= 3; ++i) {
      const auto& terms = h[i].terms();
      if (terms.size() != 1 || terms.begin()->first != MultiIndex::unit(3, i) || terms.begin()->second != cplx{1.0}) ++nonzero;
    }
    const TriangularProduct& g = sol.triangular[n - 1];
    Matrix L = f.at(n).linear_part();
    for (int i = 1; i <= 3; ++i) {
      if (!g.P[static_cast<std::size_t>(i - 1)].is_zero()) ++nonzero;
      if (g.u[static_cast<std::size_t>(i - 1)] != L(i - 1, i - 1)) ++nonzero;
    }
    ++n_h;
  }
  for (std::size_t s = 0; s < sol.table.slots.size(); ++s)
    for (std::size_t n = 0; n < sol.horizon; ++n)
      if (sol.table.alpha[s][n] != cplx{} || sol.table.rho[s][n] != cplx{}) ++nonzero;
  r.pass = nonzero == 0;
  r.detail = detail::format("n=1..%zu slots=%zu nonzero or mismatched entries=%zu (== 0)", n_h, sol.table.slots.size(), nonzero);
  return r;
}

// 10. B(0, rTilde) -> InBasin, V_R^k -> Escaping(0), render grid identical across thread counts.
inline CheckResult check_classification(const Config& cfg) {
  CheckResult r{10, "classification_soundness", true, ""};
  PerturbedFamily fam = detail::filtration_family(4, cfg.seed + 4);
  FiltrationSpec spec = find_filtration_spec(fam);
  AutoSequence seq = fam.sequence();
  double rt = certify_basin_radius(seq, 0.5, 3, 200, 60, cfg.seed);
  Rng rng(cfg.seed, 0xC1A5u, 0);
  std::size_t basin_bad = 0, esc_bad = 0;
  const std::size_t count = 2000;
  for (std::size_t s = 0; s < count; ++s) {
    double rad = rt * std::pow(rng.uniform(), 1.0 / 6.0) * (1.0 - 1e-12);
    Classification c = classify_point(seq, rng.sphere(3, rad), spec, rt, 200);
    if (c.tag != ClassTag::in_basin) ++basin_bad;
  }
  for (const auto& z : sample_V_boundary(3, spec.R, count, cfg.seed + 10, 3)) {
    if (!in_V(z, 3, spec.R)) continue;
    Classification c = classify_point(seq, z, spec, rt, 200);
    if (c.tag != ClassTag::escaping || c.n != 0) ++esc_bad;
  }
  RenderWindow w;
  w.base = {0.0, 0.0, 0.0};
  w.u = {0.0, 1.0, 0.0};
  w.v = {0.0, 0.0, 1.0};
  w.s_min = w.t_min = -2.0 * spec.R;
  w.s_max = w.t_max = 2.0 * spec.R;
  w.width = 96;
  w.height = 72;
  RenderResult one = render_basin(seq, w, spec, rt, 60, 1);
  bool identical = true;
  for (unsigned T : {3u, resolve_threads(cfg.threads)}) {
    RenderResult other = render_basin(seq, w, spec, rt, 60, T);
    identical = identical && other.tag == one.tag && other.steps == one.steps && other.class_plane() == one.class_plane();
  }
  r.pass = basin_bad == 0 && esc_bad == 0 && identical;
  r.detail = detail::format("rTilde=%g basin misclassified=%zu/%zu, V_R^k misclassified=%zu/%zu, render bitwise equal=%s "
                            "(grid %zux%zu: %zu basin, %zu escaping, %zu undecided)",
                            rt, basin_bad, count, esc_bad, count, identical ? "yes" : "no", w.width, w.height, one.basin,
                            one.escaping, one.undecided);
  return r;
}

using CheckFn = CheckResult (*)(const Config&);

inline const std::vector<std::pair<const char*, CheckFn>>& registry() {
  static const std::vector<std::pair<const char*, CheckFn>> checks = {
      {"germ_conjugation_k2", check_conjugation_k2},
      {"germ_conjugation_k3", check_conjugation_k3},
      {"golden_orderings", check_golden_orderings},
      {"bounded_affine_orbit", check_bounded_orbit},
      {"filtration_sandwich", check_filtration},
      {"green_cauchy_rate", check_green_rate},
      {"periodic_functional_equation", check_functional_equation},
      {"factorizations", check_factorizations},
      {"trivial_case_exactness", check_trivial_case},
      {"classification_soundness", check_classification},
  };
  return checks;
}

// An exception inside a check is a failure of that check only.
inline CheckResult run_check(std::size_t index, const Config& cfg) {
  const auto& [name, fn] = registry().at(index);
  try {
    return fn(cfg);
  } catch (const std::exception& e) {
    return {static_cast<int>(index + 1), name, false, std::string("exception: ") + e.what()};
  }
}

inline std::vector<CheckResult> run_all(const Config& cfg) {
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i < registry().size(); ++i) out.push_back(run_check(i, cfg));
  return out;
}

}  // namespace fatou::acceptance
