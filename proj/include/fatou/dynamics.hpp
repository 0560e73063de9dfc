#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fatou/filtration.hpp"
#include "fatou/sequence.hpp"
#include "fatou/xcomplex.hpp"

namespace fatou {

enum class ClassTag { in_basin, escaping, undecided };

inline const char* to_string(ClassTag t) {
  switch (t) {
    case ClassTag::in_basin: return "InBasin";
    case ClassTag::escaping: return "Escaping";
    case ClassTag::undecided: return "Undecided";
  }
  return "?";
}

struct Classification {
  ClassTag tag = ClassTag::undecided;
  std::size_t n = 0;  // step at which the orbit was certified (or the cap)
};

// InBasin(n): |S(n)z| < rTilde. Escaping(n): S(n)z in V_R^+. Tested at n = 0, 1, ..., maxiter.
inline Classification classify_point(const AutoSequence& f, const Point& z, const FiltrationSpec& spec, double rTilde,
                                     std::size_t maxiter) {
  if (static_cast<int>(z.size()) != f.dim()) throw parameter_error("point dimension mismatch");
  if (!(rTilde > 0.0) || !(rTilde < spec.R)) throw parameter_error("need 0 < rTilde < R");
  Point w = z;
  for (std::size_t n = 0;; ++n) {
    if (euclid_norm(w) < rTilde) return {ClassTag::in_basin, n};
    if (in_V_plus(w, spec.R)) return {ClassTag::escaping, n};
    if (n == maxiter) return {ClassTag::undecided, n};
    w = f.at(n + 1)(w);
    if (!all_finite(w) || sup_norm(w) > kOverflowGuard) return {ClassTag::undecided, n + 1};
  }
}

enum class GreenStatus { converged, hit_iteration_cap, escaped_early };

inline const char* to_string(GreenStatus s) {
  switch (s) {
    case GreenStatus::converged: return "converged";
    case GreenStatus::hit_iteration_cap: return "hit-iteration-cap";
    case GreenStatus::escaped_early: return "escaped-early";
  }
  return "?";
}

struct GreenSample {
  std::size_t n = 0;
  double log_sup = 0.0;   // log |S(n)z|_sup
  std::string sup;        // decimal rendering of |S(n)z|_sup
  double G = 0.0;         // d^{-n} log^+ |S(n)z|_sup
  double step = 0.0;      // G_n - G_{n-1}, from exponent-exact log differences
  double tail = std::numeric_limits<double>::infinity();  // certified |G - G_n| once inside V_R^+
};

struct GreenEstimate {
  double value = 0.0;
  std::size_t n_used = 0;
  double tail_bound = std::numeric_limits<double>::infinity();
  GreenStatus status = GreenStatus::hit_iteration_cap;
  bool in_basin = false;
  std::optional<std::size_t> entry;  // first n with S(n)z in V_R^+
  std::vector<GreenSample> trajectory;
};

struct GreenOptions {
  double tol = 1e-9;
  std::size_t maxiter = 200;
  double rTilde = 0.0;  // > 0 enables the basin shortcut G = 0
  bool record = false;
};

namespace detail {

// log|x| split as e ln2 + l with e integral, so d log|x| - log|y| keeps full precision.
struct LogMag {
  std::int64_t e = 0;
  double l = -std::numeric_limits<double>::infinity();
  double value() const { return static_cast<double>(e) * std::log(2.0) + l; }
};

inline LogMag sup_logmag(const XPoint& z) {
  LogMag best;
  double bestv = -std::numeric_limits<double>::infinity();
  for (const auto& c : z) {
    if (c.is_zero()) continue;
    double v = c.log_abs();
    if (v > bestv) {
      bestv = v;
      best = {c.exponent(), std::log(std::abs(c.mantissa()))};
    }
  }
  return best;
}

// log|y| - d log|x|
inline double log_step(const LogMag& y, const LogMag& x, int d) {
  return static_cast<double>(y.e - d * x.e) * std::log(2.0) + (y.l - d * x.l);
}

}  // namespace detail

// G(z) = lim d^{-n} log^+ |S(n) z|_sup. Once S(n0)z is in V_R^+ the increments obey
// |G_n - G_{n+1}| <= Mtilde / d^{n+1}, so the tail after n is Mtilde / (d^n (d - 1)).
inline GreenEstimate green_estimate(const AutoSequence& f, const XPoint& z, const FiltrationSpec& spec,
                                    const GreenOptions& opt = {}) {
  if (static_cast<int>(z.size()) != f.dim()) throw parameter_error("point dimension mismatch");
  if (!(opt.tol > 0.0)) throw parameter_error("tol must be positive");
  const int d = spec.d;
  GreenEstimate est;
  XPoint w = z;
  detail::LogMag lm = detail::sup_logmag(w);
  double G = std::max(0.0, lm.value());
  double step = G;
  auto finish = [&](std::size_t n, double tail, GreenStatus st) {
    est.value = G;
    est.tail_bound = tail;
    est.n_used = n;
    est.status = st;
    return est;
  };
  for (std::size_t n = 0;; ++n) {
    const double dn = std::pow(static_cast<double>(d), static_cast<double>(n));
    if (!est.entry && in_V_plus(w, spec.R)) est.entry = n;
    const double tail = est.entry ? spec.Mtilde / (dn * (d - 1.0)) : std::numeric_limits<double>::infinity();
    if (opt.record)
      est.trajectory.push_back({n, lm.value(), XComplex(cplx(std::exp(lm.l), 0.0), lm.e).abs_string(), G, step, tail});
    if (opt.rTilde > 0.0 && !est.entry && lm.value() < 0.0) {
      Point small(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) small[i] = w[i].to_cplx();
      if (euclid_norm(small) < opt.rTilde) {
        est.in_basin = true;
        G = 0.0;
        return finish(n, 0.0, GreenStatus::converged);
      }
    }
    if (est.entry && tail <= opt.tol) return finish(n, tail, GreenStatus::converged);
    if (n == opt.maxiter) return finish(n, tail, GreenStatus::hit_iteration_cap);
    XPoint next = f.at(n + 1).apply<XComplex>(std::span<const XComplex>(w));
    if (!all_finite(next)) return finish(n, tail, GreenStatus::escaped_early);
    detail::LogMag nm = detail::sup_logmag(next);
    if (lm.value() >= 0.0 && nm.value() >= 0.0) {
      step = detail::log_step(nm, lm, d) / (dn * d);
      G += step;
    } else {
      double Gn = std::max(0.0, nm.value()) / (dn * d);
      step = Gn - G;
      G = Gn;
    }
    w = std::move(next);
    lm = nm;
  }
}

inline GreenEstimate green_estimate(const AutoSequence& f, const Point& z, const FiltrationSpec& spec,
                                    const GreenOptions& opt = {}) {
  return green_estimate(f, to_xpoint(z), spec, opt);
}

struct FunctionalCheck {
  bool conclusive = false;
  double residual = 0.0;   // |G(S(m)z) - d^m G(z)| / max(1, d^m G(z))
  double certified = 0.0;  // combined tails on the same scale
  double G_image = 0.0;
  double G_point = 0.0;
};

// For the m-periodic restriction s of f: G_s(S(m) z) = d^m G_s(z).
inline FunctionalCheck green_functional_check(const AutoSequence& f, std::size_t m, const Point& z,
                                              const FiltrationSpec& spec, const GreenOptions& opt = {}) {
  AutoSequence s = periodic_restriction(f, m);
  XPoint w = to_xpoint(z);
  for (std::size_t n = 1; n <= m; ++n) w = s.at(n).apply<XComplex>(std::span<const XComplex>(w));
  GreenEstimate a = green_estimate(s, w, spec, opt);
  GreenEstimate b = green_estimate(s, to_xpoint(z), spec, opt);
  FunctionalCheck out;
  if (a.status != GreenStatus::converged || b.status != GreenStatus::converged) return out;
  const double dm = std::pow(static_cast<double>(spec.d), static_cast<double>(m));
  const double scale = std::max(1.0, dm * b.value);
  out.conclusive = true;
  out.G_image = a.value;
  out.G_point = b.value;
  out.residual = std::abs(a.value - dm * b.value) / scale;
  out.certified = (a.tail_bound + dm * b.tail_bound) / scale;
  return out;
}

// Thread count: explicit value, else FATOU_THREADS, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FATOU_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Radius r with sampled block contraction |F_n z| <= q |z|, q < 1, on B(0, r) for the
// k-step blocks F_n; halves from r0 until that holds.
inline double certify_basin_radius(const AutoSequence& f, double r0, std::size_t block, std::size_t samples,
                                   std::size_t horizon, std::uint64_t seed = 0) {
  AutoSequence F = block_compose(f, block);
  double r = r0;
  for (int j = 0; j < 40; ++j, r *= 0.5) {
    try {
      auto est = estimate_attraction_bounds(F, r, samples, horizon, seed);
      if (est.B_est < 1.0) return r;
    } catch (const overflow_error&) {
    }
  }
  throw hypothesis_error("no attracting ball found below the starting radius");
}

}  // namespace fatou
