#pragma once

// Escape regions for perturbed weak shifts (k >= 3):
//   V_R^i  = { |z_i| >= max((k-1)|z_j|, R) for j != i }
//   V_R^+  = V_R^2 u ... u V_R^k,  V_R^- = V_R^1
//   W_R^-  = { (k-1)|z_1| >= max(|z_2|, ..., |z_k|, R) }
// On V_R^i one step gives m |z_i|^d <= |pi_k S(z)| <= M |z_i|^d and lands in V_{R^2}^k.

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "fatou/core.hpp"
#include "fatou/factorize.hpp"
#include "fatou/random.hpp"
#include "fatou/xcomplex.hpp"

namespace fatou {

struct FiltrationSpec {
  int k = 3;
  int d = 4;
  int dtilde = 2;
  double R = 0.0;
  double m_const = 0.0;  // lower sandwich constant
  double M_const = 0.0;  // upper sandwich constant
  double Mtilde = 0.0;   // Cauchy-rate constant for Green estimates
  double m_inv = 0.0;    // |pi_1 S^{-1}(z)| >= m_inv |z_1|^{d^2-d} on V_R^-
  double M_inv = 0.0;    // ... <= M_inv |z_1|^{d^2-d}
  double coeff_bound = 0.0;
  std::size_t m0 = 0;
  std::size_t sampled_points = 0;
  std::size_t sampled_steps = 0;
  std::vector<std::string> inequalities;  // analytic conditions verified at R

  double log_R() const { return std::log(R); }
};

namespace detail {

inline bool mag_ge(const cplx& a, double factor, const cplx& b) { return std::abs(a) >= factor * std::abs(b); }
inline bool mag_ge(const XComplex& a, double factor, const XComplex& b) {
  if (b.is_zero()) return true;
  if (a.is_zero()) return false;
  return a.log_abs() >= std::log(factor) + b.log_abs();
}
inline bool mag_ge_scalar(const cplx& a, double R) { return std::abs(a) >= R; }
inline bool mag_ge_scalar(const XComplex& a, double R) { return !a.is_zero() && a.log_abs() >= std::log(R); }

}  // namespace detail

template <class S>
bool in_V(const std::vector<S>& z, int i, double R) {
  const int k = static_cast<int>(z.size());
  const S& zi = z[static_cast<std::size_t>(i - 1)];
  if (!detail::mag_ge_scalar(zi, R)) return false;
  for (int j = 1; j <= k; ++j)
    if (j != i && !detail::mag_ge(zi, k - 1.0, z[static_cast<std::size_t>(j - 1)])) return false;
  return true;
}

// Index i in 2..k with z in V_R^i, or 0.
template <class S>
int in_V_plus_index(const std::vector<S>& z, double R) {
  for (int i = 2; i <= static_cast<int>(z.size()); ++i)
    if (in_V(z, i, R)) return i;
  return 0;
}

template <class S>
bool in_V_plus(const std::vector<S>& z, double R) { return in_V_plus_index(z, R) != 0; }

template <class S>
bool in_V_minus(const std::vector<S>& z, double R) { return in_V(z, 1, R); }

template <class S>
bool in_W_minus(const std::vector<S>& z, double R) {
  const int k = static_cast<int>(z.size());
  // (k-1)|z_1| >= R and >= |z_j|
  if constexpr (std::is_same_v<S, cplx>) {
    if ((k - 1) * std::abs(z[0]) < R) return false;
    for (int j = 1; j < k; ++j)
      if ((k - 1) * std::abs(z[0]) < std::abs(z[static_cast<std::size_t>(j)])) return false;
    return true;
  } else {
    if (z[0].is_zero()) return false;
    double l = std::log(k - 1.0) + z[0].log_abs();
    if (l < std::log(R)) return false;
    for (int j = 1; j < k; ++j)
      if (l < z[static_cast<std::size_t>(j)].log_abs()) return false;
    return true;
  }
}

struct FiltrationOptions {
  double R_cap = 0x1.0p40;
  std::size_t samples = 2000;
  std::size_t steps = 16;  // family members checked empirically
  std::uint64_t seed = 7;
};

// Points on and near the boundary of V_R^i: |z_i| = rho in [R, 4R], |z_j| <= rho/(k-1),
// half of them with some |z_j| exactly at rho/(k-1).
inline std::vector<Point> sample_V_boundary(int k, double R, std::size_t count, std::uint64_t seed, int first_coord = 2) {
  std::vector<Point> pts;
  Rng rng(seed, 0xB0Du, static_cast<std::uint64_t>(R * 1024.0));
  for (std::size_t s = 0; s < count; ++s) {
    int i = first_coord + static_cast<int>(s % static_cast<std::size_t>(k - first_coord + 1));
    double rho = R * (s % 3 == 0 ? 1.0 : rng.uniform(1.0, 4.0));
    Point z(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
      if (j == i) {
        z[static_cast<std::size_t>(j - 1)] = rho * rng.phase();
      } else {
        double lim = rho / (k - 1.0);
        z[static_cast<std::size_t>(j - 1)] = (s % 2 == 0 ? lim : lim * std::sqrt(rng.uniform())) * rng.phase();
      }
    }
    pts.push_back(z);
  }
  return pts;
}

namespace detail {

struct RegionCheck {
  bool sandwich = true;
  bool inclusion = true;
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
};

// |pi_k S(z)| / |z_i|^d and S(z) in V^k_{R^2} for sampled z on V_R^+.
inline RegionCheck check_region(const PerturbedFamily& fam, const std::vector<Point>& pts, std::size_t steps, double R,
                                double m, double M) {
  RegionCheck rc;
  const int k = fam.base.k;
  for (std::size_t n = 1; n <= steps; ++n) {
    Automorphism S = fam.element(n).to_automorphism();
    for (const auto& z : pts) {
      int i = in_V_plus_index(z, R);
      if (!i) continue;
      XPoint w = S.apply<XComplex>(std::span<const XComplex>(to_xpoint(z)));
      double lr = w[static_cast<std::size_t>(k - 1)].log_abs() - fam.d * std::log(std::abs(z[static_cast<std::size_t>(i - 1)]));
      double ratio = std::exp(lr);
      rc.ratio_min = std::min(rc.ratio_min, ratio);
      rc.ratio_max = std::max(rc.ratio_max, ratio);
      if (ratio < m || ratio > M) rc.sandwich = false;
      if (!in_V(w, k, R * R)) rc.inclusion = false;
    }
  }
  return rc;
}

}  // namespace detail

// Least R = 2^j (j >= 1) meeting the analytic sufficient conditions, then confirmed on a
// deterministic sample of V_R^+ for the first `steps` family members.
inline FiltrationSpec find_filtration_spec(const PerturbedFamily& fam, const FiltrationOptions& opt = {}) {
  const int k = fam.base.k, d = fam.d, dt = fam.base.dtilde;
  if (k < 3) throw parameter_error("filtration needs k >= 3");
  if (d < dt + 2) throw parameter_error("filtration needs d >= dtilde + 2");
  const double Mt = fam.base.Mtilde;
  if (!(Mt > 0.0) || !(fam.base.mtilde > 0.0)) throw parameter_error("family bounds must be positive");
  const std::size_t m0 = fam.base.index_count();

  const double eps = 1.0 / (4.0 * (k - 1));
  const double m = 1.0 / (k - 1) - eps;
  const double M = (k - 1) + eps;
  const double spread = (k - 2) / std::pow(k - 1.0, d);

  std::string last_failure = "none";
  for (int j = 1; std::ldexp(1.0, j) <= opt.R_cap; ++j) {
    const double R = std::ldexp(1.0, j);
    const double base = Mt * (m0 + 1.0) * std::pow(R, dt - d);
    struct Named {
      const char* name;
      bool ok;
    };
    const Named conds[] = {
        {"base term dominated: M(m0+1) R^(dtilde-d) <= 1 - (k-2)/(k-1)^d - m", 1.0 - spread - base >= m},
        {"upper sandwich: 1 + (k-2)/(k-1)^d + M(m0+1) R^(dtilde-d) <= M", 1.0 + spread + base <= M},
        {"escape: m R^(d-2) >= 1", m * std::pow(R, d - 2) >= 1.0},
        {"dominance in V^k: m R >= 2(k-1)", m * R >= 2.0 * (k - 1)},
    };
    bool ok = true;
    for (const auto& c : conds)
      if (!c.ok) {
        ok = false;
        last_failure = c.name;
        break;
      }
    if (!ok) continue;

    auto pts = sample_V_boundary(k, R, opt.samples, opt.seed);
    auto rc = detail::check_region(fam, pts, opt.steps, R, m, M);
    if (!rc.sandwich || !rc.inclusion) {
      last_failure = !rc.sandwich ? "empirical sandwich" : "empirical inclusion into V^k_{R^2}";
      continue;
    }

    FiltrationSpec spec;
    spec.k = k;
    spec.d = d;
    spec.dtilde = dt;
    spec.R = R;
    spec.m_const = m;
    spec.M_const = M;
    const double Rt = std::max(R, 4.0 * (k - 1.0) * (k - 1.0));
    spec.Mtilde = std::max({std::log(Rt), std::abs(std::log(M)), std::abs(std::log(m)), std::abs(std::log(Mt * (m0 + d)))});
    spec.m_inv = 1.0 / (2.0 * Mt);
    spec.M_inv = 2.0 / fam.base.mtilde;
    spec.coeff_bound = Mt;
    spec.m0 = m0;
    spec.sampled_points = pts.size();
    spec.sampled_steps = opt.steps;
    for (const auto& c : conds) spec.inequalities.emplace_back(c.name);
    return spec;
  }
  throw search_error("no R <= R_cap satisfies the filtration conditions; last violated: " + last_failure);
}

}  // namespace fatou
