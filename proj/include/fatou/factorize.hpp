#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fatou/maps.hpp"
#include "fatou/random.hpp"
#include "fatou/sequence.hpp"

namespace fatou {

// Pair of planar factors whose composition first o second is g, together
// with their conjugates by (x, y) -> (y, x), which are Henon maps.
struct HenonPair {
  Automorphism first;   // (a y + p(x/c), x)
  Automorphism second;  // (c y + q(x), x)
  std::optional<HenonMap> henon_first;   // (y, a x + p(y/c))
  std::optional<HenonMap> henon_second;  // (y, c x + q(y))
};

namespace detail {

inline void check_univariate_germ(const Polynomial& p, const char* name, bool allow_linear) {
  if (p.dim() != 1) throw domain_error(std::string(name) + " must be a one-variable polynomial");
  if (p.coeff(MultiIndex{0}) != cplx{}) throw domain_error(std::string(name) + " must vanish at 0");
  if (!allow_linear && p.coeff(MultiIndex{1}) != cplx{}) throw domain_error(std::string(name) + " must have no linear term");
  int d = p.degree();
  if (d >= 2 && std::abs(p.coeff(MultiIndex{d}) - 1.0) > 1e-12)
    throw domain_error(std::string(name) + " must be monic");
}

}  // namespace detail

// g(x, y) = (a x + p(y + q(x)/c), c y + q(x)), q'(0) = b. Linear data p = 0, q = b x is
// accepted; the Henon conjugates are then absent.
inline HenonPair henon_factorize_k2(cplx a, cplx c, const Polynomial& p, const Polynomial& q) {
  if (a == cplx{} || c == cplx{}) throw domain_error("Henon factorization needs a, c != 0");
  detail::check_univariate_germ(p, "p", false);
  detail::check_univariate_germ(q, "q", true);
  HenonProduct g{a, c, p, q};
  HenonPair out{g.first(), g.second(), std::nullopt, std::nullopt};
  if (p.degree() >= 2) {
    Polynomial ps(1, p.max_degree());
    for (const auto& [m, v] : p.terms()) ps.set(m, v * std::pow(1.0 / c, m[0]));
    out.henon_first = HenonMap(a, ps);
  }
  if (q.degree() >= 2) out.henon_second = HenonMap(c, q);
  return out;
}

inline Point swap_xy(const Point& z) { return {z[1], z[0]}; }

// Rotation (z_1..z_k) -> (z_{j+1}, ..., z_k, z_1, ..., z_j).
inline Point rotate_left(const Point& z, int j) {
  const int k = static_cast<int>(z.size());
  Point r(z.size());
  for (int t = 0; t < k; ++t) r[static_cast<std::size_t>(t)] = z[static_cast<std::size_t>((t + j) % k)];
  return r;
}

// g = T^k o ... o T^1 written as S^k o ... o S^1 with weak shifts S^l.
// After l shifts the state is (z_{l+1}, ..., z_k, g_1, ..., g_l), so shift l+1 reads
// P^{l+1} with its variables permuted into that layout.
inline std::vector<WeakShift> shift_factorize(const TriangularProduct& g) {
  const int k = g.k;
  if (k < 2) throw parameter_error("shift factorization needs k >= 2");
  if (static_cast<int>(g.u.size()) != k || static_cast<int>(g.P.size()) != k)
    throw parameter_error("triangular product needs k multipliers and k polynomials");
  std::vector<WeakShift> out;
  for (int l = 0; l < k; ++l) {
    const Polynomial& Pl = g.P[static_cast<std::size_t>(l)];
    if (Pl.dim() != k) throw parameter_error("P^i must have k variables");
    if (Pl.depends_on(l + 1)) throw domain_error("P^" + std::to_string(l + 1) + " depends on its own coordinate");
    // variable w_t (1-based) of P^{l+1} sits at state position:
    //   t <= l      -> k - l + t
    //   t >= l + 2  -> t - l - 1 + 1 = t - l   (state holds z_{l+1+s} at position s)
    std::vector<int> dst(static_cast<std::size_t>(k), -1);
    for (int t = 1; t <= k; ++t) {
      if (t == l + 1) continue;
      int pos = t <= l ? k - l + t : t - l;  // pos in 1..k, never 1
      dst[static_cast<std::size_t>(t - 1)] = pos - 1;
    }
    Polynomial p = detail::relabel(Pl, k, dst);
    int dt = std::max(1, p.degree());
    out.emplace_back(k, g.u[static_cast<std::size_t>(l)], p, dt);
  }
  return out;
}

// Uniformly bounded family of weak shifts: mtilde < |a_n| < Mtilde, |coefficients| < Mtilde.
struct WeakShiftFamily {
  int k = 3;
  int dtilde = 2;
  double mtilde = 0.0;
  double Mtilde = 1.0;
  std::function<WeakShift(std::size_t)> element;
  std::optional<std::size_t> period;

  AutoSequence sequence() const {
    auto el = element;
    return {k, [el](std::size_t n) { return el(n).to_automorphism(); }, std::nullopt, period};
  }

  // Number of tuples (i_2, ..., i_k) with i_2 + ... + i_k <= dtilde.
  std::size_t index_count() const {
    double c = 1.0;
    for (int t = 1; t <= k - 1; ++t) c = c * (dtilde + t) / t;
    return static_cast<std::size_t>(std::llround(c));
  }
};

struct PerturbedFamily {
  WeakShiftFamily base;
  int d = 4;

  PerturbedWeakShift element(std::size_t n) const { return PerturbedWeakShift(base.element(n), d); }

  AutoSequence sequence() const {
    auto self = *this;
    return {base.k, [self](std::size_t n) { return self.element(n).to_automorphism(); }, std::nullopt, base.period};
  }
};

inline PerturbedFamily perturb(const WeakShiftFamily& f, int d) {
  if (f.k < 3) throw parameter_error("perturbation needs k >= 3");
  if (d < f.dtilde + 2) throw parameter_error("perturbation degree must be >= dtilde + 2");
  return {f, d};
}

// Seeded family: |a| uniform in [lo_a, hi_a], each coefficient of p (degrees 1..dtilde,
// no constant term) of modulus <= coeff_bound.
inline WeakShiftFamily random_weak_shift_family(int k, int dtilde, double lo_a, double hi_a, double coeff_bound,
                                                std::uint64_t seed) {
  if (k < 2) throw parameter_error("weak shift family needs k >= 2");
  if (!(0.0 < lo_a && lo_a <= hi_a)) throw parameter_error("weak shift multiplier bounds need 0 < lo <= hi");
  WeakShiftFamily fam;
  fam.k = k;
  fam.dtilde = dtilde;
  fam.mtilde = lo_a * 0.5;
  fam.Mtilde = std::max(hi_a, coeff_bound) * 1.5 + 1e-12;
  fam.element = [=](std::size_t n) {
    Rng rng(seed, 0x5151u, n);
    cplx a = rng.annulus(lo_a, hi_a);
    Polynomial p(k, dtilde);
    for (int deg = 1; deg <= dtilde; ++deg)
      for (auto& m : homogeneous_indices(k, deg))
        if (m[0] == 0) p.set(m, rng.disc(coeff_bound));
    // keep the declared degree attained
    MultiIndex top(k);
    top.set(k - 1, dtilde);
    if (p.coeff(top) == cplx{}) p.set(top, coeff_bound * 0.5);
    return WeakShift(k, a, p, dtilde);
  };
  return fam;
}

}  // namespace fatou
