#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fatou/automorphism.hpp"
#include "fatou/core.hpp"
#include "fatou/polynomial.hpp"

namespace fatou {

namespace detail {

// p(t) in one variable, re-expressed in k variables with t = z_coord.
inline Polynomial lift_univariate(const Polynomial& p, int k, int coord) {
  if (p.dim() != 1) throw parameter_error("expected a one-variable polynomial");
  Polynomial r(k, p.max_degree());
  for (const auto& [m, c] : p.terms()) {
    MultiIndex e(k);
    e.set(coord - 1, m[0]);
    r.set(e, c);
  }
  return r;
}

// Re-index variables: term z^m becomes z^e with e[dst[j]] = m[j] (0-based, dst[j] < 0 drops a zero exponent).
inline Polynomial relabel(const Polynomial& p, int k_out, const std::vector<int>& dst) {
  Polynomial r(k_out, p.max_degree());
  for (const auto& [m, c] : p.terms()) {
    MultiIndex e(k_out);
    for (int j = 0; j < p.dim(); ++j) {
      if (m[j] == 0) continue;
      int t = dst[static_cast<std::size_t>(j)];
      if (t < 0) throw domain_error("relabel: dropped variable carries a nonzero exponent");
      e.set(t, e[t] + m[j]);
    }
    r.add(e, c);
  }
  return r;
}

inline Polynomial coordinate(int k, int coord, int maxdeg = 1) { return Polynomial::variable(k, coord, maxdeg); }

inline Polynomial scaled_variable(int k, int coord, cplx s, int maxdeg = 1) {
  Polynomial p(k, maxdeg);
  p.set(MultiIndex::unit(k, coord), s);
  return p;
}

inline std::vector<Polynomial> identity_comps(int k, int maxdeg) {
  std::vector<Polynomial> c;
  for (int i = 1; i <= k; ++i) c.push_back(coordinate(k, i, maxdeg));
  return c;
}

}  // namespace detail

// (x, y) -> (y, delta x + P(y)).
struct HenonMap {
  cplx delta;
  Polynomial P;  // one variable

  HenonMap(cplx d, Polynomial p) : delta(d), P(std::move(p)) {
    if (delta == cplx{}) throw parameter_error("Henon map needs delta != 0");
    if (P.dim() != 1) throw parameter_error("Henon map needs a one-variable P");
    if (P.degree() < 2) throw parameter_error("Henon map needs deg P >= 2");
  }

  int degree() const { return P.degree(); }

  Automorphism to_automorphism() const {
    const int d = std::max(1, P.degree());
    std::vector<Polynomial> f{detail::coordinate(2, 2, d), detail::scaled_variable(2, 1, delta, d)};
    f[1] += detail::lift_univariate(P, 2, 2).with_max_degree(d);
    // inverse: (x, y) -> ((y - P(x)) / delta, x)
    Polynomial i1 = detail::coordinate(2, 2, d) - detail::lift_univariate(P, 2, 1).with_max_degree(d);
    i1 *= 1.0 / delta;
    std::vector<Polynomial> g{i1, detail::coordinate(2, 1, d)};
    return {{PolyMap(2, f)}, std::vector<PolyMap>{PolyMap(2, g)}, "henon"};
  }
};

// T(z) = (z_1, ..., a z_coord + P(z), ..., z_k) with P independent of z_coord.
struct ElementaryMap {
  int k;
  int coord;
  cplx a;
  Polynomial P;

  ElementaryMap(int dim, int c, cplx mult, Polynomial p) : k(dim), coord(c), a(mult), P(std::move(p)) {
    if (coord < 1 || coord > k) throw parameter_error("elementary map coordinate out of range");
    if (a == cplx{}) throw parameter_error("elementary map needs a != 0");
    if (P.dim() != k) throw parameter_error("elementary map polynomial must have k variables");
    if (P.depends_on(coord)) throw domain_error("elementary map polynomial depends on its own coordinate");
  }

  Automorphism to_automorphism() const {
    const int d = std::max(1, P.degree());
    auto f = detail::identity_comps(k, d);
    auto g = f;
    f[static_cast<std::size_t>(coord - 1)] = detail::scaled_variable(k, coord, a, d) + P.with_max_degree(d);
    Polynomial inv = detail::coordinate(k, coord, d) - P.with_max_degree(d);
    inv *= 1.0 / a;
    g[static_cast<std::size_t>(coord - 1)] = inv;
    return {{PolyMap(k, f)}, std::vector<PolyMap>{PolyMap(k, g)}, "elementary"};
  }
};

// S(z) = (z_2, ..., z_k, a z_1 + p(z_2, ..., z_k)); p is stored in k variables with no z_1.
struct WeakShift {
  int k;
  cplx a;
  Polynomial p;
  int dtilde;

  WeakShift(int dim, cplx mult, Polynomial poly, int dt) : k(dim), a(mult), p(std::move(poly)), dtilde(dt) {
    if (k < 2) throw parameter_error("weak shift needs k >= 2");
    if (a == cplx{}) throw parameter_error("weak shift needs a != 0");
    if (p.dim() != k) throw parameter_error("weak shift polynomial must have k variables");
    if (p.depends_on(1)) throw domain_error("weak shift polynomial depends on z_1");
    if (dtilde < 1) throw parameter_error("weak shift degree must be >= 1");
    if (p.degree() > dtilde) throw parameter_error("weak shift polynomial exceeds its declared degree");
  }

  Automorphism to_automorphism() const { return build(p); }

  // Same shape with p replaced; used by the perturbed form.
  Automorphism build(const Polynomial& poly) const {
    const int d = std::max(1, poly.degree());
    std::vector<Polynomial> f;
    for (int j = 2; j <= k; ++j) f.push_back(detail::coordinate(k, j, d));
    f.push_back(detail::scaled_variable(k, 1, a, d) + poly.with_max_degree(d));
    // inverse: z_{j+1} = w_j, z_1 = (w_k - p(w_1, ..., w_{k-1})) / a
    std::vector<int> dst(static_cast<std::size_t>(k));
    dst[0] = -1;
    for (int j = 1; j < k; ++j) dst[static_cast<std::size_t>(j)] = j - 1;
    Polynomial z1 = detail::coordinate(k, k, d) - detail::relabel(poly, k, dst).with_max_degree(d);
    z1 *= 1.0 / a;
    std::vector<Polynomial> g{z1};
    for (int j = 1; j < k; ++j) g.push_back(detail::coordinate(k, j, d));
    return {{PolyMap(k, f)}, std::vector<PolyMap>{PolyMap(k, g)}, "weakshift"};
  }
};

// Weak shift plus (0, ..., 0, z_2^{d-1}, z_2^d + ... + z_k^d); needs k >= 3, d >= dtilde + 2.
struct PerturbedWeakShift {
  WeakShift base;
  int d;

  PerturbedWeakShift(WeakShift b, int deg) : base(std::move(b)), d(deg) {
    if (base.k < 3) throw parameter_error("perturbation needs k >= 3");
    if (d < base.dtilde + 2) throw parameter_error("perturbation degree must be >= dtilde + 2");
  }

  int k() const { return base.k; }

  Polynomial top_form() const {
    Polynomial H(base.k, d);
    for (int j = 2; j <= base.k; ++j) {
      MultiIndex m(base.k);
      m.set(j - 1, d);
      H.set(m, 1.0);
    }
    return H;
  }

  // Weak shift with p + H_d, followed by the shear adding w_1^{d-1} to coordinate k-1.
  Automorphism to_automorphism() const {
    const int k = base.k;
    Polynomial q = base.p.with_max_degree(d) + top_form();
    Automorphism ws = base.build(q);
    MultiIndex e1(k);
    e1.set(0, d - 1);
    Polynomial shear(k, d - 1);
    shear.set(e1, 1.0);
    Automorphism sh = ElementaryMap(k, k - 1, 1.0, shear).to_automorphism();
    Automorphism r = compose(sh, ws);
    return {r.factors(), r.inverse_factors(), "perturbed"};
  }
};

// g(x, y) = (a x + p(y + q(x)/c), c y + q(x)) as (a y + p(x/c), x) o (c y + q(x), x).
struct HenonProduct {
  cplx a, c;
  Polynomial p;  // one variable, p(0) = p'(0) = 0
  Polynomial q;  // one variable, q(0) = 0, q'(0) = b

  cplx b() const { return q.coeff(MultiIndex{1}); }

  // (c y + q(x), x)
  Automorphism second() const {
    const int d = std::max(1, q.degree());
    std::vector<Polynomial> f{detail::scaled_variable(2, 2, c, d) + detail::lift_univariate(q, 2, 1).with_max_degree(d),
                              detail::coordinate(2, 1, d)};
    // inverse: (X, Y) -> (Y, (X - q(Y)) / c)
    Polynomial y = detail::coordinate(2, 1, d) - detail::lift_univariate(q, 2, 2).with_max_degree(d);
    y *= 1.0 / c;
    std::vector<Polynomial> g{detail::coordinate(2, 2, d), y};
    return {{PolyMap(2, f)}, std::vector<PolyMap>{PolyMap(2, g)}, "henon_factor"};
  }

  // (a y + p(x / c), x)
  Automorphism first() const {
    const int d = std::max(1, p.degree());
    Polynomial ps(1, p.max_degree());
    for (const auto& [m, v] : p.terms()) ps.set(m, v * std::pow(1.0 / c, m[0]));
    std::vector<Polynomial> f{detail::scaled_variable(2, 2, a, d) + detail::lift_univariate(ps, 2, 1).with_max_degree(d),
                              detail::coordinate(2, 1, d)};
    Polynomial y = detail::coordinate(2, 1, d) - detail::lift_univariate(ps, 2, 2).with_max_degree(d);
    y *= 1.0 / a;
    std::vector<Polynomial> g{detail::coordinate(2, 2, d), y};
    return {{PolyMap(2, f)}, std::vector<PolyMap>{PolyMap(2, g)}, "henon_factor"};
  }

  Automorphism to_automorphism() const {
    Automorphism r = compose(first(), second());
    return {r.factors(), r.inverse_factors(), "henon_product"};
  }
};

// g = T^k o ... o T^1 with T^i(z) = (..., u_i z_i + P^i(z), ...), P^i independent of z_i.
struct TriangularProduct {
  int k = 0;
  std::vector<cplx> u;         // diagonal multipliers
  std::vector<Polynomial> P;   // P[i-1] = P^i in k variables

  ElementaryMap factor(int i) const {
    return ElementaryMap(k, i, u[static_cast<std::size_t>(i - 1)], P[static_cast<std::size_t>(i - 1)]);
  }

  Automorphism to_automorphism() const {
    Automorphism r = factor(1).to_automorphism();
    for (int i = 2; i <= k; ++i) r = compose(factor(i).to_automorphism(), r);
    return {r.factors(), r.inverse_factors(), "triangular_product"};
  }

  int degree() const {
    int d = 1;
    for (const auto& p : P) d = std::max(d, p.degree());
    return d;
  }
};

}  // namespace fatou
