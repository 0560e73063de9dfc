#pragma once

#include <span>
#include <vector>

#include "fatou/core.hpp"
#include "fatou/jet.hpp"
#include "fatou/polynomial.hpp"

namespace fatou {

// k-component polynomial map truncated at a common order.
struct GermMap {
  int k = 0;
  int order = 0;
  std::vector<Polynomial> components;

  GermMap() = default;
  GermMap(int dim, int ord) : k(dim), order(ord) {
    if (ord < 1) throw parameter_error("germ order must be >= 1");
    components.assign(static_cast<std::size_t>(dim), Polynomial(dim, ord));
  }

  static GermMap identity(int dim, int ord) {
    GermMap g(dim, ord);
    for (int i = 1; i <= dim; ++i) g[i].set(MultiIndex::unit(dim, i), 1.0);
    return g;
  }

  static GermMap linear(const Matrix& M, int ord) {
    const int dim = static_cast<int>(M.rows());
    GermMap g(dim, ord);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g[i + 1].set(MultiIndex::unit(dim, j + 1), M(i, j));
    return g;
  }

  // 1-based component access.
  Polynomial& operator[](int coord) { return components[static_cast<std::size_t>(coord - 1)]; }
  const Polynomial& operator[](int coord) const { return components[static_cast<std::size_t>(coord - 1)]; }

  Matrix linear_part() const {
    Matrix L = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) L(i, j) = components[static_cast<std::size_t>(i)].coeff(MultiIndex::unit(k, j + 1));
    return L;
  }

  bool has_constant_term() const {
    for (const auto& p : components)
      if (p.coeff(MultiIndex(k)) != cplx{}) return true;
    return false;
  }

  template <class S>
  std::vector<S> evaluate(std::span<const S> z) const {
    std::vector<S> out;
    out.reserve(components.size());
    for (const auto& p : components) out.push_back(p.evaluate<S>(z));
    return out;
  }

  Point operator()(const Point& z) const { return evaluate<cplx>(std::span<const cplx>(z)); }

  static double max_abs_diff(const GermMap& a, const GermMap& b) {
    if (a.k != b.k) throw parameter_error("germ dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.components.size(); ++i)
      d = std::max(d, Polynomial::max_abs_diff(a.components[i], b.components[i]));
    return d;
  }
};

inline GermMap truncate(const GermMap& g, int order) {
  if (order < 1) throw parameter_error("truncation order must be >= 1");
  GermMap r = g;
  r.order = std::min(order, g.order);
  for (auto& p : r.components) p = p.truncated(r.order).with_max_degree(r.order);
  return r;
}

inline std::vector<Jet> to_jets(const JetSpace& s, const GermMap& g) {
  std::vector<Jet> out;
  for (const auto& p : g.components) out.push_back(to_jet(s, p));
  return out;
}

inline std::vector<Jet> to_jets(const JetSpace& s, const std::vector<Polynomial>& comps) {
  std::vector<Jet> out;
  for (const auto& p : comps) out.push_back(to_jet(s, p));
  return out;
}

inline GermMap from_jets(const JetSpace& s, const std::vector<Jet>& j) {
  GermMap g(s.dim(), s.order());
  for (std::size_t i = 0; i < j.size(); ++i) g.components[i] = from_jet(s, j[i]);
  return g;
}

// [f o g]_order. g must fix the origin.
inline GermMap compose_truncated(const GermMap& f, const GermMap& g, int order) {
  if (f.k != g.k) throw parameter_error("compose: dimension mismatch");
  if (order < 1) throw parameter_error("compose: order must be >= 1");
  if (g.has_constant_term()) throw domain_error("compose: inner germ has a constant term");
  auto s = JetSpace::get(f.k, order);
  return from_jets(*s, jet_compose(*s, to_jets(*s, f), to_jets(*s, g)));
}

// Jet-level inverse: Newton on homogeneous degrees, g <- g - L^{-1} [f o g]_d.
inline std::vector<Jet> jet_invert(const JetSpace& s, const std::vector<Jet>& f, const Matrix& L) {
  const int k = s.dim();
  Eigen::FullPivLU<Matrix> lu(L);
  if (!lu.isInvertible()) throw domain_error("invert_germ: linear part is singular");
  Matrix Li = lu.inverse();
  std::vector<Jet> g(static_cast<std::size_t>(k), s.zero());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g[static_cast<std::size_t>(i)][s.index(MultiIndex::unit(k, j + 1))] = Li(i, j);
  for (int d = 2; d <= s.order(); ++d) {
    auto fg = jet_compose(s, f, g);
    for (std::size_t t = s.begin(d); t < s.begin(d + 1); ++t)
      for (int i = 0; i < k; ++i) {
        cplx corr{};
        for (int j = 0; j < k; ++j) corr += Li(i, j) * fg[static_cast<std::size_t>(j)][t];
        g[static_cast<std::size_t>(i)][t] -= corr;
      }
  }
  return g;
}

inline GermMap invert_germ(const GermMap& f, int order) {
  if (order < 1) throw parameter_error("invert: order must be >= 1");
  if (f.has_constant_term()) throw domain_error("invert_germ: germ does not fix the origin");
  Matrix L = f.linear_part();
  if (std::abs(L.determinant()) < 1e-300) throw domain_error("invert_germ: linear part is singular");
  auto s = JetSpace::get(f.k, order);
  return from_jets(*s, jet_invert(*s, to_jets(*s, f), L));
}

}  // namespace fatou
