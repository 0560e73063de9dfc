#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fatou/core.hpp"
#include "fatou/germ.hpp"
#include "fatou/jet.hpp"
#include "fatou/polynomial.hpp"

namespace fatou {

// An exact polynomial self-map of C^k.
struct PolyMap {
  int k = 0;
  std::vector<Polynomial> comps;

  PolyMap() = default;
  PolyMap(int dim, std::vector<Polynomial> c) : k(dim), comps(std::move(c)) {
    if (static_cast<int>(comps.size()) != k) throw parameter_error("poly map needs k components");
    for (const auto& p : comps)
      if (p.dim() != k) throw parameter_error("poly map component dimension mismatch");
  }

  static PolyMap linear(const Matrix& M) {
    const int dim = static_cast<int>(M.rows());
    std::vector<Polynomial> c(static_cast<std::size_t>(dim), Polynomial(dim, 1));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) c[static_cast<std::size_t>(i)].set(MultiIndex::unit(dim, j + 1), M(i, j));
    return {dim, std::move(c)};
  }

  static PolyMap from_germ(const GermMap& g) { return {g.k, g.components}; }

  int degree() const {
    int d = 0;
    for (const auto& p : comps) d = std::max(d, p.degree());
    return d;
  }

  bool fixes_origin() const {
    for (const auto& p : comps)
      if (p.coeff(MultiIndex(k)) != cplx{}) return false;
    return true;
  }

  template <class S>
  std::vector<S> evaluate(std::span<const S> z) const {
    std::vector<S> out;
    out.reserve(comps.size());
    for (const auto& p : comps) out.push_back(p.evaluate<S>(z));
    return out;
  }
};

// A chain of polynomial maps applied first to last, optionally paired
// with a chain for the inverse.
class Automorphism {
 public:
  Automorphism() = default;
  Automorphism(std::vector<PolyMap> forward, std::optional<std::vector<PolyMap>> inverse, std::string kind = "custom")
      : fwd_(std::move(forward)), inv_(std::move(inverse)), kind_(std::move(kind)) {
    if (fwd_.empty()) throw parameter_error("automorphism needs at least one factor");
    k_ = fwd_.front().k;
    for (const auto& f : fwd_)
      if (f.k != k_) throw parameter_error("automorphism factors disagree on dimension");
    if (inv_)
      for (const auto& f : *inv_)
        if (f.k != k_) throw parameter_error("inverse factors disagree on dimension");
  }

  static Automorphism linear(const Matrix& M) {
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible()) throw domain_error("linear automorphism with singular matrix");
    return {{PolyMap::linear(M)}, std::vector<PolyMap>{PolyMap::linear(lu.inverse())}, "linear"};
  }

  int dim() const { return k_; }
  const std::string& kind() const { return kind_; }
  bool has_inverse() const { return inv_.has_value(); }
  const std::vector<PolyMap>& factors() const { return fwd_; }
  const std::optional<std::vector<PolyMap>>& inverse_factors() const { return inv_; }

  // Product of factor degrees.
  int degree_bound() const {
    int d = 1;
    for (const auto& f : fwd_) d *= std::max(1, f.degree());
    return d;
  }

  template <class S>
  std::vector<S> apply(std::span<const S> z, Direction dir = Direction::forward) const {
    if (static_cast<int>(z.size()) != k_) throw parameter_error("point dimension mismatch");
    const std::vector<PolyMap>* chain = &fwd_;
    if (dir == Direction::inverse) {
      if (!inv_) throw unsupported_direction_error("no inverse registered for map of kind '" + kind_ + "'");
      chain = &*inv_;
    }
    std::vector<S> cur(z.begin(), z.end());
    for (const auto& f : *chain) cur = f.evaluate<S>(std::span<const S>(cur));
    return cur;
  }

  Point operator()(const Point& z) const { return apply<cplx>(std::span<const cplx>(z)); }
  Point inverse(const Point& z) const { return apply<cplx>(std::span<const cplx>(z), Direction::inverse); }

  GermMap germ(int order) const { return chain_germ(fwd_, order); }

  // From the inverse chain when one is registered, else by formal inversion.
  GermMap inverse_germ(int order) const {
    if (inv_) return chain_germ(*inv_, order);
    return invert_germ(germ(order), order);
  }

  Matrix linear_part() const {
    Matrix L = Matrix::Identity(k_, k_);
    for (const auto& f : fwd_) L = linear_of(f) * L;
    return L;
  }

  // outer o inner
  friend Automorphism compose(const Automorphism& outer, const Automorphism& inner) {
    if (outer.k_ != inner.k_) throw parameter_error("compose: dimension mismatch");
    std::vector<PolyMap> f = inner.fwd_;
    f.insert(f.end(), outer.fwd_.begin(), outer.fwd_.end());
    std::optional<std::vector<PolyMap>> inv;
    if (outer.inv_ && inner.inv_) {
      inv = *outer.inv_;
      inv->insert(inv->end(), inner.inv_->begin(), inner.inv_->end());
    }
    std::string kind = outer.kind_ == inner.kind_ ? outer.kind_ : "composite";
    return {std::move(f), std::move(inv), kind};
  }

  static Matrix linear_of(const PolyMap& f) {
    Matrix L = Matrix::Zero(f.k, f.k);
    for (int i = 0; i < f.k; ++i)
      for (int j = 0; j < f.k; ++j) L(i, j) = f.comps[static_cast<std::size_t>(i)].coeff(MultiIndex::unit(f.k, j + 1));
    return L;
  }

 private:
  GermMap chain_germ(const std::vector<PolyMap>& chain, int order) const {
    if (order < 1) throw parameter_error("germ order must be >= 1");
    auto s = JetSpace::get(k_, order);
    std::vector<Jet> cur = to_jets(*s, GermMap::identity(k_, order));
    for (const auto& f : chain) {
      if (!f.fixes_origin()) throw domain_error("germ extraction needs every factor to fix the origin");
      cur = jet_compose(*s, to_jets(*s, f.comps), cur);
    }
    return from_jets(*s, cur);
  }

  int k_ = 0;
  std::vector<PolyMap> fwd_;
  std::optional<std::vector<PolyMap>> inv_;
  std::string kind_ = "custom";
};

inline Point evaluate(const Automorphism& f, const Point& z, Direction dir = Direction::forward) {
  return f.apply<cplx>(std::span<const cplx>(z), dir);
}

}  // namespace fatou
