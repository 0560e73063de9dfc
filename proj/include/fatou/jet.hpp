#pragma once

// Dense truncated power series on a fixed monomial basis. The sparse
// Polynomial is the interchange type; composition and inversion run here.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fatou/core.hpp"
#include "fatou/multi_index.hpp"
#include "fatou/polynomial.hpp"

namespace fatou {

using Jet = std::vector<cplx>;

class JetSpace {
 public:
  static std::shared_ptr<const JetSpace> get(int k, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{k, order}];
    if (!slot) slot = std::shared_ptr<const JetSpace>(new JetSpace(k, order));
    return slot;
  }

  int dim() const { return k_; }
  int order() const { return order_; }
  std::size_t size() const { return mono_.size(); }
  const MultiIndex& monomial(std::size_t i) const { return mono_[i]; }
  int degree_of(std::size_t i) const { return deg_[i]; }

  // Monomials of degree d occupy [begin(d), begin(d + 1)).
  std::size_t begin(int d) const { return offset_[static_cast<std::size_t>(std::clamp(d, 0, order_ + 1))]; }

  std::size_t index(const MultiIndex& m) const {
    auto it = lookup_.find(key(m));
    if (it == lookup_.end()) throw parameter_error("monomial " + m.to_string() + " outside jet space");
    return it->second;
  }
  bool contains(const MultiIndex& m) const { return m.dim() == k_ && m.degree() <= order_; }

  // parent(i) = index of m - e_j where j = var(i) is the first nonzero position.
  std::size_t parent(std::size_t i) const { return parent_[i]; }
  int var(std::size_t i) const { return var_[i]; }

  // Row a of the product table: target index of monomial(a) * monomial(b), for b < row length.
  const std::vector<std::uint32_t>& mul_row(std::size_t a) const { return mul_[a]; }

  Jet zero() const { return Jet(size(), cplx{}); }

 private:
  static std::uint64_t key(const MultiIndex& m) {
    std::uint64_t x = 0;
    for (int j = 0; j < m.dim(); ++j) x |= static_cast<std::uint64_t>(m[j]) << (8 * j);
    return x;
  }

  JetSpace(int k, int order) : k_(k), order_(order) {
    if (order < 0) throw parameter_error("jet order must be >= 0");
    for (int d = 0; d <= order; ++d) {
      offset_.push_back(mono_.size());
      for (auto& m : homogeneous_indices(k, d)) {
        mono_.push_back(m);
        deg_.push_back(d);
      }
    }
    offset_.push_back(mono_.size());
    for (std::size_t i = 0; i < mono_.size(); ++i) lookup_.emplace(key(mono_[i]), i);
    parent_.assign(mono_.size(), 0);
    var_.assign(mono_.size(), -1);
    for (std::size_t i = 1; i < mono_.size(); ++i) {
      MultiIndex m = mono_[i];
      int j = 0;
      while (m[j] == 0) ++j;
      var_[i] = j;
      m.set(j, m[j] - 1);
      parent_[i] = lookup_.at(key(m));
    }
    mul_.resize(mono_.size());
    for (std::size_t a = 0; a < mono_.size(); ++a) {
      std::size_t len = offset_[static_cast<std::size_t>(order - deg_[a] + 1)];
      mul_[a].resize(len);
      for (std::size_t b = 0; b < len; ++b)
        mul_[a][b] = static_cast<std::uint32_t>(lookup_.at(key(mono_[a] + mono_[b])));
    }
  }

  int k_;
  int order_;
  std::vector<MultiIndex> mono_;
  std::vector<int> deg_;
  std::vector<std::size_t> offset_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
  std::vector<std::size_t> parent_;
  std::vector<int> var_;
  std::vector<std::vector<std::uint32_t>> mul_;
};

// out += x * y, truncated to the space order.
inline void jet_mul_add(const JetSpace& s, const Jet& x, const Jet& y, Jet& out) {
  for (std::size_t a = 0; a < s.size(); ++a) {
    const cplx xa = x[a];
    if (xa == cplx{}) continue;
    const auto& row = s.mul_row(a);
    for (std::size_t b = 0; b < row.size(); ++b) {
      const cplx yb = y[b];
      if (yb == cplx{}) continue;
      out[row[b]] += xa * yb;
    }
  }
}

inline Jet jet_mul(const JetSpace& s, const Jet& x, const Jet& y) {
  Jet out = s.zero();
  jet_mul_add(s, x, y, out);
  return out;
}

inline Jet to_jet(const JetSpace& s, const Polynomial& p) {
  if (p.dim() != s.dim()) throw parameter_error("polynomial dimension does not match jet space");
  Jet j = s.zero();
  for (const auto& [m, c] : p.terms())
    if (m.degree() <= s.order()) j[s.index(m)] = c;
  return j;
}

inline Polynomial from_jet(const JetSpace& s, const Jet& j, double tol = kZeroTol) {
  Polynomial p(s.dim(), s.order());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(j[i]) > tol) p.set(s.monomial(i), j[i]);
  return p;
}

// Keep only the degree-d block.
inline Jet degree_part(const JetSpace& s, const Jet& j, int d) {
  Jet r = s.zero();
  for (std::size_t i = s.begin(d); i < s.begin(d + 1); ++i) r[i] = j[i];
  return r;
}

// g^m for every monomial m of the space. Requires g without constant terms
// for the truncation to be meaningful.
inline std::vector<Jet> jet_powers(const JetSpace& s, const std::vector<Jet>& g) {
  std::vector<Jet> pw(s.size());
  pw[0] = s.zero();
  pw[0][0] = 1.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    pw[i] = jet_mul(s, pw[s.parent(i)], g[static_cast<std::size_t>(s.var(i))]);
  return pw;
}

// f o g truncated; f and g are k-component jet maps.
inline std::vector<Jet> jet_compose(const JetSpace& s, const std::vector<Jet>& f, const std::vector<Jet>& g) {
  auto pw = jet_powers(s, g);
  std::vector<Jet> out(f.size(), s.zero());
  for (std::size_t l = 0; l < f.size(); ++l)
    for (std::size_t m = 0; m < s.size(); ++m) {
      const cplx c = f[l][m];
      if (c == cplx{}) continue;
      const Jet& p = pw[m];
      Jet& o = out[l];
      for (std::size_t t = 0; t < s.size(); ++t) o[t] += c * p[t];
    }
  return out;
}

// Product of linear forms: prod_j (row_j . z)^{m_j}, a homogeneous jet of degree |m|.
inline Jet linear_monomial(const JetSpace& s, const Matrix& rows, const MultiIndex& m) {
  Jet acc = s.zero();
  acc[0] = 1.0;
  for (int j = 0; j < m.dim(); ++j) {
    if (m[j] == 0) continue;
    Jet lin = s.zero();
    for (int c = 0; c < s.dim(); ++c) lin[s.index(MultiIndex::unit(s.dim(), c + 1))] = rows(j, c);
    for (int e = 0; e < m[j]; ++e) acc = jet_mul(s, acc, lin);
  }
  return acc;
}

}  // namespace fatou
