#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fatou/core.hpp"
#include "fatou/multi_index.hpp"

namespace fatou {

// Sparse polynomial in k complex variables. Every stored index has degree
// <= max_degree and a nonzero coefficient.
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, cplx, GradedLexLess>;

  Polynomial() = default;
  Polynomial(int k, int max_degree) : k_(k), max_degree_(max_degree) {
    if (k < 1 || k > kMaxDim) throw parameter_error("polynomial dimension out of range");
    if (max_degree < 0) throw parameter_error("negative max degree");
  }

  static Polynomial variable(int k, int coord, int max_degree) {
    Polynomial p(k, max_degree);
    p.set(MultiIndex::unit(k, coord), 1.0);
    return p;
  }

  static Polynomial constant(int k, cplx c, int max_degree) {
    Polynomial p(k, max_degree);
    p.set(MultiIndex(k), c);
    return p;
  }

  // One-variable polynomial from coefficients c[0] + c[1] t + ...
  static Polynomial univariate(const std::vector<cplx>& c) {
    int deg = std::max(0, static_cast<int>(c.size()) - 1);
    Polynomial p(1, deg);
    for (std::size_t j = 0; j < c.size(); ++j) p.set(MultiIndex{static_cast<int>(j)}, c[j]);
    return p;
  }

  int dim() const { return k_; }
  int max_degree() const { return max_degree_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  // Degree of the highest nonzero term; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  cplx coeff(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? cplx{} : it->second;
  }

  void set(const MultiIndex& m, cplx c) {
    check_index(m);
    if (c == cplx{}) {
      terms_.erase(m);
    } else {
      terms_[m] = c;
    }
  }

  void add(const MultiIndex& m, cplx c) {
    if (c == cplx{}) return;
    check_index(m);
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == cplx{}) terms_.erase(it);
    }
  }

  void canonicalize(double tol = kZeroTol) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) <= tol) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
  }

  Polynomial truncated(int order) const {
    if (order < 0) throw parameter_error("truncation order must be >= 0");
    Polynomial r(k_, std::min(order, max_degree_));
    for (const auto& [m, c] : terms_)
      if (m.degree() <= order) r.terms_.emplace(m, c);
    return r;
  }

  Polynomial homogeneous_part(int d) const {
    Polynomial r(k_, max_degree_);
    for (const auto& [m, c] : terms_)
      if (m.degree() == d) r.terms_.emplace(m, c);
    return r;
  }

  Polynomial with_max_degree(int d) const {
    Polynomial r = truncated(d);
    r.max_degree_ = d;
    return r;
  }

  // Lowest degree among nonzero terms; -1 for zero.
  int lowest_degree() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }

  bool depends_on(int coord) const {
    for (const auto& [m, c] : terms_)
      if (m[coord - 1] != 0) return true;
    return false;
  }

  template <class S>
  S evaluate(std::span<const S> z) const {
    if (static_cast<int>(z.size()) != k_) throw parameter_error("point dimension mismatch in polynomial evaluation");
    if (terms_.empty()) return S(cplx{});
    std::vector<int> top(static_cast<std::size_t>(k_), 0);
    for (const auto& [m, c] : terms_)
      for (int j = 0; j < k_; ++j) top[static_cast<std::size_t>(j)] = std::max(top[static_cast<std::size_t>(j)], m[j]);
    std::vector<std::vector<S>> pw(static_cast<std::size_t>(k_));
    for (int j = 0; j < k_; ++j) {
      auto& row = pw[static_cast<std::size_t>(j)];
      row.reserve(static_cast<std::size_t>(top[static_cast<std::size_t>(j)] + 1));
      row.push_back(S(cplx(1.0, 0.0)));
      for (int e = 1; e <= top[static_cast<std::size_t>(j)]; ++e) row.push_back(row.back() * z[static_cast<std::size_t>(j)]);
    }
    S acc(cplx{});
    for (const auto& [m, c] : terms_) {
      S t(c);
      for (int j = 0; j < k_; ++j)
        if (m[j]) t = t * pw[static_cast<std::size_t>(j)][static_cast<std::size_t>(m[j])];
      acc = acc + t;
    }
    return acc;
  }

  cplx operator()(const Point& z) const { return evaluate<cplx>(std::span<const cplx>(z)); }

  Polynomial& operator+=(const Polynomial& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_)
      if (m.degree() <= max_degree_) add(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_)
      if (m.degree() <= max_degree_) add(m, -c);
    return *this;
  }
  Polynomial& operator*=(cplx s) {
    if (s == cplx{}) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    if (b.max_degree_ > a.max_degree_) a.max_degree_ = b.max_degree_;
    return a += b;
  }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) {
    if (b.max_degree_ > a.max_degree_) a.max_degree_ = b.max_degree_;
    return a -= b;
  }
  friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }

  // Product truncated at max_degree.
  static Polynomial product(const Polynomial& a, const Polynomial& b, int max_degree) {
    a.check_same(b);
    Polynomial r(a.k_, max_degree);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_)
        if (ma.degree() + mb.degree() <= max_degree) r.add(ma + mb, ca * cb);
    return r;
  }

  // Largest |coefficient difference| over the union of supports.
  static double max_abs_diff(const Polynomial& a, const Polynomial& b) {
    double d = 0.0;
    for (const auto& [m, c] : a.terms_) d = std::max(d, std::abs(c - b.coeff(m)));
    for (const auto& [m, c] : b.terms_)
      if (!a.terms_.count(m)) d = std::max(d, std::abs(c));
    return d;
  }

  double max_abs_coeff() const {
    double d = 0.0;
    for (const auto& [m, c] : terms_) d = std::max(d, std::abs(c));
    return d;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [m, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + std::to_string(c.real()) + "," + std::to_string(c.imag()) + ")z^" + m.to_string();
    }
    return s;
  }

 private:
  void check_index(const MultiIndex& m) const {
    if (m.dim() != k_) throw parameter_error("multi-index dimension does not match polynomial");
    if (m.degree() > max_degree_)
      throw parameter_error("term " + m.to_string() + " exceeds max degree " + std::to_string(max_degree_));
  }
  void check_same(const Polynomial& o) const {
    if (o.k_ != k_) throw parameter_error("polynomial dimension mismatch");
  }

  int k_ = 1;
  int max_degree_ = 0;
  Terms terms_;
};

}  // namespace fatou
