#pragma once

// Complex numbers with an unbounded binary exponent: value = mant * 2^exp.
// Escaping orbits of degree-d maps grow like |z|^(d^n); Green estimates need
// tens of iterations, far past the range of double.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>

#include "fatou/core.hpp"

namespace fatou {

class XComplex {
 public:
  XComplex() = default;
  XComplex(double x) : mant_(x, 0.0) { normalize(); }  // NOLINT(implicit)
  XComplex(cplx c) : mant_(c) { normalize(); }          // NOLINT(implicit)
  XComplex(cplx mant, std::int64_t exp) : mant_(mant), exp_(exp) { normalize(); }

  const cplx& mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }
  bool is_zero() const { return mant_ == cplx(0.0, 0.0); }
  bool is_finite() const { return std::isfinite(mant_.real()) && std::isfinite(mant_.imag()); }

  // log|x|; -inf for zero.
  double log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mant_)) + static_cast<double>(exp_) * std::log(2.0);
  }

  cplx to_cplx() const {
    if (exp_ > 4000) return {std::ldexp(mant_.real(), 4000), std::ldexp(mant_.imag(), 4000)};
    if (exp_ < -4000) return {0.0, 0.0};
    int e = static_cast<int>(exp_);
    return {std::ldexp(mant_.real(), e), std::ldexp(mant_.imag(), e)};
  }

  XComplex operator-() const { return XComplex(-mant_, exp_); }

  friend XComplex operator*(const XComplex& a, const XComplex& b) {
    return XComplex(a.mant_ * b.mant_, a.exp_ + b.exp_);
  }

  friend XComplex operator/(const XComplex& a, const XComplex& b) {
    return XComplex(a.mant_ / b.mant_, a.exp_ - b.exp_);
  }

  friend XComplex operator+(const XComplex& a, const XComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const XComplex& big = a.exp_ >= b.exp_ ? a : b;
    const XComplex& small = a.exp_ >= b.exp_ ? b : a;
    std::int64_t shift = big.exp_ - small.exp_;
    if (shift > 80) return big;
    int s = -static_cast<int>(shift);
    cplx sm(std::ldexp(small.mant_.real(), s), std::ldexp(small.mant_.imag(), s));
    return XComplex(big.mant_ + sm, big.exp_);
  }

  friend XComplex operator-(const XComplex& a, const XComplex& b) { return a + (-b); }

  XComplex& operator+=(const XComplex& o) { return *this = *this + o; }
  XComplex& operator-=(const XComplex& o) { return *this = *this - o; }
  XComplex& operator*=(const XComplex& o) { return *this = *this * o; }

  // Decimal rendering of |x| that survives exponents far beyond double range.
  std::string abs_string(int digits = 10) const {
    if (is_zero()) return "0";
    double l10 = log_abs() / std::log(10.0);
    double e10 = std::floor(l10);
    double m10 = std::pow(10.0, l10 - e10);
    if (m10 >= 10.0) { m10 /= 10.0; e10 += 1.0; }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*fe%+lld", digits - 1, m10, static_cast<long long>(e10));
    return buf;
  }

 private:
  void normalize() {
    double s = std::max(std::abs(mant_.real()), std::abs(mant_.imag()));
    if (s == 0.0 || !std::isfinite(s)) {
      if (s == 0.0) exp_ = 0;
      return;
    }
    int e = 0;
    std::frexp(s, &e);
    mant_ = {std::ldexp(mant_.real(), -e), std::ldexp(mant_.imag(), -e)};
    exp_ += e;
  }

  cplx mant_{0.0, 0.0};
  std::int64_t exp_ = 0;
};

using XPoint = std::vector<XComplex>;

inline XPoint to_xpoint(const Point& z) { return XPoint(z.begin(), z.end()); }

// log of the sup-norm.
inline double log_sup_norm(const XPoint& z) {
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& c : z) s = std::max(s, c.log_abs());
  return s;
}

inline bool all_finite(const XPoint& z) {
  for (const auto& c : z)
    if (!c.is_finite()) return false;
  return true;
}

// Uniform magnitude access for templated region tests.
inline double log_abs(const cplx& c) { return std::log(std::abs(c)); }
inline double log_abs(const XComplex& c) { return c.log_abs(); }

}  // namespace fatou
