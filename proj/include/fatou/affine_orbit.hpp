#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fatou/core.hpp"

namespace fatou {

// z_{n+1} = beta_n z_n + gamma_n with |beta_n| >= c > 1.
struct AffineRecurrence {
  std::function<cplx(std::size_t)> beta;
  std::function<cplx(std::size_t)> gamma;
};

struct BoundedOrbit {
  std::size_t start = 0;
  std::vector<cplx> z;  // z[j] is the value at index start + j
  double C = 0.0;       // sup of |beta|, |gamma| on the evaluated window
  double c = 0.0;       // inf of |beta|
  std::size_t tail = 0;
  double bound = 0.0;       // C / (c - 1)
  double tail_bound = 0.0;  // C c^{-tail} / (c - 1)

  cplx at(std::size_t n) const { return z.at(n - start); }
};

// Number of extra steps T with C c^{-T} / (c - 1) <= tol.
inline std::size_t affine_tail_length(double C, double c, double tol) {
  if (!(c > 1.0)) throw hypothesis_error("affine recurrence is not expanding");
  double ratio = C / ((c - 1.0) * tol);
  if (ratio <= 1.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log(ratio) / std::log(c))) + 1;
}

// Backward sweep from z_end = terminal. The result satisfies the recurrence
// exactly (up to rounding) at every index of the window.
inline std::vector<cplx> backward_orbit(const std::vector<cplx>& beta, const std::vector<cplx>& gamma,
                                        cplx terminal = {}) {
  const std::size_t L = beta.size();
  std::vector<cplx> z(L + 1);
  z[L] = terminal;
  for (std::size_t j = L; j-- > 0;) z[j] = (z[j + 1] - gamma[j]) / beta[j];
  return z;
}

// The unique bounded solution z_n = -sum_{m >= n} gamma_m prod_{j=n}^{m} beta_j^{-1},
// evaluated on [n0, N] with a tail long enough that the truncation error is <= tol.
inline BoundedOrbit bounded_affine_orbit(const AffineRecurrence& rec, std::size_t n0, std::size_t N, double tol) {
  if (N < n0) throw parameter_error("bounded orbit: horizon before start");
  if (!(tol > 0.0)) throw parameter_error("bounded orbit: tol must be positive");
  BoundedOrbit out;
  out.start = n0;
  double C = 0.0, c = std::numeric_limits<double>::infinity();
  std::vector<cplx> beta, gamma;
  auto extend = [&](std::size_t upto) {
    for (std::size_t n = n0 + beta.size(); n <= upto; ++n) {
      cplx b = rec.beta(n), g = rec.gamma(n);
      if (!(std::abs(b) > 1.0))
        throw hypothesis_error("bounded orbit: |beta_" + std::to_string(n) + "| = " + std::to_string(std::abs(b)) + " <= 1");
      beta.push_back(b);
      gamma.push_back(g);
      C = std::max({C, std::abs(b), std::abs(g)});
      c = std::min(c, std::abs(b));
    }
  };
  extend(N);
  std::size_t T = affine_tail_length(C, c, tol);
  for (int guard = 0; guard < 64; ++guard) {
    extend(N + T);
    std::size_t T2 = affine_tail_length(C, c, tol);
    if (T2 <= T) break;
    T = T2;
  }
  // beta/gamma cover n0..N+T; the terminal value sits at N+T+1.
  auto z = backward_orbit(beta, gamma);
  out.z.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(N - n0 + 1));
  out.C = C;
  out.c = c;
  out.tail = T;
  out.bound = C / (c - 1.0);
  out.tail_bound = C * std::pow(c, -static_cast<double>(T)) / (c - 1.0);
  return out;
}

}  // namespace fatou
