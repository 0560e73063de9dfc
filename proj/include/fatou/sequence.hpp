#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "fatou/automorphism.hpp"
#include "fatou/core.hpp"
#include "fatou/random.hpp"

namespace fatou {

// Least k0 >= 1 with B^k0 < A.
inline int least_k0(double A, double B) {
  if (!(A > 0.0 && A <= B && B < 1.0)) throw parameter_error("attraction bounds need 0 < A <= B < 1");
  int k0 = 1;
  double p = B;
  while (!(p < A)) {
    p *= B;
    ++k0;
    if (k0 > 10000) throw parameter_error("k0 search did not terminate");
  }
  return k0;
}

struct AttractionBounds {
  double A = 0.0;
  double B = 0.0;
  double r = 0.0;

  int k0() const { return least_k0(A, B); }

  void validate() const {
    if (!(A > 0.0 && A <= B && B < 1.0)) throw parameter_error("attraction bounds need 0 < A <= B < 1");
    if (!(r > 0.0)) throw parameter_error("attraction radius must be positive");
  }
};

// n -> f_n for n >= 1. Providers must be pure; elements are cached and shared
// between copies, so at() may be called from several threads.
class AutoSequence {
 public:
  using Provider = std::function<Automorphism(std::size_t)>;

  AutoSequence() = default;
  AutoSequence(int k, Provider provider, std::optional<AttractionBounds> bounds = std::nullopt,
               std::optional<std::size_t> period = std::nullopt)
      : k_(k), bounds_(bounds), period_(period), cache_(std::make_shared<Cache>()) {
    cache_->provider = std::move(provider);
    if (bounds_) bounds_->validate();
    if (period_ && *period_ == 0) throw parameter_error("period must be >= 1");
  }

  // Periodic repetition of an explicit list.
  static AutoSequence periodic(std::vector<Automorphism> elems, std::optional<AttractionBounds> bounds = std::nullopt) {
    if (elems.empty()) throw parameter_error("explicit sequence needs at least one element");
    int k = elems.front().dim();
    for (const auto& e : elems)
      if (e.dim() != k) throw parameter_error("sequence elements disagree on dimension");
    auto shared = std::make_shared<std::vector<Automorphism>>(std::move(elems));
    std::size_t P = shared->size();
    return {k, [shared, P](std::size_t n) { return (*shared)[(n - 1) % P]; }, bounds, P};
  }

  int dim() const { return k_; }
  const std::optional<AttractionBounds>& bounds() const { return bounds_; }
  const std::optional<std::size_t>& period() const { return period_; }
  bool valid() const { return cache_ != nullptr; }

  const Automorphism& at(std::size_t n) const {
    if (!cache_) throw parameter_error("empty sequence");
    if (n < 1) throw parameter_error("sequence index starts at 1");
    std::size_t key = period_ ? ((n - 1) % *period_) + 1 : n;
    {
      std::lock_guard<std::mutex> lock(cache_->mu);
      auto it = cache_->items.find(key);
      if (it != cache_->items.end()) return *it->second;
    }
    auto made = std::make_unique<Automorphism>(cache_->provider(key));
    if (made->dim() != k_) throw parameter_error("provider returned a map of the wrong dimension");
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto [it, inserted] = cache_->items.try_emplace(key, std::move(made));
    return *it->second;
  }

  AutoSequence with_bounds(std::optional<AttractionBounds> b) const {
    AutoSequence s = *this;
    if (b) b->validate();
    s.bounds_ = b;
    return s;
  }

 private:
  struct Cache {
    std::mutex mu;
    Provider provider;
    std::map<std::size_t, std::unique_ptr<Automorphism>> items;
  };

  int k_ = 0;
  std::optional<AttractionBounds> bounds_;
  std::optional<std::size_t> period_;
  std::shared_ptr<Cache> cache_;
};

// F_n = f_{nl} o ... o f_{(n-1)l+1}.
inline AutoSequence block_compose(const AutoSequence& f, std::size_t l) {
  if (l < 1) throw parameter_error("block length must be >= 1");
  std::optional<std::size_t> period;
  if (f.period()) period = std::lcm(*f.period(), l) / l;
  return {f.dim(),
          [f, l](std::size_t n) {
            Automorphism acc = f.at((n - 1) * l + 1);
            for (std::size_t j = 2; j <= l; ++j) acc = compose(f.at((n - 1) * l + j), acc);
            return acc;
          },
          std::nullopt, period};
}

// Element n is f_{((n-1) mod m) + 1}.
inline AutoSequence periodic_restriction(const AutoSequence& f, std::size_t m) {
  if (m < 1) throw parameter_error("period must be >= 1");
  return {f.dim(), [f, m](std::size_t n) { return f.at(((n - 1) % m) + 1); }, f.bounds(), m};
}

// M = Q L with Q unitary, L lower triangular. diag(L) carries the phase of diag(M)
// (positive real where that entry vanishes), so lower-triangular input gives Q = I.
inline std::pair<Matrix, Matrix> ql_decompose(const Matrix& M) {
  const Eigen::Index k = M.rows();
  Matrix J = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) J(i, k - 1 - i) = 1.0;
  Matrix Ap = J * M * J;
  Eigen::HouseholderQR<Matrix> qr(Ap);
  Matrix Q = qr.householderQ();
  Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    cplx rjj = R(j, j);
    if (std::abs(rjj) == 0.0) throw domain_error("normalization: singular linear part");
    cplx ph = rjj / std::abs(rjj);
    cplx tgt = std::abs(Ap(j, j)) > 1e-300 ? Ap(j, j) / std::abs(Ap(j, j)) : cplx(1.0, 0.0);
    cplx phi = std::conj(tgt) * ph;
    Q.col(j) *= phi;
    R.row(j) *= std::conj(phi);
  }
  return {J * Q * J, J * R * J};
}

// Unitary conjugation to lower-triangular linear parts, V_1 = I.
class Normalization {
 public:
  explicit Normalization(AutoSequence f) : memo_(std::make_shared<Memo>()) {
    memo_->base = std::move(f);
    memo_->V.push_back(Matrix::Identity(memo_->base.dim(), memo_->base.dim()));
  }

  Matrix V(std::size_t n) const {
    if (n < 1) throw parameter_error("sequence index starts at 1");
    std::lock_guard<std::mutex> lock(memo_->mu);
    while (memo_->V.size() < n) {
      std::size_t m = memo_->V.size();  // compute V_{m+1} from f_m
      const Matrix D = memo_->base.at(m).linear_part();
      if (std::abs(D.determinant()) < 1e-300) throw domain_error("normalization: singular linear part at n = " + std::to_string(m));
      memo_->V.push_back(ql_decompose(D * memo_->V[m - 1]).first);
    }
    return memo_->V[n - 1];
  }

  AutoSequence sequence() const {
    Normalization self = *this;
    return {memo_->base.dim(),
            [self](std::size_t n) {
              Matrix Vn = self.V(n), Vn1 = self.V(n + 1);
              const Automorphism& fn = self.memo_->base.at(n);
              Automorphism r = compose(Automorphism::linear(Vn1.adjoint()),
                                       compose(fn, Automorphism::linear(Vn)));
              return Automorphism(r.factors(), r.inverse_factors(), fn.kind());
            },
            memo_->base.bounds()};
  }

 private:
  struct Memo {
    std::mutex mu;
    AutoSequence base;
    std::vector<Matrix> V;
  };
  std::shared_ptr<Memo> memo_;
};

inline Normalization lower_triangular_normalize(const AutoSequence& f) { return Normalization(f); }

struct AttractionEstimate {
  double A_est = 0.0;
  double B_est = 0.0;
  std::optional<int> k0;  // set when 0 < A_est <= B_est < 1
};

// Ratios |f_n(z)| / |z| over n <= horizon, on spheres of radius r 2^{-j}, j = 0..3,
// including the axis points +-r e_i.
inline AttractionEstimate estimate_attraction_bounds(const AutoSequence& f, double r, std::size_t samples,
                                                     std::size_t horizon, std::uint64_t seed = 0) {
  if (!(r > 0.0)) throw parameter_error("radius must be positive");
  if (horizon < 1) throw parameter_error("horizon must be >= 1");
  const int k = f.dim();
  std::vector<Point> pts;
  for (int j = 0; j < 4; ++j) {
    double rj = std::ldexp(r, -j);
    for (int i = 0; i < k; ++i)
      for (double s : {1.0, -1.0}) {
        Point z(static_cast<std::size_t>(k), cplx{});
        z[static_cast<std::size_t>(i)] = s * rj;
        pts.push_back(z);
      }
  }
  Rng rng(seed, 0xA77u, 0);
  for (std::size_t s = 0; s < samples; ++s) pts.push_back(rng.sphere(k, std::ldexp(r, -static_cast<int>(s % 4))));

  AttractionEstimate est;
  est.A_est = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= horizon; ++n) {
    const Automorphism& fn = f.at(n);
    for (const auto& z : pts) {
      Point w = fn(z);
      if (!all_finite(w)) throw overflow_error("attraction estimate: non-finite image at n = " + std::to_string(n), n - 1);
      double q = euclid_norm(w) / euclid_norm(z);
      est.A_est = std::min(est.A_est, q);
      est.B_est = std::max(est.B_est, q);
    }
  }
  if (est.A_est > 0.0 && est.A_est <= est.B_est && est.B_est < 1.0) est.k0 = least_k0(est.A_est, est.B_est);
  return est;
}

// Orbit of z: z, f_1 z, f_2 f_1 z, ... (or the inverse maps in the same index order).
inline std::vector<Point> orbit(const AutoSequence& f, const Point& z, std::size_t steps,
                                Direction dir = Direction::forward) {
  std::vector<Point> out{z};
  out.reserve(steps + 1);
  for (std::size_t n = 1; n <= steps; ++n) {
    Point w = f.at(n).apply<cplx>(std::span<const cplx>(out.back()), dir);
    if (!all_finite(w) || sup_norm(w) > kOverflowGuard)
      throw overflow_error("orbit left the representable range at step " + std::to_string(n), n - 1);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace fatou
