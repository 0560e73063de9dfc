#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "fatou/core.hpp"

namespace fatou {

// Exponent tuple (m_1, ..., m_k). Positions are 0-based in operator[];
// every "coord" argument in the public API is 1-based like the math.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int k) : k_(check_dim(k)) {}
  MultiIndex(std::initializer_list<int> exps) : k_(check_dim(static_cast<int>(exps.size()))) {
    int j = 0;
    for (int e : exps) set(j++, e);
  }
  explicit MultiIndex(const std::vector<int>& exps) : k_(check_dim(static_cast<int>(exps.size()))) {
    for (int j = 0; j < k_; ++j) set(j, exps[static_cast<std::size_t>(j)]);
  }

  static MultiIndex unit(int k, int coord) {
    MultiIndex m(k);
    m.set(coord - 1, 1);
    return m;
  }

  int dim() const { return k_; }
  int operator[](int j) const { return e_[static_cast<std::size_t>(j)]; }
  int degree() const {
    int s = 0;
    for (int j = 0; j < k_; ++j) s += e_[static_cast<std::size_t>(j)];
    return s;
  }

  void set(int j, int v) {
    if (j < 0 || j >= k_) throw parameter_error("multi-index position out of range");
    if (v < 0 || v > 255) throw parameter_error("multi-index exponent out of range");
    e_[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(v);
  }

  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r(k_);
    for (int j = 0; j < k_; ++j) r.set(j, (*this)[j] + o[j]);
    return r;
  }

  std::vector<int> to_vector() const {
    std::vector<int> v(static_cast<std::size_t>(k_));
    for (int j = 0; j < k_; ++j) v[static_cast<std::size_t>(j)] = (*this)[j];
    return v;
  }

  std::string to_string() const {
    std::string s = "(";
    for (int j = 0; j < k_; ++j) {
      if (j) s += ",";
      s += std::to_string((*this)[j]);
    }
    return s + ")";
  }

  // Lexicographic on exponents; dimension breaks ties only across dimensions.
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (a.k_ != b.k_) return a.k_ <=> b.k_;
    for (int j = 0; j < a.k_; ++j)
      if (a[j] != b[j]) return a[j] <=> b[j];
    return std::strong_ordering::equal;
  }
  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return (a <=> b) == 0; }

 private:
  static int check_dim(int k) {
    if (k < 1 || k > kMaxDim) throw parameter_error("dimension must be in 1.." + std::to_string(kMaxDim));
    return k;
  }

  int k_ = 0;
  std::array<std::uint8_t, kMaxDim> e_{};
};

// Degree first, lexicographic within a degree.
struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a < b;
  }
};

using OrderedIndexSet = std::vector<MultiIndex>;

// All tuples with |m| = deg, lexicographically ascending.
inline OrderedIndexSet homogeneous_indices(int k, int deg) {
  OrderedIndexSet out;
  if (deg < 0) return out;
  // Odometer over positions 0..k-2; the last position takes the remainder.
  std::vector<int> e(static_cast<std::size_t>(k), 0);
  auto emit = [&](auto&& self, int pos, int left) -> void {
    if (pos == k - 1) {
      e[static_cast<std::size_t>(pos)] = left;
      out.emplace_back(e);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      e[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  emit(emit, 0, deg);
  return out;
}

enum class IndexFamily {
  cumulative,         // 1 <= |m| <= degree
  homogeneous,        // |m| == degree
  alpha_slots,        // m_coord == 0, 1 <= |m| <= degree
  rho_slots,          // m_coord >= 1, 2 <= |m| <= degree (degree-minus-one family shifted by e_coord)
  zero_prefix,        // |m| == degree, m_1 = ... = m_coord = 0
  prefix_complement,  // |m| == degree, some m_l >= 1 with l <= coord
};

struct IndexFamilySpec {
  IndexFamily family = IndexFamily::cumulative;
  int degree = 1;
  int coord = 1;
};

inline OrderedIndexSet enumerate_indices(int k, const IndexFamilySpec& spec) {
  if (k < 1 || k > kMaxDim) throw parameter_error("k out of range");
  if (spec.degree < 0) throw parameter_error("negative degree");
  const int c = spec.coord;
  auto need_coord = [&](int lo, int hi) {
    if (c < lo || c > hi) throw parameter_error("coord out of range for index family");
  };
  auto leading_zero = [](const MultiIndex& m, int upto) {
    for (int j = 0; j < upto; ++j)
      if (m[j] != 0) return false;
    return true;
  };

  OrderedIndexSet out;
  switch (spec.family) {
    case IndexFamily::cumulative:
      for (int d = 1; d <= spec.degree; ++d)
        for (auto& m : homogeneous_indices(k, d)) out.push_back(m);
      break;
    case IndexFamily::homogeneous:
      out = homogeneous_indices(k, spec.degree);
      break;
    case IndexFamily::alpha_slots:
      need_coord(1, k);
      for (int d = 1; d <= spec.degree; ++d)
        for (auto& m : homogeneous_indices(k, d))
          if (m[c - 1] == 0) out.push_back(m);
      break;
    case IndexFamily::rho_slots:
      need_coord(1, k);
      for (int d = 2; d <= spec.degree; ++d)
        for (auto& m : homogeneous_indices(k, d))
          if (m[c - 1] >= 1) out.push_back(m);
      break;
    case IndexFamily::zero_prefix:
      need_coord(1, k - 1);
      for (auto& m : homogeneous_indices(k, spec.degree))
        if (leading_zero(m, c)) out.push_back(m);
      break;
    case IndexFamily::prefix_complement:
      need_coord(1, k - 1);
      for (auto& m : homogeneous_indices(k, spec.degree))
        if (!leading_zero(m, c)) out.push_back(m);
      break;
  }
  return out;
}

// Ordering of the degree-j tuples with some m_l >= 1, l <= i, built recursively:
// i = 1 is lexicographic; step i prepends the new tuples (m_1..m_{i-1} = 0, m_i >= 1)
// in lexicographic order to the ordering for i - 1.
inline OrderedIndexSet phi_ordering(int k, int j, int i) {
  if (k < 2 || k > kMaxDim) throw parameter_error("phi ordering needs 2 <= k <= kMaxDim");
  if (j < 1) throw parameter_error("phi ordering needs degree >= 1");
  if (i < 1 || i > k - 1) throw parameter_error("phi ordering needs 1 <= i <= k-1");
  OrderedIndexSet out;
  for (int step = i; step >= 1; --step) {
    for (auto& m : homogeneous_indices(k, j)) {
      bool fresh = m[step - 1] >= 1;
      for (int l = 0; l < step - 1 && fresh; ++l) fresh = m[l] == 0;
      if (fresh) out.push_back(m);
    }
  }
  return out;
}

// Number of tuples with 1 <= |m| <= deg: C(deg + k, k) - 1.
inline std::size_t cumulative_count(int k, int deg) {
  double c = 1.0;
  for (int t = 1; t <= k; ++t) c = c * (deg + t) / t;
  return static_cast<std::size_t>(std::llround(c)) - 1;
}

}  // namespace fatou
