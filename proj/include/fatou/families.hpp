#pragma once

// Seeded generators for test and scenario sequences.

#include <cstdint>
#include <optional>

#include "fatou/maps.hpp"
#include "fatou/random.hpp"
#include "fatou/sequence.hpp"

namespace fatou {

struct TriangularFamilyParams {
  int k = 2;
  AttractionBounds bounds{0.3, 0.6, 0.1};
  int order = 3;              // nonlinear terms of degree 2..order
  double coeff_scale = 0.2;   // |nonlinear coefficient| <= coeff_scale
  double subdiag_scale = 0.2; // |subdiagonal| <= subdiag_scale * B
  std::uint64_t seed = 1;
};

// f_n = L_n o T^k o ... o T^1 with L_n lower triangular (|diagonal| in [A, B]) and
// T^i(z) = z + e_i Q_i(z), Q_i free of z_i.
inline Automorphism random_triangular_element(const TriangularFamilyParams& p, std::size_t n) {
  const int k = p.k;
  Rng rng(p.seed, 0x7A1u, n);
  Matrix L = Matrix::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    L(i, i) = rng.annulus(p.bounds.A, p.bounds.B);
    for (int j = 0; j < i; ++j) L(i, j) = rng.disc(p.subdiag_scale * p.bounds.B);
  }
  std::optional<Automorphism> acc;
  for (int i = 1; i <= k; ++i) {
    Polynomial Q(k, p.order);
    for (int d = 2; d <= p.order; ++d)
      for (auto& m : homogeneous_indices(k, d))
        if (m[i - 1] == 0) Q.set(m, rng.disc(p.coeff_scale));
    Automorphism T = ElementaryMap(k, i, 1.0, Q).to_automorphism();
    acc = acc ? compose(T, *acc) : T;
  }
  Automorphism r = compose(Automorphism::linear(L), *acc);
  return {r.factors(), r.inverse_factors(), "triangular_random"};
}

inline AutoSequence random_triangular_sequence(const TriangularFamilyParams& p) {
  if (p.k < 2) throw parameter_error("triangular family needs k >= 2");
  if (p.order < 2) throw parameter_error("triangular family needs order >= 2");
  p.bounds.validate();
  return {p.k, [p](std::size_t n) { return random_triangular_element(p, n); }, p.bounds};
}

// Diagonal linear maps with entries of modulus in [A, B].
inline AutoSequence random_diagonal_sequence(int k, AttractionBounds b, std::uint64_t seed) {
  b.validate();
  return {k,
          [k, b, seed](std::size_t n) {
            Rng rng(seed, 0xD1Au, n);
            Matrix L = Matrix::Zero(k, k);
            for (int i = 0; i < k; ++i) L(i, i) = rng.annulus(b.A, b.B);
            return Automorphism::linear(L);
          },
          b};
}

}  // namespace fatou
