#include <gtest/gtest.h>

#include <set>

#include "fatou/germ.hpp"
#include "fatou/multi_index.hpp"
#include "fatou/polynomial.hpp"
#include "fatou/random.hpp"

using namespace fatou;

namespace {

// Odometer over [0, deg]^k, independent of the recursive enumerator.
std::vector<MultiIndex> brute_force(int k, int lo, int hi) {
  std::vector<MultiIndex> out;
  std::vector<int> e(static_cast<std::size_t>(k), 0);
  while (true) {
    int s = 0;
    for (int v : e) s += v;
    if (s >= lo && s <= hi) out.emplace_back(e);
    int j = k - 1;
    while (j >= 0 && e[static_cast<std::size_t>(j)] == hi) e[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
    ++e[static_cast<std::size_t>(j)];
  }
  return out;
}

Polynomial random_poly(Rng& rng, int k, int lo, int hi, int max_degree, double scale) {
  Polynomial p(k, max_degree);
  for (int d = lo; d <= hi; ++d)
    for (const auto& m : homogeneous_indices(k, d))
      if (rng.uniform() < 0.6) p.set(m, rng.disc(scale));
  return p;
}

GermMap random_germ(Rng& rng, int k, int order) {
  GermMap g(k, order);
  for (int i = 1; i <= k; ++i) {
    g[i] = random_poly(rng, k, 2, order, order, 0.5);
    g[i].set(MultiIndex::unit(k, i), 1.0 + 0.3 * rng.disc(1.0));
    if (i > 1) g[i].add(MultiIndex::unit(k, i - 1), rng.disc(0.3));
  }
  return g;
}

// Substitution with full products, then truncation; a second path besides the jet code.
GermMap naive_compose(const GermMap& f, const GermMap& g, int order) {
  GermMap r(f.k, order);
  for (int i = 1; i <= f.k; ++i) {
    Polynomial acc(f.k, order);
    for (const auto& [m, c] : f[i].terms()) {
      Polynomial term = Polynomial::constant(f.k, c, order);
      for (int j = 0; j < f.k; ++j)
        for (int t = 0; t < m[j]; ++t) term = Polynomial::product(term, g[j + 1].truncated(order).with_max_degree(order), order);
      acc += term;
    }
    r[i] = acc;
  }
  return r;
}

MultiIndex mi(std::initializer_list<int> e) { return MultiIndex(e); }

}  // namespace

TEST(MultiIndex, DegreeIsEntrySum) {
  MultiIndex m{2, 0, 3};
  EXPECT_EQ(m.degree(), 5);
  EXPECT_EQ(m.dim(), 3);
  EXPECT_THROW(MultiIndex({-1, 2}), parameter_error);
}

TEST(MultiIndex, LexicographicComparison) {
  EXPECT_LT(mi({0, 2, 0}), mi({1, 0, 1}));
  EXPECT_LT(mi({1, 0, 1}), mi({1, 1, 0}));
}

TEST(EnumerateIndices, DegreeOneBasisInTwoVariables) {
  auto s = enumerate_indices(2, {IndexFamily::cumulative, 1, 1});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], mi({0, 1}));
  EXPECT_EQ(s[1], mi({1, 0}));
}

TEST(EnumerateIndices, CumulativeCountsInThreeVariables) {
  EXPECT_EQ(enumerate_indices(3, {IndexFamily::cumulative, 2, 1}).size(), 9u);
  EXPECT_EQ(enumerate_indices(3, {IndexFamily::cumulative, 3, 1}).size(), 19u);
  EXPECT_EQ(enumerate_indices(3, {IndexFamily::cumulative, 4, 1}).size(), 34u);
  EXPECT_EQ(enumerate_indices(3, {IndexFamily::cumulative, 5, 1}).size(), 55u);
}

TEST(EnumerateIndices, CountsMatchBruteForce) {
  for (int k = 1; k <= 5; ++k)
    for (int deg = 0; deg <= 7; ++deg) {
      auto got = enumerate_indices(k, {IndexFamily::cumulative, deg, 1});
      auto want = brute_force(k, 1, deg);
      std::sort(want.begin(), want.end());
      std::vector<MultiIndex> sorted(got.begin(), got.end());
      std::sort(sorted.begin(), sorted.end());
      EXPECT_EQ(sorted, want) << "k=" << k << " deg=" << deg;
      EXPECT_EQ(got.size(), cumulative_count(k, deg));
      EXPECT_EQ(enumerate_indices(k, {IndexFamily::homogeneous, deg, 1}).size(), brute_force(k, deg, deg).size());
    }
}

TEST(EnumerateIndices, FamilyPredicatesAndPartition) {
  for (int k = 2; k <= 4; ++k)
    for (int m = 2; m <= 5; ++m)
      for (int i = 1; i <= k; ++i) {
        auto all = enumerate_indices(k, {IndexFamily::cumulative, m, i});
        auto alpha = enumerate_indices(k, {IndexFamily::alpha_slots, m, i});
        auto rho = enumerate_indices(k, {IndexFamily::rho_slots, m, i});
        for (const auto& a : alpha) EXPECT_EQ(a[i - 1], 0);
        for (const auto& r : rho) EXPECT_GE(r[i - 1], 1);
        // e_i, the m_i = 0 family and the shifted family partition the cumulative set
        std::set<MultiIndex> u(alpha.begin(), alpha.end());
        std::size_t before = u.size();
        u.insert(rho.begin(), rho.end());
        EXPECT_EQ(u.size(), before + rho.size());
        EXPECT_EQ(u.count(MultiIndex::unit(k, i)), 0u);
        u.insert(MultiIndex::unit(k, i));
        EXPECT_EQ(u, std::set<MultiIndex>(all.begin(), all.end()));
      }
}

TEST(EnumerateIndices, ZeroPrefixAndComplement) {
  for (int k = 2; k <= 5; ++k)
    for (int j = 1; j <= 5; ++j)
      for (int i = 1; i <= k - 1; ++i) {
        auto zp = enumerate_indices(k, {IndexFamily::zero_prefix, j, i});
        auto pc = enumerate_indices(k, {IndexFamily::prefix_complement, j, i});
        for (const auto& m : zp)
          for (int l = 0; l < i; ++l) EXPECT_EQ(m[l], 0);
        EXPECT_EQ(zp.size() + pc.size(), homogeneous_indices(k, j).size());
        std::set<MultiIndex> a(zp.begin(), zp.end());
        for (const auto& m : pc) EXPECT_EQ(a.count(m), 0u);
      }
}

TEST(EnumerateIndices, InvalidCoordinateIsRejected) {
  EXPECT_THROW(enumerate_indices(3, {IndexFamily::zero_prefix, 2, 3}), parameter_error);
  EXPECT_THROW(enumerate_indices(3, {IndexFamily::alpha_slots, 2, 0}), parameter_error);
  EXPECT_THROW(enumerate_indices(0, {IndexFamily::cumulative, 2, 1}), parameter_error);
}

TEST(PhiOrdering, DegreeTwoLastCoordinate) {
  std::vector<MultiIndex> want{mi({0, 1, 1}), mi({0, 2, 0}), mi({1, 0, 1}), mi({1, 1, 0}), mi({2, 0, 0})};
  EXPECT_EQ(phi_ordering(3, 2, 2), want);
}

TEST(PhiOrdering, DegreeTwoFirstCoordinate) {
  std::vector<MultiIndex> want{mi({1, 0, 1}), mi({1, 1, 0}), mi({2, 0, 0})};
  EXPECT_EQ(phi_ordering(3, 2, 1), want);
}

TEST(PhiOrdering, DegreeFourPrefix) {
  auto o = phi_ordering(3, 4, 1);
  std::vector<MultiIndex> head{mi({1, 0, 3}), mi({1, 1, 2}), mi({1, 2, 1}), mi({1, 3, 0}), mi({2, 0, 2})};
  ASSERT_GE(o.size(), head.size());
  EXPECT_TRUE(std::equal(head.begin(), head.end(), o.begin()));
}

TEST(PhiOrdering, IsPermutationOfComplementFamily) {
  for (int k = 2; k <= 5; ++k)
    for (int j = 2; j <= 6; ++j)
      for (int i = 1; i <= k - 1; ++i) {
        auto o = phi_ordering(k, j, i);
        auto fam = enumerate_indices(k, {IndexFamily::prefix_complement, j, i});
        std::set<MultiIndex> s(o.begin(), o.end());
        EXPECT_EQ(s.size(), o.size()) << "duplicates";
        EXPECT_EQ(s, std::set<MultiIndex>(fam.begin(), fam.end()));
      }
}

TEST(PhiOrdering, PreviousOrderingIsAppendedUnchanged) {
  for (int j = 2; j <= 5; ++j) {
    auto big = phi_ordering(4, j, 3), small = phi_ordering(4, j, 2);
    ASSERT_GE(big.size(), small.size());
    EXPECT_TRUE(std::equal(small.begin(), small.end(), big.end() - static_cast<std::ptrdiff_t>(small.size())));
  }
}

TEST(PhiOrdering, ParameterValidation) {
  EXPECT_THROW(phi_ordering(3, 2, 0), parameter_error);
  EXPECT_THROW(phi_ordering(3, 2, 3), parameter_error);
}

TEST(Polynomial, CanonicalFormDropsZeros) {
  Polynomial p(2, 3);
  p.set(mi({1, 0}), 1.0);
  p.add(mi({1, 0}), -1.0);
  EXPECT_TRUE(p.is_zero());
  p.set(mi({0, 2}), 1e-16);
  EXPECT_EQ(p.size(), 1u);
  p.canonicalize();
  EXPECT_TRUE(p.is_zero());
  EXPECT_THROW(p.set(mi({2, 2}), 1.0), parameter_error);
}

TEST(Polynomial, EvaluateMatchesHandValue) {
  Polynomial p(2, 3);
  p.set(mi({1, 0}), 2.0);
  p.set(mi({1, 2}), cplx(0.0, 1.0));
  Point z{cplx(1.0, 1.0), 2.0};
  cplx want = 2.0 * z[0] + cplx(0.0, 1.0) * z[0] * z[1] * z[1];
  EXPECT_LT(std::abs(p.evaluate<cplx>(std::span<const cplx>(z)) - want), 1e-15);
}

TEST(Truncate, IdentityStaysIdentity) {
  GermMap id = GermMap::identity(3, 5);
  for (int o = 1; o <= 5; ++o) EXPECT_EQ(GermMap::max_abs_diff(truncate(id, o), GermMap::identity(3, o)), 0.0);
}

TEST(Truncate, DropsHighDegreeTerms) {
  GermMap g(2, 3);
  g[1].set(mi({1, 0}), 1.0);
  g[1].set(mi({0, 3}), 1.0);
  g[2].set(mi({0, 1}), 1.0);
  GermMap t = truncate(g, 2);
  EXPECT_EQ(GermMap::max_abs_diff(t, GermMap::identity(2, 2)), 0.0);

  GermMap h(2, 3);
  h[1].set(mi({1, 0}), 1.0);
  h[1].set(mi({1, 1}), 1.0);
  h[1].set(mi({2, 1}), 1.0);
  h[2].set(mi({0, 1}), 1.0);
  GermMap th = truncate(h, 2);
  EXPECT_EQ(th[1].size(), 2u);
  EXPECT_EQ(th[1].coeff(mi({1, 1})), cplx(1.0));
  EXPECT_EQ(th[1].coeff(mi({2, 1})), cplx(0.0));
}

TEST(Truncate, IsMonotone) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    GermMap g = random_germ(rng, 3, 6);
    for (int a = 1; a <= 6; ++a)
      for (int b = 1; b <= 6; ++b)
        EXPECT_EQ(GermMap::max_abs_diff(truncate(truncate(g, a), b), truncate(g, std::min(a, b))), 0.0);
  }
}

TEST(ComposeTruncated, IdentityOnTheLeft) {
  Rng rng(12);
  GermMap g = random_germ(rng, 3, 4);
  EXPECT_LE(GermMap::max_abs_diff(compose_truncated(GermMap::identity(3, 4), g, 3), truncate(g, 3)), 1e-15);
}

TEST(ComposeTruncated, ShearPairDropsCrossTerm) {
  GermMap f(2, 2), g(2, 2);
  f[1].set(mi({1, 0}), 1.0);
  f[1].set(mi({0, 2}), 1.0);
  f[2].set(mi({0, 1}), 1.0);
  g[1].set(mi({1, 0}), 1.0);
  g[2].set(mi({0, 1}), 1.0);
  g[2].set(mi({2, 0}), 1.0);
  GermMap r = compose_truncated(f, g, 2);
  GermMap want(2, 2);
  want[1].set(mi({1, 0}), 1.0);
  want[1].set(mi({0, 2}), 1.0);
  want[2].set(mi({0, 1}), 1.0);
  want[2].set(mi({2, 0}), 1.0);
  EXPECT_LE(GermMap::max_abs_diff(r, want), 1e-15);
}

TEST(ComposeTruncated, LinearPartIsMatrixProduct) {
  Matrix A(2, 2), B(2, 2);
  A << 1.0, 2.0, cplx(0.0, 1.0), -1.0;
  B << 0.5, 0.0, 3.0, 2.0;
  GermMap r = compose_truncated(GermMap::linear(A, 3), GermMap::linear(B, 3), 3);
  EXPECT_LE((r.linear_part() - A * B).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ComposeTruncated, ConstantTermIsADomainError) {
  GermMap g = GermMap::identity(2, 2);
  g[1].set(MultiIndex(2), 1.0);
  EXPECT_THROW(compose_truncated(GermMap::identity(2, 2), g, 2), domain_error);
}

TEST(ComposeTruncated, AgreesWithNaiveSubstitution) {
  Rng rng(13);
  for (int k = 1; k <= 4; ++k)
    for (int order = 2; order <= 5; ++order) {
      GermMap f = random_germ(rng, k, order), g = random_germ(rng, k, order);
      EXPECT_LE(GermMap::max_abs_diff(compose_truncated(f, g, order), naive_compose(f, g, order)), 1e-12)
          << "k=" << k << " order=" << order;
    }
}

TEST(ComposeTruncated, AssociativeUpToTruncation) {
  Rng rng(14);
  for (int k = 1; k <= 4; ++k)
    for (int m = 2; m <= 6; ++m) {
      GermMap f = random_germ(rng, k, m), g = random_germ(rng, k, m), h = random_germ(rng, k, m);
      GermMap lhs = compose_truncated(compose_truncated(f, g, m), h, m);
      GermMap rhs = compose_truncated(f, compose_truncated(g, h, m), m);
      EXPECT_LE(GermMap::max_abs_diff(lhs, rhs), 1e-12) << "k=" << k << " m=" << m;
    }
}

TEST(InvertGerm, IdentityAndShear) {
  EXPECT_LE(GermMap::max_abs_diff(invert_germ(GermMap::identity(3, 4), 4), GermMap::identity(3, 4)), 1e-15);
  GermMap f(2, 2);
  f[1].set(mi({1, 0}), 1.0);
  f[1].set(mi({0, 2}), 1.0);
  f[2].set(mi({0, 1}), 1.0);
  GermMap want(2, 2);
  want[1].set(mi({1, 0}), 1.0);
  want[1].set(mi({0, 2}), -1.0);
  want[2].set(mi({0, 1}), 1.0);
  EXPECT_LE(GermMap::max_abs_diff(invert_germ(f, 2), want), 1e-15);
}

TEST(InvertGerm, LinearMapGivesMatrixInverse) {
  Matrix A(3, 3);
  A << 2.0, 0.0, 1.0, 0.5, 1.0, 0.0, 0.0, cplx(0.0, 1.0), 3.0;
  GermMap r = invert_germ(GermMap::linear(A, 3), 3);
  EXPECT_LE((r.linear_part() - A.inverse()).cwiseAbs().maxCoeff(), 1e-14);
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(r[i].degree(), 1);
}

TEST(InvertGerm, SingularLinearPartIsADomainError) {
  GermMap f(2, 2);
  f[1].set(mi({1, 0}), 1.0);
  f[2].set(mi({1, 0}), 2.0);
  EXPECT_THROW(invert_germ(f, 2), domain_error);
}

TEST(InvertGerm, TwoSidedInverse) {
  Rng rng(15);
  for (int k = 1; k <= 4; ++k)
    for (int order = 2; order <= 6; ++order) {
      GermMap f = random_germ(rng, k, order);
      GermMap g = invert_germ(f, order);
      GermMap id = GermMap::identity(k, order);
      EXPECT_LE(GermMap::max_abs_diff(compose_truncated(f, g, order), id), 1e-12);
      EXPECT_LE(GermMap::max_abs_diff(compose_truncated(g, f, order), id), 1e-12);
    }
}
