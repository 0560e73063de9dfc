#include <gtest/gtest.h>

#include "fatou/factorize.hpp"
#include "fatou/families.hpp"
#include "fatou/maps.hpp"
#include "fatou/random.hpp"
#include "fatou/sequence.hpp"

using namespace fatou;

namespace {

double rel_gap(const Point& a, const Point& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / std::max(den, 1.0);
}

Polynomial uni(std::vector<cplx> c) { return Polynomial::univariate(c); }

Point random_point(Rng& rng, int k, double r) {
  Point z(static_cast<std::size_t>(k));
  for (auto& c : z) c = rng.disc(r);
  return z;
}

Polynomial random_free_of(Rng& rng, int k, int coord, int deg, double scale) {
  Polynomial p(k, deg);
  for (int d = 1; d <= deg; ++d)
    for (const auto& m : homogeneous_indices(k, d))
      if (m[coord - 1] == 0) p.set(m, rng.disc(scale));
  return p;
}

}  // namespace

TEST(Evaluate, HenonHandValues) {
  HenonMap H(1.0, uni({0.0, 0.0, 1.0}));
  Automorphism f = H.to_automorphism();
  Point z1 = f({1.0, 1.0});
  EXPECT_EQ(z1, (Point{1.0, 2.0}));
  EXPECT_EQ(f(z1), (Point{2.0, 5.0}));
  EXPECT_EQ(f({0.0, 0.0}), (Point{0.0, 0.0}));
}

TEST(Evaluate, ElementaryHandValue) {
  Polynomial P(3, 2);
  P.set(MultiIndex{0, 1, 1}, 1.0);
  Automorphism T = ElementaryMap(3, 1, 2.0, P).to_automorphism();
  EXPECT_EQ(T({1.0, 1.0, 1.0}), (Point{3.0, 1.0, 1.0}));
}

TEST(Evaluate, ConstructorsRejectBadData) {
  EXPECT_THROW(HenonMap(0.0, uni({0.0, 0.0, 1.0})), parameter_error);
  EXPECT_THROW(HenonMap(1.0, uni({0.0, 1.0})), parameter_error);
  Polynomial P(3, 2);
  P.set(MultiIndex{1, 1, 0}, 1.0);
  EXPECT_THROW(ElementaryMap(3, 1, 1.0, P), domain_error);
  EXPECT_THROW(ElementaryMap(3, 2, 0.0, Polynomial(3, 1)), parameter_error);
  Polynomial q(3, 2);
  q.set(MultiIndex{1, 0, 1}, 1.0);
  EXPECT_THROW(WeakShift(3, 1.0, q, 2), domain_error);
  Polynomial r(3, 3);
  r.set(MultiIndex{0, 0, 3}, 1.0);
  EXPECT_THROW(WeakShift(3, 1.0, r, 2), parameter_error);
}

TEST(Evaluate, MissingInverseIsUnsupported) {
  Automorphism f({PolyMap(2, detail::identity_comps(2, 1))}, std::nullopt, "custom");
  EXPECT_THROW(f.inverse({1.0, 1.0}), unsupported_direction_error);
}

TEST(Evaluate, InverseConsistencyPerClass) {
  Rng rng(21);
  std::vector<Automorphism> maps;
  maps.push_back(HenonMap(cplx(0.7, 0.2), uni({0.0, 0.3, 1.0, cplx(0.0, 0.5)})).to_automorphism());
  maps.push_back(ElementaryMap(3, 2, cplx(1.5, -0.5), random_free_of(rng, 3, 2, 3, 0.5)).to_automorphism());
  Polynomial p(3, 2);
  p.set(MultiIndex{0, 1, 1}, 0.4);
  p.set(MultiIndex{0, 0, 2}, 0.3);
  WeakShift S(3, cplx(0.3, 0.2), p, 2);
  maps.push_back(S.to_automorphism());
  maps.push_back(PerturbedWeakShift(S, 4).to_automorphism());
  maps.push_back(HenonProduct{0.5, 0.4, uni({0.0, 0.0, 0.2, 1.0}), uni({0.0, 0.1, -0.3, 1.0})}.to_automorphism());
  TriangularProduct tp{3, {0.5, 0.4, 0.3}, {random_free_of(rng, 3, 1, 3, 0.3), random_free_of(rng, 3, 2, 3, 0.3),
                                            random_free_of(rng, 3, 3, 3, 0.3)}};
  maps.push_back(tp.to_automorphism());
  for (const auto& f : maps) {
    double worst = 0.0, worst_rev = 0.0;
    for (int t = 0; t < 1000; ++t) {
      Point z = random_point(rng, f.dim(), 1.0);
      worst = std::max(worst, rel_gap(f.inverse(f(z)), z));
      // the other order passes through f^{-1}(z), which can be large; scale by it
      Point v = f.inverse(z);
      worst_rev = std::max(worst_rev, rel_gap(f(v), z) / std::max(1.0, sup_norm(v)));
    }
    EXPECT_LE(worst, 1e-10) << f.kind();
    EXPECT_LE(worst_rev, 1e-10) << f.kind();
  }
}

TEST(Perturb, AddsTopFormAndShear) {
  Polynomial p(3, 2);
  p.set(MultiIndex{0, 1, 0}, 0.25);
  p.set(MultiIndex{0, 0, 2}, 0.5);
  WeakShift S(3, 0.5, p, 2);
  Point z{0.0, 1.0, 1.0};
  Point base = S.to_automorphism()(z);
  Point pert = PerturbedWeakShift(S, 4).to_automorphism()(z);
  EXPECT_LT(std::abs(pert[0] - base[0]), 1e-15);
  EXPECT_LT(std::abs(pert[1] - base[1] - 1.0), 1e-15);
  EXPECT_LT(std::abs(pert[2] - base[2] - 2.0), 1e-15);
}

TEST(Perturb, VanishingTailLeavesImageUnchanged) {
  Polynomial p(3, 2);
  p.set(MultiIndex{0, 1, 1}, 0.5);
  WeakShift S(3, 0.5, p, 2);
  Point z{cplx(0.3, 0.1), 0.0, 0.0};
  EXPECT_EQ(PerturbedWeakShift(S, 5).to_automorphism()(z), S.to_automorphism()(z));
}

TEST(Perturb, LowDegreeIsRejected) {
  WeakShiftFamily fam = random_weak_shift_family(3, 2, 0.2, 0.5, 0.3, 1);
  EXPECT_THROW(perturb(fam, 3), parameter_error);
  EXPECT_THROW(PerturbedWeakShift(fam.element(1), 3), parameter_error);
}

TEST(Perturb, GermUnchangedBelowDegreeDMinusOne) {
  for (int d : {4, 5, 6}) {
    WeakShiftFamily fam = random_weak_shift_family(3, 2, 0.2, 0.5, 0.3, 7 + d);
    PerturbedFamily pf = perturb(fam, d);
    for (std::size_t n = 1; n <= 5; ++n) {
      GermMap a = fam.element(n).to_automorphism().germ(d - 2);
      GermMap b = pf.element(n).to_automorphism().germ(d - 2);
      EXPECT_LE(GermMap::max_abs_diff(a, b), 1e-15);
      GermMap a1 = fam.element(n).to_automorphism().germ(d);
      GermMap b1 = pf.element(n).to_automorphism().germ(d);
      EXPECT_GT(GermMap::max_abs_diff(a1, b1), 0.5);
    }
  }
}

TEST(BlockCompose, BlockSizeOneIsTheSameSequence) {
  AutoSequence f = random_triangular_sequence({});
  AutoSequence b = block_compose(f, 1);
  Rng rng(22);
  for (std::size_t n = 1; n <= 5; ++n) {
    Point z = random_point(rng, 2, 0.2);
    EXPECT_LE(rel_gap(b.at(n)(z), f.at(n)(z)), 1e-15);
  }
}

TEST(BlockCompose, DiagonalEntriesMultiplyPairwise) {
  AutoSequence f = random_diagonal_sequence(3, {0.3, 0.6, 0.1}, 3);
  AutoSequence b = block_compose(f, 2);
  for (std::size_t n = 1; n <= 4; ++n) {
    Matrix want = f.at(2 * n).linear_part() * f.at(2 * n - 1).linear_part();
    EXPECT_LE((b.at(n).linear_part() - want).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(BlockCompose, EvaluatesAsOrderedComposition) {
  AutoSequence f = random_triangular_sequence({});
  AutoSequence b = block_compose(f, 3);
  Rng rng(23);
  for (std::size_t n = 1; n <= 3; ++n) {
    Point z = random_point(rng, 2, 0.2);
    Point w = f.at(3 * n)(f.at(3 * n - 1)(f.at(3 * n - 2)(z)));
    EXPECT_LE(rel_gap(b.at(n)(z), w), 1e-14);
  }
}

TEST(AutoSequence, ProvidersAreDeterministic) {
  TriangularFamilyParams p;
  p.k = 3;
  p.bounds = {0.1, 0.6, 0.1};
  p.order = 4;
  p.seed = 99;
  AutoSequence a = random_triangular_sequence(p), b = random_triangular_sequence(p);
  for (std::size_t n : {5u, 1u, 3u})
    EXPECT_EQ(GermMap::max_abs_diff(a.at(n).germ(4), b.at(n).germ(4)), 0.0);
}

TEST(AutoSequence, PeriodicWrapsIndices) {
  AutoSequence f = random_diagonal_sequence(2, {0.3, 0.6, 0.1}, 4);
  AutoSequence s = periodic_restriction(f, 3);
  EXPECT_EQ(s.at(6).linear_part(), f.at(3).linear_part());
  EXPECT_EQ(s.at(4).linear_part(), f.at(1).linear_part());
  AutoSequence one = periodic_restriction(f, 1);
  EXPECT_EQ(one.at(7).linear_part(), f.at(1).linear_part());
}

TEST(AttractionBounds, LeastK0) {
  EXPECT_EQ(least_k0(0.3, 0.6), 3);
  EXPECT_EQ(least_k0(0.1, 0.6), 5);
  EXPECT_EQ(least_k0(0.5, 0.6), 2);
}

TEST(AttractionBounds, RejectsInvalidConstants) {
  AttractionBounds bad{0.7, 0.6, 0.1};
  EXPECT_THROW(bad.validate(), parameter_error);
}

TEST(AttractionBounds, DiagonalEstimateWithinBand) {
  AutoSequence f = random_diagonal_sequence(3, {0.3, 0.6, 0.1}, 5);
  AttractionEstimate e = estimate_attraction_bounds(f, 0.1, 200, 20, 1);
  EXPECT_GE(e.A_est, 0.3 - 1e-12);
  EXPECT_LE(e.B_est, 0.6 + 1e-12);
  ASSERT_TRUE(e.k0.has_value());
}

TEST(AttractionBounds, ExpandingEntryFlagsFailure) {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 0.5;
  D(1, 1) = 1.1;
  AutoSequence f = AutoSequence::periodic({Automorphism::linear(D)});
  AttractionEstimate e = estimate_attraction_bounds(f, 0.1, 100, 3, 1);
  EXPECT_GE(e.B_est, 1.1 - 1e-12);
  EXPECT_FALSE(e.k0.has_value());
}

TEST(Normalize, DiagonalSequenceUnchanged) {
  AutoSequence f = random_diagonal_sequence(3, {0.3, 0.6, 0.1}, 6);
  Normalization N = lower_triangular_normalize(f);
  AutoSequence g = N.sequence();
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_LE((N.V(n) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((g.at(n).linear_part() - f.at(n).linear_part()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Normalize, RotationTimesHalf) {
  const double th = 0.7;
  Matrix D(2, 2);
  D << 0.5 * std::cos(th), -0.5 * std::sin(th), 0.5 * std::sin(th), 0.5 * std::cos(th);
  AutoSequence f = AutoSequence::periodic({Automorphism::linear(D)});
  AutoSequence g = lower_triangular_normalize(f).sequence();
  for (std::size_t n = 1; n <= 5; ++n) {
    Matrix L = g.at(n).linear_part();
    EXPECT_LE(std::abs(L(0, 1)), 1e-14);
    EXPECT_NEAR(std::abs(L(0, 0)), 0.5, 1e-14);
    EXPECT_NEAR(std::abs(L(1, 1)), 0.5, 1e-14);
  }
}

TEST(Normalize, LowerTriangularInputKeepsModuli) {
  Rng rng(24);
  for (int t = 0; t < 20; ++t) {
    Matrix L = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
      L(i, i) = rng.uniform(0.3, 0.6);
      for (int j = 0; j < i; ++j) L(i, j) = rng.disc(0.2);
    }
    AutoSequence f = AutoSequence::periodic({Automorphism::linear(L)});
    Normalization N = lower_triangular_normalize(f);
    Matrix G = N.sequence().at(1).linear_part();
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(std::abs(G(i, i)), std::abs(L(i, i)), 1e-13);
      for (int j = i + 1; j < 3; ++j) EXPECT_LE(std::abs(G(i, j)), 1e-13);
    }
    // V_2 is diagonal with unit-modulus entries
    Matrix V2 = N.V(2);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(std::abs(V2(i, i)), 1.0, 1e-13);
      for (int j = 0; j < 3; ++j)
        if (i != j) {
          EXPECT_LE(std::abs(V2(i, j)), 1e-13);
        }
    }
  }
}

TEST(Normalize, OrbitNormsPreserved) {
  // random unitary-mixed nonlinear sequence
  TriangularFamilyParams p;
  p.k = 3;
  p.bounds = {0.3, 0.6, 0.1};
  p.order = 3;
  p.seed = 8;
  AutoSequence tri = random_triangular_sequence(p);
  Rng rng(25);
  std::vector<Matrix> Q;
  for (int n = 0; n < 12; ++n) {
    Matrix M(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) M(i, j) = cplx(rng.normal(), rng.normal());
    Q.push_back(Eigen::HouseholderQR<Matrix>(M).householderQ());
  }
  AutoSequence f(3, [tri, Q](std::size_t n) { return compose(Automorphism::linear(Q[n - 1]), tri.at(n)); });
  Normalization N = lower_triangular_normalize(f);
  AutoSequence g = N.sequence();
  for (std::size_t n = 1; n <= 10; ++n) {
    Matrix L = g.at(n).linear_part();
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) EXPECT_LE(std::abs(L(i, j)), 1e-12);
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(std::abs(L(i, i)), 0.3 * 0.5);
      EXPECT_LE(std::abs(L(i, i)), 1.0);
    }
  }
  for (int t = 0; t < 50; ++t) {
    Point z = random_point(rng, 3, 0.1);
    Point w = to_point(N.V(1).adjoint() * to_vector(z));
    auto a = orbit(f, z, 10), b = orbit(g, w, 10);
    for (std::size_t n = 0; n <= 10; ++n) EXPECT_NEAR(euclid_norm(a[n]), euclid_norm(b[n]), 1e-9);
  }
}

TEST(Normalize, SingularLinearPartIsADomainError) {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  Automorphism f({PolyMap::linear(D)}, std::nullopt, "custom");
  AutoSequence s = AutoSequence::periodic({f});
  EXPECT_THROW(lower_triangular_normalize(s).V(2), domain_error);
}

TEST(HenonFactorize, MonicPowersAtOnePoint) {
  const int k0 = 3;
  std::vector<cplx> c(k0 + 1, 0.0);
  c[k0] = 1.0;
  Polynomial p = uni(c), q = uni(c);
  HenonPair hp = henon_factorize_k2(1.0, 1.0, p, q);
  // g(1, 1) = (1 + (1 + 1)^3, 1 + 1) = (9, 2)
  Point want{9.0, 2.0};
  EXPECT_LE(rel_gap(hp.first(hp.second({1.0, 1.0})), want), 1e-15);
  ASSERT_TRUE(hp.henon_first && hp.henon_second);
  Point via = swap_xy(hp.henon_first->to_automorphism()(hp.henon_second->to_automorphism()(swap_xy({1.0, 1.0}))));
  EXPECT_LE(rel_gap(via, want), 1e-15);
  EXPECT_EQ(hp.first(hp.second({0.0, 0.0})), (Point{0.0, 0.0}));
}

TEST(HenonFactorize, LinearCase) {
  const cplx a(0.4, 0.1), c(0.5, -0.2), b(0.3, 0.0);
  HenonPair hp = henon_factorize_k2(a, c, Polynomial(1, 1), uni({0.0, b}));
  EXPECT_FALSE(hp.henon_first.has_value());
  Rng rng(26);
  for (int t = 0; t < 20; ++t) {
    Point z = random_point(rng, 2, 1.0);
    EXPECT_LE(rel_gap(hp.first(hp.second(z)), {a * z[0], c * z[1] + b * z[0]}), 1e-15);
  }
}

TEST(HenonFactorize, RejectsWrongNormalization) {
  EXPECT_THROW(henon_factorize_k2(1.0, 1.0, uni({0.0, 0.0, 2.0}), uni({0.0, 0.0, 1.0})), domain_error);
  EXPECT_THROW(henon_factorize_k2(1.0, 1.0, uni({0.0, 1.0, 1.0}), uni({0.0, 0.0, 1.0})), domain_error);
  EXPECT_THROW(henon_factorize_k2(1.0, 1.0, uni({1.0, 0.0, 1.0}), uni({0.0, 0.0, 1.0})), domain_error);
  EXPECT_THROW(henon_factorize_k2(0.0, 1.0, uni({0.0, 0.0, 1.0}), uni({0.0, 0.0, 1.0})), domain_error);
}

TEST(ShiftFactorize, DiagonalCase) {
  TriangularProduct g{3, {0.5, 0.4, 0.3}, {Polynomial(3, 1), Polynomial(3, 1), Polynomial(3, 1)}};
  auto shifts = shift_factorize(g);
  ASSERT_EQ(shifts.size(), 3u);
  Point z{1.0, 2.0, 3.0}, w = z;
  for (const auto& S : shifts) w = S.to_automorphism()(w);
  EXPECT_LE(rel_gap(w, {0.5, 0.8, 0.9}), 1e-15);
}

TEST(ShiftFactorize, PartialCompositionsAreRotatedPrefixes) {
  Rng rng(27);
  for (int k : {3, 4}) {
    TriangularProduct g{k, {}, {}};
    for (int i = 1; i <= k; ++i) {
      g.u.push_back(rng.annulus(0.2, 0.8));
      g.P.push_back(random_free_of(rng, k, i, 4, 0.4));
    }
    auto shifts = shift_factorize(g);
    for (int t = 0; t < 100; ++t) {
      Point z = random_point(rng, k, 1.0), w = z, pre = z;
      for (int l = 1; l <= k; ++l) {
        w = shifts[static_cast<std::size_t>(l - 1)].to_automorphism()(w);
        std::size_t j = static_cast<std::size_t>(l - 1);
        pre[j] = g.u[j] * pre[j] + g.P[j](pre);
        EXPECT_LE(rel_gap(w, rotate_left(pre, l)), 1e-12) << "k=" << k << " l=" << l;
      }
      EXPECT_LE(rel_gap(w, g.to_automorphism()(z)), 1e-12);
    }
    // coefficientwise round trip of the germ
    Automorphism comp = shifts[0].to_automorphism();
    for (int l = 1; l < k; ++l) comp = compose(shifts[static_cast<std::size_t>(l)].to_automorphism(), comp);
    EXPECT_LE(GermMap::max_abs_diff(comp.germ(4), g.to_automorphism().germ(4)), 1e-10);
  }
}

TEST(ShiftFactorize, SelfDependenceIsADomainError) {
  Polynomial bad(3, 2);
  bad.set(MultiIndex{0, 1, 1}, 1.0);
  TriangularProduct g{3, {0.5, 0.4, 0.3}, {Polynomial(3, 1), bad, Polynomial(3, 1)}};
  EXPECT_THROW(shift_factorize(g), domain_error);
}
