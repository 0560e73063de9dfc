#include <gtest/gtest.h>

#include "fatou/dynamics.hpp"
#include "fatou/factorize.hpp"
#include "fatou/filtration.hpp"
#include "fatou/maps.hpp"
#include "fatou/random.hpp"
#include "fatou/render.hpp"

using namespace fatou;

namespace {

// a = 1/2, p = 0
WeakShiftFamily trivial_shift_family() {
  WeakShiftFamily fam;
  fam.k = 3;
  fam.dtilde = 2;
  fam.mtilde = 0.25;
  fam.Mtilde = 1.0;
  fam.element = [](std::size_t) { return WeakShift(3, 0.5, Polynomial(3, 2), 2); };
  return fam;
}

PerturbedFamily random_family(int d, std::uint64_t seed) {
  return perturb(random_weak_shift_family(3, 2, 0.2, 0.5, 0.3, seed), d);
}

struct Fixture {
  PerturbedFamily fam;
  FiltrationSpec spec;
  AutoSequence seq;
  double rt;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x{random_family(4, 2030), {}, {}, 0.0};
    x.spec = find_filtration_spec(x.fam);
    x.seq = x.fam.sequence();
    x.rt = certify_basin_radius(x.seq, 0.5, 3, 200, 60, 1);
    return x;
  }();
  return f;
}

// Points of V_R^i with |z_i| between R and R * spread.
std::vector<Point> sample_region(int k, int i, double R, double spread, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> out;
  while (out.size() < count) {
    double rho = R * std::exp(rng.uniform(0.0, std::log(spread)));
    Point z(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) z[static_cast<std::size_t>(j - 1)] = j == i ? rho * rng.phase() : rng.disc(rho / (k - 1.0));
    if (in_V(z, i, R)) out.push_back(z);
  }
  return out;
}

}  // namespace

TEST(Orbit, OriginStaysFixed) {
  const auto& fx = fixture();
  for (const auto& w : orbit(fx.seq, {0.0, 0.0, 0.0}, 10)) EXPECT_EQ(w, (Point{0.0, 0.0, 0.0}));
}

TEST(Orbit, ZeroStepsReturnsTheStart) {
  const auto& fx = fixture();
  auto o = orbit(fx.seq, {1.0, 2.0, 3.0}, 0);
  ASSERT_EQ(o.size(), 1u);
  EXPECT_EQ(o[0], (Point{1.0, 2.0, 3.0}));
}

TEST(Orbit, HenonHandValues) {
  AutoSequence H = AutoSequence::periodic({HenonMap(1.0, Polynomial::univariate({0.0, 0.0, 1.0})).to_automorphism()});
  auto o = orbit(H, {1.0, 1.0}, 2);
  ASSERT_EQ(o.size(), 3u);
  EXPECT_EQ(o[1], (Point{1.0, 2.0}));
  EXPECT_EQ(o[2], (Point{2.0, 5.0}));
}

TEST(Orbit, OverflowIsReportedWithLastFiniteIndex) {
  const auto& fx = fixture();
  try {
    orbit(fx.seq, {0.0, 1e6, 1e6}, 50);
    FAIL() << "expected overflow";
  } catch (const overflow_error& e) {
    EXPECT_GE(e.last_finite_index, 1u);
    EXPECT_LT(e.last_finite_index, 50u);
  }
}

TEST(Regions, MembershipPredicates) {
  const double R = 10.0;
  EXPECT_TRUE(in_V(Point{1.0, 2.0, 20.0}, 3, R));
  EXPECT_FALSE(in_V(Point{11.0, 2.0, 20.0}, 3, R));  // needs |z_3| >= 2 |z_1|
  EXPECT_FALSE(in_V(Point{1.0, 2.0, 9.0}, 3, R));
  EXPECT_TRUE(in_V_plus(Point{1.0, 20.0, 3.0}, R));
  EXPECT_EQ(in_V_plus_index(Point{1.0, 20.0, 3.0}, R), 2);
  EXPECT_FALSE(in_V_plus(Point{20.0, 1.0, 3.0}, R));
  EXPECT_TRUE(in_V_minus(Point{20.0, 1.0, 3.0}, R));
  EXPECT_TRUE(in_W_minus(Point{6.0, 12.0, 3.0}, R));   // 2 * 6 >= 12 and >= 10
  EXPECT_FALSE(in_W_minus(Point{4.0, 12.0, 3.0}, R));
  XPoint big{XComplex(cplx(1.0, 0.0), 5000), XComplex(1.0), XComplex(cplx(1.0, 0.0), 5002)};
  EXPECT_TRUE(in_V(big, 3, R));
}

TEST(Filtration, TrivialBaseShiftSandwich) {
  PerturbedFamily fam = perturb(trivial_shift_family(), 4);
  FiltrationSpec spec = find_filtration_spec(fam);
  EXPECT_GT(spec.m_const, 0.0);
  EXPECT_LT(spec.m_const, 1.0);
  EXPECT_GT(spec.M_const, 1.0);
  EXPECT_GT(spec.R, 1.0);
  Automorphism S = fam.element(1).to_automorphism();
  std::size_t checked = 0;
  for (int i = 2; i <= 3; ++i)
    for (const auto& z : sample_region(3, i, spec.R, 1e3, 500, 60 + static_cast<std::uint64_t>(i))) {
      Point w = S(z);
      double ratio = sup_norm(w) / std::pow(sup_norm(z), 4);
      EXPECT_GE(ratio, spec.m_const);
      EXPECT_LE(ratio, spec.M_const);
      EXPECT_EQ(sup_norm(w), std::abs(w[2]));
      ++checked;
    }
  EXPECT_EQ(checked, 1000u);
}

TEST(Filtration, DoublingRPreservesInequalities) {
  for (int d : {4, 5}) {
    PerturbedFamily fam = random_family(d, 2040 + static_cast<std::uint64_t>(d));
    FiltrationSpec spec = find_filtration_spec(fam);
    for (double R : {spec.R, 2.0 * spec.R}) {
      auto pts = sample_V_boundary(3, R, 2000, 5);
      std::size_t bad = 0;
      for (std::size_t n = 1; n <= 6; ++n) {
        Automorphism S = fam.element(n).to_automorphism();
        for (const auto& z : pts) {
          if (!in_V_plus(z, R)) continue;
          XPoint w = S.apply<XComplex>(std::span<const XComplex>(to_xpoint(z)));
          double ratio = std::exp(log_sup_norm(w) - d * std::log(sup_norm(z)));
          if (ratio < spec.m_const || ratio > spec.M_const || !in_V(w, 3, R * R)) ++bad;
        }
      }
      EXPECT_EQ(bad, 0u) << "d=" << d << " R=" << R;
    }
  }
}

TEST(Filtration, InverseGrowthOnVMinus) {
  const auto& fx = fixture();
  const int d = fx.spec.d;
  std::size_t bad = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    Automorphism S = fx.fam.element(n).to_automorphism();
    for (const auto& z : sample_region(3, 1, fx.spec.R, 1e4, 500, 70 + n)) {
      XPoint w = S.apply<XComplex>(std::span<const XComplex>(to_xpoint(z)), Direction::inverse);
      double ratio = std::exp(w[0].log_abs() - (d * d - d) * std::log(std::abs(z[0])));
      if (ratio < fx.spec.m_inv || ratio > fx.spec.M_inv) ++bad;
    }
  }
  EXPECT_EQ(bad, 0u);
}

TEST(Filtration, NestingOfEscapeSets) {
  const auto& fx = fixture();
  Rng rng(71);
  std::size_t entered = 0;
  for (int t = 0; t < 400; ++t) {
    Point z{rng.disc(fx.spec.R), rng.disc(fx.spec.R), rng.disc(fx.spec.R)};
    XPoint w = to_xpoint(z);
    bool inside = false;
    for (std::size_t n = 1; n <= 12; ++n) {
      w = fx.seq.at(n).apply<XComplex>(std::span<const XComplex>(w));
      bool now = in_V(w, 3, fx.spec.R);
      if (inside) {
        EXPECT_TRUE(now) << "left V_R^k at n=" << n;
      }
      if (now && !inside) ++entered;
      inside = inside || now;
    }
  }
  EXPECT_GT(entered, 0u);
}

TEST(Filtration, SmallCapIsASearchFailure) {
  FiltrationOptions opt;
  opt.R_cap = 2.0;
  EXPECT_THROW(find_filtration_spec(random_family(4, 3), opt), search_error);
}

TEST(Classify, SmallPointsAreInBasinAtStepZero) {
  const auto& fx = fixture();
  Classification c = classify_point(fx.seq, {0.5 * fx.rt, 0.0, 0.0}, fx.spec, fx.rt, 10);
  EXPECT_EQ(c.tag, ClassTag::in_basin);
  EXPECT_EQ(c.n, 0u);
}

TEST(Classify, VkPointEscapesAtStepZero) {
  const auto& fx = fixture();
  Classification c = classify_point(fx.seq, {1.0, 1.0, 2.0 * fx.spec.R}, fx.spec, fx.rt, 10);
  EXPECT_EQ(c.tag, ClassTag::escaping);
  EXPECT_EQ(c.n, 0u);
}

TEST(Classify, ZeroBudgetOutsideIsUndecided) {
  const auto& fx = fixture();
  Classification c = classify_point(fx.seq, {0.9 * fx.spec.R, 0.5, 0.5}, fx.spec, fx.rt, 0);
  EXPECT_EQ(c.tag, ClassTag::undecided);
}

TEST(Classify, BasinOrbitsContract) {
  const auto& fx = fixture();
  Rng rng(72);
  for (int t = 0; t < 200; ++t) {
    Point z = rng.sphere(3, fx.rt * rng.uniform(0.1, 0.999));
    ASSERT_EQ(classify_point(fx.seq, z, fx.spec, fx.rt, 10).tag, ClassTag::in_basin);
    auto o = orbit(fx.seq, z, 90);
    for (std::size_t n = 3; n <= 90; n += 3) EXPECT_LT(euclid_norm(o[n]), euclid_norm(o[n - 3]));
    EXPECT_LT(euclid_norm(o[90]), 1e-6);
  }
}

TEST(Classify, InvalidRadius) {
  const auto& fx = fixture();
  EXPECT_THROW(classify_point(fx.seq, {0.0, 0.0, 0.0}, fx.spec, 0.0, 10), parameter_error);
}

TEST(Green, OriginIsZero) {
  const auto& fx = fixture();
  GreenOptions opt;
  opt.rTilde = fx.rt;
  GreenEstimate g = green_estimate(fx.seq, Point{0.0, 0.0, 0.0}, fx.spec, opt);
  EXPECT_EQ(g.value, 0.0);
  EXPECT_EQ(g.status, GreenStatus::converged);
  EXPECT_TRUE(g.in_basin);
}

TEST(Green, LogNormSandwichForLargePoints) {
  const auto& fx = fixture();
  const double slack = fx.spec.Mtilde / (fx.spec.d - 1.0);
  for (double s : {1e3, 1e20, 1e200}) {
    Point z{1.0, 2.0, s * fx.spec.R};
    GreenEstimate g = green_estimate(fx.seq, z, fx.spec);
    ASSERT_EQ(g.status, GreenStatus::converged);
    EXPECT_LE(std::abs(g.value - std::log(sup_norm(z))), slack + 1e-9);
  }
}

TEST(Green, TighterToleranceAgrees) {
  const auto& fx = fixture();
  Rng rng(73);
  for (int t = 0; t < 50; ++t) {
    Point z{rng.disc(fx.spec.R), rng.disc(fx.spec.R), 4.0 * fx.spec.R * rng.phase()};
    GreenOptions a, b;
    a.tol = 1e-6;
    b.tol = 1e-7;
    GreenEstimate ga = green_estimate(fx.seq, z, fx.spec, a), gb = green_estimate(fx.seq, z, fx.spec, b);
    ASSERT_EQ(ga.status, GreenStatus::converged);
    EXPECT_LE(std::abs(ga.value - gb.value), a.tol);
    EXPECT_LE(ga.tail_bound, a.tol);
  }
}

TEST(Green, IterationCapIsReported) {
  const auto& fx = fixture();
  GreenOptions opt;
  opt.maxiter = 0;
  GreenEstimate g = green_estimate(fx.seq, Point{0.5, 0.5, 0.5}, fx.spec, opt);
  EXPECT_EQ(g.status, GreenStatus::hit_iteration_cap);
}

TEST(Green, CauchyRateAlongTrajectories) {
  const auto& fx = fixture();
  GreenOptions opt;
  opt.tol = 1e-12;
  opt.record = true;
  const double d = fx.spec.d;
  for (const auto& z : sample_region(3, 2, fx.spec.R, 10.0, 100, 74)) {
    GreenEstimate g = green_estimate(fx.seq, z, fx.spec, opt);
    ASSERT_TRUE(g.entry.has_value());
    for (std::size_t n = *g.entry; n + 1 < g.trajectory.size(); ++n)
      EXPECT_LE(std::abs(g.trajectory[n + 1].step), fx.spec.Mtilde / std::pow(d, static_cast<double>(n + 1)));
  }
}

TEST(Periodic, ConventionAndBlockPower) {
  const auto& fx = fixture();
  AutoSequence s = periodic_restriction(fx.seq, 3);
  Rng rng(75);
  Point z{rng.disc(0.3), rng.disc(0.3), rng.disc(0.3)};
  EXPECT_EQ(s.at(6)(z), fx.seq.at(3)(z));
  EXPECT_EQ(s.at(3)(z), fx.seq.at(3)(z));
  EXPECT_EQ(periodic_restriction(fx.seq, 1).at(5)(z), fx.seq.at(1)(z));
  const std::size_t m = 3;
  Point a = z, b = z;
  for (std::size_t n = 1; n <= 2 * m; ++n) a = s.at(n)(a);
  for (int rep = 0; rep < 2; ++rep)
    for (std::size_t n = 1; n <= m; ++n) b = fx.seq.at(n)(b);
  EXPECT_EQ(a, b);
}

TEST(Periodic, FunctionalEquation) {
  const auto& fx = fixture();
  GreenOptions opt;
  opt.tol = 1e-12;
  for (const auto& z : sample_region(3, 3, fx.spec.R, 100.0, 20, 76))
    for (std::size_t m = 1; m <= 3; ++m) {
      FunctionalCheck fc = green_functional_check(fx.seq, m, z, fx.spec, opt);
      ASSERT_TRUE(fc.conclusive);
      EXPECT_LE(fc.residual, 1e-6);
      EXPECT_LE(fc.residual, fc.certified + 1e-12);
    }
}

TEST(Periodic, FunctionalEquationInBasin) {
  const auto& fx = fixture();
  GreenOptions opt;
  opt.rTilde = fx.rt;
  FunctionalCheck fc = green_functional_check(fx.seq, 2, {0.1 * fx.rt, 0.0, 0.0}, fx.spec, opt);
  ASSERT_TRUE(fc.conclusive);
  EXPECT_EQ(fc.G_image, 0.0);
  EXPECT_EQ(fc.G_point, 0.0);
  EXPECT_EQ(fc.residual, 0.0);
}

TEST(Periodic, SingleMapAgainstDirectIteration) {
  // G for the constant sequence S_1 from plain iteration counts n and n + 1
  const auto& fx = fixture();
  const double d = fx.spec.d;
  Automorphism S = fx.fam.element(1).to_automorphism();
  Point z{1.0, 2.0, 4.0 * fx.spec.R};
  XPoint w = to_xpoint(z);
  const int N = 20;  // 4^N log R must fit the int64 exponent
  for (int n = 0; n < N; ++n) w = S.apply<XComplex>(std::span<const XComplex>(w));
  double G_direct = log_sup_norm(w) / std::pow(d, N);
  XPoint w1 = S.apply<XComplex>(std::span<const XComplex>(to_xpoint(z)));
  XPoint v = w1;
  for (int n = 0; n < N; ++n) v = S.apply<XComplex>(std::span<const XComplex>(v));
  double G_image = log_sup_norm(v) / std::pow(d, N);
  EXPECT_LE(std::abs(G_image - d * G_direct) / (d * G_direct), 1e-9);
  FunctionalCheck fc = green_functional_check(fx.seq, 1, z, fx.spec, GreenOptions{1e-12, 200, 0.0, false});
  ASSERT_TRUE(fc.conclusive);
  EXPECT_LE(std::abs(fc.G_point - G_direct), 1e-9 * G_direct);
}

TEST(XComplexArithmetic, MatchesDoubleInRange) {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    cplx a = rng.disc(1e3), b = rng.disc(1e-3);
    EXPECT_LE(std::abs((XComplex(a) * XComplex(b)).to_cplx() - a * b), 1e-15 * std::abs(a * b) + 1e-300);
    EXPECT_LE(std::abs((XComplex(a) + XComplex(b)).to_cplx() - (a + b)), 1e-15 * std::abs(a + b));
    EXPECT_LE(std::abs((XComplex(a) / XComplex(b)).to_cplx() - a / b), 1e-14 * std::abs(a / b));
  }
}

TEST(XComplexArithmetic, HugeExponentsKeepLogs) {
  XComplex x(cplx(3.0, 4.0));
  XComplex y = x;
  for (int i = 0; i < 12; ++i) y = y * y;  // 5^4096
  EXPECT_NEAR(y.log_abs(), 4096.0 * std::log(5.0), 1e-9 * 4096.0);
  EXPECT_TRUE(y.is_finite());
}

TEST(Render, TinyWindowIsAllBasin) {
  const auto& fx = fixture();
  RenderWindow w;
  w.base = {0.0, 0.0, 0.0};
  w.u = {1.0, 0.0, 0.0};
  w.v = {0.0, 1.0, 0.0};
  w.s_min = w.t_min = -0.3 * fx.rt;
  w.s_max = w.t_max = 0.3 * fx.rt;
  w.width = w.height = 16;
  RenderResult r = render_basin(fx.seq, w, fx.spec, fx.rt, 20, 2);
  EXPECT_EQ(r.basin, 256u);
  for (auto v : r.class_plane()) EXPECT_EQ(v, 0);
}

TEST(Render, WindowInsideVkIsAllEscaping) {
  const auto& fx = fixture();
  const double R = fx.spec.R;
  RenderWindow w;
  w.base = {0.0, 0.0, 10.0 * R};
  w.u = {1.0, 0.0, 0.0};
  w.v = {0.0, 1.0, 0.0};
  w.s_min = w.t_min = -R;
  w.s_max = w.t_max = R;
  w.width = w.height = 16;
  RenderResult r = render_basin(fx.seq, w, fx.spec, fx.rt, 20, 2);
  EXPECT_EQ(r.escaping, 256u);
  for (auto s : r.steps) EXPECT_EQ(s, 0u);
}

TEST(Render, ThreadCountDoesNotChangeTheGrid) {
  const auto& fx = fixture();
  RenderWindow w;
  w.base = {0.0, 0.0, 0.0};
  w.u = {0.0, 1.0, 0.0};
  w.v = {0.0, 0.0, 1.0};
  w.s_min = w.t_min = -0.25 * fx.spec.R;
  w.s_max = w.t_max = 0.25 * fx.spec.R;
  w.width = 40;
  w.height = 30;
  RenderResult a = render_basin(fx.seq, w, fx.spec, fx.rt, 40, 1);
  for (unsigned T : {2u, 4u, 7u}) {
    RenderResult b = render_basin(fx.seq, w, fx.spec, fx.rt, 40, T);
    EXPECT_EQ(a.tag, b.tag);
    EXPECT_EQ(a.steps, b.steps);
    EXPECT_EQ(a.time_plane(), b.time_plane());
  }
  EXPECT_GT(a.basin, 0u);
  EXPECT_GT(a.escaping, 0u);
}

TEST(Render, BadWindowIsRejected) {
  const auto& fx = fixture();
  RenderWindow w;
  w.base = {0.0, 0.0};
  w.u = {1.0, 0.0};
  w.v = {0.0, 1.0};
  EXPECT_THROW(render_basin(fx.seq, w, fx.spec, fx.rt, 10, 1), parameter_error);
}
