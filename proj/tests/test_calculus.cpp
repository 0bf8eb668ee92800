#include <gtest/gtest.h>

#include <complex>

#include "morphoscope/calculus.hpp"
#include "morphoscope/random.hpp"
#include "support.hpp"

using namespace morpho;
using morpho::testing::scenario;

namespace {

std::complex<double> w1(const Vec4& x) { return {x[0], x[1]}; }
std::complex<double> w2(const Vec4& x) { return {x[2], x[3]}; }

Vec2 split(std::complex<double> z) { return {z.real(), z.imag()}; }

Mat24 fd_jacobian(const MorphismScenario& s, const Vec4& x, double h = 1e-6) {
  Mat24 D;
  for (int k = 0; k < 4; ++k) {
    Vec4 e = Vec4::Zero();
    e[k] = h;
    D.col(k) = (evaluate(s, x + e) - evaluate(s, x - e)) / (2 * h);
  }
  return D;
}

}  // namespace

TEST(Calculus, HolomorphicCatalogMapsEvaluate) {
  Rng rng(1);
  for (int n = 0; n < 20; ++n) {
    const Vec4 x = rng.point_in(scenario("z1z2").metric().domain(), 0.1);
    EXPECT_LT((evaluate(scenario("proj"), x) - split(w1(x))).norm(), 1e-14);
    EXPECT_LT((evaluate(scenario("z1z2"), x) - split(w1(x) * w2(x))).norm(), 1e-13);
    EXPECT_LT((evaluate(scenario("z1sq"), x) - split(w1(x) * w1(x))).norm(), 1e-13);
    EXPECT_LT((evaluate(scenario("z1z2_cubic"), x) - split(w1(x) * w2(x) + w1(x) * w1(x) * w1(x))).norm(), 1e-12);
  }
}

TEST(Calculus, PullbackComposesWithDiffeomorphism) {
  const MorphismScenario s = scenario("pullback_z1z2");
  Rng rng(2);
  for (int n = 0; n < 20; ++n) {
    const Vec4 x = rng.point_in(s.metric().domain(), 0.5);
    const Vec4 y = morpho::testing::bump(x);
    EXPECT_LT((evaluate(s, x) - split(w1(y) * w2(y))).norm(), 1e-13);
  }
}

TEST(Calculus, DifferentialAndHessianMatchFiniteDifferences) {
  for (const char* name : {"z1z2_cubic", "pullback_z1z2", "control_quadratic"}) {
    const MorphismScenario s = scenario(name);
    Rng rng(3);
    for (int n = 0; n < 5; ++n) {
      const Vec4 x = rng.point_in(s.metric().domain(), 0.5);
      EXPECT_LT((differential(s, x) - fd_jacobian(s, x)).norm(), 1e-7) << name;
      const auto H = hessian(s, x);
      const double h = 1e-5;
      for (int k = 0; k < 4; ++k) {
        Vec4 e = Vec4::Zero();
        e[k] = h;
        const Mat24 dD = (differential(s, x + e) - differential(s, x - e)) / (2 * h);
        for (int c = 0; c < 2; ++c) {
          for (int j = 0; j < 4; ++j) EXPECT_NEAR(H[c](k, j), dD(c, j), 1e-6) << name;
        }
      }
    }
  }
}

TEST(Calculus, JetReproducesTaylorExpansion) {
  const MorphismScenario s = scenario("z1z2_cubic");
  const Vec4 m(0.3, -0.2, 0.5, 0.1);
  const MapJet j = jet(s, m, 3);
  // A cubic map equals its third-order jet.
  Rng rng(4);
  for (int n = 0; n < 10; ++n) {
    const Vec4 d = 0.3 * rng.unit_vec4();
    const auto a = morpho::testing::arr(d);
    const Vec2 taylor(j.taylor[0](a), j.taylor[1](a));
    EXPECT_LT((taylor - evaluate(s, m + d)).norm(), 1e-13);
  }
  EXPECT_LT((j.jacobian - differential(s, m)).norm(), 1e-13);
  EXPECT_THROW(jet(s, m, kMaxJetOrder + 1), UnsupportedOrderError);
}

TEST(Calculus, HomogeneousPartsAtOrigin) {
  const MapJet j = jet(scenario("z1z2_cubic"), Vec4::Zero(), 3);
  const PolyPair p2 = j.homogeneous(2);
  const PolyPair p3 = j.homogeneous(3);
  // Re(w1 w2) = x1 x3 - x2 x4, Im(w1 w2) = x1 x4 + x2 x3.
  EXPECT_DOUBLE_EQ(p2[0].coefficient({1, 0, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(p2[0].coefficient({0, 1, 0, 1}), -1.0);
  EXPECT_DOUBLE_EQ(p2[1].coefficient({1, 0, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(p2[1].coefficient({0, 1, 1, 0}), 1.0);
  // Re(w1^3) = x1^3 - 3 x1 x2^2.
  EXPECT_DOUBLE_EQ(p3[0].coefficient({3, 0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(p3[0].coefficient({1, 2, 0, 0}), -3.0);
  EXPECT_TRUE(j.homogeneous(1)[0].is_zero());
}

TEST(TargetMetric, ConformalTargetStructure) {
  // h = (1 + u1^2) I: j is the standard rotation and B^T B = h.
  RealPoly one;
  one.add_term({0, 0, 0, 0}, 1.0);
  RealPoly conf = one;
  conf.add_term({2, 0, 0, 0}, 1.0);
  const TargetMetric h = TargetMetric::explicit_entries(conf, RealPoly{}, conf);
  const Vec2 u(0.7, -0.4);
  const Mat2 B = h.orthonormal_factor(u);
  EXPECT_LT((B.transpose() * B - h.eval(u)).norm(), 1e-14);
  Mat2 rot;
  rot << 0, -1, 1, 0;
  EXPECT_LT((h.complex_structure(u) - rot).norm(), 1e-14);
  EXPECT_LT((h.complex_structure(u, -1) + rot).norm(), 1e-14);
  // Gamma^1_11 = d_1 h11 / (2 h11) for a conformal metric.
  EXPECT_NEAR(h.christoffel(u)[0](0, 0), 0.7 / (1 + 0.49), 1e-14);
}
