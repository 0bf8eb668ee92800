#include <gtest/gtest.h>

#include "morphoscope/hermitian.hpp"
#include "morphoscope/symbol.hpp"
#include "support.hpp"

using namespace morpho;
using morpho::testing::scenario;

namespace {

MorphismScenario real_map(const PolyPair& p) {
  Box b;
  b.fill({-1.0, 1.0});
  return MorphismScenario("real", ChartMetric::flat(b), MapSpec::real_poly(p));
}

RealPoly mono(int a, int b, int c, int d, double coeff = 1.0) { return RealPoly::monomial({a, b, c, d}, coeff); }

}  // namespace

TEST(Symbol, Orders) {
  EXPECT_EQ(order_at(scenario("z1z2"), Vec4::Zero()), 2);
  EXPECT_EQ(order_at(scenario("z1sq"), Vec4::Zero()), 2);
  EXPECT_EQ(order_at(scenario("proj"), Vec4::Zero()), 1);
  // Re, Im of w1^3: order 3.
  EXPECT_EQ(order_at(real_map({mono(3, 0, 0, 0) + mono(1, 2, 0, 0, -3.0), mono(2, 1, 0, 0, 3.0) + mono(0, 3, 0, 0, -1.0)}),
                     Vec4::Zero()),
            3);
  EXPECT_THROW(order_at(real_map({mono(7, 0, 0, 0), mono(0, 7, 0, 0)}), Vec4::Zero()), UnsupportedOrderError);
}

TEST(Symbol, ProductHasUniqueStructure) {
  const SymbolData sd = symbol_polynomial(scenario("z1z2"), Vec4::Zero());
  EXPECT_EQ(sd.order, 2);
  ASSERT_EQ(sd.candidates.size(), 1u);
  EXPECT_EQ(sd.candidates[0].orientation, 1);
  EXPECT_LT((sd.candidates[0].J - standard_structure()).norm(), 1e-12);
}

TEST(Symbol, SquareHasTwoOppositeStructures) {
  const SymbolData sd = symbol_polynomial(scenario("z1sq"), Vec4::Zero());
  EXPECT_EQ(sd.order, 2);
  ASSERT_EQ(sd.candidates.size(), 2u);
  EXPECT_EQ(sd.candidates[0].orientation * sd.candidates[1].orientation, -1);
  for (const auto& c : sd.candidates) EXPECT_LE(c.antiholomorphic, 1e-10);
}

TEST(Symbol, CubicPerturbationKeepsProductSymbol) {
  const SymbolData sd = symbol_polynomial(scenario("z1z2_cubic"), Vec4::Zero());
  const SymbolData base = symbol_polynomial(scenario("z1z2"), Vec4::Zero());
  EXPECT_TRUE((sd.P0[0] - base.P0[0]).is_zero());
  EXPECT_TRUE((sd.P0[1] - base.P0[1]).is_zero());
  // The remainder is Re, Im of w1^3.
  const Vec4 d(0.01, 0.02, -0.03, 0.005);
  const std::complex<double> w1(d[0], d[1]);
  const std::complex<double> c = w1 * w1 * w1;
  EXPECT_LT((sd.psi(d) - Vec2(c.real(), c.imag())).norm(), 1e-16);
}

TEST(Symbol, RegularPointIsRejected) {
  EXPECT_THROW(symbol_polynomial(scenario("proj"), Vec4::Zero()), ClassificationError);
}

TEST(Symbol, NonHolomorphicSymbolIsReported) {
  // Re(w1 conj(w2)), Im(w1 w2): no orthogonal structure makes this quadratic holomorphic.
  const MorphismScenario s = real_map({mono(1, 0, 1, 0) + mono(0, 1, 0, 1), mono(1, 0, 0, 1) + mono(0, 1, 1, 0)});
  EXPECT_THROW(symbol_polynomial(s, Vec4::Zero()), SymbolError);
}

TEST(Symbol, RemainderRatesOnCubic) {
  std::vector<double> radii;
  for (int i = 0; i < 8; ++i) radii.push_back(0.1 * std::pow(2.0, -i));
  const RemainderRates r = remainder_rates(scenario("z1z2_cubic"), Vec4::Zero(), radii, seeded_directions(16, 1));
  EXPECT_EQ(r.order, 2);
  EXPECT_GE(r.value.slope, 2.9);
  EXPECT_GE(r.differential.slope, 1.9);
  EXPECT_TRUE(r.pass);
}

TEST(Symbol, DilationLowerRate) {
  const DilationRate z = dilation_lower_rate(scenario("z1z2"), Vec4::Zero(), default_radii(), seeded_directions(16, 1));
  EXPECT_TRUE(z.pass);
  EXPECT_NEAR(z.fit.slope, 1.0, 1e-9);
  EXPECT_NEAR(z.lower_constant, 1.0, 1e-9);
  // Directions inside {w1 = 0} are critical at every radius for w1^2.
  std::vector<Vec4> dirs{Vec4(0, 0, 1, 0), Vec4(1, 0, 0, 0)};
  const DilationRate q = dilation_lower_rate(scenario("z1sq"), Vec4::Zero(), default_radii(), dirs);
  ASSERT_EQ(q.excluded.size(), 1u);
  EXPECT_EQ(q.excluded[0], 0);
  EXPECT_NEAR(q.lower_constant, 2.0, 1e-9);
}
