#include <gtest/gtest.h>

#include <complex>
#include <numbers>

#include "morphoscope/hermitian.hpp"
#include "morphoscope/random.hpp"
#include "morphoscope/twistor.hpp"
#include "support.hpp"

using namespace morpho;
using morpho::testing::catalog;

namespace {

// Orthogonal structure on flat R^4 from a rotation of the standard one.
Mat4 rotated_structure(Rng& rng, int vertical_sign) {
  Mat4 R;
  for (int i = 0; i < 16; ++i) R(i / 4, i % 4) = rng.normal();
  Mat4 Q = Eigen::HouseholderQR<Mat4>(R).householderQ();
  if (Q.determinant() < 0) Q.col(0) = -Q.col(0);
  return Q * standard_structure(vertical_sign) * Q.transpose();
}

}  // namespace

TEST(Fiber, StandardStructureIsNorthPole) {
  const ScenarioConfig cfg = catalog("z1z2");
  const ChartMetric& g = cfg.scenario.metric();
  EXPECT_LT((fiber_coordinates(g, Vec4::Zero(), standard_structure(), 1) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((fiber_coordinates(g, Vec4::Zero(), standard_structure(-1), -1) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_THROW(fiber_coordinates(g, Vec4::Zero(), standard_structure(-1), 1), InvalidStructureError);
  EXPECT_THROW(fiber_coordinates(g, Vec4::Zero(), Mat4::Identity(), 1), InvalidStructureError);
}

TEST(Fiber, UnitNormAndRoundTrip) {
  const ChartMetric g = catalog("pullback_z1z2").scenario.metric();
  Rng rng(31);
  for (int n = 0; n < 50; ++n) {
    const Vec4 m = rng.point_in(g.domain(), 0.5);
    for (int tag : {1, -1}) {
      const Vec3 c = rng.unit_vec3();
      const Mat4 J = structure_from_fiber(g, m, c, tag);
      const Mat4 gm = g.eval(m);
      EXPECT_LT((J * J + Mat4::Identity()).norm(), 1e-10);
      EXPECT_LT((J.transpose() * gm * J - gm).norm(), 1e-10);
      const Vec3 back = fiber_coordinates(g, m, J, tag);
      EXPECT_NEAR(back.norm(), 1.0, 1e-10);
      EXPECT_LT((back - c).norm(), 1e-10);
    }
  }
  Rng r2(32);
  const ChartMetric flat = catalog("z1z2").scenario.metric();
  for (int n = 0; n < 20; ++n) {
    EXPECT_NEAR(fiber_coordinates(flat, Vec4::Zero(), rotated_structure(r2, 1), 1).norm(), 1.0, 1e-10);
  }
}

TEST(Patch, InverseFiberParametrization) {
  const ScenarioConfig cfg = catalog("z1z2");
  const SurfacePatch& p = cfg.patch("inverse_fiber").patch;
  for (const Vec2 uv : {Vec2(1.0, 0.0), Vec2(0.8, 0.3), Vec2(-0.6, 0.7)}) {
    const std::complex<double> z(uv[0], uv[1]);
    const std::complex<double> inv = 1.0 / z, d = -1.0 / (z * z), dd = 2.0 / (z * z * z);
    const SurfacePatch::Eval e = p.eval(uv);
    EXPECT_LT((e.point - Vec4(z.real(), z.imag(), inv.real(), inv.imag())).norm(), 1e-14);
    // d/du = (1, 0, f'), d/dv = (0, 1, i f').
    EXPECT_LT((e.d.col(0) - Vec4(1, 0, d.real(), d.imag())).norm(), 1e-13);
    EXPECT_LT((e.d.col(1) - Vec4(0, 1, -d.imag(), d.real())).norm(), 1e-13);
    EXPECT_LT((e.dd[0] - Vec4(0, 0, dd.real(), dd.imag())).norm(), 1e-12);
    EXPECT_LT((e.dd[2] + e.dd[0]).norm(), 1e-12);
  }
}

TEST(Patch, PulledBackPatchMapsToSameSurface) {
  const ScenarioConfig base = catalog("z1z2");
  const ScenarioConfig pulled = catalog("pullback_z1z2");
  for (const char* name : {"plane", "inverse_fiber", "graph_control"}) {
    const SurfacePatch& a = base.patch(name).patch;
    const SurfacePatch& b = pulled.patch(name).patch;
    for (const Vec2 uv : {Vec2(0.9, 0.1), Vec2(0.7, -0.4)}) {
      EXPECT_LT((morpho::testing::bump(b.point(uv)) - a.point(uv)).norm(), 1e-12) << name;
      const Mat2 ga = a.induced_metric(base.scenario.metric(), uv);
      const Mat2 gb = b.induced_metric(pulled.scenario.metric(), uv);
      EXPECT_LT((ga - gb).norm(), 1e-11) << name;
    }
  }
}

TEST(Lift, FiberSpeedMatchesDifferencedCoordinates) {
  // On flat R^4 the twistor frame is constant, so the vertical part of the lift
  // derivative is the plain derivative of the fiber coordinates.
  const ScenarioConfig cfg = catalog("z1z2");
  const MorphismScenario& s = cfg.scenario;
  for (const char* name : {"graph_control", "inverse_fiber"}) {
    const SurfacePatch& p = cfg.patch(name).patch;
    for (const Vec2 uv : {Vec2(0.8, 0.3), Vec2(1.1, -0.4)}) {
      const LiftSample ls = lift_sample(s, p, uv, 1);
      const LiftFrame f = lift_frame(s.metric(), p, uv);
      const double h = 1e-5;
      for (int i = 0; i < 2; ++i) {
        const Vec2 a = i == 0 ? f.a1 : f.a2;
        const Vec3 cp = surface_lift(s, p, uv + h * a, 1).fiber;
        const Vec3 cm = surface_lift(s, p, uv - h * a, 1).fiber;
        const Vec3 speed = (cp - cm) / (2 * h);
        const Vec3 got = i == 0 ? ls.vertical_t1 : ls.vertical_t2;
        EXPECT_LT((got - speed).norm(), 1e-6 * (1 + speed.norm())) << name;
      }
    }
  }
}

TEST(Lift, StructureRotatesTangentAndNormalPlanes) {
  const ScenarioConfig cfg = catalog("pullback_z1z2");
  const MorphismScenario& s = cfg.scenario;
  const SurfacePatch& p = cfg.patch("graph_control").patch;
  const Vec2 uv(0.3, -0.2);
  const LiftFrame f = lift_frame(s.metric(), p, uv);
  for (int tag : {1, -1}) {
    const TwistorPoint t = surface_lift(s, p, uv, tag);
    EXPECT_LT((t.J * f.t1 - f.t2).norm(), 1e-12);
    EXPECT_LT((t.J * f.n1 - tag * f.n2).norm(), 1e-12);
  }
}

TEST(Lift, MinimalPatchesHaveHolomorphicLifts) {
  for (const char* scen : {"z1z2", "pullback_z1z2"}) {
    const ScenarioConfig cfg = catalog(scen);
    for (const char* name : {"plane", "inverse_fiber"}) {
      const PatchConfig& pc = cfg.patch(name);
      for (const Vec2& uv : pc.parameters) EXPECT_LE(script_J_residual(cfg.scenario, pc.patch, uv, 1), 1e-5) << scen << name;
    }
    const PatchConfig& ctrl = cfg.patch("graph_control");
    for (const Vec2& uv : ctrl.parameters) EXPECT_GE(script_J_residual(cfg.scenario, ctrl.patch, uv, 1), 1e-2);
  }
}

TEST(Lift, GraphControlResidualAtOrigin) {
  // At the origin of (u, v, (u^2 + v^2)/2, 0): II(t1, t1) = II(t2, t2) = e3, so
  // nabla_ti J = [A_i, J] with A_i the rotation t_i -> e3. Then
  // |nabla_t2 J + J nabla_t1 J|_F = 4 and |nabla_t1 J|_F^2 + |nabla_t2 J|_F^2 = 8.
  const ScenarioConfig cfg = catalog("z1z2");
  const PatchConfig& pc = cfg.patch("graph_control");
  const LiftSample ls = lift_sample(cfg.scenario, pc.patch, Vec2(0, 0), 1);
  EXPECT_NEAR(ls.horizontal_residual, 0.0, 1e-12);
  EXPECT_NEAR(ls.residual, 2.0, 1e-6);
  EXPECT_NEAR(ls.vertical_energy, 2.0, 1e-6);
  EXPECT_EQ(vertical_energy_density(cfg.scenario, pc.patch, Vec2(0, 0), 1), ls.vertical_energy);
}

TEST(Curvature, SurfaceDensitiesOnProductSphere) {
  const ScenarioConfig cfg = catalog("product_sphere");
  for (const Vec2& uv : cfg.patch("sphere_factor").parameters) {
    const auto [T, N] = curvature_densities(cfg.scenario, cfg.patch("sphere_factor").patch, uv);
    EXPECT_NEAR(std::abs(T), 1.0, 1e-10);
    EXPECT_NEAR(N, 0.0, 1e-12);
  }
  for (const Vec2& uv : cfg.patch("flat_factor").parameters) {
    const auto [T, N] = curvature_densities(cfg.scenario, cfg.patch("flat_factor").patch, uv);
    EXPECT_NEAR(T, 0.0, 1e-12);
    EXPECT_NEAR(N, 0.0, 1e-12);
  }
}
