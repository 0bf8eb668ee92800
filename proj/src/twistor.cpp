#include "morphoscope/twistor.hpp"

#include <cmath>

namespace morpho {

namespace {

using J2 = Jet2<2>;

struct ComplexJet {
  J2 re, im;
};

ComplexJet mul(const ComplexJet& a, const ComplexJet& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexJet reciprocal(const ComplexJet& a) {
  const J2 n = a.re * a.re + a.im * a.im;
  const J2 inv = 1.0 / n;
  return {a.re * inv, -(a.im * inv)};
}

ComplexJet power(const ComplexJet& z, int p) {
  ComplexJet base = p < 0 ? reciprocal(z) : z;
  ComplexJet r{J2(1.0), J2(0.0)};
  for (int i = 0; i < std::abs(p); ++i) r = mul(r, base);
  return r;
}

Mat4 antisym(int i, int j) {
  Mat4 A = Mat4::Zero();
  A(i, j) = 1.0;
  A(j, i) = -1.0;
  return A;
}

// s_a for the tagged bundle, as antisymmetric matrices with A_ij = s(e_i, e_j).
std::array<Mat4, 3> form_basis(int tag) {
  const double s = tag >= 0 ? 1.0 : -1.0;
  return {antisym(0, 2) - s * antisym(1, 3), antisym(0, 3) + s * antisym(1, 2), antisym(0, 1) + s * antisym(2, 3)};
}

// Components of K (orthonormal frame) in the 2-form basis: omega_ij = K_ji.
Vec3 form_components(const Mat4& K, int tag) {
  const Mat4 omega = K.transpose();
  const auto basis = form_basis(tag);
  Vec3 c;
  for (int a = 0; a < 3; ++a) {
    double dot = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) dot += omega(i, j) * basis[a](i, j);
    }
    c[a] = 0.5 * dot;
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Patches

SurfacePatch SurfacePatch::polynomial(std::string name, const std::array<RealPoly, 4>& components) {
  for (const auto& c : components) {
    for (const auto& [e, coef] : c.terms()) {
      if (e[2] != 0 || e[3] != 0) throw ConfigError("patch components may only use u and v");
    }
  }
  return SurfacePatch(std::move(name), [components](const std::array<J2, 2>& uv) {
    const std::array<J2, 4> x{uv[0], uv[1], J2(0.0), J2(0.0)};
    PatchJet out;
    for (int i = 0; i < 4; ++i) out[i] = components[i](x);
    return out;
  });
}

SurfacePatch SurfacePatch::laurent_graph(std::string name,
                                         const std::vector<std::pair<int, std::complex<double>>>& terms) {
  return SurfacePatch(std::move(name), [terms](const std::array<J2, 2>& uv) {
    const ComplexJet z{uv[0], uv[1]};
    ComplexJet w{J2(0.0), J2(0.0)};
    for (const auto& [p, c] : terms) {
      const ComplexJet zp = power(z, p);
      w.re += zp.re * c.real() - zp.im * c.imag();
      w.im += zp.re * c.imag() + zp.im * c.real();
    }
    return PatchJet{z.re, z.im, w.re, w.im};
  });
}

SurfacePatch SurfacePatch::pulled_back(const Diffeomorphism& phi) const {
  if (!phi.has_inverse()) throw PreconditionError("pulling back a patch needs the inverse diffeomorphism");
  const auto inverse = *phi.inverse_components();
  const PatchFunction base = fn_;
  return SurfacePatch(name_ + "_pullback", [inverse, base](const std::array<J2, 2>& uv) {
    const PatchJet y = base(uv);
    PatchJet x;
    for (int i = 0; i < 4; ++i) x[i] = inverse[i](y);
    return x;
  });
}

SurfacePatch::Eval SurfacePatch::eval(const Vec2& p) const {
  if (!fn_) throw PreconditionError("empty surface patch");
  const PatchJet x = fn_({J2::variable(0, p[0]), J2::variable(1, p[1])});
  Eval e;
  for (int i = 0; i < 4; ++i) {
    e.point[i] = x[i].v;
    e.d(i, 0) = x[i].d[0];
    e.d(i, 1) = x[i].d[1];
    e.dd[0][i] = x[i].hess(0, 0);
    e.dd[1][i] = x[i].hess(0, 1);
    e.dd[2][i] = x[i].hess(1, 1);
  }
  return e;
}

Mat2 SurfacePatch::induced_metric(const ChartMetric& metric, const Vec2& p) const {
  const Eval e = eval(p);
  return e.d.transpose() * metric.eval(e.point) * e.d;
}

Mat2 SurfacePatch::induced_complex_structure(const ChartMetric& metric, const Vec2& p) const {
  const Mat2 G = induced_metric(metric, p);
  Eigen::LLT<Mat2> llt(G);
  if (llt.info() != Eigen::Success) throw DegeneracyError("induced metric is degenerate");
  const Mat2 U = llt.matrixU();
  Mat2 R;
  R << 0.0, -1.0, 1.0, 0.0;
  return U.inverse() * R * U;
}

// ---------------------------------------------------------------------------
// Fibers

Mat4 twistor_frame(const ChartMetric& metric, const Vec4& m, int orientation) {
  const Frame f = coordinate_frame(metric, m);
  Mat4 E;
  E << f.vectors[0], f.vectors[1], f.vectors[2], f.vectors[3];
  if (orientation < 0) E.col(3) = -E.col(3);
  return E;
}

Vec3 fiber_coordinates(const ChartMetric& metric, const Vec4& m, const Mat4& J, int tag, int orientation) {
  const Mat4 E = twistor_frame(metric, m, orientation);
  const Mat4 K = E.inverse() * J * E;
  if ((K * K + Mat4::Identity()).norm() > 1e-9 || (K.transpose() * K - Mat4::Identity()).norm() > 1e-9) {
    throw InvalidStructureError("not an orthogonal complex structure at " + format_point(m));
  }
  const Vec3 c = form_components(K, tag);
  const Vec3 other = form_components(K, -tag);
  if (other.norm() > 1e-8) {
    throw InvalidStructureError("structure at " + format_point(m) + " has the opposite orientation");
  }
  return c;
}

Mat4 structure_from_fiber(const ChartMetric& metric, const Vec4& m, const Vec3& c, int tag, int orientation) {
  const auto basis = form_basis(tag);
  const Vec3 u = c.normalized();
  Mat4 omega = Mat4::Zero();
  for (int a = 0; a < 3; ++a) omega += u[a] * basis[a];
  const Mat4 K = omega.transpose();
  const Mat4 E = twistor_frame(metric, m, orientation);
  return E * K * E.inverse();
}

// ---------------------------------------------------------------------------
// Lifts

LiftFrame lift_frame(const ChartMetric& metric, const SurfacePatch& patch, const Vec2& p, int orientation) {
  const SurfacePatch::Eval e = patch.eval(p);
  metric.require_inside(e.point);
  if (Eigen::JacobiSVD<Mat42>(e.d).singularValues()[1] <= 1e-8) {
    throw DegeneracyError("patch is not immersed at parameter (" + std::to_string(p[0]) + ", " +
                          std::to_string(p[1]) + ")");
  }
  const Mat4 g = metric.eval(e.point);
  const std::array<Vec4, 6> seeds{e.d.col(0), e.d.col(1), Vec4::UnitX(), Vec4::UnitY(), Vec4::UnitZ(), Vec4::UnitW()};
  const Frame f = orthonormalize(g, seeds, 4);
  LiftFrame L;
  L.t1 = f.vectors[0];
  L.t2 = f.vectors[1];
  L.n1 = f.vectors[2];
  L.n2 = f.vectors[3];
  const std::array<Vec4, 4> cols{L.t1, L.t2, L.n1, L.n2};
  if (orientation_sign(cols, orientation) < 0) L.n2 = -L.n2;
  const Mat2 G = e.d.transpose() * g * e.d;
  const Mat2 Ginv = G.inverse();
  L.a1 = Ginv * e.d.transpose() * g * L.t1;
  L.a2 = Ginv * e.d.transpose() * g * L.t2;
  return L;
}

TwistorPoint surface_lift(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, int tag) {
  const ChartMetric& metric = scenario.metric();
  const LiftFrame L = lift_frame(metric, patch, p, scenario.orientation());
  Mat4 E;
  E << L.t1, L.t2, L.n1, L.n2;
  Mat4 K = Mat4::Zero();
  K(1, 0) = 1.0;
  K(0, 1) = -1.0;
  K(3, 2) = tag >= 0 ? 1.0 : -1.0;
  K(2, 3) = -K(3, 2);
  TwistorPoint t;
  t.point = patch.point(p);
  t.tag = tag >= 0 ? 1 : -1;
  t.J = E * K * E.inverse();
  t.fiber = fiber_coordinates(metric, t.point, t.J, t.tag, scenario.orientation());
  return t;
}

Mat4 lift_derivative(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, const Vec2& a, int tag,
                     const LiftOptions& opts) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Mat4::Zero();
  const double s = opts.step / scale;
  auto J = [&](double t) { return surface_lift(scenario, patch, p + t * a, tag).J; };
  auto central = [&](double t) -> Mat4 { return (J(t) - J(-t)) / (2.0 * t); };
  const Mat4 dJ = (4.0 * central(0.5 * s) - central(s)) / 3.0;
  const SurfacePatch::Eval e = patch.eval(p);
  const Vec4 X = e.d * a;
  const Mat4 GX = connection_matrix(christoffel(scenario.metric(), e.point), X);
  const Mat4 J0 = J(0.0);
  return dJ + GX * J0 - J0 * GX;
}

LiftSample lift_sample(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, int tag,
                       const LiftOptions& opts) {
  const ChartMetric& metric = scenario.metric();
  LiftSample s;
  s.parameter = p;
  s.tag = tag >= 0 ? 1 : -1;
  s.gamma = surface_lift(scenario, patch, p, s.tag);
  const Vec4 m = s.gamma.point;
  const Mat4 g = metric.eval(m);
  const Mat4& J = s.gamma.J;
  const LiftFrame L = lift_frame(metric, patch, p, scenario.orientation());

  const Mat4 D1 = lift_derivative(scenario, patch, p, L.a1, s.tag, opts);
  const Mat4 D2 = lift_derivative(scenario, patch, p, L.a2, s.tag, opts);
  const Mat4 E = twistor_frame(metric, m, scenario.orientation());
  const Mat4 E_inv = E.inverse();
  s.vertical_t1 = form_components(E_inv * D1 * E, s.tag);
  s.vertical_t2 = form_components(E_inv * D2 * E, s.tag);

  // Vertical vectors are measured on the unit sphere: |V| = |nabla J|_F / 2.
  auto sphere_norm = [&](const Mat4& V) { return 0.5 * std::sqrt(std::max(0.0, (g.inverse() * V.transpose() * g * V).trace())); };
  const double vertical = sphere_norm(D2 + J * D1);
  s.horizontal_residual = norm(g, L.t2 - J * L.t1);
  s.residual = std::hypot(vertical, s.horizontal_residual);

  const double v1 = sphere_norm(D1), v2 = sphere_norm(D2);
  s.vertical_energy = v1 * v1 + v2 * v2;
  const double t11 = inner(g, L.t1, L.t1), t22 = inner(g, L.t2, L.t2), t12 = inner(g, L.t1, L.t2);
  s.area.hh = std::sqrt(std::max(0.0, t11 * t22 - t12 * t12));
  s.area.hv = std::sqrt(t11) * v2;
  s.area.vh = v1 * std::sqrt(t22);
  s.area.vv = s.vertical_t1.cross(s.vertical_t2).norm();

  const CurvatureData R = curvature(metric, m);
  s.omega_T = R.pairing(L.t1, L.t2, L.t1, L.t2);
  s.omega_N = R.pairing(L.t1, L.t2, L.n1, L.n2);
  return s;
}

double script_J_residual(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, int tag,
                         const LiftOptions& opts) {
  return lift_sample(scenario, patch, p, tag, opts).residual;
}

std::pair<double, double> curvature_densities(const MorphismScenario& scenario, const SurfacePatch& patch,
                                              const Vec2& p) {
  const ChartMetric& metric = scenario.metric();
  const LiftFrame L = lift_frame(metric, patch, p, scenario.orientation());
  const CurvatureData R = curvature(metric, patch.point(p));
  return {R.pairing(L.t1, L.t2, L.t1, L.t2), R.pairing(L.t1, L.t2, L.n1, L.n2)};
}

double vertical_energy_density(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, int tag,
                               const LiftOptions& opts) {
  return lift_sample(scenario, patch, p, tag, opts).vertical_energy;
}

}  // namespace morpho
