#pragma once

// Twistor fibers, lifts of parametrized surfaces, the holomorphicity residual
// of the lift and the pointwise curvature densities along a surface.
//
// Fiber coordinates: with (e1..e4) the positive orthonormal frame obtained
// from the coordinate basis, omega_ij = g(J e_i, e_j) and c_a = <omega, s_a>/2
// where s = (e13 - e24, e14 + e23, e12 + e34) on Z+ and
// s = (e13 + e24, e14 - e23, e12 - e34) on Z-. The standard structure maps to (0, 0, 1).

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "morphoscope/calculus.hpp"

namespace morpho {

inline constexpr const char* kFiberConvention =
    "c_a = <omega_J, s_a>/2, omega_ij = g(J e_i, e_j); Z+: s = (e13-e24, e14+e23, e12+e34); "
    "Z-: s = (e13+e24, e14-e23, e12-e34)";
inline constexpr const char* kScriptJConvention =
    "script J = J on horizontal lifts, V -> -J o V on vertical vectors";

using PatchJet = std::array<Jet2<2>, 4>;
using PatchFunction = std::function<PatchJet(const std::array<Jet2<2>, 2>&)>;

class SurfacePatch {
 public:
  struct Eval {
    Vec4 point = Vec4::Zero();
    Mat42 d = Mat42::Zero();      // columns d_u psi, d_v psi
    std::array<Vec4, 3> dd{};     // d_uu, d_uv, d_vv
  };

  SurfacePatch() = default;
  SurfacePatch(std::string name, PatchFunction fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  /// psi(u, v) with polynomial components in variables 0 (u) and 1 (v).
  static SurfacePatch polynomial(std::string name, const std::array<RealPoly, 4>& components);
  /// z = u + iv -> (z, sum_k c_k z^{p_k}); negative powers allowed.
  static SurfacePatch laurent_graph(std::string name, const std::vector<std::pair<int, std::complex<double>>>& terms);
  /// Phi^{-1} o psi: the same surface seen in the chart of Phi^* g. Requires Phi's inverse.
  SurfacePatch pulled_back(const Diffeomorphism& phi) const;

  const std::string& name() const { return name_; }
  Eval eval(const Vec2& p) const;
  Vec4 point(const Vec2& p) const { return eval(p).point; }
  Mat2 induced_metric(const ChartMetric& metric, const Vec2& p) const;
  /// Rotation by +90 degrees in the induced metric, for the orientation (d_u, d_v).
  Mat2 induced_complex_structure(const ChartMetric& metric, const Vec2& p) const;

 private:
  std::string name_;
  PatchFunction fn_;
};

struct TwistorPoint {
  Vec4 point = Vec4::Zero();
  Mat4 J = Mat4::Zero();
  int tag = 1;
  Vec3 fiber = Vec3::Zero();
};

/// Positive g(m)-orthonormal frame from the coordinate basis (columns).
Mat4 twistor_frame(const ChartMetric& metric, const Vec4& m, int orientation = 1);

/// Throws InvalidStructureError unless J is a g-orthogonal complex structure in the tagged bundle.
Vec3 fiber_coordinates(const ChartMetric& metric, const Vec4& m, const Mat4& J, int tag = 1, int orientation = 1);
Mat4 structure_from_fiber(const ChartMetric& metric, const Vec4& m, const Vec3& c, int tag = 1, int orientation = 1);

struct LiftFrame {
  Vec4 t1 = Vec4::Zero(), t2 = Vec4::Zero();  // oriented orthonormal tangent frame
  Vec4 n1 = Vec4::Zero(), n2 = Vec4::Zero();  // normal frame, (t1, t2, n1, n2) positive
  Vec2 a1 = Vec2::Zero(), a2 = Vec2::Zero();  // parameter vectors: d psi a_i = t_i
};

LiftFrame lift_frame(const ChartMetric& metric, const SurfacePatch& patch, const Vec2& p, int orientation = 1);

/// J t1 = t2, J n1 = tag * n2.
TwistorPoint surface_lift(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, int tag = 1);

struct LiftOptions {
  double step = 1e-4;  // parameter step of the lift derivative
};

/// Terms of the bound |e1~ ^ e2~| <= |h^h| + |h^v| + |v^h| + |v^v| for the lifted tangent frame.
struct AreaTerms {
  double hh = 0.0, hv = 0.0, vh = 0.0, vv = 0.0;
  double bound() const { return hh + hv + vh + vv; }
};

struct LiftSample {
  Vec2 parameter = Vec2::Zero();
  TwistorPoint gamma;
  int tag = 1;
  double residual = 0.0;             // |d gamma o j_S - script J o d gamma|
  double horizontal_residual = 0.0;
  double vertical_energy = 0.0;      // |nabla gamma|^2, in unit-sphere units
  Vec3 vertical_t1 = Vec3::Zero(), vertical_t2 = Vec3::Zero();  // d gamma(t_i) in fiber coordinates
  AreaTerms area;
  double omega_T = 0.0, omega_N = 0.0;
};

/// nabla_X J along the surface: X = d psi(a).
Mat4 lift_derivative(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, const Vec2& a, int tag,
                     const LiftOptions& opts = {});

LiftSample lift_sample(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, int tag = 1,
                       const LiftOptions& opts = {});

double script_J_residual(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, int tag = 1,
                         const LiftOptions& opts = {});
/// (<R(t1,t2)t1,t2>, <R(t1,t2)n1,n2>).
std::pair<double, double> curvature_densities(const MorphismScenario& scenario, const SurfacePatch& patch,
                                              const Vec2& p);
double vertical_energy_density(const MorphismScenario& scenario, const SurfacePatch& patch, const Vec2& p, int tag = 1,
                               const LiftOptions& opts = {});

}  // namespace morpho
