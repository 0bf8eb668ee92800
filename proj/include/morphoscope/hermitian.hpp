#pragma once

// The almost Hermitian structures J+ and J- at regular points, the reference
// structure J0 at a critical point and the rate at which J+ approaches it.

#include <string>
#include <vector>

#include "morphoscope/morphism.hpp"
#include "morphoscope/rate_fit.hpp"

namespace morpho {

/// Block-diagonal standard structure: d1 -> d2, d3 -> d4 (vertical_sign = -1: d3 -> -d4).
Mat4 standard_structure(int vertical_sign = 1);

/// E diag(R, s R) E^{-1} for a frame E given by columns.
Mat4 structure_from_frame(const Mat4& E, int vertical_sign = 1);

struct HermitianPair {
  Vec4 point = Vec4::Zero();
  Mat4 J_plus = Mat4::Zero();
  Mat4 J_minus = Mat4::Zero();
  PointSplit split;
};

/// J+ e1 = e2, J+ v1 = v2; J- e1 = e2, J- v1 = -v2. Throws ClassificationError at critical points.
HermitianPair hermitian_pair(const MorphismScenario& scenario, const Vec4& m, const SplitOptions& opts = {});

/// |dF J - j dF|_F.
double pseudo_holomorphy_residual(const MorphismScenario& scenario, const Vec4& m, const Mat4& J);

/// J0 at m0 extended as the constant structure in second-order normal
/// coordinates y centered at m0: x(y) = m0 + E0 y - Gamma(m0)(E0 y, E0 y) / 2,
/// with E0 a g(m0)-orthonormal frame in which J0 is standard_structure().
class ReferenceStructure {
 public:
  ReferenceStructure() = default;
  ReferenceStructure(const ChartMetric& metric, const Vec4& center, const Mat4& J0, int orientation);

  const Vec4& center() const { return center_; }
  int orientation() const { return orientation_; }
  const Mat4& J0() const { return J0_; }
  const Mat4& frame() const { return E0_; }

  Vec4 to_chart(const Vec4& y) const;
  /// dx/dy at y.
  Mat4 chart_jacobian(const Vec4& y) const;
  /// Inverse of to_chart by Newton iteration.
  Vec4 to_normal(const Vec4& x) const;
  /// The extended field in chart components at x.
  Mat4 J_at(const Vec4& x) const;

  /// |D^{-1} J D - J_can|_F at x(y), D = chart_jacobian(y).
  double deviation(const Mat4& J, const Vec4& y) const;
  /// Spectral norms of J_can^T g_y J_can - g_y and of the symmetric part of g_y J_can,
  /// g_y the metric in y-coordinates.
  std::pair<double, double> metric_defects(const Vec4& y) const;

 private:
  ChartMetric metric_;
  Vec4 center_ = Vec4::Zero();
  Mat4 J0_ = Mat4::Zero();
  Mat4 E0_ = Mat4::Identity();
  Christoffel gamma0_{};
  int orientation_ = 1;
};

/// g(m0)-orthonormal frame (f1, J f1, f3, J f3) for an orthogonal structure J.
Mat4 adapted_frame(const Mat4& g, const Mat4& J);

/// Uses the symbol's J0 candidate with the requested orientation. Throws
/// SymbolError when none exists.
ReferenceStructure reference_field(const MorphismScenario& scenario, const Vec4& m0, int orientation = 1);

struct MainLemmaReport {
  RateFit deviation;       // max over directions of |J - J0|
  RateFit metric_defect;   // |<J0 X, J0 X> - <X, X>| bound
  RateFit skew_defect;     // |<J0 X, X>| bound
  std::vector<std::string> substitutions;
  bool pass = false;       // deviation slope >= 0.9 (or identically zero)
  bool defects_pass = false;  // both defect slopes >= 1.9 (or identically zero)
};

/// Directions are unit vectors in the normal coordinates y; points are x(r d).
MainLemmaReport main_lemma_rate(const MorphismScenario& scenario, const Vec4& m0, const std::vector<Vec4>& directions,
                                const std::vector<double>& radii, int orientation = 1, int workers = 1);

struct ShellScan {
  double radius = 0.0;
  double min_dilation = 0.0;
  double max_dilation = 0.0;
  Vec4 argmin = Vec4::Zero();
};

struct ExtensionReport {
  std::vector<ShellScan> shells;
  RateFit continuity;  // sup over each shell of |J - J0|
  bool pass = false;
};

/// Field equal to J+ on regular points and J0 at m0. Throws PreconditionError
/// naming a critical point found on one of the shells.
ExtensionReport isolated_extension(const MorphismScenario& scenario, const Vec4& m0, const std::vector<double>& radii,
                                   const std::vector<Vec4>& directions, int orientation = 1, int workers = 1);

}  // namespace morpho
