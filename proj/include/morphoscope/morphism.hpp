#pragma once

// Pointwise analysis of a map F: (M^4, g) -> (N^2, h): dilation, weak
// conformality defect, vertical/horizontal splitting with adapted frames,
// tension field and fiber mean curvature.

#include <optional>
#include <vector>

#include "morphoscope/calculus.hpp"

namespace morpho {

inline constexpr double kCriticalThreshold = 1e-9;

struct HwcResult {
  double lambda2 = 0.0;  // trace(G) / 2
  double defect = 0.0;   // |G - lambda2 I|_F
  Mat2 pushforward = Mat2::Zero();
};

/// Controls for the splitting construction.
struct SplitOptions {
  double critical_threshold = kCriticalThreshold;
  /// Coordinate vectors whose vertical projections seed (v1, v2). Unset: the
  /// first two usable ones in index order. Pin them when extending frames to
  /// neighboring points so the gauge stays continuous.
  std::optional<std::array<int, 2>> vertical_seeds;
  /// Rotation of the target frame: eps1 = cos(a) u1 + sin(a) u2 in h-orthonormal components.
  double target_angle = 0.0;
};

struct PointSplit {
  Vec4 point = Vec4::Zero();
  bool regular = false;
  double lambda = 0.0;
  double lambda2 = 0.0;
  double hwc_defect = 0.0;
  Vec2 singular_values = Vec2::Zero();
  Mat24 dF = Mat24::Zero();
  Mat4 P_V = Mat4::Zero();
  Mat4 P_H = Mat4::Zero();
  Vec4 e1 = Vec4::Zero(), e2 = Vec4::Zero();  // horizontal
  Vec4 v1 = Vec4::Zero(), v2 = Vec4::Zero();  // vertical
  Vec2 eps1 = Vec2::Zero(), eps2 = Vec2::Zero();  // target frame, chart components
  Mat2 j = Mat2::Zero();
  std::array<int, 2> vertical_seeds{0, 1};

  /// Columns (e1, e2, v1, v2).
  Mat4 frame() const;
};

struct Classification {
  bool regular = false;
  double dilation = 0.0;
};

HwcResult hwc_residual(const MorphismScenario& scenario, const Vec4& m);
/// Largest singular value of dF in g/h-orthonormal gauges.
double dilation_sup(const MorphismScenario& scenario, const Vec4& m);
Classification classify_point(const MorphismScenario& scenario, const Vec4& m,
                              double critical_threshold = kCriticalThreshold);
/// Throws ClassificationError at critical points.
PointSplit splitting(const MorphismScenario& scenario, const Vec4& m, const SplitOptions& opts = {});

/// tau(F)^c = g^{ij} (d_ij F^c - Gamma^k_ij d_k F^c + NGamma^c_ab d_i F^a d_j F^b).
Vec2 tension_field(const MorphismScenario& scenario, const Vec4& m);
double tension_norm(const MorphismScenario& scenario, const Vec4& m);

/// Second fundamental form of the fiber through m on vertical vectors,
/// from the Hessian of F (no finite differences).
Vec4 fiber_second_fundamental_form(const MorphismScenario& scenario, const Vec4& m, const Vec4& U,
                                   const Vec4& W);
/// Mean curvature vector P_H(nabla_v1 v1 + nabla_v2 v2), the vertical frame
/// extended to neighbors by the splitting construction.
Vec4 fiber_mean_curvature(const MorphismScenario& scenario, const Vec4& m, const DifferenceOptions& opts = {});
/// Same vector as II(v1, v1) + II(v2, v2).
Vec4 fiber_mean_curvature_exact(const MorphismScenario& scenario, const Vec4& m);

struct Residuals {
  double hwc_defect = 0.0;
  Vec2 tension = Vec2::Zero();
  Vec4 mean_curvature = Vec4::Zero();
};
Residuals residuals(const MorphismScenario& scenario, const Vec4& m);

struct ValidationRecord {
  Vec4 point = Vec4::Zero();
  bool regular = false;
  double lambda2 = 0.0;
  double hwc_defect = 0.0;
  double tension_norm = 0.0;
};

struct ValidationReport {
  std::vector<ValidationRecord> records;
  int regular_count = 0;
  double max_hwc_defect = 0.0;
  double max_tension = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Default tolerance: 1e-6 for exact jets, 1e-4 for pullback scenarios.
double default_validation_tolerance(const MorphismScenario& scenario);

ValidationReport validate_morphism(const MorphismScenario& scenario, const std::vector<Vec4>& points,
                                   std::optional<double> tolerance = std::nullopt, int workers = 1);

}  // namespace morpho
