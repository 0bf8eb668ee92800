#pragma once

// Weingarten coefficients of the fibers and the covariant derivatives of J+-.
//
// Frame convention (module-local): e1 = T unit vertical, e2 = J+ e1 vertical,
// (e3, e4) = the horizontal frame of the splitting, so e4 = J+ e3.

#include <vector>

#include "morphoscope/hermitian.hpp"

namespace morpho {

struct Coefficients {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

/// a = R1 cos(theta), c = R1 sin(theta), b = R2 cos(alpha), d = R2 sin(alpha).
struct PolarForm {
  double R1 = 0.0, theta = 0.0, R2 = 0.0, alpha = 0.0;
};

PolarForm to_polar(const Coefficients& k);
Coefficients from_polar(const PolarForm& p);

/// [[2(ab+cd), b^2+d^2-a^2-c^2], [b^2+d^2-a^2-c^2, -2(ab+cd)]].
Mat2 commutator_matrix(const Coefficients& k);
/// 4[(a-d)^2+(b+c)^2] and 4[(a+d)^2+(b-c)^2].
std::pair<double, double> closed_form_norms(const Coefficients& k);
/// 16[(a^2+b^2+c^2+d^2)^2 - 4(ad-bc)^2].
double product_identity(const Coefficients& k);
/// 16[(R1^2-R2^2)^2 + 4 R1^2 R2^2 cos^2(theta-alpha)].
double product_polar(const PolarForm& p);

struct WeingartenOptions {
  double angle = 0.0;  // T = cos(angle) v1 + sin(angle) v2
  DifferenceOptions difference{};
};

struct WeingartenFrame {
  Vec4 e1 = Vec4::Zero(), e2 = Vec4::Zero(), e3 = Vec4::Zero(), e4 = Vec4::Zero();
  std::array<int, 2> vertical_seeds{0, 1};
};

WeingartenFrame weingarten_frame(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts = {});

/// a = -<nabla_e1 e1, e3>, b = -<nabla_e1 e1, e4>, c = -<nabla_e1 e2, e3>, d = -<nabla_e1 e2, e4>,
/// from the fiber second fundamental form.
Coefficients weingarten_matrix(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts = {});
/// Same coefficients with the frame extended to neighbors and differentiated numerically.
Coefficients weingarten_matrix_fd(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts = {});

Mat2 commutator_defect(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts = {});

/// Squared norm of a (1,1)-tensor: tr(g^{-1} K^T g K).
double tensor_norm2(const Mat4& g, const Mat4& K);

struct NablaJNorms {
  double plus_closed = 0.0, minus_closed = 0.0;
  double plus_direct = 0.0, minus_direct = 0.0;
  /// sum over vertical e_i and horizontal e_j of <(nabla_e1 J) e_i, e_j>^2
  double plus_mixed = 0.0, minus_mixed = 0.0;
  Mat4 nabla_plus = Mat4::Zero(), nabla_minus = Mat4::Zero();
  Coefficients coefficients;
};

NablaJNorms nabla_J_norms(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts = {});

/// |closed - direct| <= 1e-3 max(|closed|, |direct|) + 1e-8.
bool norms_agree(double closed, double direct);

struct WeingartenReport {
  Vec4 point = Vec4::Zero();
  Vec4 T = Vec4::Zero();
  Coefficients coefficients;
  PolarForm polar;
  Mat2 commutator = Mat2::Zero();
  double commutator_norm = 0.0;
  NablaJNorms norms;
  double product = 0.0;        // product of the two closed-form norms
  double product_polar = 0.0;  // polar form of the same number
};

WeingartenReport weingarten_report(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts = {},
                                   bool direct = true);

struct AnnulusStats {
  double r_outer = 0.0, r_inner = 0.0;
  double max_product = 0.0;
  double max_plus = 0.0, max_minus = 0.0;
  double max_identity_gap = 0.0;  // |product - polar form|
  int samples = 0;
};

struct ProductScan {
  std::vector<AnnulusStats> annuli;
  double plateau = 0.0;
  double max_identity_gap = 0.0;
  bool bounded = false;
  std::vector<WeingartenReport> samples;
};

/// Products below this are treated as zero in the boundedness verdict.
inline constexpr double kProductZeroFloor = 1e-12;

/// Annuli between consecutive radii around m0; directions are unit vectors in
/// g(m0)-orthonormal components. Bounded iff no annulus maximum exceeds 1.5
/// times the largest maximum over the three coarsest annuli.
ProductScan product_bound_scan(const MorphismScenario& scenario, const Vec4& m0, const std::vector<double>& radii,
                               const std::vector<Vec4>& directions, int workers = 1);

}  // namespace morpho
