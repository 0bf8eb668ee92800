#pragma once

// Symbol of F at a critical point m0: the vanishing order k, the lowest
// homogeneous Taylor part P0, the orthogonal complex structures making P0
// holomorphic, and rate checks on the remainder and the dilation.

#include <vector>

#include "morphoscope/calculus.hpp"
#include "morphoscope/rate_fit.hpp"

namespace morpho {

struct StructureCandidate {
  int orientation = 1;               // relative to the chart orientation
  Mat4 J = Mat4::Zero();             // chart components at m0
  Mat4 frame = Mat4::Identity();     // g(m0)-orthonormal (f1, J f1, f3, J f3)
  /// P0 in the complex coordinates of the frame: zeta1 = y1 + i y2, zeta2 = y3 + i y4.
  std::vector<HoloTerm> coefficients;
  double antiholomorphic = 0.0;      // largest anti-holomorphic coefficient, relative
};

struct SymbolData {
  Vec4 center = Vec4::Zero();
  int order = 0;
  PolyPair P0;         // homogeneous of degree `order` in delta = x - m0
  PolyPair remainder;  // Psi = F(m0 + delta) - F(m0) - P0(delta)
  std::vector<StructureCandidate> candidates;

  Vec2 psi(const Vec4& delta) const;
  Mat24 dpsi(const Vec4& delta) const;
};

/// Smallest order with a Taylor coefficient >= 1e-8. Returns 1 at regular points.
/// Throws SymbolError when a lower-order coefficient lies in [1e-10, 1e-8), and
/// UnsupportedOrderError when nothing is found up to order 6.
int order_at(const MorphismScenario& scenario, const Vec4& m0);

/// Throws ClassificationError at regular points and SymbolError when no
/// orientation makes P0 holomorphic.
SymbolData symbol_polynomial(const MorphismScenario& scenario, const Vec4& m0);

struct RemainderRates {
  RateFit value;         // max over directions of |Psi|
  RateFit differential;  // max over directions of |dPsi|
  int order = 0;
  bool pass = false;
};

/// Directions are unit vectors in g(m0)-orthonormal components.
RemainderRates remainder_rates(const MorphismScenario& scenario, const Vec4& m0, const std::vector<double>& radii,
                               const std::vector<Vec4>& directions, int workers = 1);

struct DilationRate {
  RateFit fit;  // min over admissible directions of lambda
  int order = 0;
  double lower_constant = 0.0;  // min over radii of value / r^(k-1)
  std::vector<int> excluded;  // directions critical at every radius
  bool pass = false;
};

DilationRate dilation_lower_rate(const MorphismScenario& scenario, const Vec4& m0, const std::vector<double>& radii,
                                 const std::vector<Vec4>& directions, int workers = 1);

}  // namespace morpho
