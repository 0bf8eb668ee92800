#pragma once

// Maps F: M^4 -> N^2 given by polynomials, the target surface metric and the
// exact Taylor jets of F.

#include <memory>
#include <string>
#include <vector>

#include "morphoscope/geometry.hpp"

namespace morpho {

inline constexpr int kMaxJetOrder = 6;

/// Metric h on the target chart (u1, u2). Entries are polynomials in
/// variables 0 and 1.
class TargetMetric {
 public:
  static TargetMetric flat();
  static TargetMetric explicit_entries(RealPoly h11, RealPoly h12, RealPoly h22);

  bool is_flat() const { return flat_; }
  const std::array<RealPoly, 3>& entries() const { return entries_; }

  Mat2 eval(const Vec2& u) const;
  /// dh[a] = d_{u_a} h
  std::array<Mat2, 2> derivative(const Vec2& u) const;
  /// gamma[c](a, b) = Gamma^c_{ab} of h.
  std::array<Mat2, 2> christoffel(const Vec2& u) const;
  /// Upper-triangular B with h = B^T B, so B maps to h-orthonormal components.
  Mat2 orthonormal_factor(const Vec2& u) const;
  /// Complex structure j of (N, h) for the given orientation of N.
  Mat2 complex_structure(const Vec2& u, int orientation = 1) const;

 private:
  bool flat_ = true;
  std::array<RealPoly, 3> entries_;
  std::array<std::array<RealPoly, 3>, 2> derivs_;
};

/// One term c * w1^i * w2^j of a holomorphic polynomial.
struct HoloTerm {
  int i = 0;
  int j = 0;
  std::complex<double> c;
};

/// Real and imaginary parts of sum c w1^i w2^j with w1 = x1 + i x2, w2 = x3 + i x4.
PolyPair holomorphic_components(const std::vector<HoloTerm>& terms);

/// Description of the map, kept for serialization. The evaluated components
/// always live in MorphismScenario::components().
struct MapSpec {
  enum class Kind { holomorphic_poly, real_poly, pullback_composed };
  Kind kind = Kind::real_poly;
  std::vector<HoloTerm> holomorphic;           // holomorphic_poly
  PolyPair real;                               // real_poly
  std::shared_ptr<const MapSpec> base;         // pullback_composed
  std::shared_ptr<const Diffeomorphism> phi;   // pullback_composed

  static MapSpec holomorphic_poly(std::vector<HoloTerm> terms);
  static MapSpec real_poly(PolyPair components);
  static MapSpec pullback_composed(const MapSpec& base, const Diffeomorphism& phi);

  std::string kind_name() const;
  PolyPair components() const;
};

class MorphismScenario {
 public:
  MorphismScenario() = default;
  MorphismScenario(std::string name, ChartMetric metric, MapSpec map, TargetMetric target = TargetMetric::flat(),
                   int orientation = 1, int target_orientation = 1);

  /// Scenario of F o Phi on (box, Phi^* g).
  static MorphismScenario pullback(const MorphismScenario& base, const Diffeomorphism& phi, const Box& domain,
                                   std::string name = {});

  const std::string& name() const { return name_; }
  const ChartMetric& metric() const { return metric_; }
  const MapSpec& map() const { return map_; }
  const TargetMetric& target() const { return target_; }
  /// Reference orientation of M (+1: chart orientation).
  int orientation() const { return orientation_; }
  int target_orientation() const { return target_orientation_; }

  const PolyPair& components() const { return data_->components; }
  const RealPoly& first_derivative(int comp, int var) const { return data_->d1[comp][var]; }
  const RealPoly& second_derivative(int comp, int i, int j) const { return data_->d2[comp][i * 4 + j]; }

  MorphismScenario with_metric(ChartMetric metric) const;
  MorphismScenario with_orientation(int orientation) const;

 private:
  struct Data {
    PolyPair components;
    std::array<std::array<RealPoly, 4>, 2> d1;
    std::array<std::array<RealPoly, 16>, 2> d2;
  };

  std::string name_;
  ChartMetric metric_;
  MapSpec map_;
  TargetMetric target_;
  int orientation_ = 1;
  int target_orientation_ = 1;
  std::shared_ptr<const Data> data_;
};

struct MapJet {
  int order = 1;
  Vec4 point = Vec4::Zero();
  Vec2 value = Vec2::Zero();
  Mat24 jacobian = Mat24::Zero();
  /// Taylor polynomial of each component in delta = x - point, truncated at `order`.
  PolyPair taylor;

  double coefficient(int component, const Exponents& e) const { return taylor[component].coefficient(e); }
  /// Homogeneous degree-k part of both components.
  PolyPair homogeneous(int k) const;
};

/// Exact jet of F at m. Throws UnsupportedOrderError when order > 6.
MapJet jet(const MorphismScenario& scenario, const Vec4& m, int order);
Vec2 evaluate(const MorphismScenario& scenario, const Vec4& m);
Mat24 differential(const MorphismScenario& scenario, const Vec4& m);
/// hessian[c](i, j) = d_i d_j F^c.
std::array<Mat4, 2> hessian(const MorphismScenario& scenario, const Vec4& m);

}  // namespace morpho
