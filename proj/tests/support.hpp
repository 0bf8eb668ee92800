#pragma once

#include "morphoscope/catalog.hpp"
#include "morphoscope/config.hpp"

namespace morpho::testing {

inline std::array<double, 4> arr(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

inline ScenarioConfig catalog(const std::string& name) { return parse_config(catalog_config(name)); }
inline MorphismScenario scenario(const std::string& name) { return catalog(name).scenario; }

/// Phi(x) = x + 0.1 (x2^2, 0, 0, x1 x3), written out independently of the catalog.
inline Vec4 bump(const Vec4& x) { return x + 0.1 * Vec4(x[1] * x[1], 0.0, 0.0, x[0] * x[2]); }

inline Mat4 bump_jacobian(const Vec4& x) {
  Mat4 J = Mat4::Identity();
  J(0, 1) = 0.2 * x[1];
  J(3, 0) = 0.1 * x[2];
  J(3, 2) = 0.1 * x[0];
  return J;
}

}  // namespace morpho::testing
