#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "morphoscope/types.hpp"

namespace morpho {

/// Seeded generator with platform-independent conversions. The standard
/// distributions are implementation-defined, so they are avoided here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec4 unit_vec4() {
    Vec4 v;
    do {
      for (int i = 0; i < 4; ++i) v[i] = normal();
    } while (v.norm() < 1e-6);
    return v.normalized();
  }

  Vec3 unit_vec3() {
    Vec3 v;
    do {
      for (int i = 0; i < 3; ++i) v[i] = normal();
    } while (v.norm() < 1e-6);
    return v.normalized();
  }

  Vec4 point_in(const Box& box, double margin = 0.0) {
    Vec4 p;
    for (int i = 0; i < 4; ++i) p[i] = uniform(box[i].lo + margin, box[i].hi - margin);
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace morpho
