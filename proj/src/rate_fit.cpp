#include "morphoscope/rate_fit.hpp"

#include <algorithm>
#include <cmath>

#include "morphoscope/random.hpp"

namespace morpho {

void check_radii(const std::vector<double>& radii) {
  if (radii.size() < 2) throw ConfigError("radii: at least two radii are required");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw ConfigError("radii: values must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw ConfigError("radii: values must be strictly decreasing");
  }
}

RateFit fit_rate(const std::vector<double>& radii, const std::vector<double>& values, double zero_threshold) {
  check_radii(radii);
  if (radii.size() != values.size()) throw ConfigError("rate fit needs one value per radius");
  RateFit fit;
  fit.radii = radii;
  fit.values = values;
  fit.zero_branch = std::all_of(values.begin(), values.end(), [&](double v) { return std::abs(v) < zero_threshold; });
  if (fit.zero_branch) return fit;

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (values[i] > 0.0 && std::isfinite(values[i])) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(values[i]));
    }
  }
  fit.points_used = static_cast<int>(lx.size());
  if (lx.size() < 2) return fit;

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  fit.constant = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.slope * lx[i] + intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::vector<double> default_radii(double r0, int count) {
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i) r[i] = std::ldexp(r0, -i);
  return r;
}

std::vector<Vec4> seeded_directions(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec4> d(count);
  for (auto& v : d) v = rng.unit_vec4();
  return d;
}

}  // namespace morpho
