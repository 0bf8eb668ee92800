#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "morphoscope/types.hpp"

namespace morpho {

inline constexpr double kZeroBranchThreshold = 1e-12;

/// Least-squares fit of log(value) = slope * log(r) + log(C).
struct RateFit {
  std::vector<double> radii;
  std::vector<double> values;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double constant = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;  // RMS of the log-log residuals
  bool zero_branch = false;
  int points_used = 0;

  bool slope_at_least(double threshold) const { return zero_branch || slope >= threshold; }
};

/// Throws ConfigError unless radii are positive and strictly decreasing.
void check_radii(const std::vector<double>& radii);

RateFit fit_rate(const std::vector<double>& radii, const std::vector<double>& values,
                 double zero_threshold = kZeroBranchThreshold);

/// r0 * 2^-i for i = 0 .. count-1.
std::vector<double> default_radii(double r0 = 0.1, int count = 8);

/// Seeded unit directions in R^4.
std::vector<Vec4> seeded_directions(int count, std::uint64_t seed);

}  // namespace morpho
