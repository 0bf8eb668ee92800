#pragma once

// Chart-level Riemannian geometry on a coordinate box of R^4.
//
// Curvature convention: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
// With it, <R(e1,e2)e2,e1> is the sectional curvature, +1/r^2 on a round
// sphere of radius r, so <R(e1,e2)e1,e2> = -1/r^2 there.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morphoscope/jet.hpp"
#include "morphoscope/polynomial.hpp"
#include "morphoscope/types.hpp"

namespace morpho {

inline constexpr const char* kCurvatureConvention =
    "R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z; "
    "<R(e1,e2)e2,e1> = sectional curvature (+1/r^2 on a round sphere)";

/// Polynomial map R^4 -> R^4 used to pull metrics and maps back.
class Diffeomorphism {
 public:
  Diffeomorphism() = default;
  explicit Diffeomorphism(std::array<RealPoly, 4> components,
                          std::optional<std::array<RealPoly, 4>> inverse = std::nullopt);

  static Diffeomorphism identity();
  /// x -> L x, with the inverse filled in when L is invertible.
  static Diffeomorphism linear(const Mat4& L);

  const std::array<RealPoly, 4>& components() const { return components_; }
  const std::optional<std::array<RealPoly, 4>>& inverse_components() const { return inverse_; }
  bool has_inverse() const { return inverse_.has_value(); }

  Vec4 apply(const Vec4& x) const;
  Mat4 jacobian(const Vec4& x) const;
  Vec4 apply_inverse(const Vec4& y) const;

  template <class S>
  std::array<S, 4> apply(const std::array<S, 4>& x) const {
    std::array<S, 4> y;
    for (int i = 0; i < 4; ++i) y[i] = components_[i](x);
    return y;
  }

  template <class S>
  std::array<S, 16> jacobian(const std::array<S, 4>& x) const {
    std::array<S, 16> J;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) J[i * 4 + j] = jacobian_[i][j](x);
    }
    return J;
  }

  /// Same map with inverse and forward swapped. Requires has_inverse().
  Diffeomorphism inverted() const;

 private:
  std::array<RealPoly, 4> components_;
  std::optional<std::array<RealPoly, 4>> inverse_;
  std::array<std::array<RealPoly, 4>, 4> jacobian_;
};

enum class DerivativeMode { exact, finite_difference };

/// Metric value plus first and second coordinate derivatives at a point.
struct MetricJet {
  Mat4 g = Mat4::Identity();
  std::array<Mat4, 4> dg{};                  // dg[k] = d_k g
  std::array<std::array<Mat4, 4>, 4> ddg{};  // ddg[k][l] = d_k d_l g
};

class ChartMetric {
 public:
  enum class Kind { flat, pullback, product_sphere, explicit_entries };

  static ChartMetric flat(const Box& domain);
  /// Round sphere of the given radius times flat R^2, chart (theta, phi, x3, x4).
  static ChartMetric product_sphere(const Box& domain, double radius);
  /// Symmetric metric with polynomial entries; entries in row-major order.
  static ChartMetric explicit_entries(const Box& domain, const std::array<RealPoly, 16>& entries);
  /// Phi^* base on the given box.
  static ChartMetric pullback(const Box& domain, const ChartMetric& base, const Diffeomorphism& phi);

  Kind kind() const;
  std::string kind_name() const;
  const Box& domain() const { return domain_; }
  double radius() const;                       // product_sphere only
  const ChartMetric& base() const;             // pullback only
  const Diffeomorphism& diffeomorphism() const;  // pullback only
  const std::array<RealPoly, 16>& entries() const;  // explicit only

  DerivativeMode derivative_mode() const { return mode_; }
  ChartMetric with_derivative_mode(DerivativeMode mode, double fd_step = 1e-5) const;
  double fd_step() const { return fd_step_; }

  Mat4 eval(const Vec4& m) const;
  MetricJet jet(const Vec4& m) const;

  bool contains(const Vec4& m, double margin = 0.0) const;
  /// Throws DomainError unless m lies in the box shrunk by margin.
  void require_inside(const Vec4& m, double margin = 0.0) const;

  template <class S>
  std::array<S, 16> components(const std::array<S, 4>& x) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Box domain_{};
  DerivativeMode mode_ = DerivativeMode::exact;
  double fd_step_ = 1e-5;
};

/// gamma[k](i, j) = Gamma^k_{ij}.
using Christoffel = std::array<Mat4, 4>;

struct CurvatureData {
  Vec4 point = Vec4::Zero();
  Christoffel christoffel{};
  /// lowered[((w * 4 + z) * 4 + x) * 4 + y] = <R(d_x, d_y) d_z, d_w>.
  std::array<double, 256> lowered{};

  double pairing(const Vec4& X, const Vec4& Y, const Vec4& Z, const Vec4& W) const;
};

struct Frame {
  Vec4 point = Vec4::Zero();
  std::vector<Vec4> vectors;
  Eigen::MatrixXd gram;
};

/// Finite-difference controls for derivatives of fields.
struct DifferenceOptions {
  double step = 1e-5;  // scaled by max(1, |m|_inf)
};

using VectorField = std::function<Vec4(const Vec4&)>;
using TensorField = std::function<Mat4(const Vec4&)>;

double inner(const Mat4& g, const Vec4& X, const Vec4& Y);
double norm(const Mat4& g, const Vec4& X);

Christoffel christoffel(const ChartMetric& metric, const Vec4& m);
Christoffel christoffel_from_jet(const MetricJet& jet);
/// Gamma(X, Y)^k = Gamma^k_ij X^i Y^j.
Vec4 contract(const Christoffel& gamma, const Vec4& X, const Vec4& Y);
/// Matrix (Gamma_X)^k_j = Gamma^k_ij X^i.
Mat4 connection_matrix(const Christoffel& gamma, const Vec4& X);

CurvatureData curvature(const ChartMetric& metric, const Vec4& m);
double riemann_pairing(const ChartMetric& metric, const Vec4& m, const Vec4& X, const Vec4& Y,
                       const Vec4& Z, const Vec4& W);
double sectional_curvature(const ChartMetric& metric, const Vec4& m, const Vec4& X, const Vec4& Y);

/// nabla_X of a vector field at m (central differences with one Richardson level).
Vec4 covariant_derivative(const ChartMetric& metric, const VectorField& field, const Vec4& m,
                          const Vec4& X, const DifferenceOptions& opts = {});
/// nabla_X of a (1,1)-tensor field at m.
Mat4 covariant_derivative(const ChartMetric& metric, const TensorField& field, const Vec4& m,
                          const Vec4& X, const DifferenceOptions& opts = {});

/// Directional derivative of a matrix-valued function along X (Richardson-extrapolated).
Mat4 directional_derivative(const TensorField& field, const Vec4& m, const Vec4& X, double step);
Vec4 directional_derivative(const VectorField& field, const Vec4& m, const Vec4& X, double step);

/// Gram-Schmidt under g. Seeds are processed in order; a seed whose residual
/// norm drops below 1e-8 is replaced by the next unused coordinate vector.
/// Returns `count` vectors (default: one per seed).
Frame orthonormalize(const ChartMetric& metric, const Vec4& m, std::span<const Vec4> seeds,
                     std::optional<int> count = std::nullopt);
Frame orthonormalize(const Mat4& g, std::span<const Vec4> seeds, std::optional<int> count = std::nullopt);

/// Positively oriented g-orthonormal frame from the coordinate basis.
Frame coordinate_frame(const ChartMetric& metric, const Vec4& m);

/// Sign of the frame relative to the reference orientation (+1 = chart orientation).
int orientation_sign(const ChartMetric& metric, const Vec4& m, const Frame& frame, int reference = 1);
int orientation_sign(std::span<const Vec4> vectors, int reference = 1);

}  // namespace morpho
