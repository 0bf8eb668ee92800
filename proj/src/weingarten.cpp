#include "morphoscope/weingarten.hpp"

#include <cmath>

#include "morphoscope/parallel.hpp"

namespace morpho {

PolarForm to_polar(const Coefficients& k) {
  PolarForm p;
  p.R1 = std::hypot(k.a, k.c);
  p.theta = std::atan2(k.c, k.a);
  p.R2 = std::hypot(k.b, k.d);
  p.alpha = std::atan2(k.d, k.b);
  return p;
}

Coefficients from_polar(const PolarForm& p) {
  return {p.R1 * std::cos(p.theta), p.R2 * std::cos(p.alpha), p.R1 * std::sin(p.theta), p.R2 * std::sin(p.alpha)};
}

Mat2 commutator_matrix(const Coefficients& k) {
  const double off = 2.0 * (k.a * k.b + k.c * k.d);
  const double diag = k.b * k.b + k.d * k.d - k.a * k.a - k.c * k.c;
  Mat2 C;
  C << off, diag, diag, -off;
  return C;
}

std::pair<double, double> closed_form_norms(const Coefficients& k) {
  const double plus = 4.0 * ((k.a - k.d) * (k.a - k.d) + (k.b + k.c) * (k.b + k.c));
  const double minus = 4.0 * ((k.a + k.d) * (k.a + k.d) + (k.b - k.c) * (k.b - k.c));
  return {plus, minus};
}

double product_identity(const Coefficients& k) {
  const double s = k.a * k.a + k.b * k.b + k.c * k.c + k.d * k.d;
  const double q = k.a * k.d - k.b * k.c;
  return 16.0 * (s * s - 4.0 * q * q);
}

double product_polar(const PolarForm& p) {
  const double r1 = p.R1 * p.R1, r2 = p.R2 * p.R2;
  const double c = std::cos(p.theta - p.alpha);
  return 16.0 * ((r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * c * c);
}

WeingartenFrame weingarten_frame(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts) {
  const HermitianPair hp = hermitian_pair(scenario, m);
  WeingartenFrame f;
  f.e1 = std::cos(opts.angle) * hp.split.v1 + std::sin(opts.angle) * hp.split.v2;
  f.e2 = hp.J_plus * f.e1;
  f.e3 = hp.split.e1;
  f.e4 = hp.split.e2;
  f.vertical_seeds = hp.split.vertical_seeds;
  return f;
}

Coefficients weingarten_matrix(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts) {
  const WeingartenFrame f = weingarten_frame(scenario, m, opts);
  const Mat4 g = scenario.metric().eval(m);
  const Vec4 II11 = fiber_second_fundamental_form(scenario, m, f.e1, f.e1);
  const Vec4 II12 = fiber_second_fundamental_form(scenario, m, f.e1, f.e2);
  return {-inner(g, II11, f.e3), -inner(g, II11, f.e4), -inner(g, II12, f.e3), -inner(g, II12, f.e4)};
}

Coefficients weingarten_matrix_fd(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts) {
  const WeingartenFrame f = weingarten_frame(scenario, m, opts);
  SplitOptions pinned;
  pinned.vertical_seeds = f.vertical_seeds;
  const double ca = std::cos(opts.angle), sa = std::sin(opts.angle);
  const VectorField e1 = [&](const Vec4& x) {
    const PointSplit s = splitting(scenario, x, pinned);
    return Vec4(ca * s.v1 + sa * s.v2);
  };
  const VectorField e2 = [&](const Vec4& x) {
    const HermitianPair hp = hermitian_pair(scenario, x, pinned);
    return Vec4(hp.J_plus * (ca * hp.split.v1 + sa * hp.split.v2));
  };
  const ChartMetric& metric = scenario.metric();
  const Mat4 g = metric.eval(m);
  const Vec4 n11 = covariant_derivative(metric, e1, m, f.e1, opts.difference);
  const Vec4 n12 = covariant_derivative(metric, e2, m, f.e1, opts.difference);
  return {-inner(g, n11, f.e3), -inner(g, n11, f.e4), -inner(g, n12, f.e3), -inner(g, n12, f.e4)};
}

Mat2 commutator_defect(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts) {
  return commutator_matrix(weingarten_matrix(scenario, m, opts));
}

double tensor_norm2(const Mat4& g, const Mat4& K) { return (g.inverse() * K.transpose() * g * K).trace(); }

namespace {

double mixed_sum(const Mat4& g, const Mat4& K, const WeingartenFrame& f) {
  const std::array<Vec4, 2> vert{f.e1, f.e2};
  const std::array<Vec4, 2> hor{f.e3, f.e4};
  double s = 0.0;
  for (const Vec4& v : vert) {
    for (const Vec4& h : hor) {
      const double x = inner(g, K * v, h);
      s += x * x;
    }
  }
  return s;
}

}  // namespace

NablaJNorms nabla_J_norms(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts) {
  NablaJNorms out;
  out.coefficients = weingarten_matrix(scenario, m, opts);
  std::tie(out.plus_closed, out.minus_closed) = closed_form_norms(out.coefficients);

  const WeingartenFrame f = weingarten_frame(scenario, m, opts);
  SplitOptions pinned;
  pinned.vertical_seeds = f.vertical_seeds;
  const TensorField Jp = [&](const Vec4& x) { return hermitian_pair(scenario, x, pinned).J_plus; };
  const TensorField Jm = [&](const Vec4& x) { return hermitian_pair(scenario, x, pinned).J_minus; };
  const ChartMetric& metric = scenario.metric();
  const Mat4 g = metric.eval(m);
  out.nabla_plus = covariant_derivative(metric, Jp, m, f.e1, opts.difference);
  out.nabla_minus = covariant_derivative(metric, Jm, m, f.e1, opts.difference);
  out.plus_direct = tensor_norm2(g, out.nabla_plus);
  out.minus_direct = tensor_norm2(g, out.nabla_minus);
  out.plus_mixed = mixed_sum(g, out.nabla_plus, f);
  out.minus_mixed = mixed_sum(g, out.nabla_minus, f);
  return out;
}

bool norms_agree(double closed, double direct) {
  return std::abs(closed - direct) <= 1e-3 * std::max(std::abs(closed), std::abs(direct)) + 1e-8;
}

WeingartenReport weingarten_report(const MorphismScenario& scenario, const Vec4& m, const WeingartenOptions& opts,
                                   bool direct) {
  WeingartenReport r;
  r.point = m;
  r.T = weingarten_frame(scenario, m, opts).e1;
  if (direct) {
    r.norms = nabla_J_norms(scenario, m, opts);
    r.coefficients = r.norms.coefficients;
  } else {
    r.coefficients = weingarten_matrix(scenario, m, opts);
    r.norms.coefficients = r.coefficients;
    std::tie(r.norms.plus_closed, r.norms.minus_closed) = closed_form_norms(r.coefficients);
  }
  r.polar = to_polar(r.coefficients);
  r.commutator = commutator_matrix(r.coefficients);
  r.commutator_norm = r.commutator.norm();
  r.product = r.norms.plus_closed * r.norms.minus_closed;
  r.product_polar = product_polar(r.polar);
  return r;
}

ProductScan product_bound_scan(const MorphismScenario& scenario, const Vec4& m0, const std::vector<double>& radii,
                               const std::vector<Vec4>& directions, int workers) {
  check_radii(radii);
  if (directions.empty()) throw ConfigError("directions: at least one direction is required");
  Eigen::LLT<Mat4> llt(scenario.metric().eval(m0));
  if (llt.info() != Eigen::Success) throw GeometryError("metric is not positive definite at " + format_point(m0));
  const Mat4 L_inv_T = Mat4(llt.matrixL()).transpose().inverse();

  const std::size_t na = radii.size() - 1;
  const std::size_t nd = directions.size();
  constexpr std::array<double, 2> kFractions{0.25, 0.75};
  const std::size_t per_annulus = nd * kFractions.size();

  ProductScan scan;
  scan.samples.resize(na * per_annulus);
  parallel_for(scan.samples.size(), workers, [&](std::size_t idx) {
    const std::size_t ia = idx / per_annulus;
    const std::size_t rest = idx % per_annulus;
    const double t = kFractions[rest / nd];
    const double r = radii[ia + 1] * std::pow(radii[ia] / radii[ia + 1], t);
    const Vec4 m = m0 + r * (L_inv_T * directions[rest % nd].normalized());
    scan.samples[idx] = weingarten_report(scenario, m, {}, false);
  });

  scan.annuli.resize(na);
  for (std::size_t ia = 0; ia < na; ++ia) {
    AnnulusStats& a = scan.annuli[ia];
    a.r_outer = radii[ia];
    a.r_inner = radii[ia + 1];
    for (std::size_t k = 0; k < per_annulus; ++k) {
      const WeingartenReport& w = scan.samples[ia * per_annulus + k];
      a.max_product = std::max(a.max_product, w.product);
      a.max_plus = std::max(a.max_plus, w.norms.plus_closed);
      a.max_minus = std::max(a.max_minus, w.norms.minus_closed);
      a.max_identity_gap = std::max(a.max_identity_gap, std::abs(w.product - w.product_polar));
      ++a.samples;
    }
    scan.max_identity_gap = std::max(scan.max_identity_gap, a.max_identity_gap);
  }
  auto floored = [](double v) { return v < kProductZeroFloor ? 0.0 : v; };
  for (std::size_t ia = 0; ia < std::min<std::size_t>(3, na); ++ia) {
    scan.plateau = std::max(scan.plateau, floored(scan.annuli[ia].max_product));
  }
  scan.bounded = true;
  for (const auto& a : scan.annuli) {
    if (floored(a.max_product) > 1.5 * scan.plateau) scan.bounded = false;
  }
  return scan;
}

}  // namespace morpho
