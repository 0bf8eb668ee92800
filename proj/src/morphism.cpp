#include "morphoscope/morphism.hpp"

#include <cmath>

#include "morphoscope/parallel.hpp"

namespace morpho {

namespace {

struct Gauges {
  Mat4 g;
  Mat4 L_inv_T;  // maps g-orthonormal components to chart components
  Mat4 L_T;
  Mat2 B;        // maps target chart components to h-orthonormal ones
  Mat24 dF;
  Mat24 M;       // B dF L^{-T}
};

Gauges gauges(const MorphismScenario& scenario, const Vec4& m) {
  scenario.metric().require_inside(m);
  Gauges out;
  out.g = scenario.metric().eval(m);
  Eigen::LLT<Mat4> llt(out.g);
  if (llt.info() != Eigen::Success) throw GeometryError("metric is not positive definite at " + format_point(m));
  const Mat4 L = llt.matrixL();
  out.L_T = L.transpose();
  out.L_inv_T = out.L_T.inverse();
  out.dF = differential(scenario, m);
  out.B = scenario.target().orthonormal_factor(evaluate(scenario, m));
  out.M = out.B * out.dF * out.L_inv_T;
  return out;
}

Mat2 rotation90(int orientation) {
  Mat2 R;
  R << 0.0, -1.0, 1.0, 0.0;
  return orientation < 0 ? Mat2(-R) : R;
}

}  // namespace

Mat4 PointSplit::frame() const {
  Mat4 E;
  E << e1, e2, v1, v2;
  return E;
}

HwcResult hwc_residual(const MorphismScenario& scenario, const Vec4& m) {
  const Gauges G = gauges(scenario, m);
  HwcResult r;
  r.pushforward = G.M * G.M.transpose();
  r.lambda2 = 0.5 * r.pushforward.trace();
  r.defect = (r.pushforward - r.lambda2 * Mat2::Identity()).norm();
  return r;
}

double dilation_sup(const MorphismScenario& scenario, const Vec4& m) {
  const Gauges G = gauges(scenario, m);
  Eigen::JacobiSVD<Mat24> svd(G.M);
  return svd.singularValues()[0];
}

Classification classify_point(const MorphismScenario& scenario, const Vec4& m, double critical_threshold) {
  Classification c;
  c.dilation = dilation_sup(scenario, m);
  c.regular = c.dilation >= critical_threshold;
  return c;
}

PointSplit splitting(const MorphismScenario& scenario, const Vec4& m, const SplitOptions& opts) {
  const Gauges G = gauges(scenario, m);
  Eigen::JacobiSVD<Mat24> svd(G.M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec2 sigma = svd.singularValues();
  if (sigma[0] < opts.critical_threshold) {
    throw ClassificationError("splitting requested at the critical point " + format_point(m));
  }
  if (sigma[1] < 1e-12 * std::max(1.0, sigma[0])) {
    throw DegeneracyError("differential has rank one at " + format_point(m));
  }

  PointSplit s;
  s.point = m;
  s.regular = true;
  s.dF = G.dF;
  s.singular_values = sigma;
  const Mat2 pushforward = G.M * G.M.transpose();
  s.lambda2 = 0.5 * pushforward.trace();
  s.lambda = std::sqrt(s.lambda2);
  s.hwc_defect = (pushforward - s.lambda2 * Mat2::Identity()).norm();

  const Eigen::Matrix<double, 4, 2> Wh = svd.matrixV().leftCols<2>();
  const Mat4 Ph_ortho = Wh * Wh.transpose();
  s.P_H = G.L_inv_T * Ph_ortho * G.L_T;
  s.P_V = Mat4::Identity() - s.P_H;

  const int t_orient = scenario.target_orientation();
  const Mat2 R = rotation90(t_orient);
  const Vec2 eta1(std::cos(opts.target_angle), std::sin(opts.target_angle));
  const Vec2 eta2 = R * eta1;
  const Mat2 B_inv = G.B.inverse();
  s.eps1 = B_inv * eta1;
  s.eps2 = B_inv * eta2;
  s.j = B_inv * R * G.B;

  // Horizontal frame in g-orthonormal components, expressed in the basis Wh.
  const Vec2 U1 = svd.matrixU().transpose() * eta1;
  Vec2 a(U1[0] / sigma[0], U1[1] / sigma[1]);
  a.normalize();
  Vec2 b(-a[1], a[0]);
  if ((G.M * (Wh * b)).dot(eta2) < 0.0) b = -b;
  s.e1 = G.L_inv_T * (Wh * a);
  s.e2 = G.L_inv_T * (Wh * b);

  // Vertical frame from projected coordinate vectors.
  std::vector<Vec4> accepted;
  std::vector<int> used;
  auto try_seed = [&](int k, double rel_threshold) {
    const Vec4 dk = Vec4::Unit(k);
    Vec4 r = s.P_V * dk;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec4& v : accepted) r -= inner(G.g, r, v) * v;
    }
    const double n = norm(G.g, r);
    if (n < rel_threshold * norm(G.g, dk)) return false;
    accepted.push_back(r / n);
    used.push_back(k);
    return true;
  };
  if (opts.vertical_seeds) {
    for (int k : *opts.vertical_seeds) {
      if (k < 0 || k > 3 || !try_seed(k, 1e-10)) {
        throw DegeneracyError("pinned vertical seed is degenerate at " + format_point(m));
      }
    }
  } else {
    for (int k = 0; k < 4 && accepted.size() < 2; ++k) try_seed(k, 1e-3);
    if (accepted.size() < 2) {
      for (int k = 0; k < 4 && accepted.size() < 2; ++k) {
        if (std::find(used.begin(), used.end(), k) == used.end()) try_seed(k, 1e-10);
      }
    }
    if (accepted.size() < 2) throw DegeneracyError("cannot build a vertical frame at " + format_point(m));
  }
  s.v1 = accepted[0];
  s.v2 = accepted[1];
  s.vertical_seeds = {used[0], used[1]};
  const std::array<Vec4, 4> cols{s.e1, s.e2, s.v1, s.v2};
  if (orientation_sign(cols, scenario.orientation()) < 0) s.v2 = -s.v2;
  return s;
}

Vec2 tension_field(const MorphismScenario& scenario, const Vec4& m) {
  const ChartMetric& metric = scenario.metric();
  metric.require_inside(m);
  const Mat4 g = metric.eval(m);
  Eigen::LLT<Mat4> llt(g);
  if (llt.info() != Eigen::Success) throw GeometryError("metric is not positive definite at " + format_point(m));
  const Mat4 ginv = llt.solve(Mat4::Identity());
  const Christoffel gamma = christoffel(metric, m);
  const Mat24 dF = differential(scenario, m);
  const auto H = hessian(scenario, m);
  const auto target_gamma = scenario.target().christoffel(evaluate(scenario, m));

  // Trace of the connection term: g^{ij} Gamma^k_ij
  Vec4 trace_gamma;
  for (int k = 0; k < 4; ++k) trace_gamma[k] = (ginv.cwiseProduct(gamma[k])).sum();
  const Mat2 pulled = dF * ginv * dF.transpose();  // g^{ij} d_i F^a d_j F^b

  Vec2 tau;
  for (int c = 0; c < 2; ++c) {
    tau[c] = ginv.cwiseProduct(H[c]).sum() - dF.row(c).dot(trace_gamma) +
             target_gamma[c].cwiseProduct(pulled).sum();
  }
  return tau;
}

double tension_norm(const MorphismScenario& scenario, const Vec4& m) {
  const Vec2 tau = tension_field(scenario, m);
  const Mat2 h = scenario.target().eval(evaluate(scenario, m));
  return std::sqrt(std::max(0.0, tau.dot(h * tau)));
}

Vec4 fiber_second_fundamental_form(const MorphismScenario& scenario, const Vec4& m, const Vec4& U,
                                   const Vec4& W) {
  const ChartMetric& metric = scenario.metric();
  metric.require_inside(m);
  const Mat4 g = metric.eval(m);
  const Mat4 ginv = g.inverse();
  const Christoffel gamma = christoffel(metric, m);
  const Mat24 dF = differential(scenario, m);
  const auto H = hessian(scenario, m);
  const Vec4 conn = contract(gamma, U, W);
  Vec2 hess;
  for (int c = 0; c < 2; ++c) hess[c] = U.dot(H[c] * W) - dF.row(c).dot(conn);
  const Mat2 gram = dF * ginv * dF.transpose();
  Eigen::FullPivLU<Mat2> lu(gram);
  if (!lu.isInvertible()) throw DegeneracyError("fiber is singular at " + format_point(m));
  return -ginv * dF.transpose() * lu.solve(hess);
}

Vec4 fiber_mean_curvature_exact(const MorphismScenario& scenario, const Vec4& m) {
  const PointSplit s = splitting(scenario, m);
  return fiber_second_fundamental_form(scenario, m, s.v1, s.v1) +
         fiber_second_fundamental_form(scenario, m, s.v2, s.v2);
}

Vec4 fiber_mean_curvature(const MorphismScenario& scenario, const Vec4& m, const DifferenceOptions& opts) {
  const PointSplit s = splitting(scenario, m);
  SplitOptions pinned;
  pinned.vertical_seeds = s.vertical_seeds;
  const VectorField v1 = [&](const Vec4& x) { return splitting(scenario, x, pinned).v1; };
  const VectorField v2 = [&](const Vec4& x) { return splitting(scenario, x, pinned).v2; };
  const ChartMetric& metric = scenario.metric();
  const Vec4 sum = covariant_derivative(metric, v1, m, s.v1, opts) + covariant_derivative(metric, v2, m, s.v2, opts);
  return s.P_H * sum;
}

Residuals residuals(const MorphismScenario& scenario, const Vec4& m) {
  Residuals r;
  r.hwc_defect = hwc_residual(scenario, m).defect;
  r.tension = tension_field(scenario, m);
  if (classify_point(scenario, m).regular) r.mean_curvature = fiber_mean_curvature_exact(scenario, m);
  return r;
}

double default_validation_tolerance(const MorphismScenario& scenario) {
  return scenario.metric().kind() == ChartMetric::Kind::pullback ? 1e-4 : 1e-6;
}

ValidationReport validate_morphism(const MorphismScenario& scenario, const std::vector<Vec4>& points,
                                   std::optional<double> tolerance, int workers) {
  ValidationReport report;
  report.tolerance = tolerance.value_or(default_validation_tolerance(scenario));
  report.records.resize(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    ValidationRecord& rec = report.records[i];
    rec.point = points[i];
    rec.regular = classify_point(scenario, points[i]).regular;
    const HwcResult hwc = hwc_residual(scenario, points[i]);
    rec.lambda2 = hwc.lambda2;
    rec.hwc_defect = hwc.defect;
    rec.tension_norm = tension_norm(scenario, points[i]);
  });
  for (const auto& rec : report.records) {
    if (!rec.regular) continue;
    ++report.regular_count;
    report.max_hwc_defect = std::max(report.max_hwc_defect, rec.hwc_defect);
    report.max_tension = std::max(report.max_tension, rec.tension_norm);
  }
  report.pass = report.max_hwc_defect <= report.tolerance && report.max_tension <= report.tolerance;
  return report;
}

}  // namespace morpho
