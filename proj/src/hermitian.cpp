#include "morphoscope/hermitian.hpp"

#include <cmath>
#include <sstream>

#include "morphoscope/parallel.hpp"
#include "morphoscope/random.hpp"
#include "morphoscope/symbol.hpp"

namespace morpho {

Mat4 standard_structure(int vertical_sign) {
  Mat4 J = Mat4::Zero();
  J(1, 0) = 1.0;
  J(0, 1) = -1.0;
  J(3, 2) = vertical_sign >= 0 ? 1.0 : -1.0;
  J(2, 3) = -J(3, 2);
  return J;
}

Mat4 structure_from_frame(const Mat4& E, int vertical_sign) {
  Eigen::FullPivLU<Mat4> lu(E);
  if (!lu.isInvertible()) throw DegeneracyError("frame is not a basis");
  return E * standard_structure(vertical_sign) * lu.inverse();
}

HermitianPair hermitian_pair(const MorphismScenario& scenario, const Vec4& m, const SplitOptions& opts) {
  HermitianPair p;
  p.point = m;
  p.split = splitting(scenario, m, opts);
  const Mat4 E = p.split.frame();
  p.J_plus = structure_from_frame(E, 1);
  p.J_minus = structure_from_frame(E, -1);
  return p;
}

double pseudo_holomorphy_residual(const MorphismScenario& scenario, const Vec4& m, const Mat4& J) {
  const Mat24 dF = differential(scenario, m);
  const Mat2 j = scenario.target().complex_structure(evaluate(scenario, m), scenario.target_orientation());
  return (dF * J - j * dF).norm();
}

// ---------------------------------------------------------------------------
// Reference structure

Mat4 adapted_frame(const Mat4& g, const Mat4& J) {
  std::vector<Vec4> f;
  auto add_orthonormal = [&](const Vec4& seed) {
    Vec4 r = seed;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec4& e : f) r -= inner(g, r, e) * e;
    }
    const double n = norm(g, r);
    if (n < 1e-6) return false;
    f.push_back(r / n);
    return true;
  };
  for (int k = 0; k < 4 && f.empty(); ++k) add_orthonormal(Vec4::Unit(k));
  f.push_back(J * f[0]);
  for (int k = 0; k < 4 && f.size() < 3; ++k) add_orthonormal(Vec4::Unit(k));
  if (f.size() < 3) throw DegeneracyError("cannot build a frame adapted to the structure");
  f.push_back(J * f[2]);
  Mat4 E;
  E << f[0], f[1], f[2], f[3];
  return E;
}

ReferenceStructure::ReferenceStructure(const ChartMetric& metric, const Vec4& center, const Mat4& J0,
                                       int orientation)
    : metric_(metric), center_(center), J0_(J0), orientation_(orientation >= 0 ? 1 : -1) {
  const Mat4 g = metric.eval(center);
  if ((J0 * J0 + Mat4::Identity()).norm() > 1e-8 || (J0.transpose() * g * J0 - g).norm() > 1e-8) {
    throw InvalidStructureError("reference structure is not a g-orthogonal complex structure");
  }
  E0_ = adapted_frame(g, J0);
  gamma0_ = christoffel(metric, center);
}

Vec4 ReferenceStructure::to_chart(const Vec4& y) const {
  const Vec4 X = E0_ * y;
  return center_ + X - 0.5 * contract(gamma0_, X, X);
}

Mat4 ReferenceStructure::chart_jacobian(const Vec4& y) const {
  return (Mat4::Identity() - connection_matrix(gamma0_, E0_ * y)) * E0_;
}

Vec4 ReferenceStructure::to_normal(const Vec4& x) const {
  Vec4 y = E0_.inverse() * (x - center_);
  for (int it = 0; it < 50; ++it) {
    const Vec4 r = to_chart(y) - x;
    if (r.norm() < 1e-15 * std::max(1.0, x.norm())) break;
    y -= chart_jacobian(y).inverse() * r;
  }
  return y;
}

Mat4 ReferenceStructure::J_at(const Vec4& x) const {
  const Mat4 D = chart_jacobian(to_normal(x));
  return D * standard_structure(1) * D.inverse();
}

double ReferenceStructure::deviation(const Mat4& J, const Vec4& y) const {
  const Mat4 D = chart_jacobian(y);
  return (D.inverse() * J * D - standard_structure(1)).norm();
}

std::pair<double, double> ReferenceStructure::metric_defects(const Vec4& y) const {
  const Mat4 D = chart_jacobian(y);
  const Mat4 gy = D.transpose() * metric_.eval(to_chart(y)) * D;
  const Mat4 Jc = standard_structure(1);
  const Mat4 a = Jc.transpose() * gy * Jc - gy;
  const Mat4 gJ = gy * Jc;
  const Mat4 b = 0.5 * (gJ + gJ.transpose());
  auto spectral = [](const Mat4& A) { return Eigen::JacobiSVD<Mat4>(A).singularValues()[0]; };
  return {spectral(a), spectral(b)};
}

ReferenceStructure reference_field(const MorphismScenario& scenario, const Vec4& m0, int orientation) {
  const SymbolData sym = symbol_polynomial(scenario, m0);
  const int s = orientation >= 0 ? 1 : -1;
  for (const auto& c : sym.candidates) {
    if (c.orientation == s) return ReferenceStructure(scenario.metric(), m0, c.J, s);
  }
  std::ostringstream os;
  os << "no holomorphic reference structure with orientation " << s << " at " << format_point(m0);
  throw SymbolError(os.str());
}

// ---------------------------------------------------------------------------
// Rates

namespace {

Vec4 jittered(const Vec4& d, std::size_t index, int attempt) {
  Rng rng(0x6a09e667f3bcc909ULL + 977 * index + attempt);
  return (d + 1e-2 * (attempt + 1) * rng.unit_vec4()).normalized();
}

}  // namespace

MainLemmaReport main_lemma_rate(const MorphismScenario& scenario, const Vec4& m0, const std::vector<Vec4>& directions,
                                const std::vector<double>& radii, int orientation, int workers) {
  check_radii(radii);
  if (directions.empty()) throw ConfigError("directions: at least one direction is required");
  const MorphismScenario oriented = scenario.with_orientation(orientation);
  const ReferenceStructure ref = reference_field(oriented, m0, orientation);

  const std::size_t nr = radii.size();
  const std::size_t nd = directions.size();
  struct Slot {
    double deviation = 0.0, metric = 0.0, skew = 0.0;
    std::string note;
  };
  std::vector<Slot> slots(nr * nd);
  parallel_for(nr * nd, workers, [&](std::size_t idx) {
    const double r = radii[idx / nd];
    const std::size_t id = idx % nd;
    Vec4 d = directions[id].normalized();
    Vec4 x = ref.to_chart(r * d);
    int attempt = 0;
    while (!classify_point(oriented, x).regular) {
      if (attempt == 8) throw ClassificationError("no regular point near " + format_point(x));
      d = jittered(directions[id].normalized(), id, attempt++);
      x = ref.to_chart(r * d);
    }
    Slot& s = slots[idx];
    if (attempt > 0) {
      std::ostringstream os;
      os << "direction " << id << " at r=" << r << " replaced after " << attempt << " jitter(s)";
      s.note = os.str();
    }
    s.deviation = ref.deviation(hermitian_pair(oriented, x).J_plus, r * d);
    std::tie(s.metric, s.skew) = ref.metric_defects(r * d);
  });

  MainLemmaReport rep;
  std::vector<double> dev(nr, 0.0), met(nr, 0.0), skew(nr, 0.0);
  for (std::size_t ir = 0; ir < nr; ++ir) {
    for (std::size_t id = 0; id < nd; ++id) {
      const Slot& s = slots[ir * nd + id];
      dev[ir] = std::max(dev[ir], s.deviation);
      met[ir] = std::max(met[ir], s.metric);
      skew[ir] = std::max(skew[ir], s.skew);
      if (!s.note.empty()) rep.substitutions.push_back(s.note);
    }
  }
  rep.deviation = fit_rate(radii, dev);
  rep.metric_defect = fit_rate(radii, met);
  rep.skew_defect = fit_rate(radii, skew);
  rep.pass = rep.deviation.slope_at_least(0.9) && (rep.deviation.zero_branch || std::isfinite(rep.deviation.constant));
  rep.defects_pass = rep.metric_defect.slope_at_least(1.9) && rep.skew_defect.slope_at_least(1.9);
  return rep;
}

namespace {

// Minimizes lambda^2 over the shell |y| = r by projected gradient descent on
// the unit sphere of directions.
ShellScan scan_shell(const MorphismScenario& scenario, const ReferenceStructure& ref, double r,
                     const std::vector<Vec4>& starts) {
  auto f = [&](const Vec4& d) { return hwc_residual(scenario, ref.to_chart(r * d.normalized())).lambda2; };
  ShellScan out;
  out.radius = r;
  out.min_dilation = std::numeric_limits<double>::infinity();
  out.max_dilation = 0.0;
  for (const Vec4& start : starts) {
    Vec4 d = start.normalized();
    double fd = f(d);
    out.max_dilation = std::max(out.max_dilation, std::sqrt(fd));
    for (int it = 0; it < 200 && fd > 0.0; ++it) {
      Vec4 grad;
      const double h = 1e-6;
      for (int k = 0; k < 4; ++k) {
        const Vec4 e = Vec4::Unit(k);
        grad[k] = (f(d + h * e) - f(d - h * e)) / (2.0 * h);
      }
      grad -= grad.dot(d) * d;
      const double gn2 = grad.squaredNorm();
      if (gn2 < 1e-30 * std::max(1.0, fd * fd)) break;
      double t = fd / gn2;  // Polyak step toward zero
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls) {
        const Vec4 trial = (d - t * grad).normalized();
        const double ft = f(trial);
        if (ft < fd) {
          d = trial;
          fd = ft;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    const double lam = std::sqrt(std::max(0.0, fd));
    if (lam < out.min_dilation) {
      out.min_dilation = lam;
      out.argmin = ref.to_chart(r * d);
    }
  }
  return out;
}

}  // namespace

ExtensionReport isolated_extension(const MorphismScenario& scenario, const Vec4& m0, const std::vector<double>& radii,
                                   const std::vector<Vec4>& directions, int orientation, int workers) {
  check_radii(radii);
  const MorphismScenario oriented = scenario.with_orientation(orientation);
  const ReferenceStructure ref = reference_field(oriented, m0, orientation);

  std::vector<Vec4> starts;
  for (int k = 0; k < 4; ++k) {
    starts.push_back(Vec4::Unit(k));
    starts.push_back(-Vec4::Unit(k));
  }
  for (std::size_t i = 0; i < directions.size() && i < 8; ++i) starts.push_back(directions[i]);

  ExtensionReport rep;
  rep.shells.resize(radii.size());
  parallel_for(radii.size(), workers, [&](std::size_t i) { rep.shells[i] = scan_shell(oriented, ref, radii[i], starts); });
  for (const auto& s : rep.shells) {
    if (s.min_dilation < kCriticalThreshold || s.min_dilation < 1e-6 * s.max_dilation) {
      throw PreconditionError("critical point " + format_point(s.argmin) + " near " + format_point(m0) +
                              ": the critical point is not isolated");
    }
  }

  std::vector<double> sup(radii.size(), 0.0);
  std::vector<double> slots(radii.size() * directions.size(), 0.0);
  const std::size_t nd = directions.size();
  parallel_for(slots.size(), workers, [&](std::size_t idx) {
    const Vec4 y = radii[idx / nd] * directions[idx % nd].normalized();
    slots[idx] = ref.deviation(hermitian_pair(oriented, ref.to_chart(y)).J_plus, y);
  });
  for (std::size_t i = 0; i < slots.size(); ++i) sup[i / nd] = std::max(sup[i / nd], slots[i]);
  rep.continuity = fit_rate(radii, sup);
  rep.pass = rep.continuity.slope_at_least(0.9);
  return rep;
}

}  // namespace morpho
