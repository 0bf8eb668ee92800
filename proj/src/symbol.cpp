#include "morphoscope/symbol.hpp"

#include <cmath>
#include <sstream>

#include "morphoscope/hermitian.hpp"
#include "morphoscope/parallel.hpp"

namespace morpho {

namespace {

std::array<double, 4> as_array(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

double max_coefficient(const PolyPair& p) { return std::max(p[0].max_abs_coefficient(), p[1].max_abs_coefficient()); }

PolyPair shifted_components(const MorphismScenario& scenario, const Vec4& m0) {
  const auto o = as_array(m0);
  return {scenario.components()[0].shifted(o), scenario.components()[1].shifted(o)};
}

PolyPair degree_part(const PolyPair& p, int lo, int hi) { return {p[0].degree_range(lo, hi), p[1].degree_range(lo, hi)}; }

std::array<RealPoly, 16> constant_entries(const Mat4& g) {
  std::array<RealPoly, 16> e;
  for (int i = 0; i < 16; ++i) e[i] = RealPoly(g(i / 4, i % 4));
  return e;
}

// Complex polynomial f = q1 + i s q2 (q = B P) in the variables
// (zeta1, conj zeta1, zeta2, conj zeta2) of the frame E.
ComplexPoly complex_form(const PolyPair& P, const Mat2& B, int target_orientation, const Mat4& E) {
  const std::complex<double> I(0.0, 1.0);
  using CP = ComplexPoly;
  // y in terms of (zeta, conj zeta)
  std::array<CP, 4> y;
  for (int a = 0; a < 2; ++a) {
    const CP z = CP::variable(2 * a);
    const CP zb = CP::variable(2 * a + 1);
    y[2 * a] = (z + zb) * std::complex<double>(0.5);
    y[2 * a + 1] = (z - zb) * (-0.5 * I);
  }
  std::array<CP, 4> x;
  for (int i = 0; i < 4; ++i) {
    for (int a = 0; a < 4; ++a) x[i] += y[a] * std::complex<double>(E(i, a));
  }
  const CP p1 = P[0].cast<std::complex<double>>().compose(x);
  const CP p2 = P[1].cast<std::complex<double>>().compose(x);
  const CP q1 = p1 * std::complex<double>(B(0, 0)) + p2 * std::complex<double>(B(0, 1));
  const CP q2 = p1 * std::complex<double>(B(1, 0)) + p2 * std::complex<double>(B(1, 1));
  return q1 + q2 * (static_cast<double>(target_orientation) * I);
}

}  // namespace

Vec2 SymbolData::psi(const Vec4& delta) const {
  const auto d = as_array(delta);
  return Vec2(remainder[0](d), remainder[1](d));
}

Mat24 SymbolData::dpsi(const Vec4& delta) const {
  const auto d = as_array(delta);
  Mat24 D;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 4; ++i) D(c, i) = remainder[c].derivative(i)(d);
  }
  return D;
}

int order_at(const MorphismScenario& scenario, const Vec4& m0) {
  scenario.metric().require_inside(m0);
  const PolyPair shifted = shifted_components(scenario, m0);
  double below = 0.0;
  for (int k = 1; k <= kMaxJetOrder; ++k) {
    const double c = max_coefficient(degree_part(shifted, k, k));
    if (c >= 1e-8) {
      if (below >= 1e-10) {
        std::ostringstream os;
        os << "Taylor coefficient of size " << below << " below order " << k << " at " << format_point(m0)
           << " is neither zero nor significant";
        throw SymbolError(os.str());
      }
      return k;
    }
    below = std::max(below, c);
  }
  throw UnsupportedOrderError("no nonvanishing Taylor coefficient up to order 6 at " + format_point(m0));
}

SymbolData symbol_polynomial(const MorphismScenario& scenario, const Vec4& m0) {
  const int k = order_at(scenario, m0);
  if (k < 2) throw ClassificationError("symbol requested at the regular point " + format_point(m0));

  SymbolData out;
  out.center = m0;
  out.order = k;
  const PolyPair shifted = shifted_components(scenario, m0);
  out.P0 = degree_part(shifted, k, k);
  out.remainder = degree_part(shifted, k + 1, 1 << 20);

  const Mat4 g0 = scenario.metric().eval(m0);
  const Vec2 u0 = evaluate(scenario, m0);
  const Mat2 h0 = scenario.target().eval(u0);
  const Mat2 B = scenario.target().orthonormal_factor(u0);
  Box box;
  box.fill(Interval{-2.0, 2.0});
  const TargetMetric target = TargetMetric::explicit_entries(RealPoly(h0(0, 0)), RealPoly(h0(0, 1)), RealPoly(h0(1, 1)));
  const ChartMetric tangent = ChartMetric::explicit_entries(box, constant_entries(g0));

  const std::array<Vec4, 3> probes{Vec4(0.613, -0.347, 0.521, 0.283), Vec4(0.29, 0.71, -0.44, 0.38),
                                   Vec4(-0.52, 0.17, 0.66, -0.31)};
  for (int s : {1, -1}) {
    const MorphismScenario P0(scenario.name() + "_symbol", tangent, MapSpec::real_poly(out.P0), target, s,
                              scenario.target_orientation());
    const Vec4* probe = nullptr;
    for (const Vec4& p : probes) {
      if (classify_point(P0, p, 1e-6).regular) {
        probe = &p;
        break;
      }
    }
    if (!probe) continue;
    Mat4 J;
    try {
      J = hermitian_pair(P0, *probe).J_plus;
    } catch (const DegeneracyError&) {
      continue;
    }
    StructureCandidate c;
    c.orientation = s;
    c.J = J;
    c.frame = adapted_frame(g0, J);
    const ComplexPoly f = complex_form(out.P0, B, scenario.target_orientation(), c.frame);
    double anti = 0.0;
    for (const auto& [e, coef] : f.terms()) {
      if (e[1] > 0 || e[3] > 0) anti = std::max(anti, std::abs(coef));
    }
    c.antiholomorphic = anti / std::max(1e-300, f.max_abs_coefficient());
    if (c.antiholomorphic > 1e-10) continue;
    for (const auto& [e, coef] : f.terms()) {
      if (std::abs(coef) > 1e-14 * f.max_abs_coefficient()) c.coefficients.push_back({e[0], e[2], coef});
    }
    out.candidates.push_back(std::move(c));
  }
  if (out.candidates.empty()) {
    throw SymbolError("the symbol at " + format_point(m0) + " is not holomorphic for either orientation");
  }
  return out;
}

namespace {

struct TangentGauge {
  Mat4 L_inv_T;
  Mat2 B;
};

TangentGauge tangent_gauge(const MorphismScenario& scenario, const Vec4& m0) {
  Eigen::LLT<Mat4> llt(scenario.metric().eval(m0));
  if (llt.info() != Eigen::Success) throw GeometryError("metric is not positive definite at " + format_point(m0));
  const Mat4 L = llt.matrixL();
  return {L.transpose().inverse(), scenario.target().orthonormal_factor(evaluate(scenario, m0))};
}

}  // namespace

RemainderRates remainder_rates(const MorphismScenario& scenario, const Vec4& m0, const std::vector<double>& radii,
                               const std::vector<Vec4>& directions, int workers) {
  check_radii(radii);
  if (directions.empty()) throw ConfigError("directions: at least one direction is required");
  const SymbolData sym = symbol_polynomial(scenario, m0);
  const TangentGauge G = tangent_gauge(scenario, m0);
  const std::size_t nd = directions.size();
  std::vector<double> val(radii.size() * nd), diff(radii.size() * nd);
  parallel_for(val.size(), workers, [&](std::size_t idx) {
    const Vec4 delta = radii[idx / nd] * (G.L_inv_T * directions[idx % nd].normalized());
    scenario.metric().require_inside(m0 + delta);
    val[idx] = (G.B * sym.psi(delta)).norm();
    const Eigen::Matrix<double, 2, 4> D = G.B * sym.dpsi(delta) * G.L_inv_T;
    diff[idx] = Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>>(D).singularValues()[0];
  });
  std::vector<double> vmax(radii.size(), 0.0), dmax(radii.size(), 0.0);
  for (std::size_t i = 0; i < val.size(); ++i) {
    vmax[i / nd] = std::max(vmax[i / nd], val[i]);
    dmax[i / nd] = std::max(dmax[i / nd], diff[i]);
  }
  RemainderRates r;
  r.order = sym.order;
  r.value = fit_rate(radii, vmax);
  r.differential = fit_rate(radii, dmax);
  r.pass = r.value.slope_at_least(sym.order + 0.9) && r.differential.slope_at_least(sym.order - 0.1);
  return r;
}

DilationRate dilation_lower_rate(const MorphismScenario& scenario, const Vec4& m0, const std::vector<double>& radii,
                                 const std::vector<Vec4>& directions, int workers) {
  check_radii(radii);
  if (directions.empty()) throw ConfigError("directions: at least one direction is required");
  DilationRate out;
  out.order = order_at(scenario, m0);
  const TangentGauge G = tangent_gauge(scenario, m0);
  const std::size_t nd = directions.size();
  std::vector<double> lam(radii.size() * nd);
  parallel_for(lam.size(), workers, [&](std::size_t idx) {
    const Vec4 delta = radii[idx / nd] * (G.L_inv_T * directions[idx % nd].normalized());
    lam[idx] = dilation_sup(scenario, m0 + delta);
  });

  std::vector<bool> admissible(nd, false);
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t ir = 0; ir < radii.size(); ++ir) {
      if (lam[ir * nd + d] >= kCriticalThreshold) admissible[d] = true;
    }
    if (!admissible[d]) out.excluded.push_back(static_cast<int>(d));
  }
  if (out.excluded.size() == nd) throw DegeneracyError("every direction runs along the critical set");

  std::vector<double> vmin(radii.size(), std::numeric_limits<double>::infinity());
  for (std::size_t ir = 0; ir < radii.size(); ++ir) {
    for (std::size_t d = 0; d < nd; ++d) {
      if (admissible[d]) vmin[ir] = std::min(vmin[ir], lam[ir * nd + d]);
    }
  }
  out.fit = fit_rate(radii, vmin);
  out.lower_constant = std::numeric_limits<double>::infinity();
  for (std::size_t ir = 0; ir < radii.size(); ++ir) {
    out.lower_constant = std::min(out.lower_constant, vmin[ir] / std::pow(radii[ir], out.order - 1));
  }
  out.pass = !out.fit.zero_branch && std::isfinite(out.fit.slope) && out.fit.slope <= out.order - 1 + 0.1 &&
             out.lower_constant > 0.0;
  return out;
}

}  // namespace morpho
