#include "morphoscope/calculus.hpp"

#include <sstream>

namespace morpho {

namespace {

std::array<double, 4> as_array(const Vec2& u) { return {u[0], u[1], 0.0, 0.0}; }
std::array<double, 4> as_array(const Vec4& m) { return {m[0], m[1], m[2], m[3]}; }

}  // namespace

// ---------------------------------------------------------------------------
// TargetMetric

TargetMetric TargetMetric::flat() {
  return explicit_entries(RealPoly(1.0), RealPoly(), RealPoly(1.0));
}

TargetMetric TargetMetric::explicit_entries(RealPoly h11, RealPoly h12, RealPoly h22) {
  TargetMetric t;
  t.entries_ = {std::move(h11), std::move(h12), std::move(h22)};
  for (int k = 0; k < 3; ++k) {
    for (int a = 0; a < 2; ++a) t.derivs_[a][k] = t.entries_[k].derivative(a);
    for (const auto& [e, c] : t.entries_[k].terms()) {
      if (e[2] != 0 || e[3] != 0) throw ConfigError("target metric entries may only use u1 and u2");
    }
  }
  const RealPoly one(1.0);
  auto same = [](const RealPoly& a, const RealPoly& b) { return (a - b).is_zero(); };
  t.flat_ = same(t.entries_[0], one) && t.entries_[1].is_zero() && same(t.entries_[2], one);
  return t;
}

Mat2 TargetMetric::eval(const Vec2& u) const {
  const auto x = as_array(u);
  Mat2 h;
  h << entries_[0](x), entries_[1](x), entries_[1](x), entries_[2](x);
  return h;
}

std::array<Mat2, 2> TargetMetric::derivative(const Vec2& u) const {
  const auto x = as_array(u);
  std::array<Mat2, 2> dh;
  for (int a = 0; a < 2; ++a) {
    dh[a] << derivs_[a][0](x), derivs_[a][1](x), derivs_[a][1](x), derivs_[a][2](x);
  }
  return dh;
}

std::array<Mat2, 2> TargetMetric::christoffel(const Vec2& u) const {
  std::array<Mat2, 2> gamma{Mat2::Zero(), Mat2::Zero()};
  if (flat_) return gamma;
  const Mat2 h = eval(u);
  Eigen::LLT<Mat2> llt(h);
  if (llt.info() != Eigen::Success) throw GeometryError("target metric is not positive definite");
  const Mat2 hinv = llt.solve(Mat2::Identity());
  const auto dh = derivative(u);
  for (int c = 0; c < 2; ++c) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += hinv(c, l) * (dh[a](b, l) + dh[b](a, l) - dh[l](a, b));
        gamma[c](a, b) = 0.5 * s;
      }
    }
  }
  return gamma;
}

Mat2 TargetMetric::orthonormal_factor(const Vec2& u) const {
  if (flat_) return Mat2::Identity();
  Eigen::LLT<Mat2> llt(eval(u));
  if (llt.info() != Eigen::Success) throw GeometryError("target metric is not positive definite");
  return llt.matrixU();
}

Mat2 TargetMetric::complex_structure(const Vec2& u, int orientation) const {
  Mat2 R;
  R << 0.0, -1.0, 1.0, 0.0;
  if (orientation < 0) R = -R;
  const Mat2 B = orthonormal_factor(u);
  return B.inverse() * R * B;
}

// ---------------------------------------------------------------------------
// Maps

PolyPair holomorphic_components(const std::vector<HoloTerm>& terms) {
  const std::complex<double> I(0.0, 1.0);
  const ComplexPoly w1 = ComplexPoly::variable(0) + ComplexPoly::variable(1) * I;
  const ComplexPoly w2 = ComplexPoly::variable(2) + ComplexPoly::variable(3) * I;
  ComplexPoly f;
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0) throw ConfigError("holomorphic exponents must be non-negative");
    f += w1.pow(t.i) * w2.pow(t.j) * t.c;
  }
  PolyPair out;
  for (const auto& [e, c] : f.terms()) {
    out[0].add_term(e, c.real());
    out[1].add_term(e, c.imag());
  }
  return out;
}

MapSpec MapSpec::holomorphic_poly(std::vector<HoloTerm> terms) {
  MapSpec s;
  s.kind = Kind::holomorphic_poly;
  s.holomorphic = std::move(terms);
  return s;
}

MapSpec MapSpec::real_poly(PolyPair components) {
  MapSpec s;
  s.kind = Kind::real_poly;
  s.real = std::move(components);
  return s;
}

MapSpec MapSpec::pullback_composed(const MapSpec& base, const Diffeomorphism& phi) {
  MapSpec s;
  s.kind = Kind::pullback_composed;
  s.base = std::make_shared<const MapSpec>(base);
  s.phi = std::make_shared<const Diffeomorphism>(phi);
  return s;
}

std::string MapSpec::kind_name() const {
  switch (kind) {
    case Kind::holomorphic_poly:
      return "holomorphic_poly";
    case Kind::real_poly:
      return "real_poly";
    case Kind::pullback_composed:
      return "pullback_composed";
  }
  return "unknown";
}

PolyPair MapSpec::components() const {
  switch (kind) {
    case Kind::holomorphic_poly:
      return holomorphic_components(holomorphic);
    case Kind::real_poly:
      return real;
    case Kind::pullback_composed: {
      const PolyPair b = base->components();
      return {b[0].compose(phi->components()), b[1].compose(phi->components())};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Scenario

MorphismScenario::MorphismScenario(std::string name, ChartMetric metric, MapSpec map, TargetMetric target,
                                   int orientation, int target_orientation)
    : name_(std::move(name)),
      metric_(std::move(metric)),
      map_(std::move(map)),
      target_(std::move(target)),
      orientation_(orientation >= 0 ? 1 : -1),
      target_orientation_(target_orientation >= 0 ? 1 : -1) {
  auto data = std::make_shared<Data>();
  data->components = map_.components();
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 4; ++i) {
      data->d1[c][i] = data->components[c].derivative(i);
      for (int j = 0; j < 4; ++j) data->d2[c][i * 4 + j] = data->d1[c][i].derivative(j);
    }
  }
  data_ = std::move(data);
}

MorphismScenario MorphismScenario::pullback(const MorphismScenario& base, const Diffeomorphism& phi,
                                            const Box& domain, std::string name) {
  ChartMetric metric = ChartMetric::pullback(domain, base.metric(), phi);
  if (name.empty()) name = "pullback_" + base.name();
  return MorphismScenario(std::move(name), std::move(metric), MapSpec::pullback_composed(base.map(), phi),
                          base.target(), base.orientation(), base.target_orientation());
}

MorphismScenario MorphismScenario::with_metric(ChartMetric metric) const {
  MorphismScenario s = *this;
  s.metric_ = std::move(metric);
  return s;
}

MorphismScenario MorphismScenario::with_orientation(int orientation) const {
  MorphismScenario s = *this;
  s.orientation_ = orientation >= 0 ? 1 : -1;
  return s;
}

// ---------------------------------------------------------------------------
// Jets

PolyPair MapJet::homogeneous(int k) const { return {taylor[0].homogeneous_part(k), taylor[1].homogeneous_part(k)}; }

MapJet jet(const MorphismScenario& scenario, const Vec4& m, int order) {
  if (order > kMaxJetOrder) {
    std::ostringstream os;
    os << "jet order " << order << " exceeds the supported maximum " << kMaxJetOrder;
    throw UnsupportedOrderError(os.str());
  }
  if (order < 1) throw UnsupportedOrderError("jet order must be at least 1");
  scenario.metric().require_inside(m);
  MapJet j;
  j.order = order;
  j.point = m;
  const auto origin = as_array(m);
  for (int c = 0; c < 2; ++c) j.taylor[c] = scenario.components()[c].shifted(origin).degree_range(0, order);
  j.value = evaluate(scenario, m);
  j.jacobian = differential(scenario, m);
  return j;
}

Vec2 evaluate(const MorphismScenario& scenario, const Vec4& m) {
  const auto x = as_array(m);
  return Vec2(scenario.components()[0](x), scenario.components()[1](x));
}

Mat24 differential(const MorphismScenario& scenario, const Vec4& m) {
  const auto x = as_array(m);
  Mat24 D;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 4; ++i) D(c, i) = scenario.first_derivative(c, i)(x);
  }
  return D;
}

std::array<Mat4, 2> hessian(const MorphismScenario& scenario, const Vec4& m) {
  const auto x = as_array(m);
  std::array<Mat4, 2> H;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 4; ++i) {
      for (int k = i; k < 4; ++k) {
        H[c](i, k) = scenario.second_derivative(c, i, k)(x);
        H[c](k, i) = H[c](i, k);
      }
    }
  }
  return H;
}

}  // namespace morpho
