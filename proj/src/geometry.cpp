#include "morphoscope/geometry.hpp"

#include <cmath>
#include <sstream>
#include <variant>

namespace morpho {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Mat4 to_matrix(const std::array<double, 16>& a) {
  Mat4 g;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) g(i, j) = a[i * 4 + j];
  }
  return g;
}

Mat4 symmetrized(const Mat4& g) { return 0.5 * (g + g.transpose()); }

double step_at(const Vec4& m, double base_step) {
  return base_step * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

std::string format_point(const Vec4& m) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << m[0] << ", " << m[1] << ", " << m[2] << ", " << m[3] << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Diffeomorphism

Diffeomorphism::Diffeomorphism(std::array<RealPoly, 4> components,
                               std::optional<std::array<RealPoly, 4>> inverse)
    : components_(std::move(components)), inverse_(std::move(inverse)) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) jacobian_[i][j] = components_[i].derivative(j);
  }
}

Diffeomorphism Diffeomorphism::identity() {
  std::array<RealPoly, 4> c;
  for (int i = 0; i < 4; ++i) c[i] = RealPoly::variable(i);
  return Diffeomorphism(c, c);
}

Diffeomorphism Diffeomorphism::linear(const Mat4& L) {
  auto make = [](const Mat4& A) {
    std::array<RealPoly, 4> c;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) c[i] += RealPoly::variable(j) * A(i, j);
    }
    return c;
  };
  Eigen::FullPivLU<Mat4> lu(L);
  if (!lu.isInvertible()) return Diffeomorphism(make(L));
  return Diffeomorphism(make(L), make(lu.inverse()));
}

Vec4 Diffeomorphism::apply(const Vec4& x) const {
  const std::array<double, 4> a{x[0], x[1], x[2], x[3]};
  const auto y = apply(a);
  return Vec4(y[0], y[1], y[2], y[3]);
}

Mat4 Diffeomorphism::jacobian(const Vec4& x) const {
  const std::array<double, 4> a{x[0], x[1], x[2], x[3]};
  return to_matrix(jacobian(a));
}

Vec4 Diffeomorphism::apply_inverse(const Vec4& y) const {
  if (!inverse_) throw PreconditionError("diffeomorphism has no inverse components");
  const std::array<double, 4> a{y[0], y[1], y[2], y[3]};
  Vec4 x;
  for (int i = 0; i < 4; ++i) x[i] = (*inverse_)[i](a);
  return x;
}

Diffeomorphism Diffeomorphism::inverted() const {
  if (!inverse_) throw PreconditionError("diffeomorphism has no inverse components");
  return Diffeomorphism(*inverse_, components_);
}

// ---------------------------------------------------------------------------
// ChartMetric

namespace {
struct FlatKind {};
struct SphereKind {
  double radius;
};
struct ExplicitKind {
  std::array<RealPoly, 16> entries;
};
struct PullbackKind {
  ChartMetric base;
  Diffeomorphism phi;
};
}  // namespace

struct ChartMetric::Impl {
  std::variant<FlatKind, SphereKind, ExplicitKind, PullbackKind> kind;
};

ChartMetric ChartMetric::flat(const Box& domain) {
  ChartMetric m;
  m.impl_ = std::make_shared<Impl>(Impl{FlatKind{}});
  m.domain_ = domain;
  return m;
}

ChartMetric ChartMetric::product_sphere(const Box& domain, double radius) {
  if (!(radius > 0.0)) throw ConfigError("product_sphere radius must be positive");
  ChartMetric m;
  m.impl_ = std::make_shared<Impl>(Impl{SphereKind{radius}});
  m.domain_ = domain;
  return m;
}

ChartMetric ChartMetric::explicit_entries(const Box& domain, const std::array<RealPoly, 16>& entries) {
  ChartMetric m;
  m.impl_ = std::make_shared<Impl>(Impl{ExplicitKind{entries}});
  m.domain_ = domain;
  return m;
}

ChartMetric ChartMetric::pullback(const Box& domain, const ChartMetric& base, const Diffeomorphism& phi) {
  ChartMetric m;
  m.impl_ = std::make_shared<Impl>(Impl{PullbackKind{base, phi}});
  m.domain_ = domain;
  m.mode_ = base.mode_;
  m.fd_step_ = base.fd_step_;
  return m;
}

ChartMetric::Kind ChartMetric::kind() const {
  return std::visit(overloaded{[](const FlatKind&) { return Kind::flat; },
                               [](const SphereKind&) { return Kind::product_sphere; },
                               [](const ExplicitKind&) { return Kind::explicit_entries; },
                               [](const PullbackKind&) { return Kind::pullback; }},
                    impl_->kind);
}

std::string ChartMetric::kind_name() const {
  switch (kind()) {
    case Kind::flat:
      return "flat";
    case Kind::pullback:
      return "pullback";
    case Kind::product_sphere:
      return "product_sphere";
    case Kind::explicit_entries:
      return "explicit";
  }
  return "unknown";
}

double ChartMetric::radius() const {
  if (const auto* s = std::get_if<SphereKind>(&impl_->kind)) return s->radius;
  throw PreconditionError("radius() requires a product_sphere metric");
}

const ChartMetric& ChartMetric::base() const {
  if (const auto* p = std::get_if<PullbackKind>(&impl_->kind)) return p->base;
  throw PreconditionError("base() requires a pullback metric");
}

const Diffeomorphism& ChartMetric::diffeomorphism() const {
  if (const auto* p = std::get_if<PullbackKind>(&impl_->kind)) return p->phi;
  throw PreconditionError("diffeomorphism() requires a pullback metric");
}

const std::array<RealPoly, 16>& ChartMetric::entries() const {
  if (const auto* e = std::get_if<ExplicitKind>(&impl_->kind)) return e->entries;
  throw PreconditionError("entries() requires an explicit metric");
}

ChartMetric ChartMetric::with_derivative_mode(DerivativeMode mode, double fd_step) const {
  ChartMetric m = *this;
  m.mode_ = mode;
  m.fd_step_ = fd_step;
  return m;
}

template <class S>
std::array<S, 16> ChartMetric::components(const std::array<S, 4>& x) const {
  std::array<S, 16> g;
  g.fill(S(0.0));
  std::visit(overloaded{[&](const FlatKind&) {
                          for (int i = 0; i < 4; ++i) g[i * 5] = S(1.0);
                        },
                        [&](const SphereKind& k) {
                          const double r2 = k.radius * k.radius;
                          const S s = sin(x[0]);
                          g[0] = S(r2);
                          g[5] = s * s * r2;
                          g[10] = S(1.0);
                          g[15] = S(1.0);
                        },
                        [&](const ExplicitKind& k) {
                          for (int i = 0; i < 16; ++i) g[i] = k.entries[i](x);
                        },
                        [&](const PullbackKind& k) {
                          const auto y = k.phi.apply(x);
                          const auto G = k.base.components(y);
                          const auto J = k.phi.jacobian(x);
                          // g_ij = J_pi G_pq J_qj
                          std::array<S, 16> GJ;
                          for (int p = 0; p < 4; ++p) {
                            for (int j = 0; j < 4; ++j) {
                              S acc(0.0);
                              for (int q = 0; q < 4; ++q) acc = acc + G[p * 4 + q] * J[q * 4 + j];
                              GJ[p * 4 + j] = acc;
                            }
                          }
                          for (int i = 0; i < 4; ++i) {
                            for (int j = i; j < 4; ++j) {
                              S acc(0.0);
                              for (int p = 0; p < 4; ++p) acc = acc + J[p * 4 + i] * GJ[p * 4 + j];
                              g[i * 4 + j] = acc;
                              g[j * 4 + i] = acc;
                            }
                          }
                        }},
             impl_->kind);
  return g;
}

template std::array<double, 16> ChartMetric::components<double>(const std::array<double, 4>&) const;
template std::array<Jet2<4>, 16> ChartMetric::components<Jet2<4>>(const std::array<Jet2<4>, 4>&) const;

Mat4 ChartMetric::eval(const Vec4& m) const {
  const std::array<double, 4> x{m[0], m[1], m[2], m[3]};
  return symmetrized(to_matrix(components(x)));
}

MetricJet ChartMetric::jet(const Vec4& m) const {
  MetricJet out;
  if (mode_ == DerivativeMode::exact) {
    std::array<Jet2<4>, 4> x;
    for (int i = 0; i < 4; ++i) x[i] = Jet2<4>::variable(i, m[i]);
    const auto c = components(x);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const auto& e = c[i * 4 + j];
        out.g(i, j) = e.v;
        for (int k = 0; k < 4; ++k) {
          out.dg[k](i, j) = e.d[k];
          for (int l = 0; l < 4; ++l) out.ddg[k][l](i, j) = e.hess(k, l);
        }
      }
    }
    out.g = symmetrized(out.g);
    for (auto& d : out.dg) d = symmetrized(d);
    for (auto& row : out.ddg) {
      for (auto& d : row) d = symmetrized(d);
    }
    return out;
  }

  // Central differences with one Richardson level. Second derivatives use a
  // coarser step so rounding stays below the truncation error.
  const double h1 = step_at(m, fd_step_);
  const double h2 = 100.0 * h1;
  auto e = [](int k) {
    Vec4 v = Vec4::Zero();
    v[k] = 1.0;
    return v;
  };
  out.g = eval(m);
  for (int k = 0; k < 4; ++k) {
    auto central = [&](double h) { return Mat4((eval(m + h * e(k)) - eval(m - h * e(k))) / (2.0 * h)); };
    out.dg[k] = (4.0 * central(0.5 * h1) - central(h1)) / 3.0;
  }
  for (int k = 0; k < 4; ++k) {
    for (int l = k; l < 4; ++l) {
      auto second = [&](double h) -> Mat4 {
        if (k == l) return (eval(m + h * e(k)) - 2.0 * out.g + eval(m - h * e(k))) / (h * h);
        return (eval(m + h * e(k) + h * e(l)) - eval(m + h * e(k) - h * e(l)) -
                eval(m - h * e(k) + h * e(l)) + eval(m - h * e(k) - h * e(l))) /
               (4.0 * h * h);
      };
      out.ddg[k][l] = (4.0 * second(0.5 * h2) - second(h2)) / 3.0;
      out.ddg[l][k] = out.ddg[k][l];
    }
  }
  return out;
}

bool ChartMetric::contains(const Vec4& m, double margin) const {
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(m[i])) return false;
    if (m[i] < domain_[i].lo + margin || m[i] > domain_[i].hi - margin) return false;
  }
  return true;
}

void ChartMetric::require_inside(const Vec4& m, double margin) const {
  if (!contains(m, margin)) {
    std::ostringstream os;
    os << "point " << format_point(m) << " outside the chart domain";
    if (margin > 0.0) os << " (margin " << margin << ")";
    throw DomainError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Connection and curvature

double inner(const Mat4& g, const Vec4& X, const Vec4& Y) { return X.dot(g * Y); }

double norm(const Mat4& g, const Vec4& X) { return std::sqrt(std::max(0.0, inner(g, X, X))); }

namespace {

Mat4 checked_inverse(const Mat4& g) {
  Eigen::LLT<Mat4> llt(g);
  if (llt.info() != Eigen::Success) throw GeometryError("metric is not positive definite");
  return llt.solve(Mat4::Identity());
}

// S[l](i, j) = d_i g_jl + d_j g_il - d_l g_ij
std::array<Mat4, 4> christoffel_first_kind(const std::array<Mat4, 4>& dg) {
  std::array<Mat4, 4> S;
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) S[l](i, j) = dg[i](j, l) + dg[j](i, l) - dg[l](i, j);
    }
  }
  return S;
}

Christoffel raise(const Mat4& ginv, const std::array<Mat4, 4>& S) {
  Christoffel gamma;
  for (int k = 0; k < 4; ++k) {
    gamma[k].setZero();
    for (int l = 0; l < 4; ++l) gamma[k] += 0.5 * ginv(k, l) * S[l];
  }
  return gamma;
}

}  // namespace

Christoffel christoffel_from_jet(const MetricJet& jet) {
  const Mat4 ginv = checked_inverse(jet.g);
  return raise(ginv, christoffel_first_kind(jet.dg));
}

Christoffel christoffel(const ChartMetric& metric, const Vec4& m) {
  metric.require_inside(m);
  return christoffel_from_jet(metric.jet(m));
}

Vec4 contract(const Christoffel& gamma, const Vec4& X, const Vec4& Y) {
  Vec4 r;
  for (int k = 0; k < 4; ++k) r[k] = X.dot(gamma[k] * Y);
  return r;
}

Mat4 connection_matrix(const Christoffel& gamma, const Vec4& X) {
  Mat4 G;
  for (int k = 0; k < 4; ++k) G.row(k) = X.transpose() * gamma[k];
  return G;
}

CurvatureData curvature(const ChartMetric& metric, const Vec4& m) {
  metric.require_inside(m);
  const MetricJet jet = metric.jet(m);
  const Mat4 ginv = checked_inverse(jet.g);
  const auto S = christoffel_first_kind(jet.dg);

  CurvatureData out;
  out.point = m;
  out.christoffel = raise(ginv, S);
  const Christoffel& G = out.christoffel;

  // dG[p][k](i, j) = d_p Gamma^k_ij
  std::array<Christoffel, 4> dG;
  for (int p = 0; p < 4; ++p) {
    const Mat4 dginv = -ginv * jet.dg[p] * ginv;
    std::array<Mat4, 4> dS;
    for (int l = 0; l < 4; ++l) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          dS[l](i, j) = jet.ddg[p][i](j, l) + jet.ddg[p][j](i, l) - jet.ddg[p][l](i, j);
        }
      }
    }
    for (int k = 0; k < 4; ++k) {
      dG[p][k].setZero();
      for (int l = 0; l < 4; ++l) dG[p][k] += 0.5 * (dginv(k, l) * S[l] + ginv(k, l) * dS[l]);
    }
  }

  // R^l_{zxy}: R(d_x, d_y) d_z = R^l_{zxy} d_l
  std::array<double, 256> up{};
  for (int l = 0; l < 4; ++l) {
    for (int z = 0; z < 4; ++z) {
      for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
          double r = dG[x][l](y, z) - dG[y][l](x, z);
          for (int q = 0; q < 4; ++q) r += G[l](x, q) * G[q](y, z) - G[l](y, q) * G[q](x, z);
          up[((l * 4 + z) * 4 + x) * 4 + y] = r;
        }
      }
    }
  }
  for (int w = 0; w < 4; ++w) {
    for (int z = 0; z < 4; ++z) {
      for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
          double r = 0.0;
          for (int l = 0; l < 4; ++l) r += jet.g(w, l) * up[((l * 4 + z) * 4 + x) * 4 + y];
          out.lowered[((w * 4 + z) * 4 + x) * 4 + y] = r;
        }
      }
    }
  }
  return out;
}

double CurvatureData::pairing(const Vec4& X, const Vec4& Y, const Vec4& Z, const Vec4& W) const {
  double acc = 0.0;
  for (int w = 0; w < 4; ++w) {
    if (W[w] == 0.0) continue;
    for (int z = 0; z < 4; ++z) {
      if (Z[z] == 0.0) continue;
      for (int x = 0; x < 4; ++x) {
        if (X[x] == 0.0) continue;
        for (int y = 0; y < 4; ++y) {
          acc += W[w] * Z[z] * X[x] * Y[y] * lowered[((w * 4 + z) * 4 + x) * 4 + y];
        }
      }
    }
  }
  return acc;
}

double riemann_pairing(const ChartMetric& metric, const Vec4& m, const Vec4& X, const Vec4& Y,
                       const Vec4& Z, const Vec4& W) {
  for (const Vec4* v : {&X, &Y, &Z, &W}) {
    if (!v->allFinite()) throw GeometryError("non-finite vector passed to riemann_pairing");
  }
  return curvature(metric, m).pairing(X, Y, Z, W);
}

double sectional_curvature(const ChartMetric& metric, const Vec4& m, const Vec4& X, const Vec4& Y) {
  const Mat4 g = metric.eval(m);
  const double area2 = inner(g, X, X) * inner(g, Y, Y) - std::pow(inner(g, X, Y), 2);
  if (area2 <= 1e-24) throw DegeneracyError("sectional curvature of a degenerate plane");
  return riemann_pairing(metric, m, X, Y, Y, X) / area2;
}

// ---------------------------------------------------------------------------
// Covariant derivatives

namespace {

template <class Value, class Field>
Value richardson_derivative(const Field& field, const Vec4& m, const Vec4& X, double step) {
  const double scale = X.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Value(Value::Zero());
  const double s = step / scale;
  auto central = [&](double t) -> Value { return (field(m + t * X) - field(m - t * X)) / (2.0 * t); };
  return (4.0 * central(0.5 * s) - central(s)) / 3.0;
}

void require_stencil(const ChartMetric& metric, const Vec4& m, const Vec4& X, double step) {
  const double scale = X.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    metric.require_inside(m);
    return;
  }
  const Vec4 reach = (step / scale) * X;
  if (!metric.contains(m + reach) || !metric.contains(m - reach)) {
    throw DomainError("finite-difference stencil at " + format_point(m) + " leaves the chart domain");
  }
}

}  // namespace

Mat4 directional_derivative(const TensorField& field, const Vec4& m, const Vec4& X, double step) {
  return richardson_derivative<Mat4>(field, m, X, step);
}

Vec4 directional_derivative(const VectorField& field, const Vec4& m, const Vec4& X, double step) {
  return richardson_derivative<Vec4>(field, m, X, step);
}

Vec4 covariant_derivative(const ChartMetric& metric, const VectorField& field, const Vec4& m,
                          const Vec4& X, const DifferenceOptions& opts) {
  const double h = step_at(m, opts.step);
  require_stencil(metric, m, X, h);
  const Christoffel gamma = christoffel(metric, m);
  return directional_derivative(field, m, X, h) + contract(gamma, X, field(m));
}

Mat4 covariant_derivative(const ChartMetric& metric, const TensorField& field, const Vec4& m,
                          const Vec4& X, const DifferenceOptions& opts) {
  const double h = step_at(m, opts.step);
  require_stencil(metric, m, X, h);
  const Christoffel gamma = christoffel(metric, m);
  const Mat4 GX = connection_matrix(gamma, X);
  const Mat4 T = field(m);
  return directional_derivative(field, m, X, h) + GX * T - T * GX;
}

// ---------------------------------------------------------------------------
// Frames

Frame orthonormalize(const Mat4& g, std::span<const Vec4> seeds, std::optional<int> count) {
  const int wanted = count.value_or(static_cast<int>(seeds.size()));
  if (wanted < 0 || wanted > 4) throw DegeneracyError("a frame has at most four vectors");

  Frame frame;
  int next_coordinate = 0;
  auto try_add = [&](const Vec4& v) {
    Vec4 r = v;
    // Two Gram-Schmidt passes keep the result orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec4& e : frame.vectors) r -= inner(g, r, e) * e;
    }
    const double n = norm(g, r);
    if (n < 1e-8) return false;
    frame.vectors.push_back(r / n);
    return true;
  };
  auto add_coordinate = [&]() {
    while (next_coordinate < 4) {
      Vec4 e = Vec4::Zero();
      e[next_coordinate++] = 1.0;
      if (try_add(e)) return;
    }
    throw DegeneracyError("cannot complete an orthonormal frame from the given seeds");
  };

  for (const Vec4& s : seeds) {
    if (static_cast<int>(frame.vectors.size()) == wanted) break;
    if (!try_add(s)) add_coordinate();
  }
  while (static_cast<int>(frame.vectors.size()) < wanted) add_coordinate();

  const int n = static_cast<int>(frame.vectors.size());
  frame.gram.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) frame.gram(i, j) = inner(g, frame.vectors[i], frame.vectors[j]);
  }
  return frame;
}

Frame orthonormalize(const ChartMetric& metric, const Vec4& m, std::span<const Vec4> seeds,
                     std::optional<int> count) {
  metric.require_inside(m);
  Frame f = orthonormalize(metric.eval(m), seeds, count);
  f.point = m;
  return f;
}

Frame coordinate_frame(const ChartMetric& metric, const Vec4& m) {
  const std::array<Vec4, 4> basis{Vec4::UnitX(), Vec4::UnitY(), Vec4::UnitZ(), Vec4::UnitW()};
  return orthonormalize(metric, m, basis);
}

int orientation_sign(std::span<const Vec4> vectors, int reference) {
  if (vectors.size() != 4) throw DegeneracyError("orientation needs exactly four vectors");
  Mat4 E;
  for (int i = 0; i < 4; ++i) E.col(i) = vectors[i];
  const double det = E.determinant();
  if (!(std::abs(det) >= 1e-12)) throw DegeneracyError("frame vectors are linearly dependent");
  return (det > 0.0 ? 1 : -1) * reference;
}

int orientation_sign(const ChartMetric& metric, const Vec4& m, const Frame& frame, int reference) {
  if (frame.vectors.size() != 4) throw DegeneracyError("orientation needs exactly four vectors");
  Mat4 E;
  for (int i = 0; i < 4; ++i) E.col(i) = frame.vectors[i];
  // Volume form sqrt(det g) dx1..dx4 evaluated on the frame.
  const double vol = std::sqrt(metric.eval(m).determinant()) * E.determinant();
  if (!(std::abs(vol) >= 1e-12)) throw DegeneracyError("frame vectors are linearly dependent");
  return (vol > 0.0 ? 1 : -1) * reference;
}

}  // namespace morpho
