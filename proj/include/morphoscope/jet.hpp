#pragma once

// Second-order forward-mode automatic differentiation in N variables.
//
// A Jet2 carries a value, its gradient and its (symmetric) Hessian. All
// arithmetic propagates these exactly, so metric components written once as
// templates yield exact first and second derivatives.

#include <array>
#include <cmath>

namespace morpho {

template <int N>
struct Jet2 {
  double v = 0.0;
  std::array<double, N> d{};
  std::array<double, N * N> h{};

  constexpr Jet2() = default;
  constexpr Jet2(double value) : v(value) {}  // NOLINT: implicit constants

  static Jet2 variable(int i, double value) {
    Jet2 x(value);
    x.d[i] = 1.0;
    return x;
  }

  double hess(int i, int j) const { return h[i * N + j]; }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    for (int i = 0; i < N * N; ++i) h[i] += o.h[i];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    for (int i = 0; i < N * N; ++i) h[i] -= o.h[i];
    return *this;
  }
  Jet2& operator*=(const Jet2& o) {
    Jet2 r;
    r.v = v * o.v;
    for (int i = 0; i < N; ++i) r.d[i] = d[i] * o.v + v * o.d[i];
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        const int k = i * N + j;
        r.h[k] = h[k] * o.v + v * o.h[k] + d[i] * o.d[j] + d[j] * o.d[i];
      }
    }
    *this = r;
    return *this;
  }
  Jet2& operator*=(double s) {
    v *= s;
    for (auto& x : d) x *= s;
    for (auto& x : h) x *= s;
    return *this;
  }
};

template <int N>
Jet2<N> operator-(Jet2<N> a) {
  a *= -1.0;
  return a;
}
template <int N>
Jet2<N> operator+(Jet2<N> a, const Jet2<N>& b) {
  return a += b;
}
template <int N>
Jet2<N> operator-(Jet2<N> a, const Jet2<N>& b) {
  return a -= b;
}
template <int N>
Jet2<N> operator*(Jet2<N> a, const Jet2<N>& b) {
  return a *= b;
}
template <int N>
Jet2<N> operator+(Jet2<N> a, double b) {
  a.v += b;
  return a;
}
template <int N>
Jet2<N> operator+(double b, Jet2<N> a) {
  a.v += b;
  return a;
}
template <int N>
Jet2<N> operator-(Jet2<N> a, double b) {
  a.v -= b;
  return a;
}
template <int N>
Jet2<N> operator-(double b, const Jet2<N>& a) {
  return (-a) + b;
}
template <int N>
Jet2<N> operator*(Jet2<N> a, double s) {
  return a *= s;
}
template <int N>
Jet2<N> operator*(double s, Jet2<N> a) {
  return a *= s;
}

// Composition with a scalar function given its first two derivatives.
template <int N>
Jet2<N> chain(const Jet2<N>& a, double f0, double f1, double f2) {
  Jet2<N> r(f0);
  for (int i = 0; i < N; ++i) r.d[i] = f1 * a.d[i];
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const int k = i * N + j;
      r.h[k] = f1 * a.h[k] + f2 * a.d[i] * a.d[j];
    }
  }
  return r;
}

template <int N>
Jet2<N> reciprocal(const Jet2<N>& a) {
  const double inv = 1.0 / a.v;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

template <int N>
Jet2<N> operator/(const Jet2<N>& a, const Jet2<N>& b) {
  return a * reciprocal(b);
}
template <int N>
Jet2<N> operator/(Jet2<N> a, double s) {
  return a *= (1.0 / s);
}
template <int N>
Jet2<N> operator/(double s, const Jet2<N>& a) {
  return reciprocal(a) * s;
}

template <int N>
Jet2<N> sin(const Jet2<N>& a) {
  const double s = std::sin(a.v);
  const double c = std::cos(a.v);
  return chain(a, s, c, -s);
}

template <int N>
Jet2<N> cos(const Jet2<N>& a) {
  const double s = std::sin(a.v);
  const double c = std::cos(a.v);
  return chain(a, c, -s, -c);
}

template <int N>
Jet2<N> sqrt(const Jet2<N>& a) {
  const double r = std::sqrt(a.v);
  return chain(a, r, 0.5 / r, -0.25 / (r * a.v));
}

template <int N>
Jet2<N> exp(const Jet2<N>& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

// Overloads so templated evaluators can call sin/cos/sqrt uniformly on
// double and Jet2 arguments.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet2<N>& x) {
  return x.v;
}

}  // namespace morpho
