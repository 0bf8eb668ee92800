#pragma once

// Sparse multivariate polynomials in (up to) four variables with exact
// coefficient arithmetic: products, derivatives, substitution and Taylor
// re-centering. Coefficients are double or std::complex<double>.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <vector>

namespace morpho {

using Exponents = std::array<int, 4>;

inline int total_degree(const Exponents& e) { return e[0] + e[1] + e[2] + e[3]; }

template <class T>
class Polynomial {
 public:
  using Terms = std::map<Exponents, T>;

  Polynomial() = default;
  explicit Polynomial(T c) { add_term({0, 0, 0, 0}, c); }

  static Polynomial variable(int i) {
    Exponents e{0, 0, 0, 0};
    e[i] = 1;
    return monomial(e, T(1));
  }

  static Polynomial monomial(const Exponents& e, T c) {
    Polynomial p;
    p.add_term(e, c);
    return p;
  }

  void add_term(const Exponents& e, T c) {
    if (c == T(0)) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == T(0)) terms_.erase(it);
    }
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int deg = -1;
    for (const auto& [e, c] : terms_) deg = std::max(deg, total_degree(e));
    return deg;
  }

  T coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? T(0) : it->second;
  }

  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, static_cast<double>(std::abs(c)));
    return m;
  }

  Polynomial derivative(int var) const {
    Polynomial r;
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents f = e;
      f[var] -= 1;
      r.add_term(f, c * static_cast<double>(e[var]));
    }
    return r;
  }

  Polynomial homogeneous_part(int k) const {
    Polynomial r;
    for (const auto& [e, c] : terms_) {
      if (total_degree(e) == k) r.terms_.emplace(e, c);
    }
    return r;
  }

  /// Terms of total degree in [lo, hi].
  Polynomial degree_range(int lo, int hi) const {
    Polynomial r;
    for (const auto& [e, c] : terms_) {
      const int d = total_degree(e);
      if (d >= lo && d <= hi) r.terms_.emplace(e, c);
    }
    return r;
  }

  Polynomial pow(int n) const {
    Polynomial r(T(1));
    for (int i = 0; i < n; ++i) r *= *this;
    return r;
  }

  /// Substitutes polynomials for the variables: p(s_1, ..., s_4).
  Polynomial compose(const std::array<Polynomial, 4>& subs) const {
    std::array<std::vector<Polynomial>, 4> powers;
    for (int k = 0; k < 4; ++k) powers[k].push_back(Polynomial(T(1)));
    Polynomial r;
    for (const auto& [e, c] : terms_) {
      Polynomial term(c);
      for (int k = 0; k < 4; ++k) {
        while (static_cast<int>(powers[k].size()) <= e[k]) {
          powers[k].push_back(powers[k].back() * subs[k]);
        }
        if (e[k] > 0) term *= powers[k][e[k]];
      }
      r += term;
    }
    return r;
  }

  /// The polynomial delta -> p(origin + delta).
  Polynomial shifted(const std::array<T, 4>& origin) const {
    std::array<Polynomial, 4> subs;
    for (int k = 0; k < 4; ++k) {
      subs[k] = variable(k);
      subs[k].add_term({0, 0, 0, 0}, origin[k]);
    }
    return compose(subs);
  }

  template <class S>
  S operator()(const std::array<S, 4>& x) const {
    S acc(0.0);
    std::array<std::vector<S>, 4> powers;
    for (int k = 0; k < 4; ++k) powers[k].push_back(S(1.0));
    for (const auto& [e, c] : terms_) {
      S term(1.0);
      for (int k = 0; k < 4; ++k) {
        if (e[k] == 0) continue;
        while (static_cast<int>(powers[k].size()) <= e[k]) {
          powers[k].push_back(powers[k].back() * x[k]);
        }
        term = term * powers[k][e[k]];
      }
      acc = acc + term * c;
    }
    return acc;
  }

  template <class U>
  Polynomial<U> cast() const {
    Polynomial<U> r;
    for (const auto& [e, c] : terms_) r.add_term(e, U(c));
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) {
    Polynomial r;
    for (const auto& [e1, c1] : terms_) {
      for (const auto& [e2, c2] : o.terms_) {
        r.add_term({e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]}, c1 * c2);
      }
    }
    *this = std::move(r);
    return *this;
  }
  Polynomial& operator*=(T s) {
    if (s == T(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, T s) { return a *= s; }
  friend Polynomial operator*(T s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= T(-1); }

 private:
  Terms terms_;
};

using RealPoly = Polynomial<double>;
using ComplexPoly = Polynomial<std::complex<double>>;

/// Pair of real polynomials, the components of a map into a 2-dimensional chart.
using PolyPair = std::array<RealPoly, 2>;

}  // namespace morpho
