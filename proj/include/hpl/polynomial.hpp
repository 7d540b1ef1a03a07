#pragma once

// Dense univariate polynomials with ascending coefficients: c[j] multiplies z^j.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hpl/scalar.hpp"

namespace hpl {

template <class T>
struct Poly {
  std::vector<T> c;

  Poly() = default;
  explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) {}

  // Degree of the highest nonzero coefficient; -1 for the zero polynomial.
  int degree() const {
    for (std::size_t j = c.size(); j-- > 0;) {
      if (!is_zero(c[j])) return static_cast<int>(j);
    }
    return -1;
  }
  bool is_zero_poly() const { return degree() < 0; }

  const T& leading() const {
    const int d = degree();
    if (d < 0) throw std::domain_error("leading coefficient of zero polynomial");
    return c[static_cast<std::size_t>(d)];
  }

  void trim() { c.erase(c.begin() + (degree() + 1), c.end()); }

  Poly scaled(const T& s) const {
    Poly r(*this);
    for (auto& x : r.c) x = x * s;
    return r;
  }
};

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const cd& x) { return x == cd(0.0, 0.0); }

using PolyQ = Poly<Rational>;
using PolyC = Poly<BigComplex>;
using PolyD = Poly<cd>;

template <class T>
T horner(const std::vector<T>& c, const T& z, const T& zero) {
  T acc = zero;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * z + c[j];
  return acc;
}

inline cd horner(const std::vector<cd>& c, cd z) {
  cd acc = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * z + c[j];
  return acc;
}

template <class T>
std::vector<T> poly_mul(const std::vector<T>& a, const std::vector<T>& b, const T& zero) {
  if (a.empty() || b.empty()) return {};
  std::vector<T> r(a.size() + b.size() - 1, zero);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline std::vector<cd> poly_mul(const std::vector<cd>& a, const std::vector<cd>& b) {
  return poly_mul<cd>(a, b, cd(0.0));
}

inline std::vector<cd> poly_derivative(const std::vector<cd>& a) {
  std::vector<cd> r;
  for (std::size_t j = 1; j < a.size(); ++j) r.push_back(a[j] * static_cast<double>(j));
  return r;
}

inline std::vector<cd> poly_from_roots(const std::vector<cd>& roots) {
  std::vector<cd> r{1.0};
  for (const cd& z : roots) r = poly_mul(r, std::vector<cd>{-z, 1.0});
  return r;
}

// Converts an exact or big-float coefficient vector to doubles.
template <class T>
std::vector<cd> to_cd_vector(const std::vector<T>& a) {
  std::vector<cd> r;
  r.reserve(a.size());
  for (const auto& x : a) r.push_back(to_cd(x));
  return r;
}

}  // namespace hpl
