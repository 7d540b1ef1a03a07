#pragma once

// Truncated Laurent expansions at infinity.
//
// coeffs[m] is the coefficient of z^{-m}, m = 0..order. The coefficient
// storage is either exact rationals or big-float complex numbers; mixing the
// two in arithmetic is rejected unless one side is explicitly promoted.

#include "json.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "hpl/polynomial.hpp"
#include "hpl/scalar.hpp"

namespace hpl {

struct ComplexRational {
  Rational re;
  Rational im;
  bool is_real() const { return sgn(im) == 0; }
  cd to_cd() const { return {re.get_d(), im.get_d()}; }
  BigComplex to_big(unsigned bits) const { return {BigFloat(re, bits), BigFloat(im, bits)}; }
};

class LaurentSeries {
 public:
  LaurentSeries() : coeffs_(std::vector<Rational>{Rational(0)}) {}
  explicit LaurentSeries(std::vector<Rational> coeffs);
  LaurentSeries(std::vector<BigComplex> coeffs, unsigned precision_bits);

  ScalarKind kind() const {
    return std::holds_alternative<std::vector<Rational>>(coeffs_) ? ScalarKind::exact_rational
                                                                 : ScalarKind::big_float_complex;
  }
  unsigned precision_bits() const { return precision_bits_; }
  std::size_t order() const;

  const std::vector<Rational>& exact() const;
  const std::vector<BigComplex>& floating() const;

  template <class T>
  const std::vector<T>& as() const {
    return std::get<std::vector<T>>(coeffs_);
  }

  // Coefficient as a double-precision complex number.
  cd coeff_cd(std::size_t m) const;

  LaurentSeries truncated(std::size_t order) const;
  // Converts exact coefficients to big floats; float series are re-rounded.
  LaurentSeries promoted(unsigned precision_bits) const;

  friend bool operator==(const LaurentSeries& a, const LaurentSeries& b);

 private:
  std::variant<std::vector<Rational>, std::vector<BigComplex>> coeffs_;
  unsigned precision_bits_ = 0;
};

struct JacobiSpec {
  std::vector<ComplexRational> points;
  std::vector<ComplexRational> exponents;
  void validate() const;
};

enum class DensityKind { polynomial, endpoint_jacobi, general_jacobi };

// A positive measure on [a, b]. The three density descriptors are
//   polynomial:       sum_i poly[i] x^i
//   endpoint_jacobi:  (x-a)^beta_left (b-x)^beta_right, scaled to total mass
//   general_jacobi:   prod_i |x - singular_points[i]|^singular_exponents[i], scaled to total mass
// Moments are exact for the first two kinds and computed by quadrature for the third.
struct MarkovSpec {
  Rational a;
  Rational b;
  DensityKind density = DensityKind::polynomial;
  std::vector<Rational> poly{Rational(1)};
  Rational beta_left{0};
  Rational beta_right{0};
  Rational mass{1};
  std::vector<double> singular_points;
  std::vector<double> singular_exponents;

  static MarkovSpec unit(Rational a, Rational b);
  static MarkovSpec arcsine(Rational a, Rational b);

  void validate() const;
  bool has_exact_moments() const { return density != DensityKind::general_jacobi; }
  std::vector<Rational> exact_moments(std::size_t count) const;
  std::vector<double> quadrature_moments(std::size_t count) const;
  // Normalized density value at x.
  double density_at(double x) const;
};

LaurentSeries expand_jacobi(const JacobiSpec& spec, std::size_t order, ScalarKind kind,
                            unsigned precision_bits = kDefaultPrecisionBits);
LaurentSeries expand_markov(const MarkovSpec& spec, std::size_t order, ScalarKind kind,
                            unsigned precision_bits = kDefaultPrecisionBits);

LaurentSeries add(const LaurentSeries& f, const LaurentSeries& g);
LaurentSeries mul(const LaurentSeries& f, const LaurentSeries& g);
LaurentSeries scale(const LaurentSeries& f, const Rational& s);
LaurentSeries scale(const LaurentSeries& f, const BigComplex& s);

// p(z) f(z) split into its polynomial part (ascending powers z^0..z^deg p) and the
// strictly fractional tail (tail.coeffs[0] == 0).
template <class T>
struct PolySeriesProduct {
  std::vector<T> polynomial_part;
  LaurentSeries tail;
};

PolySeriesProduct<Rational> polynomial_multiply(const std::vector<Rational>& p, const LaurentSeries& f);
PolySeriesProduct<BigComplex> polynomial_multiply(const std::vector<BigComplex>& p, const LaurentSeries& f);

nlohmann::json to_json(const LaurentSeries& f);
LaurentSeries series_from_json(const nlohmann::json& j);

nlohmann::json scalar_to_json(const Rational& q);
nlohmann::json scalar_to_json(const BigComplex& z);
Rational rational_from_json(const nlohmann::json& j);
BigComplex big_complex_from_json(const nlohmann::json& j, unsigned precision_bits);

nlohmann::json poly_to_json(const std::vector<Rational>& p);
nlohmann::json poly_to_json(const std::vector<BigComplex>& p);

ComplexRational complex_rational_from_json(const nlohmann::json& j);
JacobiSpec jacobi_spec_from_json(const nlohmann::json& j);
MarkovSpec markov_spec_from_json(const nlohmann::json& j);

}  // namespace hpl
