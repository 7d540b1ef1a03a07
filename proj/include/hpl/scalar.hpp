#pragma once

// Scalar types shared by the series engine and the Hermite-Pade solver.
//
// Two coefficient fields are supported:
//   * Rational   - exact GMP rationals (mpq_class), bit-identical across runs;
//   * BigComplex - pairs of MPFR floats that carry their own precision.
//
// BigFloat is a small RAII wrapper over mpfr_t. Each value owns its precision;
// binary operations produce a result with the larger of the two operand
// precisions, so no global or thread-local default is ever consulted.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>

namespace hpl {

using Rational = mpq_class;
using cd = std::complex<double>;

enum class ScalarKind { exact_rational, big_float_complex };

constexpr unsigned kDefaultPrecisionBits = 256;

std::string to_string(ScalarKind kind);
ScalarKind scalar_kind_from_string(const std::string& s);

class BigFloat {
 public:
  explicit BigFloat(unsigned precision_bits = kDefaultPrecisionBits);
  BigFloat(double v, unsigned precision_bits);
  BigFloat(const Rational& q, unsigned precision_bits);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  unsigned precision() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  BigFloat& operator+=(const BigFloat& o);
  BigFloat& operator-=(const BigFloat& o);
  BigFloat& operator*=(const BigFloat& o);
  BigFloat& operator/=(const BigFloat& o);

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
  BigFloat operator-() const;

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return b < a; }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

  friend BigFloat sqrt(const BigFloat& a);
  friend BigFloat log(const BigFloat& a);
  friend BigFloat exp(const BigFloat& a);
  friend BigFloat atan2(const BigFloat& y, const BigFloat& x);
  friend BigFloat cos(const BigFloat& a);
  friend BigFloat sin(const BigFloat& a);
  friend BigFloat abs(const BigFloat& a);
  friend BigFloat hypot(const BigFloat& a, const BigFloat& b);

  // Decimal string with enough digits to round-trip at this precision.
  std::string to_string() const;
  static BigFloat from_string(const std::string& s, unsigned precision_bits);

 private:
  void promote(unsigned bits);
  mpfr_t v_;
};

struct BigComplex {
  BigFloat re;
  BigFloat im;

  explicit BigComplex(unsigned precision_bits = kDefaultPrecisionBits)
      : re(precision_bits), im(precision_bits) {}
  BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
  BigComplex(cd v, unsigned precision_bits)
      : re(v.real(), precision_bits), im(v.imag(), precision_bits) {}
  BigComplex(const Rational& q, unsigned precision_bits)
      : re(q, precision_bits), im(precision_bits) {}

  unsigned precision() const { return std::max(re.precision(), im.precision()); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  cd to_cd() const { return {re.to_double(), im.to_double()}; }

  BigComplex& operator+=(const BigComplex& o);
  BigComplex& operator-=(const BigComplex& o);
  BigComplex& operator*=(const BigComplex& o);
  BigComplex& operator/=(const BigComplex& o);
  friend BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
  friend BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
  friend BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }
  friend BigComplex operator/(BigComplex a, const BigComplex& b) { return a /= b; }
  BigComplex operator-() const { return {-re, -im}; }
  friend bool operator==(const BigComplex& a, const BigComplex& b) { return a.re == b.re && a.im == b.im; }

  BigComplex conj() const { return {re, -im}; }
  BigFloat norm() const { return re * re + im * im; }
  BigFloat abs() const { return hypot(re, im); }
};

BigComplex sqrt(const BigComplex& z);   // principal branch
BigComplex log(const BigComplex& z);    // principal branch
BigComplex exp(const BigComplex& z);
BigComplex pow(const BigComplex& z, const BigComplex& e);  // principal branch

// Field helpers used by the generic (templated) algorithms.
inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(const BigComplex& z) { return z.is_zero(); }
inline cd to_cd(const Rational& q) { return {q.get_d(), 0.0}; }
inline cd to_cd(const BigComplex& z) { return z.to_cd(); }
inline double magnitude(const Rational& q) { return std::abs(q.get_d()); }
inline double magnitude(const BigComplex& z) { return std::abs(z.to_cd()); }

template <class T>
struct FieldOps;

template <>
struct FieldOps<Rational> {
  static Rational zero(unsigned) { return Rational(0); }
  static Rational one(unsigned) { return Rational(1); }
  static Rational from_rational(const Rational& q, unsigned) { return q; }
  static Rational conj(const Rational& q) { return q; }
  static unsigned precision(const Rational&) { return 0; }
};

template <>
struct FieldOps<BigComplex> {
  static BigComplex zero(unsigned bits) { return BigComplex(bits); }
  static BigComplex one(unsigned bits) { return BigComplex(Rational(1), bits); }
  static BigComplex from_rational(const Rational& q, unsigned bits) { return BigComplex(q, bits); }
  static BigComplex conj(const BigComplex& z) { return z.conj(); }
  static unsigned precision(const BigComplex& z) { return z.precision(); }
};

// Parses "p/q", "p" or a decimal literal such as "0.25" into an exact rational.
Rational parse_rational(const std::string& s);

}  // namespace hpl
