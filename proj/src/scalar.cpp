#include "hpl/scalar.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hpl {

std::string to_string(ScalarKind kind) {
  return kind == ScalarKind::exact_rational ? "exact-rational" : "big-float-complex";
}

ScalarKind scalar_kind_from_string(const std::string& s) {
  if (s == "exact-rational") return ScalarKind::exact_rational;
  if (s == "big-float-complex") return ScalarKind::big_float_complex;
  throw std::invalid_argument("unknown scalar kind: " + s);
}

BigFloat::BigFloat(unsigned precision_bits) {
  mpfr_init2(v_, std::max<unsigned>(precision_bits, MPFR_PREC_MIN));
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(double v, unsigned precision_bits) : BigFloat(precision_bits) {
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const Rational& q, unsigned precision_bits) : BigFloat(precision_bits) {
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_swap(v_, other.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

void BigFloat::promote(unsigned bits) {
  if (bits > precision()) mpfr_prec_round(v_, bits, MPFR_RNDN);
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
  promote(o.precision());
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& o) {
  promote(o.precision());
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& o) {
  promote(o.precision());
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& o) {
  promote(o.precision());
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

BigFloat BigFloat::operator-() const {
  BigFloat r(*this);
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

BigFloat sqrt(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
  return r;
}

BigFloat log(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_log(r.v_, a.v_, MPFR_RNDN);
  return r;
}

BigFloat exp(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_exp(r.v_, a.v_, MPFR_RNDN);
  return r;
}

BigFloat atan2(const BigFloat& y, const BigFloat& x) {
  BigFloat r(std::max(x.precision(), y.precision()));
  mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN);
  return r;
}

BigFloat cos(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_cos(r.v_, a.v_, MPFR_RNDN);
  return r;
}

BigFloat sin(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_sin(r.v_, a.v_, MPFR_RNDN);
  return r;
}

BigFloat abs(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_abs(r.v_, a.v_, MPFR_RNDN);
  return r;
}

BigFloat hypot(const BigFloat& a, const BigFloat& b) {
  BigFloat r(std::max(a.precision(), b.precision()));
  mpfr_hypot(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

std::string BigFloat::to_string() const {
  // Digits needed to round-trip: ceil(prec * log10(2)) + 1.
  const auto digits = static_cast<std::size_t>(std::ceil(precision() * 0.30102999566398120)) + 1;
  std::vector<char> buf(digits + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", static_cast<int>(digits), v_);
  return std::string(buf.data());
}

BigFloat BigFloat::from_string(const std::string& s, unsigned precision_bits) {
  BigFloat r(precision_bits);
  if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    throw std::invalid_argument("bad floating literal: " + s);
  }
  return r;
}

BigComplex& BigComplex::operator+=(const BigComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

BigComplex& BigComplex::operator-=(const BigComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

BigComplex& BigComplex::operator*=(const BigComplex& o) {
  BigFloat r = re * o.re - im * o.im;
  BigFloat i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

BigComplex& BigComplex::operator/=(const BigComplex& o) {
  BigFloat den = o.re * o.re + o.im * o.im;
  BigFloat r = (re * o.re + im * o.im) / den;
  BigFloat i = (im * o.re - re * o.im) / den;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

BigComplex sqrt(const BigComplex& z) {
  const unsigned bits = z.precision();
  if (z.is_zero()) return BigComplex(bits);
  BigFloat m = z.abs();
  BigFloat half(0.5, bits);
  // Stable form: t = sqrt((|z| + |Re z|)/2).
  BigFloat t = sqrt((m + abs(z.re)) * half);
  if (z.re.sign() >= 0) {
    return {t, z.im / (t + t)};
  }
  BigFloat u = z.im / (t + t);
  if (z.im.sign() >= 0) return {abs(u), t};
  return {abs(u), -t};
}

BigComplex log(const BigComplex& z) { return {log(z.abs()), atan2(z.im, z.re)}; }

BigComplex exp(const BigComplex& z) {
  BigFloat m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}

BigComplex pow(const BigComplex& z, const BigComplex& e) { return exp(e * log(z)); }

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto dot = s.find('.');
  const auto exp_pos = s.find_first_of("eE");
  if (dot == std::string::npos && exp_pos == std::string::npos) {
    Rational q(s, 10);
    q.canonicalize();
    return q;
  }
  // Decimal literal: mantissa digits over a power of ten, times an optional exponent.
  std::string mant = exp_pos == std::string::npos ? s : s.substr(0, exp_pos);
  long e10 = exp_pos == std::string::npos ? 0 : std::stol(s.substr(exp_pos + 1));
  std::string digits;
  long frac = 0;
  bool after = false;
  for (char c : mant) {
    if (c == '.') {
      after = true;
    } else {
      digits.push_back(c);
      if (after && c >= '0' && c <= '9') ++frac;
    }
  }
  mpz_class num(digits, 10);
  e10 -= frac;
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(e10)));
  Rational q = e10 >= 0 ? Rational(num * p10) : Rational(num, p10);
  q.canonicalize();
  return q;
}

}  // namespace hpl
