#include "hpl/series.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace hpl {

using nlohmann::json;

LaurentSeries::LaurentSeries(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  if (exact().empty()) throw std::invalid_argument("series needs at least one coefficient");
}

LaurentSeries::LaurentSeries(std::vector<BigComplex> coeffs, unsigned precision_bits)
    : coeffs_(std::move(coeffs)), precision_bits_(precision_bits) {
  if (floating().empty()) throw std::invalid_argument("series needs at least one coefficient");
  if (precision_bits == 0) throw std::invalid_argument("precision_bits must be positive");
}

std::size_t LaurentSeries::order() const {
  return std::visit([](const auto& v) { return v.size() - 1; }, coeffs_);
}

const std::vector<Rational>& LaurentSeries::exact() const {
  if (kind() != ScalarKind::exact_rational) throw std::logic_error("series is not exact");
  return std::get<std::vector<Rational>>(coeffs_);
}

const std::vector<BigComplex>& LaurentSeries::floating() const {
  if (kind() != ScalarKind::big_float_complex) throw std::logic_error("series is not floating");
  return std::get<std::vector<BigComplex>>(coeffs_);
}

cd LaurentSeries::coeff_cd(std::size_t m) const {
  return std::visit([m](const auto& v) { return to_cd(v.at(m)); }, coeffs_);
}

LaurentSeries LaurentSeries::truncated(std::size_t order) const {
  if (order > this->order()) throw std::invalid_argument("cannot extend truncation order");
  if (kind() == ScalarKind::exact_rational) {
    const auto& v = exact();
    return LaurentSeries(std::vector<Rational>(v.begin(), v.begin() + static_cast<long>(order) + 1));
  }
  const auto& v = floating();
  return LaurentSeries(std::vector<BigComplex>(v.begin(), v.begin() + static_cast<long>(order) + 1),
                       precision_bits_);
}

LaurentSeries LaurentSeries::promoted(unsigned bits) const {
  std::vector<BigComplex> out;
  out.reserve(order() + 1);
  if (kind() == ScalarKind::exact_rational) {
    for (const auto& q : exact()) out.emplace_back(q, bits);
  } else {
    for (const auto& z : floating()) {
      BigComplex w(bits);
      mpfr_set(w.re.raw(), z.re.raw(), MPFR_RNDN);
      mpfr_set(w.im.raw(), z.im.raw(), MPFR_RNDN);
      out.push_back(std::move(w));
    }
  }
  return LaurentSeries(std::move(out), bits);
}

bool operator==(const LaurentSeries& a, const LaurentSeries& b) {
  return a.coeffs_ == b.coeffs_ && a.precision_bits_ == b.precision_bits_;
}

namespace {

bool is_integer(const Rational& q) { return q.get_den() == 1; }

template <class T>
T field(const Rational& q, unsigned bits) {
  return FieldOps<T>::from_rational(q, bits);
}

template <class T>
T field(const ComplexRational& z, unsigned bits);

template <>
Rational field<Rational>(const ComplexRational& z, unsigned) {
  return z.re;
}

template <>
BigComplex field<BigComplex>(const ComplexRational& z, unsigned bits) {
  return z.to_big(bits);
}

// Coefficients c_m of prod (z - a_j)^{alpha_j} = sum c_m z^{-m} from A f' = B f.
template <class T>
std::vector<T> jacobi_recurrence(const JacobiSpec& spec, std::size_t order, unsigned bits) {
  const std::size_t p = spec.points.size();
  std::vector<T> A{FieldOps<T>::one(bits)};
  for (const auto& a : spec.points) A = poly_mul(A, std::vector<T>{-field<T>(a, bits), FieldOps<T>::one(bits)}, FieldOps<T>::zero(bits));
  std::vector<T> B(p, FieldOps<T>::zero(bits));
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<T> prod{FieldOps<T>::one(bits)};
    for (std::size_t i = 0; i < p; ++i) {
      if (i != j) prod = poly_mul(prod, std::vector<T>{-field<T>(spec.points[i], bits), FieldOps<T>::one(bits)}, FieldOps<T>::zero(bits));
    }
    const T alpha = field<T>(spec.exponents[j], bits);
    for (std::size_t i = 0; i < prod.size(); ++i) B[i] += alpha * prod[i];
  }
  std::vector<T> c(order + 1, FieldOps<T>::zero(bits));
  c[0] = FieldOps<T>::one(bits);
  const long P = static_cast<long>(p);
  for (std::size_t k = 1; k <= order; ++k) {
    const long K = static_cast<long>(k);
    T acc = FieldOps<T>::zero(bits);
    for (long i = 0; i < P; ++i) {
      const long m = i + K - P;
      if (m >= 0) acc -= field<T>(Rational(m), bits) * A[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(m)];
    }
    for (long i = 0; i + 2 <= P; ++i) {
      const long m = i + K - P + 1;
      if (m >= 0) acc -= B[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(m)];
    }
    c[k] = acc / field<T>(Rational(K), bits);
  }
  return c;
}

Rational rpow(const Rational& x, std::size_t e) {
  Rational r(1);
  for (std::size_t i = 0; i < e; ++i) r *= x;
  return r;
}

mpz_class binom(std::size_t n, std::size_t k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Positivity of the moment Hankel matrix by exact symmetric elimination.
bool hankel_positive(const std::vector<Rational>& m) {
  const std::size_t K = (m.size() + 1) / 2;
  std::vector<std::vector<Rational>> H(K, std::vector<Rational>(K));
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) H[i][j] = m[i + j];
  for (std::size_t k = 0; k < K; ++k) {
    if (sgn(H[k][k]) <= 0) return false;
    for (std::size_t i = k + 1; i < K; ++i) {
      const Rational f = H[i][k] / H[k][k];
      for (std::size_t j = k; j < K; ++j) H[i][j] -= f * H[k][j];
    }
  }
  return true;
}

bool hankel_positive(const std::vector<double>& m) {
  const std::size_t K = std::min<std::size_t>((m.size() + 1) / 2, 8);
  std::vector<std::vector<double>> H(K, std::vector<double>(K));
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) H[i][j] = m[i + j];
  for (std::size_t k = 0; k < K; ++k) {
    if (!(H[k][k] > 0.0)) return false;
    for (std::size_t i = k + 1; i < K; ++i) {
      const double f = H[i][k] / H[k][k];
      for (std::size_t j = k; j < K; ++j) H[i][j] -= f * H[k][j];
    }
  }
  return true;
}

double general_weight(const MarkovSpec& s, double x) {
  double w = 1.0;
  for (std::size_t i = 0; i < s.singular_points.size(); ++i)
    w *= std::pow(std::abs(x - s.singular_points[i]), s.singular_exponents[i]);
  return w;
}

// Integrates weight(x) * g(x) over [a, b] split at interior singular points.
// Distances to the segment ends come from the quadrature's complement argument,
// so endpoint singularities are evaluated without cancellation.
template <class G>
double integrate_split(const MarkovSpec& s, G&& g) {
  std::vector<double> cuts{s.a.get_d(), s.b.get_d()};
  for (double p : s.singular_points)
    if (p > cuts[0] && p < s.b.get_d()) cuts.push_back(p);
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> integrator;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double l = cuts[k], r = cuts[k + 1], mid = 0.5 * (l + r);
    auto f = [&](double x, double xc) {
      const double dl = x < mid ? -xc : x - l;
      const double dr = x < mid ? r - x : xc;
      double w = 1.0;
      for (std::size_t i = 0; i < s.singular_points.size(); ++i) {
        const double p = s.singular_points[i];
        const double d = p == l ? dl : (p == r ? dr : std::abs(x - p));
        w *= std::pow(d, s.singular_exponents[i]);
      }
      return w * g(x);
    };
    total += integrator.integrate(f, l, r, 1e-15);
  }
  return total;
}

}  // namespace

void JacobiSpec::validate() const {
  if (points.size() < 2) throw std::invalid_argument("Jacobi function needs at least two points");
  if (points.size() != exponents.size()) throw std::invalid_argument("points and exponents differ in length");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i].re == points[j].re && points[i].im == points[j].im)
        throw std::invalid_argument("coincident branch points");
  ComplexRational sum{0, 0};
  for (const auto& e : exponents) {
    if (e.is_real() && is_integer(e.re)) throw std::invalid_argument("integer exponent " + e.re.get_str());
    sum.re += e.re;
    sum.im += e.im;
  }
  if (sgn(sum.re) != 0 || sgn(sum.im) != 0) throw std::invalid_argument("exponents must sum to zero");
}

MarkovSpec MarkovSpec::unit(Rational a, Rational b) {
  MarkovSpec s;
  s.a = std::move(a);
  s.b = std::move(b);
  return s;
}

MarkovSpec MarkovSpec::arcsine(Rational a, Rational b) {
  MarkovSpec s;
  s.a = std::move(a);
  s.b = std::move(b);
  s.density = DensityKind::endpoint_jacobi;
  s.beta_left = Rational(-1, 2);
  s.beta_right = Rational(-1, 2);
  return s;
}

void MarkovSpec::validate() const {
  if (!(a < b)) throw std::invalid_argument("Markov interval must satisfy a < b");
  switch (density) {
    case DensityKind::polynomial: {
      if (poly.empty()) throw std::invalid_argument("empty polynomial density");
      const double lo = a.get_d(), hi = b.get_d();
      for (int i = 1; i < 1000; ++i) {
        if (density_at(lo + (hi - lo) * i / 1000.0) < 0.0)
          throw std::invalid_argument("polynomial density is negative on the interval");
      }
      break;
    }
    case DensityKind::endpoint_jacobi:
      if (!(beta_left > -1) || !(beta_right > -1)) throw std::invalid_argument("Jacobi exponents must exceed -1");
      if (sgn(mass) <= 0) throw std::invalid_argument("mass must be positive");
      break;
    case DensityKind::general_jacobi:
      if (singular_points.size() != singular_exponents.size())
        throw std::invalid_argument("singular points and exponents differ in length");
      for (double e : singular_exponents)
        if (!(e > -1.0)) throw std::invalid_argument("Jacobi exponents must exceed -1");
      if (sgn(mass) <= 0) throw std::invalid_argument("mass must be positive");
      break;
  }
}

std::vector<Rational> MarkovSpec::exact_moments(std::size_t count) const {
  std::vector<Rational> m(count);
  if (density == DensityKind::polynomial) {
    for (std::size_t j = 0; j < count; ++j) {
      Rational acc(0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const std::size_t e = i + j + 1;
        acc += poly[i] * (rpow(b, e) - rpow(a, e)) / Rational(static_cast<long>(e));
      }
      acc.canonicalize();
      m[j] = acc;
    }
    return m;
  }
  if (density != DensityKind::endpoint_jacobi) throw std::logic_error("moments of this density are not exact");
  // Ratios B(beta+i+1, gamma+1) / B(beta+1, gamma+1) are rational.
  std::vector<Rational> ratio(count + 1);
  ratio[0] = 1;
  for (std::size_t l = 0; l < count; ++l) {
    const Rational num = beta_left + Rational(static_cast<long>(l) + 1);
    const Rational den = beta_left + beta_right + Rational(static_cast<long>(l) + 2);
    ratio[l + 1] = ratio[l] * num / den;
  }
  const Rational width = b - a;
  for (std::size_t j = 0; j < count; ++j) {
    Rational acc(0);
    for (std::size_t i = 0; i <= j; ++i) acc += Rational(binom(j, i)) * rpow(a, j - i) * rpow(width, i) * ratio[i];
    acc *= mass;
    acc.canonicalize();
    m[j] = acc;
  }
  return m;
}

std::vector<double> MarkovSpec::quadrature_moments(std::size_t count) const {
  const double z = integrate_split(*this, [](double) { return 1.0; });
  std::vector<double> m(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double e = static_cast<double>(j);
    m[j] = mass.get_d() * integrate_split(*this, [e](double x) { return std::pow(x, e); }) / z;
  }
  return m;
}

double MarkovSpec::density_at(double x) const {
  const double lo = a.get_d(), hi = b.get_d();
  if (x < lo || x > hi) return 0.0;
  switch (density) {
    case DensityKind::polynomial: {
      double acc = 0.0;
      for (std::size_t i = poly.size(); i-- > 0;) acc = acc * x + poly[i].get_d();
      return acc;
    }
    case DensityKind::endpoint_jacobi: {
      const double bl = beta_left.get_d(), br = beta_right.get_d();
      const double norm = std::pow(hi - lo, bl + br + 1.0) * std::beta(bl + 1.0, br + 1.0);
      return mass.get_d() * std::pow(x - lo, bl) * std::pow(hi - x, br) / norm;
    }
    case DensityKind::general_jacobi: {
      const double z = integrate_split(*this, [](double) { return 1.0; });
      return mass.get_d() * general_weight(*this, x) / z;
    }
  }
  return 0.0;
}

LaurentSeries expand_jacobi(const JacobiSpec& spec, std::size_t order, ScalarKind kind, unsigned bits) {
  spec.validate();
  if (kind == ScalarKind::exact_rational) {
    for (const auto& a : spec.points)
      if (!a.is_real()) throw std::invalid_argument("exact mode requires real rational branch points");
    for (const auto& e : spec.exponents)
      if (!e.is_real()) throw std::invalid_argument("exact mode requires real rational exponents");
    return LaurentSeries(jacobi_recurrence<Rational>(spec, order, 0));
  }
  return LaurentSeries(jacobi_recurrence<BigComplex>(spec, order, bits), bits);
}

LaurentSeries expand_markov(const MarkovSpec& spec, std::size_t order, ScalarKind kind, unsigned bits) {
  spec.validate();
  if (spec.has_exact_moments()) {
    std::vector<Rational> m = spec.exact_moments(order);
    if (!m.empty() && !hankel_positive(m)) throw std::invalid_argument("moment sequence is not positive definite");
    std::vector<Rational> c{Rational(0)};
    c.insert(c.end(), m.begin(), m.end());
    LaurentSeries s(std::move(c));
    return kind == ScalarKind::exact_rational ? s : s.promoted(bits);
  }
  if (kind == ScalarKind::exact_rational) throw std::invalid_argument("density has no exact moments; use big-float-complex");
  std::vector<double> m = spec.quadrature_moments(order);
  if (!m.empty() && !hankel_positive(m)) throw std::invalid_argument("moment sequence is not positive definite");
  std::vector<BigComplex> c{BigComplex(bits)};
  for (double x : m) c.emplace_back(cd(x, 0.0), bits);
  return LaurentSeries(std::move(c), bits);
}

namespace {

void require_same_kind(const LaurentSeries& f, const LaurentSeries& g) {
  if (f.kind() != g.kind())
    throw std::invalid_argument("mixing exact and floating series requires explicit promotion");
}

}  // namespace

LaurentSeries add(const LaurentSeries& f, const LaurentSeries& g) {
  require_same_kind(f, g);
  const std::size_t n = std::min(f.order(), g.order());
  if (f.kind() == ScalarKind::exact_rational) {
    std::vector<Rational> c(n + 1);
    for (std::size_t m = 0; m <= n; ++m) c[m] = f.exact()[m] + g.exact()[m];
    return LaurentSeries(std::move(c));
  }
  std::vector<BigComplex> c;
  for (std::size_t m = 0; m <= n; ++m) c.push_back(f.floating()[m] + g.floating()[m]);
  return LaurentSeries(std::move(c), std::max(f.precision_bits(), g.precision_bits()));
}

namespace {

template <class T>
std::vector<T> cauchy_product(const std::vector<T>& a, const std::vector<T>& b, std::size_t n, const T& zero) {
  std::vector<T> c(n + 1, zero);
  for (std::size_t m = 0; m <= n; ++m)
    for (std::size_t i = 0; i <= m; ++i) c[m] += a[i] * b[m - i];
  return c;
}

}  // namespace

LaurentSeries mul(const LaurentSeries& f, const LaurentSeries& g) {
  require_same_kind(f, g);
  const std::size_t n = std::min(f.order(), g.order());
  if (f.kind() == ScalarKind::exact_rational) return LaurentSeries(cauchy_product(f.exact(), g.exact(), n, Rational(0)));
  const unsigned bits = std::max(f.precision_bits(), g.precision_bits());
  return LaurentSeries(cauchy_product(f.floating(), g.floating(), n, BigComplex(bits)), bits);
}

LaurentSeries scale(const LaurentSeries& f, const Rational& s) {
  if (f.kind() == ScalarKind::exact_rational) {
    std::vector<Rational> c = f.exact();
    for (auto& x : c) x *= s;
    return LaurentSeries(std::move(c));
  }
  return scale(f, BigComplex(s, f.precision_bits()));
}

LaurentSeries scale(const LaurentSeries& f, const BigComplex& s) {
  if (f.kind() != ScalarKind::big_float_complex)
    throw std::invalid_argument("scaling an exact series by a float requires explicit promotion");
  std::vector<BigComplex> c = f.floating();
  for (auto& x : c) x *= s;
  return LaurentSeries(std::move(c), f.precision_bits());
}

namespace {

template <class T>
PolySeriesProduct<T> poly_times_series(const std::vector<T>& p, const std::vector<T>& f, const T& zero,
                                       std::size_t order, const std::function<LaurentSeries(std::vector<T>)>& make) {
  const std::size_t d = p.empty() ? 0 : p.size() - 1;
  if (order < d) throw std::invalid_argument("series order below polynomial degree");
  PolySeriesProduct<T> out{std::vector<T>(d + 1, zero), make(std::vector<T>{zero})};
  // Coefficient of z^e, e in [-(order-d), d], is sum_j p_j f_{j-e}.
  for (std::size_t e = 0; e <= d; ++e) {
    T acc = zero;
    for (std::size_t j = e; j <= d; ++j) acc += p[j] * f[j - e];
    out.polynomial_part[e] = acc;
  }
  std::vector<T> tail(order - d + 1, zero);
  for (std::size_t m = 1; m <= order - d; ++m) {
    T acc = zero;
    for (std::size_t j = 0; j <= d; ++j) acc += p[j] * f[j + m];
    tail[m] = acc;
  }
  out.tail = make(std::move(tail));
  return out;
}

}  // namespace

PolySeriesProduct<Rational> polynomial_multiply(const std::vector<Rational>& p, const LaurentSeries& f) {
  return poly_times_series<Rational>(p, f.exact(), Rational(0), f.order(),
                                     [](std::vector<Rational> c) { return LaurentSeries(std::move(c)); });
}

PolySeriesProduct<BigComplex> polynomial_multiply(const std::vector<BigComplex>& p, const LaurentSeries& f) {
  const unsigned bits = f.precision_bits();
  return poly_times_series<BigComplex>(p, f.floating(), BigComplex(bits), f.order(),
                                       [bits](std::vector<BigComplex> c) { return LaurentSeries(std::move(c), bits); });
}

json scalar_to_json(const Rational& q) { return json::array({q.get_num().get_str(), q.get_den().get_str()}); }

json scalar_to_json(const BigComplex& z) { return json::array({z.re.to_string(), z.im.to_string()}); }

Rational rational_from_json(const json& j) {
  if (j.is_array() && j.size() == 2) {
    Rational q(mpz_class(j[0].get<std::string>()), mpz_class(j[1].get<std::string>()));
    q.canonicalize();
    return q;
  }
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return Rational(j.get<double>());
  throw std::invalid_argument("bad rational value: " + j.dump());
}

BigComplex big_complex_from_json(const json& j, unsigned bits) {
  auto part = [bits](const json& x) {
    return x.is_string() ? BigFloat::from_string(x.get<std::string>(), bits) : BigFloat(x.get<double>(), bits);
  };
  if (j.is_array() && j.size() == 2) return {part(j[0]), part(j[1])};
  return {part(j), BigFloat(bits)};
}

json poly_to_json(const std::vector<Rational>& p) {
  json a = json::array();
  for (const auto& x : p) a.push_back(scalar_to_json(x));
  return a;
}

json poly_to_json(const std::vector<BigComplex>& p) {
  json a = json::array();
  for (const auto& x : p) a.push_back(scalar_to_json(x));
  return a;
}

json to_json(const LaurentSeries& f) {
  json j;
  j["kind"] = to_string(f.kind());
  if (f.kind() == ScalarKind::exact_rational) {
    j["coeffs"] = poly_to_json(f.exact());
  } else {
    j["precision_bits"] = f.precision_bits();
    j["coeffs"] = poly_to_json(f.floating());
  }
  j["order"] = f.order();
  return j;
}

LaurentSeries series_from_json(const json& j) {
  const ScalarKind kind = scalar_kind_from_string(j.at("kind").get<std::string>());
  LaurentSeries out;
  if (kind == ScalarKind::exact_rational) {
    std::vector<Rational> c;
    for (const auto& x : j.at("coeffs")) c.push_back(rational_from_json(x));
    out = LaurentSeries(std::move(c));
  } else {
    const unsigned bits = j.at("precision_bits").get<unsigned>();
    std::vector<BigComplex> c;
    for (const auto& x : j.at("coeffs")) c.push_back(big_complex_from_json(x, bits));
    out = LaurentSeries(std::move(c), bits);
  }
  if (j.contains("order") && j["order"].get<std::size_t>() != out.order())
    throw std::invalid_argument("series order does not match coefficient count");
  return out;
}

ComplexRational complex_rational_from_json(const json& j) {
  if (j.is_array() && j.size() == 2) return {rational_from_json(j[0]), rational_from_json(j[1])};
  if (j.is_object()) return {rational_from_json(j.at("re")), rational_from_json(j.value("im", json(0)))};
  return {rational_from_json(j), Rational(0)};
}

JacobiSpec jacobi_spec_from_json(const json& j) {
  JacobiSpec s;
  for (const auto& p : j.at("points")) s.points.push_back(complex_rational_from_json(p));
  for (const auto& e : j.at("exponents")) s.exponents.push_back(complex_rational_from_json(e));
  return s;
}

MarkovSpec markov_spec_from_json(const json& j) {
  MarkovSpec s;
  const auto& iv = j.at("interval");
  s.a = rational_from_json(iv.at(0));
  s.b = rational_from_json(iv.at(1));
  const std::string kind = j.value("density", std::string("polynomial"));
  if (kind == "polynomial") {
    s.density = DensityKind::polynomial;
    if (j.contains("poly")) {
      s.poly.clear();
      for (const auto& c : j["poly"]) s.poly.push_back(rational_from_json(c));
    }
  } else if (kind == "arcsine") {
    s = MarkovSpec::arcsine(s.a, s.b);
  } else if (kind == "endpoint-jacobi") {
    s.density = DensityKind::endpoint_jacobi;
    s.beta_left = rational_from_json(j.at("beta_left"));
    s.beta_right = rational_from_json(j.at("beta_right"));
  } else if (kind == "general-jacobi") {
    s.density = DensityKind::general_jacobi;
    s.singular_points = j.at("singular_points").get<std::vector<double>>();
    s.singular_exponents = j.at("singular_exponents").get<std::vector<double>>();
  } else {
    throw std::invalid_argument("unknown density kind: " + kind);
  }
  if (j.contains("mass")) s.mass = rational_from_json(j["mass"]);
  return s;
}

}  // namespace hpl
