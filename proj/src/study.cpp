#include "hpl/study.hpp"

#include <Eigen/Core>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/version.hpp>
#include <gmp.h>
#include <mpfr.h>
#include <omp.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

namespace hpl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j) {
  if (j.is_array()) return {j.at(0).get<double>(), j.at(1).get<double>()};
  return {j.get<double>(), 0.0};
}

BigComplex to_big(const Rational& q, unsigned bits) { return BigComplex(q, bits); }
BigComplex to_big(const BigComplex& z, unsigned) { return z; }

// Coefficients promoted once so repeated evaluations stay at working precision.
class BigPoly {
 public:
  template <class T>
  BigPoly(const std::vector<T>& c, unsigned bits) : bits_(bits) {
    for (const auto& x : c) c_.push_back(to_big(x, bits));
  }
  cd operator()(cd z) const { return big(BigComplex(z, bits_)).to_cd(); }
  BigComplex big(const BigComplex& z) const {
    BigComplex acc(bits_);
    for (std::size_t j = c_.size(); j-- > 0;) acc = acc * z + c_[j];
    return acc;
  }

 private:
  unsigned bits_;
  std::vector<BigComplex> c_;
};

template <class T>
unsigned working_bits(const std::vector<T>& c) {
  unsigned b = kDefaultPrecisionBits;
  for (const auto& x : c) b = std::max(b, FieldOps<T>::precision(x));
  return b;
}

template <class T>
std::vector<BigPoly> big_polys(const HPFirst<T>& hp) {
  const unsigned bits = working_bits(hp.q0);
  std::vector<BigPoly> r{BigPoly(hp.q0, bits)};
  for (const auto& q : hp.q) r.emplace_back(q, bits);
  return r;
}

std::vector<double> breakpoints(const MarkovSpec& m) {
  std::vector<double> b{m.a.get_d(), m.b.get_d()};
  if (m.density == DensityKind::general_jacobi)
    for (double s : m.singular_points)
      if (s > b.front() && s < b.back()) b.push_back(s);
  std::sort(b.begin(), b.end());
  return b;
}

template <class F>
cd integrate_markov(const MarkovSpec& m, F&& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const auto b = breakpoints(m);
  cd acc = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    acc += ts.integrate([&](double x) { return f(x) * m.density_at(x); }, b[i], b[i + 1], 1e-14);
  return acc;
}

// f_k on a circle at working precision: Laurent series in 1/(z - c) from exact
// moments for Markov components, exp of summed logarithms for Jacobi ones.
// Components without either fall back to double evaluation.
class ContourFunctions {
 public:
  ContourFunctions(const SystemSpec& system, cd center, double radius, unsigned bits)
      : system_(system), center_(center), bits_(bits) {
    const Rational c0(center.real());
    for (std::size_t k = 0; k < system.size(); ++k) {
      Entry e;
      if (system.is_markov() && system.markov[k].has_exact_moments() && center.imag() == 0.0) {
        double reach = 0.0;
        for (const cd& p : system.support_points(k)) reach = std::max(reach, std::abs(p - center));
        const double terms = std::ceil(bits * std::log(2.0) / std::log(radius / reach)) + 8.0;
        if (terms <= 4000.0) {
          const auto m = system.markov[k].exact_moments(static_cast<std::size_t>(terms));
          for (std::size_t j = 0; j < m.size(); ++j) {
            Rational acc(0);
            if (sgn(c0) == 0) {
              acc = m[j];
            } else {
              mpz_class binom(1);
              Rational pw(1);  // (-c)^(j-i), built from i = j downwards
              for (std::size_t i = j + 1; i-- > 0;) {
                acc += Rational(binom) * m[i] * pw;
                pw *= -c0;
                binom = binom * static_cast<unsigned long>(i) / static_cast<unsigned long>(j - i + 1);
              }
            }
            e.moments.emplace_back(acc, bits);
          }
          e.kind = Entry::Kind::series;
        }
      } else if (!system.is_markov()) {
        for (const auto& p : system.jacobi[k].points) e.points.push_back(p.to_big(bits) - BigComplex(center, bits));
        for (const auto& a : system.jacobi[k].exponents) e.exponents.push_back(a.to_big(bits));
        e.kind = Entry::Kind::jacobi;
      }
      entries_.push_back(std::move(e));
    }
  }

  BigComplex operator()(std::size_t k, cd z) const {
    const Entry& e = entries_[k];
    const BigComplex w(z - center_, bits_);
    switch (e.kind) {
      case Entry::Kind::series: {
        const BigComplex u = BigComplex(Rational(1), bits_) / w;
        BigComplex acc(bits_);
        for (std::size_t j = e.moments.size(); j-- > 0;) acc = acc * u + e.moments[j];
        return acc * u;
      }
      case Entry::Kind::jacobi: {
        const BigComplex one(Rational(1), bits_);
        BigComplex acc(bits_);
        for (std::size_t i = 0; i < e.points.size(); ++i) acc += e.exponents[i] * log(one - e.points[i] / w);
        return exp(acc);
      }
      case Entry::Kind::fallback:
        break;
    }
    return BigComplex(system_.evaluate(k, z, center_), bits_);
  }

 private:
  struct Entry {
    enum class Kind { series, jacobi, fallback } kind = Kind::fallback;
    std::vector<BigComplex> moments;
    std::vector<BigComplex> points;
    std::vector<BigComplex> exponents;
  };
  const SystemSpec& system_;
  cd center_;
  unsigned bits_;
  std::vector<Entry> entries_;
};

json markov_json(const MarkovSpec& m) {
  json j;
  j["interval"] = json::array({scalar_to_json(m.a), scalar_to_json(m.b)});
  switch (m.density) {
    case DensityKind::polynomial: {
      j["density"] = "polynomial";
      json p = json::array();
      for (const auto& c : m.poly) p.push_back(scalar_to_json(c));
      j["poly"] = p;
      break;
    }
    case DensityKind::endpoint_jacobi:
      j["density"] = "endpoint-jacobi";
      j["beta_left"] = scalar_to_json(m.beta_left);
      j["beta_right"] = scalar_to_json(m.beta_right);
      j["mass"] = scalar_to_json(m.mass);
      break;
    case DensityKind::general_jacobi:
      j["density"] = "general-jacobi";
      j["singular_points"] = m.singular_points;
      j["singular_exponents"] = m.singular_exponents;
      j["mass"] = scalar_to_json(m.mass);
      break;
  }
  return j;
}

json complex_rational_json(const ComplexRational& z) {
  return json{{"re", scalar_to_json(z.re)}, {"im", scalar_to_json(z.im)}};
}

std::string write_file(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return sha256_hex(bytes);
}

std::string degree_label(const DegreeVector& d) {
  if (std::all_of(d.d.begin(), d.d.end(), [&](int x) { return x == d.d.front(); })) return std::to_string(d.d.front());
  std::string s;
  for (std::size_t k = 0; k < d.d.size(); ++k) s += (k ? "-" : "") + std::to_string(d.d[k]);
  return s;
}

bool is_diagonal(const DegreeVector& d) {
  return std::all_of(d.d.begin(), d.d.end(), [&](int x) { return x == d.d.front(); });
}

}  // namespace

// ---------------------------------------------------------------------------

void SystemSpec::validate() const {
  if (markov.empty() == jacobi.empty()) throw std::invalid_argument("system needs either Markov or Jacobi components");
  for (const auto& m : markov) m.validate();
  for (const auto& j : jacobi) j.validate();
  for (std::size_t i = 0; i < markov.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (!(markov[i].b < markov[j].a || markov[j].b < markov[i].a))
        throw std::invalid_argument("Markov supports must be pairwise disjoint");
}

std::vector<LaurentSeries> SystemSpec::expand(std::size_t order, ScalarKind kind, unsigned bits) const {
  std::vector<LaurentSeries> r;
  for (const auto& m : markov) r.push_back(expand_markov(m, order, kind, bits));
  for (const auto& j : jacobi) r.push_back(expand_jacobi(j, order, kind, bits));
  return r;
}

cd SystemSpec::evaluate(std::size_t k, cd z, cd center) const {
  if (is_markov()) {
    const auto& m = markov.at(k);
    if (z.imag() == 0.0 && z.real() >= m.a.get_d() && z.real() <= m.b.get_d())
      throw std::invalid_argument("Markov function evaluated on its support");
    return integrate_markov(m, [&](double x) { return 1.0 / (z - x); });
  }
  const auto& J = jacobi.at(k);
  const cd w = z - center;
  cd acc = 0.0;
  for (std::size_t i = 0; i < J.points.size(); ++i) {
    const cd a = J.points[i].to_cd() - center;
    if (std::abs(a) >= std::abs(w)) throw std::invalid_argument("point inside the Jacobi continuation disk");
    acc += J.exponents[i].to_cd() * std::log(1.0 - a / w);
  }
  return std::exp(acc);
}

std::vector<cd> SystemSpec::support_points(std::size_t k) const {
  if (is_markov()) return {cd(markov.at(k).a.get_d()), cd(markov.at(k).b.get_d())};
  std::vector<cd> r;
  for (const auto& p : jacobi.at(k).points) r.push_back(p.to_cd());
  return r;
}

IntervalSet SystemSpec::support_set(std::size_t k) const {
  if (!is_markov()) throw std::invalid_argument("interval supports exist for Markov components only");
  return IntervalSet({Interval{markov.at(k).a.get_d(), markov.at(k).b.get_d()}});
}

json to_json(const SystemSpec& s) {
  json j;
  if (s.is_markov()) {
    j["markov"] = json::array();
    for (const auto& m : s.markov) j["markov"].push_back(markov_json(m));
  } else {
    j["jacobi"] = json::array();
    for (const auto& J : s.jacobi) {
      json c{{"points", json::array()}, {"exponents", json::array()}};
      for (const auto& p : J.points) c["points"].push_back(complex_rational_json(p));
      for (const auto& e : J.exponents) c["exponents"].push_back(complex_rational_json(e));
      j["jacobi"].push_back(c);
    }
  }
  return j;
}

SystemSpec system_spec_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("system must be an object");
  SystemSpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "markov") {
      for (const auto& m : value) s.markov.push_back(markov_spec_from_json(m));
    } else if (key == "jacobi") {
      for (const auto& J : value) s.jacobi.push_back(jacobi_spec_from_json(J));
    } else {
      throw std::invalid_argument("unknown system key: " + key);
    }
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------

void StudyConfig::validate() const {
  system.validate();
  if (!system.is_markov()) throw std::invalid_argument("the study harness needs Markov components");
  if (scalar == ScalarKind::exact_rational)
    for (const auto& m : system.markov)
      if (!m.has_exact_moments()) throw std::invalid_argument("exact mode needs densities with exact moments");
  if (schedule.empty()) throw std::invalid_argument("degree schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    schedule[i].validate();
    if (schedule[i].size() != system.size()) throw std::invalid_argument("degree vector length differs from s");
    if (schedule[i].d.front() < 1) throw std::invalid_argument("first degree must be positive");
    if (i > 0) {
      if (schedule[i].total() <= schedule[i - 1].total()) throw std::invalid_argument("degree schedule must be strictly increasing");
      for (std::size_t k = 0; k < system.size(); ++k)
        if (schedule[i].d[k] < schedule[i - 1].d[k]) throw std::invalid_argument("degree schedule must be strictly increasing");
    }
  }
  double reach = 0.0;
  for (std::size_t k = 0; k < system.size(); ++k)
    for (const cd& p : system.support_points(k)) reach = std::max(reach, std::abs(p));
  if (!(probes.radius > reach)) throw std::invalid_argument("probe circle must lie strictly outside the convex hull of the supports");
  if (probes.count < 2) throw std::invalid_argument("need at least two probes");
  if (grid < 50) throw std::invalid_argument("grid resolution must be at least 50 per interval");
  if (precision_bits < 53) throw std::invalid_argument("precision must be at least 53 bits");
  if (workers < 1) throw std::invalid_argument("workers must be positive");
}

json StudyConfig::canonical() const {
  json j;
  j["system"] = to_json(system);
  j["degrees"] = json::array();
  for (const auto& d : schedule) j["degrees"].push_back(d.d);
  j["scalar"] = to_string(scalar);
  j["precision_bits"] = precision_bits;
  j["grid"] = grid;
  j["probes"] = json{{"radius", probes.radius}, {"count", probes.count}};
  j["seed"] = seed;
  json parts_j = json::array();
  if (parts.zero_distribution) parts_j.push_back("zero_distribution");
  if (parts.leading_coefficients) parts_j.push_back("leading_coefficients");
  if (parts.remainder) parts_j.push_back("remainder");
  if (parts.orthogonality) parts_j.push_back("orthogonality");
  j["parts"] = parts_j;
  if (!scurve_points.empty()) {
    json pts = json::array();
    for (const cd& z : scurve_points) pts.push_back(complex_json(z));
    j["scurve"] = json{{"points", pts}};
  }
  return j;
}

std::string StudyConfig::study_id() const { return sha256_hex(canonical().dump()); }

StudyConfig study_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("configuration must be a JSON object");
  static const std::set<std::string> known{"system", "degrees", "scalar", "precision_bits", "grid", "probes",
                                           "seed", "workers", "parts", "scurve", "output"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw std::invalid_argument("unknown configuration key: " + key);
  StudyConfig c;
  try {
    c.system = system_spec_from_json(j.at("system"));
    for (const auto& d : j.at("degrees")) {
      if (d.is_number_integer()) {
        c.schedule.push_back(DegreeVector::diagonal(d.get<int>(), c.system.size()));
      } else {
        c.schedule.push_back(DegreeVector{d.get<std::vector<int>>()});
      }
    }
    if (j.contains("scalar")) c.scalar = scalar_kind_from_string(j["scalar"].get<std::string>());
    c.precision_bits = j.value("precision_bits", c.precision_bits);
    c.grid = j.value("grid", c.grid);
    if (j.contains("probes")) {
      c.probes.radius = j["probes"].value("radius", c.probes.radius);
      c.probes.count = j["probes"].value("count", c.probes.count);
    }
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    if (j.contains("parts")) {
      c.parts = StudyParts{false, false, false, false};
      for (const auto& p : j["parts"]) {
        const std::string s = p.get<std::string>();
        if (s == "zero_distribution") c.parts.zero_distribution = true;
        else if (s == "leading_coefficients") c.parts.leading_coefficients = true;
        else if (s == "remainder") c.parts.remainder = true;
        else if (s == "orthogonality") c.parts.orthogonality = true;
        else throw std::invalid_argument("unknown study part: " + s);
      }
    }
    if (j.contains("scurve"))
      for (const auto& p : j["scurve"].at("points")) c.scurve_points.push_back(complex_from_json(p));
    if (j.contains("output")) c.output = j["output"].get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed configuration: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

template <class T>
OrthogonalityResult check_orthogonality(const HPFirst<T>& hp, const SystemSpec& system, const Circle& contour) {
  const std::size_t s = system.size();
  if (hp.q.size() != s) throw std::invalid_argument("Hermite-Pade data and system differ in s");
  for (std::size_t k = 0; k < s; ++k) {
    const auto pts = system.support_points(k);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const cd& p : pts) {
      lo = std::min(lo, std::abs(p - contour.center));
      hi = std::max(hi, std::abs(p - contour.center));
    }
    if (system.is_markov()) {
      // Closest point of the interval to the center.
      const double a = pts[0].real(), b = pts[1].real();
      const double x = std::clamp(contour.center.real(), a, b);
      lo = std::abs(cd(x) - contour.center);
    }
    if (lo <= contour.radius && contour.radius <= hi) throw std::invalid_argument("contour intersects a support");
    if (hi >= contour.radius) throw std::invalid_argument("contour does not enclose every support");
  }
  const std::size_t N = static_cast<std::size_t>(hp.degrees.total());
  const auto polys = big_polys(hp);
  const unsigned bits = working_bits(hp.q0);
  const ContourFunctions f(system, contour.center, contour.radius, bits);

  OrthogonalityResult out;
  std::vector<cd> previous;
  for (std::size_t M = 64; M <= (std::size_t{1} << 14); M *= 2) {
    std::vector<cd> I(N, 0.0);
    std::vector<double> scale(N, 0.0);
    for (std::size_t m = 0; m < M; ++m) {
      const cd e = std::polar(1.0, 2.0 * kPi * static_cast<double>(m) / static_cast<double>(M));
      const cd z = contour.center + contour.radius * e;
      const cd dz = cd(0.0, 1.0) * contour.radius * e * (2.0 * kPi / static_cast<double>(M));
      const BigComplex Z(z, bits);
      BigComplex Rb = polys[0].big(Z);
      double mag = std::abs(Rb.to_cd());
      for (std::size_t k = 0; k < s; ++k) {
        const BigComplex term = polys[k + 1].big(Z) * f(k, z);
        Rb += term;
        mag += std::abs(term.to_cd());
      }
      const cd R = Rb.to_cd();
      cd zj = 1.0;
      for (std::size_t j = 0; j < N; ++j) {
        I[j] += R * zj * dz;
        scale[j] = std::max(scale[j], mag * std::abs(zj) * 2.0 * kPi * contour.radius);
        zj *= z;
      }
    }
    out.nodes = M;
    out.scale = scale;
    out.residual.assign(N, 0.0);
    for (std::size_t j = 0; j < N; ++j) out.residual[j] = std::abs(I[j]);
    if (!previous.empty()) {
      bool agree = true;
      for (std::size_t j = 0; j < N; ++j) agree = agree && std::abs(I[j] - previous[j]) <= 1e-12 * scale[j];
      if (agree) {
        out.converged = true;
        break;
      }
    }
    previous = I;
  }

  if (system.is_markov()) {
    bool exact = true;
    for (const auto& m : system.markov) exact = exact && m.has_exact_moments();
    if (exact) {
      std::vector<std::vector<Rational>> moments;
      std::size_t deg = 0;
      for (const auto& q : hp.q) deg = std::max(deg, q.size());
      for (const auto& m : system.markov) moments.push_back(m.exact_moments(deg + N));
      for (std::size_t j = 0; j < N; ++j) {
        if constexpr (std::is_same_v<T, Rational>) {
          Rational acc(0);
          for (std::size_t k = 0; k < s; ++k)
            for (std::size_t i = 0; i < hp.q[k].size(); ++i) acc += hp.q[k][i] * moments[k][i + j];
          out.real_axis.push_back(std::abs(acc.get_d()));
        } else {
          BigComplex acc(bits);
          for (std::size_t k = 0; k < s; ++k)
            for (std::size_t i = 0; i < hp.q[k].size(); ++i) acc += hp.q[k][i] * BigComplex(moments[k][i + j], bits);
          out.real_axis.push_back(std::abs(acc.to_cd()));
        }
      }
    }
  }
  return out;
}

template <class T>
std::vector<cd> remainder_values(const HPFirst<T>& hp, const SystemSpec& system, const std::vector<cd>& zs) {
  if (!system.is_markov()) throw std::invalid_argument("remainder evaluation needs Markov components");
  for (const cd& z : zs)
    for (const auto& m : system.markov)
      if (z.imag() == 0.0 && z.real() >= m.a.get_d() && z.real() <= m.b.get_d())
        throw std::invalid_argument("remainder evaluated on a support");

  // Away from the hull, sum q_k f_k is formed directly from exact moments. It
  // cancels down to |R|, so precision is doubled until two evaluations agree.
  bool exact = true;
  double lo = system.markov.front().a.get_d(), hi = system.markov.front().b.get_d();
  for (const auto& m : system.markov) {
    exact = exact && m.has_exact_moments();
    lo = std::min(lo, m.a.get_d());
    hi = std::max(hi, m.b.get_d());
  }
  const cd center(0.5 * (lo + hi), 0.0);
  double nearest = std::numeric_limits<double>::infinity();
  for (const cd& z : zs) nearest = std::min(nearest, std::abs(z - center));

  std::vector<cd> out(zs.size());
  std::vector<bool> done(zs.size(), false);
  if (exact && nearest >= 0.65 * (hi - lo)) {
    auto direct = [&](unsigned bits) {
      const ContourFunctions f(system, center, nearest, bits);
      const BigPoly q0(hp.q0, bits);
      std::vector<BigPoly> q;
      for (const auto& c : hp.q) q.emplace_back(c, bits);
      std::vector<cd> r;
      for (const cd& z : zs) {
        const BigComplex w(z, bits);
        BigComplex acc = q0.big(w);
        for (std::size_t k = 0; k < system.size(); ++k) acc += q[k].big(w) * f(k, z);
        r.push_back(acc.to_cd());
      }
      return r;
    };
    unsigned bits = std::max(working_bits(hp.q0), 128u);
    std::vector<cd> prev = direct(bits);
    for (bits *= 2; bits <= 1024; bits *= 2) {
      const std::vector<cd> cur = direct(bits);
      bool all = true;
      for (std::size_t i = 0; i < zs.size(); ++i) {
        if (!done[i] && std::abs(cur[i] - prev[i]) <= 1e-15 * std::abs(cur[i])) {
          out[i] = cur[i];
          done[i] = true;
        }
        all = all && done[i];
      }
      if (all) return out;
      prev = cur;
    }
  }

  const auto polys = big_polys(hp);
  const int power = hp.degrees.total() - 1;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (done[i]) continue;
    const cd z = zs[i];
    cd acc = 0.0;
    for (std::size_t k = 0; k < system.size(); ++k)
      acc += integrate_markov(system.markov[k], [&](double x) { return polys[k + 1](x) * std::pow(x / z, power) / (z - x); });
    out[i] = acc;
  }
  return out;
}

template <class T>
cd remainder_value(const HPFirst<T>& hp, const SystemSpec& system, cd z) {
  return remainder_values(hp, system, {z}).front();
}

template OrthogonalityResult check_orthogonality(const HPFirst<Rational>&, const SystemSpec&, const Circle&);
template OrthogonalityResult check_orthogonality(const HPFirst<BigComplex>&, const SystemSpec&, const Circle&);
template cd remainder_value(const HPFirst<Rational>&, const SystemSpec&, cd);
template cd remainder_value(const HPFirst<BigComplex>&, const SystemSpec&, cd);
template std::vector<cd> remainder_values(const HPFirst<Rational>&, const SystemSpec&, const std::vector<cd>&);
template std::vector<cd> remainder_values(const HPFirst<BigComplex>&, const SystemSpec&, const std::vector<cd>&);

// ---------------------------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

json environment_manifest(const StudyConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  j["compiler"] = std::string(__VERSION__);
  j["gmp"] = std::string(gmp_version);
  j["mpfr"] = std::string(mpfr_get_version());
  j["boost"] = std::string(BOOST_LIB_VERSION);
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  j["openssl"] = std::string(OPENSSL_VERSION_TEXT);
  j["scalar"] = to_string(cfg.scalar);
  j["precision_bits"] = cfg.precision_bits;
  j["seed"] = cfg.seed;
  return j;
}

namespace {

struct EquilibriumData {
  EquilibriumSolution solution;
  std::vector<double> masses;
};

struct DegreeOutcome {
  std::vector<ZeroRow> zero_rows;
  std::vector<LeadingRow> leading_rows;
  std::vector<RemainderRow> remainder_rows;
  std::optional<RemainderSummary> summary;
  std::vector<OrthogonalityRow> orthogonality_rows;
  std::vector<StageFailure> failures;
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::vector<std::vector<double>> zeros;  // per component
};

std::vector<double> masses_of(const DegreeVector& d) {
  std::vector<double> t;
  for (int x : d.d) t.push_back(static_cast<double>(x) / static_cast<double>(d.d.front()));
  return t;
}

json roots_json(const RootResult& r) {
  json j{{"max_residual", r.max_residual}, {"roots", json::array()}};
  for (const auto& z : r.exact) j["roots"].push_back(json::array({z.re.to_string(), z.im.to_string()}));
  return j;
}

bool on_interval(cd z, const Interval& I) { return std::abs(z.imag()) <= 1e-8 && I.contains(z.real(), 1e-12); }

template <class T>
DegreeOutcome run_degree(const StudyConfig& cfg, const DegreeVector& d, const EquilibriumData& eq, const fs::path& root) {
  DegreeOutcome out;
  const int n = d.d.front();
  const std::size_t s = cfg.system.size();
  const std::string label = degree_label(d);
  const fs::path raw = fs::path("raw") / label;
  const unsigned bits = cfg.precision_bits;
  auto persist = [&](const std::string& name, const std::string& bytes) {
    const std::string rel = (raw / name).generic_string();
    std::string hash = sha256_hex(bytes);
    if (!root.empty()) write_file(root / rel, bytes);
    out.artifacts.emplace_back(rel, hash);
    return hash;
  };
  auto fail = [&](const std::string& stage, const std::exception& e) { out.failures.push_back({n, stage, e.what()}); };

  const std::vector<cd> probes = circle_probes(cfg.probes.radius, cfg.probes.count);
  const bool second = cfg.parts.zero_distribution && is_diagonal(d);
  std::vector<LaurentSeries> series;
  try {
    std::size_t order = required_order_first_kind(d);
    if (second) order = std::max(order, required_order_second_kind(n, s));
    series = cfg.system.expand(order, cfg.scalar, bits);
    json sj = json::array();
    for (const auto& f : series) sj.push_back(to_json(f));
    persist("series.json", sj.dump(1));
  } catch (const std::exception& e) {
    fail("series", e);
    return out;
  }

  HPFirst<T> hp;
  std::string hp_hash;
  try {
    hp = normalize(solve_first_kind<T>(series, d), NormalizationPolicy::unit_c1);
    hp_hash = persist("hp_first.json", to_json(hp).dump(1));
  } catch (const std::exception& e) {
    fail("first_kind", e);
    return out;
  }

  out.zeros.assign(s, {});
  if (cfg.parts.zero_distribution) {
    try {
      json rj = json::array();
      std::vector<DiscreteMeasure> mu(s);
      std::vector<RootResult> rr;
      for (std::size_t k = 0; k < s; ++k) {
        rr.push_back(roots(hp.q[k], bits));
        rj.push_back(roots_json(rr.back()));
        for (const cd& z : rr.back().roots) mu[k].atoms.emplace_back(z, 1.0 / n);
      }
      const std::string h = persist("roots_first.json", rj.dump(1));
      for (std::size_t k = 0; k < s; ++k) {
        const IntervalSet F = cfg.system.support_set(k);
        const auto dr = discrepancy(mu[k], eq.solution.components[k], probes, &F);
        ZeroRow row{n, "first", k, 0, dr.kolmogorov.at(0), dr.sup_cauchy_error, rr[k].max_residual, h};
        for (const cd& z : rr[k].roots) {
          if (on_interval(z, F.parts[0])) ++row.zeros_in_interval;
          out.zeros[k].push_back(z.real());
        }
        out.zero_rows.push_back(row);
      }
    } catch (const std::exception& e) {
      fail("first_kind_zeros", e);
    }
    if (second) {
      try {
        const auto hp2 = solve_second_kind<T>(series, n);
        persist("hp_second.json", to_json(hp2).dump(1));
        const RootResult rr = roots(hp2.P, bits);
        const std::string h = persist("roots_second.json", roots_json(rr).dump(1));
        DiscreteMeasure nu;
        for (const cd& z : rr.roots) nu.atoms.emplace_back(z, 1.0 / n);
        double sup = 0.0;
        for (const cd& z : probes) {
          cd target = 0.0;
          for (const auto& c : eq.solution.components) target += cauchy_transform(c, z);
          sup = std::max(sup, std::abs(cauchy_transform(nu, z) - target));
        }
        for (std::size_t k = 0; k < s; ++k) {
          const IntervalSet F = cfg.system.support_set(k);
          ZeroRow row{n, "second", k, 0, kolmogorov(nu, eq.solution.components[k], F.parts[0]), sup, rr.max_residual, h};
          for (const cd& z : rr.roots) row.zeros_in_interval += on_interval(z, F.parts[0]);
          out.zero_rows.push_back(row);
        }
      } catch (const std::exception& e) {
        fail("second_kind", e);
      }
    }
  }

  if (cfg.parts.leading_coefficients) {
    if (hp.normalization_fallback) {
      out.failures.push_back({n, "leading_coefficients", "c_1 vanishes; degree skipped"});
      for (std::size_t k = 0; k < s; ++k) out.leading_rows.push_back({n, k, 0.0, 0.0, true, hp_hash});
    } else {
      for (std::size_t k = 0; k < s; ++k) {
        const double c = magnitude(hp.leading(k));
        const double target = eq.solution.w[k] - eq.solution.w[0];
        out.leading_rows.push_back({n, k, std::log(c) / n, target, !(c > 0.0), hp_hash});
      }
    }
  }

  if (cfg.parts.remainder) {
    try {
      std::vector<double> rate, U;
      bool vanishes = true;
      const auto values = remainder_values(hp, cfg.system, probes);
      for (std::size_t i = 0; i < probes.size(); ++i) {
        const cd z = probes[i], R = values[i];
        vanishes = vanishes && R == cd(0.0);
        rate.push_back(std::log(std::abs(R)) / n);
        double u = 0.0;
        for (const auto& c : eq.solution.components) u += potential(c, z);
        U.push_back(u);
      }
      if (vanishes) throw std::runtime_error("remainder vanishes identically; rational input is excluded from the remainder study");
      RemainderSummary sum{n, 0.0, 0.0};
      for (std::size_t a = 0; a < probes.size(); ++a) {
        for (std::size_t b = 0; b < probes.size(); ++b) {
          const double dr = rate[a] - rate[b];
          sum.max_stated = std::max(sum.max_stated, std::abs(dr - (U[b] - U[a])));
          sum.max_sign_corrected = std::max(sum.max_sign_corrected, std::abs(dr - (U[a] - U[b])));
        }
        out.remainder_rows.push_back({n, a, probes[a], rate[a], U[a], std::abs((rate[a] - rate[0]) - (U[0] - U[a])),
                                      std::abs((rate[a] - rate[0]) - (U[a] - U[0])), hp_hash});
      }
      out.summary = sum;
    } catch (const std::exception& e) {
      fail("remainder", e);
    }
  }

  if (cfg.parts.orthogonality) {
    try {
      const auto o = check_orthogonality(hp, cfg.system, Circle{0.0, cfg.probes.radius});
      if (!o.converged) out.failures.push_back({n, "orthogonality", "contour quadrature did not settle within 2^14 nodes"});
      for (std::size_t j = 0; j < o.residual.size(); ++j)
        out.orthogonality_rows.push_back({n, j, j < o.in_range(), o.residual[j], o.scale[j],
                                          j < o.real_axis.size() ? o.real_axis[j] : std::nan(""), o.nodes, hp_hash});
    } catch (const std::exception& e) {
      fail("orthogonality", e);
    }
  }
  return out;
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  StudyReport r;
  r.study_id = cfg.study_id();
  r.config = cfg.canonical();
  r.environment = environment_manifest(cfg);
  const fs::path root = cfg.output.empty() ? fs::path() : cfg.output / r.study_id;
  const std::size_t s = cfg.system.size();

  std::map<std::vector<double>, EquilibriumData> equilibria;
  for (const auto& d : cfg.schedule) {
    const auto t = masses_of(d);
    if (equilibria.count(t)) continue;
    AngelescoProblem p;
    for (std::size_t k = 0; k < s; ++k) p.sets.push_back(cfg.system.support_set(k));
    p.masses = t;
    p.grid = cfg.grid;
    equilibria.emplace(t, EquilibriumData{solve_angelesco(p), t});
  }
  const auto& first = equilibria.at(masses_of(cfg.schedule.front())).solution;
  r.w = first.w;
  for (const auto& g : first.components) {
    std::vector<std::pair<double, double>> curve;
    const auto dens = g.density();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) curve.emplace_back(g.nodes[i], dens[i]);
    r.density.push_back(curve);
  }
  if (!root.empty()) {
    const std::string bytes = to_json(first).dump(1);
    r.artifacts.emplace_back("raw/equilibrium.json", write_file(root / "raw/equilibrium.json", bytes));
  }

  std::vector<DegreeOutcome> outcomes(cfg.schedule.size());
  const int count = static_cast<int>(cfg.schedule.size());
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(cfg.workers))
  for (int i = 0; i < count; ++i) {
    const auto& d = cfg.schedule[static_cast<std::size_t>(i)];
    const auto& eq = equilibria.at(masses_of(d));
    try {
      outcomes[static_cast<std::size_t>(i)] = cfg.scalar == ScalarKind::exact_rational
                                                  ? run_degree<Rational>(cfg, d, eq, root)
                                                  : run_degree<BigComplex>(cfg, d, eq, root);
    } catch (const std::exception& e) {
      outcomes[static_cast<std::size_t>(i)].failures.push_back({d.d.front(), "degree", e.what()});
    }
  }

  r.zeros.assign(s, {});
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    const int n = cfg.schedule[i].d.front();
    r.zero_rows.insert(r.zero_rows.end(), o.zero_rows.begin(), o.zero_rows.end());
    r.leading_rows.insert(r.leading_rows.end(), o.leading_rows.begin(), o.leading_rows.end());
    r.remainder_rows.insert(r.remainder_rows.end(), o.remainder_rows.begin(), o.remainder_rows.end());
    if (o.summary) r.remainder_summary.push_back(*o.summary);
    r.orthogonality_rows.insert(r.orthogonality_rows.end(), o.orthogonality_rows.begin(), o.orthogonality_rows.end());
    r.failures.insert(r.failures.end(), o.failures.begin(), o.failures.end());
    r.artifacts.insert(r.artifacts.end(), o.artifacts.begin(), o.artifacts.end());
    for (std::size_t k = 0; k < o.zeros.size(); ++k)
      if (!o.zeros[k].empty()) r.zeros[k].emplace_back(n, o.zeros[k]);
  }

  if (!cfg.scurve_points.empty()) {
    try {
      ChebotarevOptions opt;
      opt.seed = cfg.seed;
      r.scurve = chebotarev_solve(cfg.scurve_points, opt);
      if (!root.empty())
        r.artifacts.emplace_back("raw/scurve.json", write_file(root / "raw/scurve.json", to_json(*r.scurve).dump(1)));
    } catch (const std::exception& e) {
      r.failures.push_back({0, "scurve", e.what()});
    }
  }

  if (cfg.parts.remainder)
    r.notes.push_back(
        "remainder: pointwise probe-difference deviations are an operational substitute for convergence in capacity");
  if (!root.empty()) persist_report(r, root);
  return r;
}

StudyReport run_zero_distribution_study(const StudyConfig& cfg) {
  StudyConfig c = cfg;
  c.parts = StudyParts{true, false, false, false};
  return run_study(c);
}

StudyReport leading_coefficient_study(const StudyConfig& cfg) {
  StudyConfig c = cfg;
  c.parts = StudyParts{false, true, false, false};
  return run_study(c);
}

StudyReport remainder_study(const StudyConfig& cfg) {
  StudyConfig c = cfg;
  c.parts = StudyParts{false, false, true, false};
  return run_study(c);
}

// ---------------------------------------------------------------------------

std::string zero_table_csv(const StudyReport& r) {
  std::ostringstream os;
  os << "n,kind,component,zeros_in_interval,kolmogorov,sup_cauchy,root_residual,artifact_sha256\n";
  for (const auto& z : r.zero_rows)
    os << z.n << ',' << z.kind << ',' << z.component + 1 << ',' << z.zeros_in_interval << ',' << num(z.kolmogorov)
       << ',' << num(z.sup_cauchy) << ',' << num(z.root_residual) << ',' << z.artifact << '\n';
  return os.str();
}

std::string leading_table_csv(const StudyReport& r) {
  std::ostringstream os;
  os << "n,component,rate,target,gap,flagged,artifact_sha256\n";
  for (const auto& l : r.leading_rows)
    os << l.n << ',' << l.component + 1 << ',' << num(l.rate) << ',' << num(l.target) << ','
       << num(std::abs(l.rate - l.target)) << ',' << (l.flagged ? 1 : 0) << ',' << l.artifact << '\n';
  return os.str();
}

std::string remainder_table_csv(const StudyReport& r) {
  std::ostringstream os;
  os << "n,probe,re,im,rate,potential,deviation_stated,deviation_sign_corrected,artifact_sha256\n";
  for (const auto& x : r.remainder_rows)
    os << x.n << ',' << x.probe << ',' << num(x.z.real()) << ',' << num(x.z.imag()) << ',' << num(x.rate) << ','
       << num(x.potential) << ',' << num(x.deviation_stated) << ',' << num(x.deviation_sign_corrected) << ','
       << x.artifact << '\n';
  return os.str();
}

std::string remainder_summary_csv(const StudyReport& r) {
  std::ostringstream os;
  os << "n,max_deviation_stated,max_deviation_sign_corrected\n";
  for (const auto& x : r.remainder_summary)
    os << x.n << ',' << num(x.max_stated) << ',' << num(x.max_sign_corrected) << '\n';
  return os.str();
}

std::string orthogonality_table_csv(const StudyReport& r) {
  std::ostringstream os;
  os << "n,power,in_range,residual,scale,relative,real_axis,nodes,artifact_sha256\n";
  for (const auto& o : r.orthogonality_rows)
    os << o.n << ',' << o.power << ',' << (o.in_range ? 1 : 0) << ',' << num(o.residual) << ',' << num(o.scale) << ','
       << num(o.scale > 0 ? o.residual / o.scale : 0.0) << ',' << num(o.real_axis) << ',' << o.nodes << ','
       << o.artifact << '\n';
  return os.str();
}

json to_json(const StudyReport& r) {
  json j;
  j["schema_version"] = 1;
  j["study_id"] = r.study_id;
  j["config"] = r.config;
  j["environment"] = r.environment;
  j["w"] = r.w;
  j["density"] = json::array();
  for (const auto& c : r.density) {
    json a = json::array();
    for (const auto& [x, y] : c) a.push_back(json::array({x, y}));
    j["density"].push_back(a);
  }
  j["zeros"] = json::array();
  for (const auto& c : r.zeros) {
    json a = json::array();
    for (const auto& [n, z] : c) a.push_back(json{{"n", n}, {"zeros", z}});
    j["zeros"].push_back(a);
  }
  j["zero_rows"] = json::array();
  for (const auto& z : r.zero_rows)
    j["zero_rows"].push_back(json{{"n", z.n}, {"kind", z.kind}, {"component", z.component}, {"zeros_in_interval", z.zeros_in_interval},
                                  {"kolmogorov", z.kolmogorov}, {"sup_cauchy", z.sup_cauchy}, {"root_residual", z.root_residual},
                                  {"artifact", z.artifact}});
  j["leading_rows"] = json::array();
  for (const auto& l : r.leading_rows)
    j["leading_rows"].push_back(json{{"n", l.n}, {"component", l.component}, {"rate", l.rate}, {"target", l.target},
                                     {"flagged", l.flagged}, {"artifact", l.artifact}});
  j["remainder_rows"] = json::array();
  for (const auto& x : r.remainder_rows)
    j["remainder_rows"].push_back(json{{"n", x.n}, {"probe", x.probe}, {"z", complex_json(x.z)}, {"rate", x.rate},
                                       {"potential", x.potential}, {"deviation_stated", x.deviation_stated},
                                       {"deviation_sign_corrected", x.deviation_sign_corrected}, {"artifact", x.artifact}});
  j["remainder_summary"] = json::array();
  for (const auto& x : r.remainder_summary)
    j["remainder_summary"].push_back(json{{"n", x.n}, {"max_stated", x.max_stated}, {"max_sign_corrected", x.max_sign_corrected}});
  j["orthogonality_rows"] = json::array();
  for (const auto& o : r.orthogonality_rows)
    j["orthogonality_rows"].push_back(json{{"n", o.n}, {"power", o.power}, {"in_range", o.in_range}, {"residual", o.residual},
                                           {"scale", o.scale}, {"real_axis", std::isnan(o.real_axis) ? json(nullptr) : json(o.real_axis)},
                                           {"nodes", o.nodes}, {"artifact", o.artifact}});
  j["failures"] = json::array();
  for (const auto& f : r.failures) j["failures"].push_back(json{{"n", f.n}, {"stage", f.stage}, {"message", f.message}});
  j["artifacts"] = json::array();
  for (const auto& [p, h] : r.artifacts) j["artifacts"].push_back(json{{"path", p}, {"sha256", h}});
  j["notes"] = r.notes;
  if (r.scurve) j["scurve"] = to_json(*r.scurve);
  return j;
}

StudyReport study_report_from_json(const json& j) {
  StudyReport r;
  r.study_id = j.at("study_id").get<std::string>();
  r.config = j.at("config");
  r.environment = j.value("environment", json::object());
  r.w = j.at("w").get<std::vector<double>>();
  for (const auto& c : j.at("density")) {
    std::vector<std::pair<double, double>> v;
    for (const auto& p : c) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    r.density.push_back(v);
  }
  for (const auto& c : j.at("zeros")) {
    std::vector<std::pair<int, std::vector<double>>> v;
    for (const auto& e : c) v.emplace_back(e.at("n").get<int>(), e.at("zeros").get<std::vector<double>>());
    r.zeros.push_back(v);
  }
  for (const auto& z : j.at("zero_rows"))
    r.zero_rows.push_back({z.at("n"), z.at("kind"), z.at("component"), z.at("zeros_in_interval"), z.at("kolmogorov"),
                           z.at("sup_cauchy"), z.at("root_residual"), z.at("artifact")});
  for (const auto& l : j.at("leading_rows"))
    r.leading_rows.push_back({l.at("n"), l.at("component"), l.at("rate"), l.at("target"), l.at("flagged"), l.at("artifact")});
  for (const auto& x : j.at("remainder_rows"))
    r.remainder_rows.push_back({x.at("n"), x.at("probe"), complex_from_json(x.at("z")), x.at("rate"), x.at("potential"),
                                x.at("deviation_stated"), x.at("deviation_sign_corrected"), x.at("artifact")});
  for (const auto& x : j.at("remainder_summary"))
    r.remainder_summary.push_back({x.at("n"), x.at("max_stated"), x.at("max_sign_corrected")});
  for (const auto& o : j.at("orthogonality_rows"))
    r.orthogonality_rows.push_back({o.at("n"), o.at("power"), o.at("in_range"), o.at("residual"), o.at("scale"),
                                    o.at("real_axis").is_null() ? std::nan("") : o.at("real_axis").get<double>(),
                                    o.at("nodes"), o.at("artifact")});
  for (const auto& f : j.at("failures")) r.failures.push_back({f.at("n"), f.at("stage"), f.at("message")});
  for (const auto& a : j.at("artifacts")) r.artifacts.emplace_back(a.at("path"), a.at("sha256"));
  r.notes = j.value("notes", std::vector<std::string>{});
  return r;
}

void persist_report(StudyReport& r, const fs::path& dir) {
  const std::vector<std::pair<std::string, std::string>> tables{
      {"tables/zero_distribution.csv", zero_table_csv(r)},
      {"tables/leading_coefficients.csv", leading_table_csv(r)},
      {"tables/remainder.csv", remainder_table_csv(r)},
      {"tables/remainder_summary.csv", remainder_summary_csv(r)},
      {"tables/orthogonality.csv", orthogonality_table_csv(r)}};
  json manifest;
  manifest["schema_version"] = 1;
  manifest["study_id"] = r.study_id;
  manifest["config"] = r.config;
  manifest["environment"] = r.environment;
  manifest["tables"] = json::array();
  for (const auto& [path, bytes] : tables)
    manifest["tables"].push_back(json{{"path", path}, {"sha256", write_file(dir / path, bytes)}});
  manifest["artifacts"] = json::array();
  for (const auto& [p, h] : r.artifacts) manifest["artifacts"].push_back(json{{"path", p}, {"sha256", h}});
  manifest["report"] = json{{"path", "report.json"}, {"sha256", write_file(dir / "report.json", to_json(r).dump(1))}};
  manifest["failures"] = r.failures.size();
  manifest["notes"] = r.notes;
  write_file(dir / "manifest.json", manifest.dump(1));
}

// ---------------------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return std::strcmp(buf, "-0.000") == 0 ? "0.000" : buf;
}

}  // namespace

std::string zeros_svg(const StudyReport& r, int width, int height) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : r.density)
    for (const auto& [x, y] : c) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  for (const auto& c : r.zeros)
    for (const auto& [n, z] : c)
      for (double x : z) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto X = [&](double x) { return (x - lo) / (hi - lo) * width; };

  std::vector<double> all;
  for (const auto& c : r.density)
    for (const auto& [x, y] : c) all.push_back(y);
  double ymax = 1.0;
  if (!all.empty()) {
    std::sort(all.begin(), all.end());
    ymax = 2.5 * all[all.size() / 2];
  }
  std::set<int> degrees;
  for (const auto& c : r.zeros)
    for (const auto& [n, z] : c) degrees.insert(n);
  const double top = 0.6 * height;  // density band [10, top]
  const double row = degrees.empty() ? 0.0 : (height - top - 20.0) / static_cast<double>(degrees.size());

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<line x1=\"0\" y1=\"" << fmt3(top) << "\" x2=\"" << width << "\" y2=\"" << fmt3(top)
     << "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
  for (std::size_t k = 0; k < r.density.size(); ++k) {
    os << "<polyline class=\"density\" data-component=\"" << k + 1 << "\" fill=\"none\" stroke=\""
       << kPalette[k % 6] << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < r.density[k].size(); ++i) {
      const auto [x, y] = r.density[k][i];
      const double yy = top - std::min(y / ymax, 1.0) * (top - 10.0);
      os << (i ? " " : "") << fmt3(X(x)) << ',' << fmt3(yy);
    }
    os << "\"/>\n";
  }
  std::size_t level = 0;
  for (int n : degrees) {
    const double y = top + 10.0 + (static_cast<double>(level) + 0.5) * row;
    os << "<text x=\"4\" y=\"" << fmt3(y + 3.0) << "\" font-size=\"9\" font-family=\"sans-serif\">n=" << n << "</text>\n";
    for (std::size_t k = 0; k < r.zeros.size(); ++k)
      for (const auto& [m, z] : r.zeros[k])
        if (m == n)
          for (double x : z)
            os << "<circle class=\"zero\" data-component=\"" << k + 1 << "\" cx=\"" << fmt3(X(x)) << "\" cy=\""
               << fmt3(y) << "\" r=\"1.8\" fill=\"" << kPalette[k % 6] << "\"/>\n";
    ++level;
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<fs::path> emit_plots(const StudyReport& r, const fs::path& dir) {
  std::vector<fs::path> written;
  if (r.empty()) return written;
  if (!r.zeros.empty() || !r.density.empty()) {
    const fs::path p = dir / "plots" / "zeros.svg";
    write_file(p, zeros_svg(r));
    written.push_back(p);
  }
  if (r.scurve) {
    const fs::path p = dir / "plots" / "portrait.svg";
    write_file(p, portrait_svg(*r.scurve));
    written.push_back(p);
  }
  return written;
}

}  // namespace hpl
