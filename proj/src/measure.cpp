#include "hpl/measure.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>


namespace hpl {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRealTol = 1e-8;

struct Eval {
  BigComplex p;
  BigComplex dp;
};

Eval horner2(const std::vector<BigComplex>& c, const BigComplex& z, unsigned bits) {
  BigComplex p(bits), dp(bits);
  for (std::size_t j = c.size(); j-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[j];
  }
  return {std::move(p), std::move(dp)};
}

double relative_residual(const std::vector<BigComplex>& c, const BigComplex& z, unsigned bits) {
  BigComplex p(bits);
  BigFloat scale(bits), az = z.abs(), pw(1.0, bits);
  for (std::size_t j = c.size(); j-- > 0;) p = p * z + c[j];
  for (std::size_t j = 0; j < c.size(); ++j) {
    scale += c[j].abs() * pw;
    pw *= az;
  }
  if (scale.is_zero()) return 0.0;
  return (p.abs() / scale).to_double();
}

std::vector<cd> companion_roots(const std::vector<BigComplex>& c, unsigned bits) {
  const std::size_t d = c.size() - 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<long>(d), static_cast<long>(d));
  for (std::size_t i = 1; i < d; ++i) C(static_cast<long>(i), static_cast<long>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const BigComplex ratio = c[i] / c[d];
    C(static_cast<long>(i), static_cast<long>(d - 1)) = -ratio.to_cd();
  }
  (void)bits;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cd> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = es.eigenvalues()(static_cast<long>(i));
  // Separate exactly coincident starts so the Aberth correction is defined.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(out[i] - out[j]) < 1e-14 * (1 + std::abs(out[i]))) out[i] += cd(1e-6, 1e-6) * (1.0 + static_cast<double>(i));
  return out;
}

RootResult aberth(std::vector<BigComplex> c, unsigned bits, double tol) {
  while (!c.empty() && c.back().is_zero()) c.pop_back();
  if (c.empty()) throw std::invalid_argument("roots of the zero polynomial");
  RootResult res;
  std::size_t zeros_at_origin = 0;
  while (zeros_at_origin + 1 < c.size() && c[zeros_at_origin].is_zero()) ++zeros_at_origin;
  for (std::size_t i = 0; i < zeros_at_origin; ++i) {
    res.exact.emplace_back(bits);
  }
  c.erase(c.begin(), c.begin() + static_cast<long>(zeros_at_origin));
  const std::size_t d = c.size() - 1;
  if (d > 0) {
    std::vector<BigComplex> z;
    for (const cd& s : companion_roots(c, bits)) z.emplace_back(s, bits);
    std::vector<bool> done(d, false);
    const BigFloat step_tol(std::ldexp(1.0, -static_cast<int>(bits) + 8), bits);
    const int max_iter = 400;
    int it = 0;
    for (; it < max_iter; ++it) {
      bool all = true;
      for (std::size_t i = 0; i < d; ++i) {
        if (done[i]) continue;
        Eval e = horner2(c, z[i], bits);
        if (e.p.is_zero()) {
          done[i] = true;
          continue;
        }
        BigComplex sum(bits);
        for (std::size_t j = 0; j < d; ++j)
          if (j != i) sum += BigComplex(Rational(1), bits) / (z[i] - z[j]);
        BigComplex w(bits);
        if (e.dp.is_zero()) {
          w = BigComplex(cd(1e-3, 1e-3), bits);
        } else {
          BigComplex ratio = e.p / e.dp;
          w = ratio / (BigComplex(Rational(1), bits) - ratio * sum);
        }
        z[i] -= w;
        BigFloat az = z[i].abs();
        if (az < BigFloat(1.0, bits)) az = BigFloat(1.0, bits);
        if (w.abs() < step_tol * az)
          done[i] = true;
        else
          all = false;
      }
      if (all) break;
    }
    res.iterations = it;
    for (auto& x : z) res.exact.push_back(std::move(x));
  }
  std::vector<BigComplex> full(zeros_at_origin, BigComplex(bits));
  full.insert(full.end(), c.begin(), c.end());
  for (const auto& x : res.exact) {
    res.roots.push_back(x.to_cd());
    res.max_residual = std::max(res.max_residual, relative_residual(full, x, bits));
  }
  // Deterministic order: by real part, then imaginary part.
  std::vector<std::size_t> idx(res.roots.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (res.roots[a].real() != res.roots[b].real()) return res.roots[a].real() < res.roots[b].real();
    return res.roots[a].imag() < res.roots[b].imag();
  });
  RootResult sorted;
  sorted.iterations = res.iterations;
  sorted.max_residual = res.max_residual;
  for (auto i : idx) {
    sorted.roots.push_back(res.roots[i]);
    sorted.exact.push_back(res.exact[i]);
  }
  if (!(sorted.max_residual <= tol))
    throw RootError("root finder did not reach residual tolerance (max residual " + std::to_string(sorted.max_residual) + ")",
                    sorted);
  return sorted;
}

}  // namespace

RootResult roots(const std::vector<Rational>& poly, unsigned bits, double tol) {
  std::vector<BigComplex> c;
  for (const auto& q : poly) c.emplace_back(q, bits);
  return aberth(std::move(c), bits, tol);
}

RootResult roots(const std::vector<BigComplex>& poly, unsigned bits, double tol) { return aberth(poly, bits, tol); }

RootResult roots(const std::vector<cd>& poly, unsigned bits, double tol) {
  std::vector<BigComplex> c;
  for (const auto& x : poly) c.emplace_back(x, bits);
  return aberth(std::move(c), bits, tol);
}

IntervalSet::IntervalSet(std::vector<Interval> p) : parts(std::move(p)) { validate(); }

void IntervalSet::validate() const {
  if (parts.empty()) throw std::invalid_argument("interval set is empty");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!(parts[i].a < parts[i].b) || !std::isfinite(parts[i].a) || !std::isfinite(parts[i].b))
      throw std::invalid_argument("interval must be finite with a < b");
    for (std::size_t j = 0; j < i; ++j)
      if (!(parts[i].b < parts[j].a || parts[j].b < parts[i].a)) throw std::invalid_argument("intervals overlap");
  }
}

double IntervalSet::distance(cd z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& I : parts) {
    const double x = std::clamp(z.real(), I.a, I.b);
    d = std::min(d, std::abs(z - cd(x, 0.0)));
  }
  return d;
}

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.second;
  return s;
}

GridMeasure GridMeasure::chebyshev(const IntervalSet& F, std::size_t M) {
  F.validate();
  if (M < 2) throw std::invalid_argument("grid needs at least two nodes per interval");
  GridMeasure g;
  g.intervals = F;
  g.per_interval = M;
  for (std::size_t k = 0; k < F.parts.size(); ++k) {
    const double c = F.parts[k].center(), r = F.parts[k].radius();
    for (std::size_t i = 1; i <= M; ++i) {
      const double th = (2.0 * static_cast<double>(i) - 1.0) * kPi / (2.0 * static_cast<double>(M));
      g.nodes.push_back(c - r * std::cos(th));
      g.spacing.push_back(kPi / static_cast<double>(M) * r * std::sin(th));
      g.component.push_back(k);
    }
  }
  g.weights.assign(g.nodes.size(), 0.0);
  return g;
}

double GridMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double GridMeasure::cdf(std::size_t k, double x) const {
  const Interval& I = intervals.parts.at(k);
  const std::size_t off = k * per_interval;
  if (x <= I.a) return 0.0;
  double acc = 0.0;
  if (x >= I.b) {
    for (std::size_t i = 0; i < per_interval; ++i) acc += weights[off + i];
    return acc;
  }
  const double th = std::acos(std::clamp((I.center() - x) / I.radius(), -1.0, 1.0));
  const double u = th * static_cast<double>(per_interval) / kPi;
  const std::size_t j = std::min(per_interval - 1, static_cast<std::size_t>(std::floor(u)));
  for (std::size_t i = 0; i < j; ++i) acc += weights[off + i];
  return acc + (u - static_cast<double>(j)) * weights[off + j];
}

std::vector<double> GridMeasure::density() const {
  std::vector<double> d(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) d[i] = weights[i] / spacing[i];
  return d;
}

GridMeasure GridMeasure::with_weights(std::vector<double> w) const {
  if (w.size() != nodes.size()) throw std::invalid_argument("weight count does not match the grid");
  GridMeasure g = *this;
  g.weights = std::move(w);
  return g;
}

DiscreteMeasure counting_measure_of_zeros(const std::vector<cd>& zeros) {
  if (zeros.empty()) throw std::invalid_argument("counting measure of a constant polynomial");
  DiscreteMeasure m;
  const double mass = 1.0 / static_cast<double>(zeros.size());
  for (const cd& z : zeros) m.atoms.emplace_back(z, mass);
  return m;
}

namespace {

// sqrt((z-a)(z-b)) with the branch behaving like z - c at infinity, cut on [a, b].
cd segment_sqrt(double a, double b, cd z) {
  const cd w = z - 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  return w * std::sqrt(1.0 - r * r / (w * w));
}

bool on_segment(double a, double b, cd z) { return z.imag() == 0.0 && z.real() >= a && z.real() <= b; }

struct PotentialVisitor {
  cd z;
  double operator()(const DiscreteMeasure& m) const {
    double acc = 0.0;
    for (const auto& [x, w] : m.atoms) {
      const double d = std::abs(z - x);
      if (d == 0.0) return std::numeric_limits<double>::infinity();
      acc -= w * std::log(d);
    }
    return acc;
  }
  double operator()(const GridMeasure& g) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double d = std::abs(z - cd(g.nodes[i], 0.0));
      acc -= g.weights[i] * (d == 0.0 ? std::log(g.spacing[i] / (2.0 * kPi)) : std::log(d));
    }
    return acc;
  }
  double operator()(const ArcsineMeasure& m) const {
    const double r = 0.5 * (m.b - m.a);
    if (on_segment(m.a, m.b, z)) return -m.mass * std::log(r / 2.0);
    const cd w = z - 0.5 * (m.a + m.b);
    return -m.mass * std::log(std::abs((w + segment_sqrt(m.a, m.b, z)) / 2.0));
  }
  double operator()(const UniformMeasure& m) const {
    auto term = [](cd u) { return std::abs(u) == 0.0 ? cd(0.0) : u * (std::log(u) - 1.0); };
    const cd v = term(z - m.a) - term(z - m.b);
    return -m.mass / (m.b - m.a) * v.real();
  }
};

struct CauchyVisitor {
  cd z;
  cd operator()(const DiscreteMeasure& m) const {
    cd acc = 0.0;
    for (const auto& [x, w] : m.atoms) {
      if (x == z) throw std::domain_error("Cauchy transform evaluated at an atom");
      acc += w / (x - z);
    }
    return acc;
  }
  cd operator()(const GridMeasure& g) const {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double d = std::abs(z - cd(g.nodes[i], 0.0));
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    if (!g.nodes.empty() && best < g.spacing[nearest])
      throw std::domain_error("Cauchy transform evaluated within one grid spacing of the support");
    cd acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) acc += g.weights[i] / (g.nodes[i] - z);
    return acc;
  }
  cd operator()(const ArcsineMeasure& m) const {
    if (on_segment(m.a, m.b, z)) throw std::domain_error("Cauchy transform evaluated on the support");
    return -m.mass / segment_sqrt(m.a, m.b, z);
  }
  cd operator()(const UniformMeasure& m) const {
    if (on_segment(m.a, m.b, z)) throw std::domain_error("Cauchy transform evaluated on the support");
    return m.mass / (m.b - m.a) * std::log((m.b - z) / (m.a - z));
  }
};

}  // namespace

double potential(const Measure& mu, cd z) { return std::visit(PotentialVisitor{z}, mu); }

cd cauchy_transform(const Measure& mu, cd z) { return std::visit(CauchyVisitor{z}, mu); }

double total_mass(const Measure& mu) {
  return std::visit(
      [](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DiscreteMeasure> || std::is_same_v<M, GridMeasure>)
          return m.total_mass();
        else
          return m.mass;
      },
      mu);
}

namespace {

double mass_upto(const Measure& mu, double x, bool left_limit) {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DiscreteMeasure>) {
          double s = 0.0;
          for (const auto& [z, w] : m.atoms)
            if (std::abs(z.imag()) <= kRealTol && (left_limit ? z.real() < x : z.real() <= x)) s += w;
          return s;
        } else if constexpr (std::is_same_v<M, GridMeasure>) {
          double s = 0.0;
          for (std::size_t k = 0; k < m.intervals.parts.size(); ++k) s += m.cdf(k, x);
          return s;
        } else if constexpr (std::is_same_v<M, ArcsineMeasure>) {
          if (x <= m.a) return 0.0;
          if (x >= m.b) return m.mass;
          const double c = 0.5 * (m.a + m.b), r = 0.5 * (m.b - m.a);
          return m.mass * std::acos(std::clamp((c - x) / r, -1.0, 1.0)) / kPi;
        } else {
          if (x <= m.a) return 0.0;
          if (x >= m.b) return m.mass;
          return m.mass * (x - m.a) / (m.b - m.a);
        }
      },
      mu);
}

void jump_points(const Measure& mu, const Interval& I, std::vector<double>& out) {
  if (const auto* d = std::get_if<DiscreteMeasure>(&mu)) {
    for (const auto& [z, w] : d->atoms)
      if (std::abs(z.imag()) <= kRealTol && I.contains(z.real())) out.push_back(z.real());
  }
  if (const auto* g = std::get_if<GridMeasure>(&mu)) {
    for (std::size_t k = 0; k < g->intervals.parts.size(); ++k) {
      const auto& J = g->intervals.parts[k];
      for (std::size_t j = 0; j <= g->per_interval; ++j) {
        const double x = J.center() - J.radius() * std::cos(kPi * static_cast<double>(j) / static_cast<double>(g->per_interval));
        if (I.contains(x)) out.push_back(x);
      }
    }
  }
}

}  // namespace

double cdf(const Measure& mu, double a, double x, bool left_limit) {
  return mass_upto(mu, x, left_limit) - mass_upto(mu, a, true);
}

double kolmogorov(const Measure& mu, const Measure& nu, const Interval& I) {
  std::vector<double> xs{I.a, I.b};
  jump_points(mu, I, xs);
  jump_points(nu, I, xs);
  // Angle samples resolve the continuous parts near the endpoints.
  for (int j = 0; j <= 2048; ++j) xs.push_back(I.center() - I.radius() * std::cos(kPi * j / 2048.0));
  std::sort(xs.begin(), xs.end());
  double best = 0.0;
  for (double x : xs) {
    for (bool left : {true, false}) {
      const double fm = cdf(mu, I.a, x, left);
      const double fn = cdf(nu, I.a, x, left);
      best = std::max(best, std::abs(fm - fn));
    }
  }
  return best;
}

DiscrepancyReport discrepancy(const Measure& mu, const Measure& nu, const std::vector<cd>& probes,
                              const IntervalSet* components) {
  if (probes.empty()) throw std::invalid_argument("discrepancy needs at least one probe");
  DiscrepancyReport r;
  for (const cd& z : probes) r.sup_cauchy_error = std::max(r.sup_cauchy_error, std::abs(cauchy_transform(mu, z) - cauchy_transform(nu, z)));
  if (components) {
    for (const auto& I : components->parts) {
      r.kolmogorov.push_back(kolmogorov(mu, nu, I));
      r.kolmogorov_sum += r.kolmogorov.back();
    }
  }
  return r;
}

double l1_on_cells(const GridMeasure& g, const Measure& reference) {
  double acc = 0.0;
  for (std::size_t k = 0; k < g.intervals.parts.size(); ++k) {
    const auto& I = g.intervals.parts[k];
    const double M = static_cast<double>(g.per_interval);
    for (std::size_t j = 0; j < g.per_interval; ++j) {
      const double lo = I.center() - I.radius() * std::cos(kPi * static_cast<double>(j) / M);
      const double hi = I.center() - I.radius() * std::cos(kPi * static_cast<double>(j + 1) / M);
      const double ref = mass_upto(reference, hi, false) - mass_upto(reference, lo, j > 0);
      acc += std::abs(g.weights[k * g.per_interval + j] - ref);
    }
  }
  return acc;
}

std::vector<cd> circle_probes(double radius, std::size_t count, cd center, double phase) {
  std::vector<cd> z;
  for (std::size_t j = 0; j < count; ++j)
    z.push_back(center + std::polar(radius, phase + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(count)));
  return z;
}

json to_json(const IntervalSet& s) {
  json a = json::array();
  for (const auto& I : s.parts) a.push_back({I.a, I.b});
  return a;
}

IntervalSet interval_set_from_json(const json& j) {
  std::vector<Interval> parts;
  for (const auto& p : j) parts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return IntervalSet(std::move(parts));
}

json to_json(const Measure& mu) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        json j;
        if constexpr (std::is_same_v<M, DiscreteMeasure>) {
          j["type"] = "discrete";
          j["atoms"] = json::array();
          for (const auto& [z, w] : m.atoms) j["atoms"].push_back({z.real(), z.imag(), w});
        } else if constexpr (std::is_same_v<M, GridMeasure>) {
          j["type"] = "grid";
          j["intervals"] = to_json(m.intervals);
          j["per_interval"] = m.per_interval;
          j["nodes"] = m.nodes;
          j["weights"] = m.weights;
        } else if constexpr (std::is_same_v<M, ArcsineMeasure>) {
          j["type"] = "arcsine";
          j["interval"] = {m.a, m.b};
          j["mass"] = m.mass;
        } else {
          j["type"] = "uniform";
          j["interval"] = {m.a, m.b};
          j["mass"] = m.mass;
        }
        return j;
      },
      mu);
}

Measure measure_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "discrete") {
    DiscreteMeasure m;
    for (const auto& a : j.at("atoms")) m.atoms.emplace_back(cd(a.at(0).get<double>(), a.at(1).get<double>()), a.at(2).get<double>());
    return m;
  }
  if (type == "grid") {
    GridMeasure g = GridMeasure::chebyshev(interval_set_from_json(j.at("intervals")), j.at("per_interval").get<std::size_t>());
    return g.with_weights(j.at("weights").get<std::vector<double>>());
  }
  if (type == "arcsine") return ArcsineMeasure{j.at("interval").at(0).get<double>(), j.at("interval").at(1).get<double>(), j.value("mass", 1.0)};
  if (type == "uniform") return UniformMeasure{j.at("interval").at(0).get<double>(), j.at("interval").at(1).get<double>(), j.value("mass", 1.0)};
  throw std::invalid_argument("unknown measure type: " + type);
}

std::string cdf_table_csv(const Measure& mu, const Measure& nu, const Interval& I, std::size_t samples) {
  std::ostringstream os;
  os.precision(17);
  os << "x,cdf_mu,cdf_nu\n";
  for (std::size_t j = 0; j <= samples; ++j) {
    const double x = I.a + (I.b - I.a) * static_cast<double>(j) / static_cast<double>(samples);
    os << x << ',' << cdf(mu, I.a, x) << ',' << cdf(nu, I.a, x) << '\n';
  }
  return os.str();
}

}  // namespace hpl
