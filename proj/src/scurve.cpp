#include "hpl/scurve.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace hpl {

using nlohmann::json;
using std::numbers::pi;

namespace {

// Integrand of a segment integral in the variable theta in [0, pi], with
// t = u + sin^2(theta/2) (w - u). The substitution absorbs square-root
// singularities at both endpoints.
struct SegmentIntegrand {
  const SqrtProduct& f;
  cd u, w;
  // Non-endpoint factors (t - c)^{e} are written as base * ((t - c)/(u - c))^{e}.
  std::vector<std::pair<cd, cd>> half_num;  // (c, sqrt(u - c))
  std::vector<std::pair<cd, cd>> half_den;
  std::vector<cd> full;
  cd endpoint_factor = 1.0;
  int sigma_power = 1;  // powers of sin(theta/2) and cos(theta/2), including dt/dtheta
  int gamma_power = 1;

  SegmentIntegrand(const SqrtProduct& fn, cd u_, cd w_) : f(fn), u(u_), w(w_) {
    const cd du = std::sqrt(w - u), dw = std::sqrt(u - w);
    for (const cd& c : f.half_zeros) {
      if (c == u) {
        endpoint_factor *= du;
        sigma_power += 1;
      } else if (c == w) {
        endpoint_factor *= dw;
        gamma_power += 1;
      } else {
        half_num.emplace_back(c, std::sqrt(u - c));
      }
    }
    for (const cd& c : f.half_poles) {
      if (c == u) {
        endpoint_factor /= du;
        sigma_power -= 1;
      } else if (c == w) {
        endpoint_factor /= dw;
        gamma_power -= 1;
      } else {
        half_den.emplace_back(c, std::sqrt(u - c));
      }
    }
    for (const cd& c : f.full_zeros) {
      if (c == u) {
        endpoint_factor *= (w - u);
        sigma_power += 2;
      } else if (c == w) {
        endpoint_factor *= (u - w);
        gamma_power += 2;
      } else {
        full.push_back(c);
      }
    }
  }

  // Integrand value without the dt/dtheta factor.
  cd value(double theta) const {
    const double sg = std::sin(0.5 * theta), cg = std::cos(0.5 * theta);
    const double s = sg * sg;
    const cd t = theta < 0.5 * pi ? u + s * (w - u) : w - (cg * cg) * (w - u);
    cd p = endpoint_factor;
    for (const auto& [c, base] : half_num) p *= base * std::sqrt((t - c) / (u - c));
    for (const auto& [c, base] : half_den) p /= base * std::sqrt((t - c) / (u - c));
    for (const cd& c : full) p *= (t - c);
    p *= horner(f.poly, t);
    return p * std::pow(sg, sigma_power - 1) * std::pow(cg, gamma_power - 1);
  }

  cd operator()(double theta) const {
    const double sg = std::sin(0.5 * theta), cg = std::cos(0.5 * theta);
    const double s = sg * sg;
    const cd t = theta < 0.5 * pi ? u + s * (w - u) : w - (cg * cg) * (w - u);
    cd p = endpoint_factor;
    for (const auto& [c, base] : half_num) p *= base * std::sqrt((t - c) / (u - c));
    for (const auto& [c, base] : half_den) p /= base * std::sqrt((t - c) / (u - c));
    for (const cd& c : full) p *= (t - c);
    p *= horner(f.poly, t);
    return p * (w - u) * std::pow(sg, sigma_power) * std::pow(cg, gamma_power);
  }
};

cd integrate_theta(const SegmentIntegrand& g) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, pi, 12, 1e-12, &err);
}

double dist_to_segment(cd z, cd u, cd w) {
  const cd d = w - u;
  const double n2 = std::norm(d);
  if (n2 == 0.0) return std::abs(z - u);
  const double s = std::clamp(((z - u) * std::conj(d)).real() / n2, 0.0, 1.0);
  return std::abs(z - (u + s * d));
}

}  // namespace

cd segment_integral(const SqrtProduct& f, cd u, cd w) {
  if (u == w) return 0.0;
  return integrate_theta(SegmentIntegrand(f, u, w));
}

cd polyline_integral(const SqrtProduct& f, const std::vector<cd>& points) {
  cd total = 0.0;
  double sign = 1.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i] == points[i + 1]) continue;
    const SegmentIntegrand g(f, points[i], points[i + 1]);
    if (i > 0 && points[i - 1] != points[i]) {
      // Align this segment's branch with the previous one at the shared vertex.
      const SegmentIntegrand prev(f, points[i - 1], points[i]);
      const cd a = prev.value(pi), b = g.value(0.0);
      if (std::abs(a) > 0.0 && std::abs(b) > 0.0 && (a / b).real() < 0.0) sign = -sign;
    }
    total += sign * integrate_theta(g);
  }
  return total;
}

// ---------------------------------------------------------------------------

void QDSpec::validate() const {
  if (a.size() < 2) throw std::invalid_argument("need at least two branch points");
  if (v.size() + 2 != a.size()) throw std::invalid_argument("deg V must equal deg A - 2");
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (a[i] == a[j]) throw std::invalid_argument("roots of A must be distinct");
}

double QDSpec::scale() const {
  double m = 0.0;
  for (const cd& z : a) m = std::max(m, std::abs(z));
  return m + 1.0;
}

namespace {

struct Cluster {
  cd z;
  int multiplicity;
  std::vector<std::size_t> members;
};

std::vector<Cluster> cluster_points(const std::vector<cd>& pts, double tol) {
  std::vector<Cluster> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool placed = false;
    for (auto& c : out)
      if (std::abs(pts[i] - pts[c.members.front()]) <= tol) {
        c.members.push_back(i);
        ++c.multiplicity;
        placed = true;
        break;
      }
    if (!placed) out.push_back({pts[i], 1, {i}});
  }
  return out;
}

// Integrand sqrt(V/A) with multiple V zeros folded into integer factors.
SqrtProduct integrand_of(const QDSpec& s, double merge_tol) {
  SqrtProduct f;
  f.half_poles = s.a;
  for (const auto& c : cluster_points(s.v, merge_tol)) {
    for (int k = 0; k < c.multiplicity / 2; ++k) f.full_zeros.push_back(c.z);
    if (c.multiplicity % 2) f.half_zeros.push_back(c.z);
  }
  return f;
}

cd q_value(const QDSpec& s, cd z) {
  cd q = 1.0;
  for (const cd& v : s.v) q *= (z - v);
  for (const cd& a : s.a) q /= (z - a);
  return q;
}

// Unit direction of the trajectory line field at z, aligned with the heading.
cd direction(const QDSpec& s, cd z, cd heading) {
  const cd q = q_value(s, z);
  const double aq = std::abs(q);
  if (!(aq > 0.0) || !std::isfinite(aq)) return heading;
  cd d = std::sqrt(-std::conj(q) / aq);
  if ((d * std::conj(heading)).real() < 0.0) d = -d;
  return d;
}

struct CriticalPoint {
  cd z;
  Endpoint::Kind kind;
  std::size_t index;
};

std::vector<CriticalPoint> critical_points(const QDSpec& s) {
  std::vector<CriticalPoint> out;
  for (std::size_t i = 0; i < s.a.size(); ++i) out.push_back({s.a[i], Endpoint::Kind::a_root, i});
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    bool dup = false;
    for (const auto& c : out)
      if (c.kind == Endpoint::Kind::v_root && c.z == s.v[i]) dup = true;
    if (!dup) out.push_back({s.v[i], Endpoint::Kind::v_root, i});
  }
  return out;
}

Trajectory trace_ray(const QDSpec& s, const SqrtProduct& f, const CriticalPoint& start, cd d0,
                     const TraceOptions& opt) {
  const double S = s.scale();
  const double tol = opt.tolerance * S;
  const double capture = opt.capture * S;
  const double escape = 4.0 * S;
  const auto crit = critical_points(s);
  Trajectory tr;
  tr.start = {start.kind, start.index, false, start.z};
  tr.points.push_back(start.z);
  cd z = start.z + 1e-6 * S * d0;
  cd heading = d0;
  auto correct = [&](cd from, cd& to) {
    for (int it = 0; it < 2; ++it) {
      const SegmentIntegrand g(f, from, to);
      const cd dF = integrate_theta(g);
      const cd fz = g.value(pi);
      const double af = std::abs(fz);
      if (!(af > 0.0) || !std::isfinite(af)) return;
      to -= dF.real() / af * (std::conj(fz) / af);
    }
  };
  correct(start.z, z);
  tr.points.push_back(z);
  double h = 1e-6 * S;
  double length = std::abs(z - start.z);
  // Dormand-Prince 5(4) coefficients.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                      e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2, (void)c3, (void)c4, (void)c5;
  for (int step = 0; step < 200000; ++step) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& c : crit) dmin = std::min(dmin, std::abs(z - c.z));
    h = std::min({h, 0.5 * dmin, 0.05 * S});
    if (h < 1e-14 * S) break;
    const cd k1 = direction(s, z, heading);
    const cd k2 = direction(s, z + h * a21 * k1, heading);
    const cd k3 = direction(s, z + h * (a31 * k1 + a32 * k2), heading);
    const cd k4 = direction(s, z + h * (a41 * k1 + a42 * k2 + a43 * k3), heading);
    const cd k5 = direction(s, z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), heading);
    const cd k6 = direction(s, z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), heading);
    const cd zn = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const cd k7 = direction(s, zn, heading);
    const double err = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    if (err > tol) {
      h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
      continue;
    }
    cd znew = zn;
    correct(z, znew);
    length += std::abs(znew - z);
    heading = direction(s, znew, k7);
    z = znew;
    tr.points.push_back(z);
    h *= std::min(5.0, 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2));
    if (std::abs(z) > escape) {
      tr.end = {Endpoint::Kind::unresolved, 0, true, z};
      break;
    }
    bool done = false;
    for (const auto& c : crit) {
      if (c.z == start.z && length < 10.0 * capture) continue;
      const cd to = c.z - z;
      const double r = std::abs(to);
      if (r < capture && (heading * std::conj(to)).real() > 0.95 * r) {
        tr.points.push_back(c.z);
        length += r;
        tr.end = {c.kind, c.index, false, c.z};
        done = true;
        break;
      }
    }
    if (done) break;
    if (length > 100.0 * S) break;
  }
  if (tr.end.kind == Endpoint::Kind::unresolved && !tr.end.escaped) tr.end.z = tr.points.back();
  tr.arclength = length;
  // Constancy of Re int f along the polyline, measured independently of the stepping.
  double worst = 0.0;
  cd acc = 0.0;
  double sign = 1.0;
  for (std::size_t i = 0; i + 1 < tr.points.size(); ++i) {
    const SegmentIntegrand g(f, tr.points[i], tr.points[i + 1]);
    if (i > 0) {
      const SegmentIntegrand prev(f, tr.points[i - 1], tr.points[i]);
      const cd pa = prev.value(pi), pb = g.value(0.0);
      if (std::abs(pa) > 0.0 && std::abs(pb) > 0.0 && (pa / pb).real() < 0.0) sign = -sign;
    }
    acc += sign * integrate_theta(g);
    worst = std::max(worst, std::abs(acc.real()));
  }
  tr.constancy = worst;
  return tr;
}

}  // namespace

std::vector<Trajectory> trace_trajectories(const QDSpec& spec, cd from, const TraceOptions& opt) {
  spec.validate();
  const double S = spec.scale();
  const double merge = 1e-9 * S;
  CriticalPoint start{};
  int m = 0;
  cd mu2;
  bool found = false;
  for (std::size_t i = 0; i < spec.a.size() && !found; ++i)
    if (std::abs(spec.a[i] - from) <= 1e-12 * S) {
      start = {spec.a[i], Endpoint::Kind::a_root, i};
      m = -1;
      cd num = 1.0, den = 1.0;
      for (const cd& v : spec.v) num *= (spec.a[i] - v);
      for (std::size_t k = 0; k < spec.a.size(); ++k)
        if (k != i) den *= (spec.a[i] - spec.a[k]);
      mu2 = num / den;
      found = true;
    }
  if (!found) {
    for (const auto& c : cluster_points(spec.v, merge))
      if (std::abs(c.z - from) <= 1e-9 * S) {
        start = {c.z, Endpoint::Kind::v_root, c.members.front()};
        m = c.multiplicity;
        cd num = 1.0, den = 1.0;
        for (std::size_t k = 0; k < spec.v.size(); ++k)
          if (std::find(c.members.begin(), c.members.end(), k) == c.members.end()) num *= (c.z - spec.v[k]);
        for (const cd& a : spec.a) den *= (c.z - a);
        mu2 = num / den;
        found = true;
        break;
      }
  }
  if (!found) throw std::invalid_argument("trajectory start is not a zero of A*V");
  const SqrtProduct f = integrand_of(spec, merge);
  const int rays = m + 2;
  const double phi0 = std::arg(-std::conj(mu2));
  std::vector<Trajectory> out;
  for (int k = 0; k < rays; ++k) {
    const double ang = (phi0 + 2.0 * pi * k) / rays;
    out.push_back(trace_ray(spec, f, start, std::polar(1.0, ang), opt));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Period conditions Re int sqrt(V/A) = 0 along straight edges between branch
// points; vertices 0..p-1 are the roots of A, p.. the simple zeros of V.
struct PeriodSystem {
  std::vector<cd> a;
  std::vector<cd> v;  // simple zeros (unknown)
  std::vector<cd> w;  // double zeros (unknown)
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  cd vertex(std::size_t i) const { return i < a.size() ? a[i] : v[i - a.size()]; }
  SqrtProduct integrand() const {
    SqrtProduct f;
    f.half_poles = a;
    f.half_zeros = v;
    f.full_zeros = w;
    return f;
  }
  std::size_t unknowns() const { return 2 * (v.size() + w.size()); }

  Eigen::VectorXd residuals() const {
    const SqrtProduct f = integrand();
    Eigen::VectorXd r(static_cast<long>(edges.size()));
    for (std::size_t e = 0; e < edges.size(); ++e)
      r[static_cast<long>(e)] = segment_integral(f, vertex(edges[e].first), vertex(edges[e].second)).real();
    return r;
  }

  Eigen::MatrixXd jacobian() const {
    const SqrtProduct f = integrand();
    Eigen::MatrixXd J(static_cast<long>(edges.size()), static_cast<long>(unknowns()));
    for (std::size_t j = 0; j < v.size() + w.size(); ++j) {
      SqrtProduct g = f;
      double factor;
      if (j < v.size()) {
        g.half_zeros.erase(g.half_zeros.begin() + static_cast<long>(j));
        g.half_poles.push_back(v[j]);
        factor = -0.5;
      } else {
        g.full_zeros.erase(g.full_zeros.begin() + static_cast<long>(j - v.size()));
        factor = -1.0;
      }
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const cd D = factor * segment_integral(g, vertex(edges[e].first), vertex(edges[e].second));
        J(static_cast<long>(e), static_cast<long>(2 * j)) = D.real();
        J(static_cast<long>(e), static_cast<long>(2 * j + 1)) = -D.imag();
      }
    }
    return J;
  }

  void shift(const Eigen::VectorXd& d, double step) {
    for (std::size_t j = 0; j < v.size() + w.size(); ++j) {
      const cd dz(d[static_cast<long>(2 * j)], d[static_cast<long>(2 * j + 1)]);
      if (j < v.size())
        v[j] += step * dz;
      else
        w[j - v.size()] += step * dz;
    }
  }
};

struct NewtonOutcome {
  bool converged = false;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
};

NewtonOutcome newton(PeriodSystem& sys, const ChebotarevOptions& opt, double S) {
  NewtonOutcome out;
  if (sys.unknowns() == 0) {
    out.residual = sys.edges.empty() ? 0.0 : sys.residuals().cwiseAbs().maxCoeff();
    out.converged = out.residual <= opt.residual_tolerance;
    return out;
  }
  Eigen::VectorXd r = sys.residuals();
  double norm = r.norm();
  for (int it = 0; it < opt.max_newton; ++it) {
    out.iterations = it + 1;
    if (!std::isfinite(norm)) break;
    if (r.cwiseAbs().maxCoeff() < 1e-14 * S) break;
    const Eigen::MatrixXd J = sys.jacobian();
    const Eigen::VectorXd d = J.colPivHouseholderQr().solve(-r);
    if (!d.allFinite()) break;
    // Cap the step so zeros do not jump across the configuration.
    double step = std::min(1.0, 0.5 * S / std::max(d.cwiseAbs().maxCoeff(), 1e-300));
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      PeriodSystem trial = sys;
      trial.shift(d, step);
      const Eigen::VectorXd rt = trial.residuals();
      const double nt = rt.norm();
      if (std::isfinite(nt) && nt < norm) {
        sys = std::move(trial);
        r = rt;
        norm = nt;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  out.residual = r.cwiseAbs().maxCoeff();
  out.converged = std::isfinite(out.residual) && out.residual <= opt.residual_tolerance;
  return out;
}

// Traces all arcs of the candidate compact and checks its combinatorics.
struct Validation {
  bool ok = false;
  std::vector<Trajectory> arcs;
  std::vector<ArcInfo> info;
  std::vector<std::vector<std::size_t>> components;
};

Validation validate_candidate(const QDSpec& spec, const ChebotarevOptions& opt) {
  Validation val;
  const double S = spec.scale();
  const auto clusters = cluster_points(spec.v, 1e-9 * S);
  std::vector<cd> sources(spec.a.begin(), spec.a.end());
  for (const auto& c : clusters)
    if (c.multiplicity == 1) sources.push_back(c.z);
  struct Key {
    int ka, ia, kb, ib;
    bool operator<(const Key& o) const { return std::tie(ka, ia, kb, ib) < std::tie(o.ka, o.ia, o.kb, o.ib); }
  };
  std::map<Key, int> seen;
  for (const cd& src : sources) {
    for (auto& t : trace_trajectories(spec, src, opt.trace)) {
      if (t.end.kind == Endpoint::Kind::unresolved) return val;
      int ka = static_cast<int>(t.start.kind), ia = static_cast<int>(t.start.index);
      int kb = static_cast<int>(t.end.kind), ib = static_cast<int>(t.end.index);
      if (std::tie(kb, ib) < std::tie(ka, ia)) {
        std::swap(ka, kb);
        std::swap(ia, ib);
      }
      const Key key{ka, ia, kb, ib};
      if (seen[key]++ == 0) {
        ArcInfo ai;
        ai.first = t.start;
        ai.second = t.end;
        const bool fa = t.start.kind == Endpoint::Kind::a_root, sa = t.end.kind == Endpoint::Kind::a_root;
        ai.type = fa && sa ? ArcInfo::Type::a_a : (fa || sa ? ArcInfo::Type::a_v : ArcInfo::Type::v_v);
        val.info.push_back(ai);
        val.arcs.push_back(std::move(t));
      }
    }
  }
  // Each arc must be reached from both of its endpoints.
  for (const auto& [k, n] : seen)
    if (n != 2) return val;
  // Degrees: one arc per branch point, three per simple zero.
  std::vector<int> deg_a(spec.a.size(), 0), deg_v(spec.v.size(), 0);
  for (const auto& ai : val.info)
    for (const Endpoint* ep : {&ai.first, &ai.second})
      (ep->kind == Endpoint::Kind::a_root ? deg_a : deg_v)[ep->index]++;
  for (int d : deg_a)
    if (d != 1) return val;
  for (const auto& c : clusters)
    if (c.multiplicity == 1 && deg_v[c.members.front()] != 3) return val;
  // Connected components over branch points.
  const std::size_t p = spec.a.size();
  std::vector<std::size_t> parent(p + spec.v.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  auto id = [&](const Endpoint& e) { return e.kind == Endpoint::Kind::a_root ? e.index : p + e.index; };
  for (const auto& ai : val.info) parent[find(id(ai.first))] = find(id(ai.second));
  std::map<std::size_t, std::vector<std::size_t>> comp;
  for (std::size_t i = 0; i < p; ++i) comp[find(i)].push_back(i);
  for (auto& [r, members] : comp) val.components.push_back(members);
  std::sort(val.components.begin(), val.components.end());
  val.ok = true;
  return val;
}

ChebotarevResult assemble(const PeriodSystem& sys, Validation&& val, const NewtonOutcome& nw, int starts) {
  ChebotarevResult res;
  res.spec.a = sys.a;
  res.spec.v = sys.v;
  for (const cd& w : sys.w) {
    res.double_zeros.push_back(res.spec.v.size());
    res.spec.v.push_back(w);
    res.spec.v.push_back(w);
  }
  const double S = res.spec.scale();
  for (std::size_t i = 0; i < sys.v.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(sys.v[i] - sys.v[j]) < 1e-6 * S) res.non_generic = true;
  res.arcs = std::move(val.arcs);
  res.combinatorics = std::move(val.info);
  res.components = std::move(val.components);
  const SqrtProduct f = sys.integrand();
  for (const auto& ai : res.combinatorics)
    res.period_residuals.push_back(std::abs(segment_integral(f, ai.first.z, ai.second.z).real()));
  res.capacity = capacity_from_qd(res.spec);
  res.newton_iterations = nw.iterations;
  res.starts_tried = starts;
  return res;
}

using Edges = std::vector<std::pair<std::size_t, std::size_t>>;

// All full Steiner topologies on p leaves; Steiner nodes are numbered p..2p-3.
std::vector<Edges> steiner_topologies(std::size_t p) {
  std::vector<Edges> cur{{{0, p}, {1, p}, {2, p}}};
  for (std::size_t leaf = 3; leaf < p; ++leaf) {
    std::vector<Edges> next;
    const std::size_t s = p + leaf - 2;
    for (const auto& t : cur)
      for (std::size_t e = 0; e < t.size(); ++e) {
        Edges n = t;
        const auto [x, y] = n[e];
        n[e] = {x, s};
        n.push_back({s, y});
        n.push_back({leaf, s});
        next.push_back(std::move(n));
      }
    cur = std::move(next);
  }
  return cur;
}

// Euclidean Steiner point positions for a topology by Weiszfeld sweeps.
std::vector<cd> steiner_points(const std::vector<cd>& e, const Edges& t, double* length) {
  const std::size_t p = e.size();
  cd centroid = 0.0;
  for (const cd& z : e) centroid += z;
  centroid /= static_cast<double>(p);
  std::vector<cd> pos(e.begin(), e.end());
  pos.resize(2 * p - 2, centroid);
  std::vector<std::vector<std::size_t>> nbr(2 * p - 2);
  for (const auto& [x, y] : t) {
    nbr[x].push_back(y);
    nbr[y].push_back(x);
  }
  // Start each Steiner node at the mean of its leaf neighbours, if any.
  for (std::size_t s = p; s < 2 * p - 2; ++s) {
    cd acc = 0.0;
    int n = 0;
    for (std::size_t q : nbr[s])
      if (q < p) {
        acc += e[q];
        ++n;
      }
    if (n) pos[s] = 0.5 * (acc / static_cast<double>(n) + centroid);
  }
  for (int it = 0; it < 500; ++it)
    for (std::size_t s = p; s < 2 * p - 2; ++s) {
      cd num = 0.0;
      double den = 0.0;
      for (std::size_t q : nbr[s]) {
        const double d = std::max(std::abs(pos[q] - pos[s]), 1e-12);
        num += pos[q] / d;
        den += 1.0 / d;
      }
      pos[s] = num / den;
    }
  if (length) {
    *length = 0.0;
    for (const auto& [x, y] : t) *length += std::abs(pos[x] - pos[y]);
  }
  return {pos.begin() + static_cast<long>(p), pos.end()};
}

void check_points(const std::vector<cd>& e) {
  if (e.size() < 2) throw std::invalid_argument("need at least two points");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!std::isfinite(e[i].real()) || !std::isfinite(e[i].imag())) throw std::invalid_argument("non-finite point");
    for (std::size_t j = 0; j < i; ++j)
      if (e[i] == e[j]) throw std::invalid_argument("points must be distinct");
  }
}

ChebotarevResult two_point(const std::vector<cd>& e) {
  ChebotarevResult r;
  r.spec.a = e;
  Trajectory t;
  t.points = {e[0], e[1]};
  t.start = {Endpoint::Kind::a_root, 0, false, e[0]};
  t.end = {Endpoint::Kind::a_root, 1, false, e[1]};
  t.arclength = std::abs(e[1] - e[0]);
  r.arcs.push_back(t);
  r.combinatorics.push_back({ArcInfo::Type::a_a, t.start, t.end});
  SqrtProduct f;
  f.half_poles = e;
  r.period_residuals.push_back(std::abs(segment_integral(f, e[0], e[1]).real()));
  r.components = {{0, 1}};
  r.capacity = 0.25 * std::abs(e[1] - e[0]);
  return r;
}

}  // namespace

ChebotarevResult chebotarev_solve(const std::vector<cd>& e, const ChebotarevOptions& opt) {
  check_points(e);
  const std::size_t p = e.size();
  if (p == 2) return two_point(e);
  QDSpec probe{e, std::vector<cd>(p - 2)};
  const double S = probe.scale();
  std::vector<std::pair<Edges, std::vector<cd>>> starts;
  if (p <= 6) {
    std::vector<std::tuple<double, Edges, std::vector<cd>>> ranked;
    for (auto& t : steiner_topologies(p)) {
      double len = 0.0;
      auto s = steiner_points(e, t, &len);
      ranked.emplace_back(len, std::move(t), std::move(s));
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
    for (auto& [len, t, s] : ranked) starts.emplace_back(std::move(t), std::move(s));
  }
  // Multistart: the shortest topology with Steiner points perturbed around their centroid.
  {
    const auto topo = starts.empty() ? steiner_topologies(p).front() : starts.front().first;
    double len = 0.0;
    const auto base = steiner_points(e, topo, &len);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 0.15 * S);
    for (int k = 0; k < opt.multistarts; ++k) {
      std::vector<cd> s = base;
      for (auto& z : s) z += cd(gauss(rng), gauss(rng));
      starts.emplace_back(topo, std::move(s));
    }
  }
  std::vector<cd> last;
  std::vector<double> last_res;
  int tried = 0;
  for (auto& [topo, init] : starts) {
    ++tried;
    PeriodSystem sys;
    sys.a = e;
    sys.v = init;
    sys.edges = topo;
    const NewtonOutcome nw = newton(sys, opt, S);
    last = sys.v;
    const Eigen::VectorXd r = sys.residuals();
    last_res.assign(r.data(), r.data() + r.size());
    if (!nw.converged) continue;
    const QDSpec spec{e, sys.v};
    Validation val = validate_candidate(spec, opt);
    if (!val.ok || val.components.size() != 1 || val.arcs.size() != 2 * p - 3) continue;
    return assemble(sys, std::move(val), nw, tried);
  }
  throw ScurveError("Chebotarev period system did not converge to a valid continuum", last, last_res);
}

ChebotarevResult fuse_partition(const std::vector<cd>& e1, const std::vector<cd>& e2, const ChebotarevOptions& opt) {
  if (e2.empty()) return chebotarev_solve(e1, opt);
  if (e1.size() < 2 || e2.size() < 2) throw std::invalid_argument("each part needs at least two points");
  std::vector<cd> e = e1;
  e.insert(e.end(), e2.begin(), e2.end());
  check_points(e);
  const std::size_t p = e.size(), p1 = e1.size();
  const QDSpec probe{e, std::vector<cd>(p - 2)};
  const double S = probe.scale();
  // Per-part continua give the simple zeros and the tree edges within each part.
  const ChebotarevResult r1 = chebotarev_solve(e1, opt);
  const ChebotarevResult r2 = chebotarev_solve(e2, opt);
  PeriodSystem sys;
  sys.a = e;
  sys.v = r1.spec.v;
  sys.v.insert(sys.v.end(), r2.spec.v.begin(), r2.spec.v.end());
  auto global = [&](const Endpoint& ep, int part) -> std::size_t {
    if (ep.kind == Endpoint::Kind::a_root) return part == 0 ? ep.index : p1 + ep.index;
    return p + (part == 0 ? ep.index : r1.spec.v.size() + ep.index);
  };
  for (const auto& ai : r1.combinatorics) sys.edges.emplace_back(global(ai.first, 0), global(ai.second, 0));
  for (const auto& ai : r2.combinatorics) sys.edges.emplace_back(global(ai.first, 1), global(ai.second, 1));
  // Closest pair of vertices across the parts carries the connecting edge and the double zero.
  std::size_t bi = 0, bj = 0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t nv1 = r1.spec.v.size();
  for (std::size_t i = 0; i < p + sys.v.size(); ++i)
    for (std::size_t j = 0; j < p + sys.v.size(); ++j) {
      const bool in1 = i < p ? i < p1 : i - p < nv1;
      const bool jn2 = j < p ? j >= p1 : j - p >= nv1;
      if (!in1 || !jn2) continue;
      const double d = std::abs(sys.vertex(i) - sys.vertex(j));
      if (d < best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  sys.edges.emplace_back(bi, bj);
  const cd w0 = 0.5 * (sys.vertex(bi) + sys.vertex(bj));
  std::vector<std::vector<std::size_t>> expected(2);
  for (std::size_t i = 0; i < p; ++i) expected[i < p1 ? 0 : 1].push_back(i);
  std::sort(expected.begin(), expected.end());
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 0.1 * best);
  std::vector<cd> last;
  std::vector<double> last_res;
  const PeriodSystem base = sys;
  for (int k = 0; k <= opt.multistarts; ++k) {
    PeriodSystem trial = base;
    trial.w = {k == 0 ? w0 : w0 + cd(gauss(rng), gauss(rng))};
    const NewtonOutcome nw = newton(trial, opt, S);
    last = trial.v;
    last.insert(last.end(), trial.w.begin(), trial.w.end());
    const Eigen::VectorXd r = trial.residuals();
    last_res.assign(r.data(), r.data() + r.size());
    if (!nw.converged) continue;
    QDSpec spec{e, trial.v};
    spec.v.push_back(trial.w[0]);
    spec.v.push_back(trial.w[0]);
    Validation val = validate_candidate(spec, opt);
    if (!val.ok || val.components != expected) continue;
    return assemble(trial, std::move(val), nw, k + 1);
  }
  throw ScurveError("fused period system did not converge to the requested partition", last, last_res);
}

namespace {

cd log1p_c(cd z) {
  const cd one_plus = 1.0 + z;
  return {0.5 * std::log1p(2.0 * z.real() + std::norm(z)), std::arg(one_plus)};
}

cd expm1_c(cd z) {
  const double ex = std::expm1(z.real());
  const double s = std::sin(0.5 * z.imag());
  return {ex * std::cos(z.imag()) - 2.0 * s * s, (ex + 1.0) * std::sin(z.imag())};
}

// log(t f(t)) for |t| beyond all critical points, with f ~ 1/t.
cd log_tail(const SqrtProduct& f, cd t) {
  cd S = 0.0;
  for (const cd& c : f.half_zeros) S += 0.5 * log1p_c(-c / t);
  for (const cd& c : f.half_poles) S -= 0.5 * log1p_c(-c / t);
  for (const cd& c : f.full_zeros) S += log1p_c(-c / t);
  return S;
}

}  // namespace

double capacity_from_qd(const QDSpec& spec) {
  spec.validate();
  const double S = spec.scale();
  const SqrtProduct f = integrand_of(spec, 1e-9 * S);
  double R = 0.0;
  for (const cd& z : spec.a) R = std::max(R, std::abs(z));
  for (const cd& z : spec.v) R = std::max(R, std::abs(z));
  R = 2.0 * R + 1.0;
  const cd a0 = spec.a.front();
  // Pick the outward direction whose segment keeps farthest from other critical points.
  cd z0;
  double best = -1.0;
  for (int k = 0; k < 16; ++k) {
    const cd cand = std::polar(R, 2.0 * pi * (k + 0.5) / 16.0);
    double dmin = std::numeric_limits<double>::infinity();
    for (const cd& c : spec.a)
      if (c != a0) dmin = std::min(dmin, dist_to_segment(c, cand, a0));
    for (const cd& c : spec.v) dmin = std::min(dmin, dist_to_segment(c, cand, a0));
    if (dmin > best) {
      best = dmin;
      z0 = cand;
    }
  }
  const SegmentIntegrand seg(f, z0, a0);
  const cd inner = -integrate_theta(seg);  // a0 -> z0 on the branch principal at z0
  const cd f_seg = seg.value(0.0);
  const cd f_asym = std::exp(log_tail(f, z0)) / z0;
  const double sign = (f_seg / f_asym).real() < 0.0 ? -1.0 : 1.0;
  double err = 0.0;
  const cd tail = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double u) { return expm1_c(log_tail(f, z0 / u)) / u; }, 0.0, 1.0, 12, 1e-12, &err);
  const double robin = (sign * inner + tail).real() - std::log(std::abs(z0));
  return std::exp(-robin);
}

// ---------------------------------------------------------------------------

GFunctionData g_function_Y(const std::vector<cd>& x_roots) {
  const std::size_t n = x_roots.size();
  if (n < 2 || n % 2) throw std::invalid_argument("X must have even degree >= 2");
  check_points(x_roots);
  GFunctionData out;
  out.x_roots = x_roots;
  out.X = poly_from_roots(x_roots);
  const std::size_t g = n / 2 - 1;
  std::vector<cd> sorted = x_roots;
  std::sort(sorted.begin(), sorted.end(), [](cd a, cd b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  // Work in tau = (t - c0) / rho for conditioning; Y(t) = rho^g Ytilde(tau).
  cd c0 = 0.0;
  for (const cd& z : sorted) c0 += z;
  c0 /= static_cast<double>(n);
  double rho = 0.0;
  for (const cd& z : sorted) rho = std::max(rho, std::abs(z - c0));
  std::vector<cd> tau;
  for (const cd& z : sorted) tau.push_back((z - c0) / rho);
  const std::size_t m = n - 1;  // chain edges
  std::vector<std::vector<cd>> P(m, std::vector<cd>(g + 1));
  SqrtProduct f;
  f.half_poles = tau;
  for (std::size_t j = 0; j <= g; ++j) {
    f.poly.assign(j + 1, cd(0.0));
    f.poly[j] = 1.0;
    for (std::size_t e = 0; e < m; ++e) P[e][j] = segment_integral(f, tau[e], tau[e + 1]);
  }
  std::vector<cd> ytilde(g + 1, cd(0.0));
  ytilde[g] = 1.0;
  if (g > 0) {
    Eigen::MatrixXd M(static_cast<long>(m), static_cast<long>(2 * g));
    Eigen::VectorXd rhs(static_cast<long>(m));
    for (std::size_t e = 0; e < m; ++e) {
      for (std::size_t j = 0; j < g; ++j) {
        M(static_cast<long>(e), static_cast<long>(2 * j)) = P[e][j].real();
        M(static_cast<long>(e), static_cast<long>(2 * j + 1)) = -P[e][j].imag();
      }
      rhs[static_cast<long>(e)] = -P[e][g].real();
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] > 1e-12 * sv[0])) throw ScurveError("singular period matrix", x_roots, {});
    const Eigen::VectorXd sol = svd.solve(rhs);
    for (std::size_t j = 0; j < g; ++j) ytilde[j] = cd(sol[static_cast<long>(2 * j)], sol[static_cast<long>(2 * j + 1)]);
  }
  for (std::size_t e = 0; e < m; ++e) {
    cd acc = 0.0;
    for (std::size_t j = 0; j <= g; ++j) acc += ytilde[j] * P[e][j];
    out.period_residuals.push_back(std::abs(acc.real()));
  }
  // Expand rho^g Ytilde((t - c0)/rho) = sum_j ytilde_j rho^{g-j} (t - c0)^j.
  out.Y.assign(g + 1, cd(0.0));
  std::vector<cd> power{1.0};
  for (std::size_t j = 0; j <= g; ++j) {
    const cd coef = ytilde[j] * std::pow(rho, static_cast<double>(g - j));
    for (std::size_t k = 0; k < power.size(); ++k) out.Y[k] += coef * power[k];
    power = poly_mul(power, std::vector<cd>{-c0, 1.0});
  }
  out.Y[g] = 1.0;
  if (g == 1)
    out.y_roots = {-out.Y[0]};
  else if (g > 1)
    out.y_roots = roots(out.Y).roots;
  return out;
}

GFunctionData g_function_Y_of_poly(const std::vector<cd>& X) {
  std::vector<cd> c = X;
  while (!c.empty() && c.back() == cd(0.0)) c.pop_back();
  if (c.size() < 3) throw std::invalid_argument("X must have even degree >= 2");
  const cd lead = c.back();
  for (auto& x : c) x /= lead;
  return g_function_Y(roots(c).roots);
}

FixedPointReport fixed_point_check(const std::vector<cd>& a, const std::vector<cd>& v, double tolerance) {
  QDSpec spec{a, v};
  spec.validate();
  std::vector<cd> all = a;
  all.insert(all.end(), v.begin(), v.end());
  const double S = spec.scale();
  std::vector<cd> reduced;
  std::vector<cd> y_factor_roots;
  for (const auto& c : cluster_points(all, 1e-8 * S)) {
    cd mean = 0.0;
    for (std::size_t i : c.members) mean += all[i];
    mean /= static_cast<double>(c.members.size());
    for (int k = 0; k < c.multiplicity / 2; ++k) y_factor_roots.push_back(mean);
    if (c.multiplicity % 2) reduced.push_back(mean);
  }
  FixedPointReport rep;
  std::vector<cd> ytilde{1.0};
  if (reduced.size() > 2) ytilde = g_function_Y(reduced).Y;
  rep.Y = poly_mul(ytilde, poly_from_roots(y_factor_roots));
  const std::vector<cd> V = poly_from_roots(v);
  rep.residual = 0.0;
  for (std::size_t j = 0; j < std::max(V.size(), rep.Y.size()); ++j) {
    const cd yj = j < rep.Y.size() ? rep.Y[j] : cd(0.0);
    const cd vj = j < V.size() ? V[j] : cd(0.0);
    rep.residual = std::max(rep.residual, std::abs(yj - vj));
  }
  rep.is_fixed = rep.residual <= tolerance;
  return rep;
}

// ---------------------------------------------------------------------------

CubicModel cubic_fit(const Measure& lambda1, const Measure& lambda2, const std::vector<cd>& a,
                     const std::vector<cd>& fit_probes, const std::vector<cd>& heldout_probes) {
  if (!(total_mass(lambda1) > 0.0) || !(total_mass(lambda2) > 0.0))
    throw std::invalid_argument("both measures must have positive mass");
  const std::size_t p = a.size();
  if (p < 3) throw std::invalid_argument("A must have degree at least 3");
  const std::size_t dE = p - 2, dF = p - 3;
  if (fit_probes.size() < dE + 1) throw std::invalid_argument("not enough fit probes");
  CubicModel out;
  out.a = a;
  const std::vector<cd> A = poly_from_roots(a);
  double rho = 0.0;
  for (const cd& z : fit_probes) rho = std::max(rho, std::abs(z));
  auto fit = [&](const std::vector<cd>& values, std::size_t deg) {
    Eigen::MatrixXcd M(static_cast<long>(fit_probes.size()), static_cast<long>(deg + 1));
    Eigen::VectorXcd b(static_cast<long>(fit_probes.size()));
    for (std::size_t i = 0; i < fit_probes.size(); ++i) {
      cd pw = 1.0;
      for (std::size_t j = 0; j <= deg; ++j) {
        M(static_cast<long>(i), static_cast<long>(j)) = pw;
        pw *= fit_probes[i] / rho;
      }
      b[static_cast<long>(i)] = values[i];
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(M);
    if (qr.rank() < static_cast<long>(deg + 1)) throw std::runtime_error("rank-deficient cubic fit");
    const Eigen::VectorXcd x = qr.solve(b);
    std::vector<cd> c(deg + 1);
    for (std::size_t j = 0; j <= deg; ++j) c[j] = x[static_cast<long>(j)] / std::pow(rho, static_cast<double>(j));
    out.fit_residual = std::max(out.fit_residual, (M * x - b).cwiseAbs().maxCoeff());
    return c;
  };
  std::vector<cd> r1v, r0v;
  for (const cd& z : fit_probes) {
    const cd C1 = cauchy_transform(lambda1, z), C2 = cauchy_transform(lambda2, z);
    const cd C = C1 + C2;
    const cd Az = horner(A, z);
    r1v.push_back(Az * (C * C - C1 * C2) / 3.0);
    r0v.push_back(Az * (C1 * C2 * C) / 2.0);
    out.branch_sum = std::max(out.branch_sum, std::abs(C1 + C2 - C));
  }
  out.E = fit(r1v, dE);
  out.F = fit(r0v, dF);
  out.e_leading = out.E.back();
  out.f_leading = out.F.back();
  out.branch_residual.assign(3, 0.0);
  for (const cd& z : heldout_probes) {
    const cd C1 = cauchy_transform(lambda1, z), C2 = cauchy_transform(lambda2, z);
    const cd C = C1 + C2;
    const cd Az = horner(A, z), Ez = horner(out.E, z), Fz = horner(out.F, z);
    const cd branches[3] = {C1, C2, -C};
    for (int k = 0; k < 3; ++k) {
      const cd w = branches[k];
      out.branch_residual[static_cast<std::size_t>(k)] =
          std::max(out.branch_residual[static_cast<std::size_t>(k)], std::abs(Az * w * w * w - 3.0 * Ez * w + 2.0 * Fz));
    }
    out.branch_sum = std::max(out.branch_sum, std::abs(C1 + C2 - C));
  }
  out.heldout_residual = *std::max_element(out.branch_residual.begin(), out.branch_residual.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

json complex_list(const std::vector<cd>& zs) {
  json j = json::array();
  for (const cd& z : zs) j.push_back(complex_json(z));
  return j;
}

json endpoint_json(const Endpoint& e) {
  json j{{"kind", to_string(e.kind)}, {"z", complex_json(e.z)}};
  if (e.kind != Endpoint::Kind::unresolved) j["index"] = e.index;
  if (e.escaped) j["escaped"] = true;
  return j;
}

}  // namespace

std::string to_string(Endpoint::Kind k) {
  switch (k) {
    case Endpoint::Kind::a_root:
      return "a-root";
    case Endpoint::Kind::v_root:
      return "v-root";
    default:
      return "unresolved";
  }
}

json to_json(const Trajectory& t) {
  return {{"start", endpoint_json(t.start)},
          {"end", endpoint_json(t.end)},
          {"arclength", t.arclength},
          {"constancy", t.constancy},
          {"points", complex_list(t.points)}};
}

json to_json(const ChebotarevResult& r) {
  json j;
  j["a"] = complex_list(r.spec.a);
  j["v"] = complex_list(r.spec.v);
  j["V"] = complex_list(r.spec.V());
  j["capacity"] = r.capacity;
  j["non_generic"] = r.non_generic;
  j["newton_iterations"] = r.newton_iterations;
  j["period_residuals"] = r.period_residuals;
  j["components"] = r.components;
  j["double_zeros"] = r.double_zeros;
  j["arcs"] = json::array();
  for (std::size_t i = 0; i < r.arcs.size(); ++i) {
    json a = to_json(r.arcs[i]);
    const auto type = r.combinatorics[i].type;
    a["type"] = type == ArcInfo::Type::a_v ? "a-v" : type == ArcInfo::Type::v_v ? "v-v" : "a-a";
    j["arcs"].push_back(std::move(a));
  }
  return j;
}

json to_json(const GFunctionData& g) {
  return {{"x_roots", complex_list(g.x_roots)},
          {"X", complex_list(g.X)},
          {"Y", complex_list(g.Y)},
          {"y_roots", complex_list(g.y_roots)},
          {"period_residuals", g.period_residuals}};
}

json to_json(const CubicModel& m) {
  return {{"a", complex_list(m.a)},
          {"E", complex_list(m.E)},
          {"F", complex_list(m.F)},
          {"E_leading", complex_json(m.e_leading)},
          {"F_leading", complex_json(m.f_leading)},
          {"fit_residual", m.fit_residual},
          {"heldout_residual", m.heldout_residual},
          {"branch_residual", m.branch_residual},
          {"branch_sum", m.branch_sum}};
}

std::string portrait_svg(const ChebotarevResult& r, int size) {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
  auto extend = [&](cd z) {
    lo_x = std::min(lo_x, z.real());
    hi_x = std::max(hi_x, z.real());
    lo_y = std::min(lo_y, z.imag());
    hi_y = std::max(hi_y, z.imag());
  };
  for (const auto& t : r.arcs)
    for (const cd& z : t.points) extend(z);
  for (const cd& z : r.spec.a) extend(z);
  for (const cd& z : r.spec.v) extend(z);
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  const double pad = 0.08 * span;
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  const double k = size / (span + 2.0 * pad);
  auto X = [&](cd z) { return 0.5 * size + k * (z.real() - cx); };
  auto Y = [&](cd z) { return 0.5 * size - k * (z.imag() - cy); };
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& t : r.arcs) {
    os << "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < t.points.size(); ++i) os << (i ? " " : "") << X(t.points[i]) << ',' << Y(t.points[i]);
    os << "\"/>\n";
  }
  for (const cd& z : r.spec.a)
    os << "<circle cx=\"" << X(z) << "\" cy=\"" << Y(z) << "\" r=\"4\" fill=\"#b22222\"/>\n";
  for (const cd& z : r.spec.v)
    os << "<circle cx=\"" << X(z) << "\" cy=\"" << Y(z) << "\" r=\"4\" fill=\"none\" stroke=\"#2e7d32\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace hpl
