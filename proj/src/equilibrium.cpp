#include "hpl/equilibrium.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hpl/kernels.hpp"

namespace hpl {

using nlohmann::json;

FieldSpec FieldSpec::polynomial(std::vector<double> c) {
  FieldSpec f;
  f.terms.emplace_back(Polynomial{std::move(c)});
  return f;
}

FieldSpec FieldSpec::half_potential(Measure m) {
  FieldSpec f;
  f.terms.emplace_back(HalfPotential{std::move(m)});
  return f;
}

FieldSpec FieldSpec::operator+(const FieldSpec& o) const {
  FieldSpec f = *this;
  f.terms.insert(f.terms.end(), o.terms.begin(), o.terms.end());
  return f;
}

double FieldSpec::operator()(double x) const {
  double acc = 0.0;
  for (const auto& t : terms) {
    if (const auto* p = std::get_if<Polynomial>(&t)) {
      double v = 0.0;
      for (std::size_t j = p->coeffs.size(); j-- > 0;) v = v * x + p->coeffs[j];
      acc += v;
    } else {
      acc += 0.5 * potential(std::get<HalfPotential>(t).measure, cd(x, 0.0));
    }
  }
  return acc;
}

std::vector<double> FieldSpec::on_nodes(const std::vector<double>& x) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (*this)(x[i]);
  return out;
}

namespace {

double objective(const Eigen::MatrixXd& K, const Eigen::VectorXd& phi, const Eigen::VectorXd& m) {
  return m.dot(K * m) + 2.0 * phi.dot(m);
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double t) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double th = (cum - t) / static_cast<double>(j + 1);
    if (u[j] - th > 0.0) theta = th;
  }
  return (v.array() - theta).max(0.0).matrix();
}

struct Kkt {
  double w = 0.0;
  double residual = 0.0;
  std::vector<bool> support;
};

Kkt kkt_of(const Eigen::VectorXd& P, const Eigen::VectorXd& m, double t, double thr) {
  Kkt k;
  k.support.assign(static_cast<std::size_t>(m.size()), false);
  double sw = 0.0, s = 0.0;
  for (long i = 0; i < m.size(); ++i)
    if (m[i] > thr * t) {
      k.support[static_cast<std::size_t>(i)] = true;
      sw += m[i] * P[i];
      s += m[i];
    }
  k.w = s > 0 ? sw / s : P.minCoeff();
  for (long i = 0; i < m.size(); ++i) {
    const double d = P[i] - k.w;
    k.residual = std::max(k.residual, k.support[static_cast<std::size_t>(i)] ? std::abs(d) : std::max(0.0, -d));
  }
  return k;
}

// Primal active-set iteration on the equality-constrained KKT system.
bool active_set(const Eigen::MatrixXd& K, const Eigen::VectorXd& phi, double t, std::vector<bool>& S,
                Eigen::VectorXd& m, double& w) {
  const long n = K.rows();
  const long max_iter = 10 * n + 50;
  for (long it = 0; it < max_iter; ++it) {
    std::vector<long> idx;
    for (long i = 0; i < n; ++i)
      if (S[static_cast<std::size_t>(i)]) idx.push_back(i);
    if (idx.empty()) {
      long best = 0;
      for (long i = 1; i < n; ++i)
        if (phi[i] < phi[best]) best = i;
      S[static_cast<std::size_t>(best)] = true;
      continue;
    }
    const long k = static_cast<long>(idx.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (long a = 0; a < k; ++a) {
      for (long b = 0; b < k; ++b) A(a, b) = K(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
      A(a, k) = -1.0;
      A(k, a) = 1.0;
      rhs[a] = -phi[idx[static_cast<std::size_t>(a)]];
    }
    rhs[k] = t;
    const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
    bool negative = false;
    for (long a = 0; a < k; ++a)
      if (sol[a] < 0.0) {
        S[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])] = false;
        negative = true;
      }
    if (negative) continue;
    m.setZero(n);
    for (long a = 0; a < k; ++a) m[idx[static_cast<std::size_t>(a)]] = sol[a];
    w = sol[k];
    const Eigen::VectorXd P = K * m + phi;
    long worst = -1;
    double worst_v = -1e-13 * (1.0 + std::abs(w));
    for (long i = 0; i < n; ++i)
      if (!S[static_cast<std::size_t>(i)] && P[i] - w < worst_v) {
        worst_v = P[i] - w;
        worst = i;
      }
    if (worst < 0) return true;
    S[static_cast<std::size_t>(worst)] = true;
  }
  return false;
}

}  // namespace

ScalarEquilibrium solve_discrete_equilibrium(const GridMeasure& grid, const Eigen::MatrixXd& K,
                                             const Eigen::VectorXd& phi, double t, const SolverOptions& opt,
                                             const Eigen::VectorXd* start) {
  if (!(t > 0.0)) throw std::invalid_argument("equilibrium mass must be positive");
  const long n = K.rows();
  Eigen::VectorXd m = start ? *start : Eigen::VectorXd::Constant(n, t / static_cast<double>(n));
  m = project_simplex(m, t);
  ScalarEquilibrium out;
  // Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking.
  Eigen::VectorXd g = 2.0 * (K * m + phi);
  double step = 1.0 / (2.0 * K.cwiseAbs().rowwise().sum().maxCoeff());
  double f = objective(K, phi, m);
  Kkt kkt = kkt_of(0.5 * g, m, t, opt.support_threshold);
  out.residual_trace.push_back(kkt.residual);
  for (int it = 0; it < opt.gradient_iterations && kkt.residual > opt.kkt_tolerance; ++it) {
    double a = step;
    Eigen::VectorXd trial;
    double ft = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      trial = project_simplex(m - a * g, t);
      ft = objective(K, phi, trial);
      if (ft <= f + 1e-4 * g.dot(trial - m)) break;
      a *= 0.5;
    }
    const Eigen::VectorXd s = trial - m;
    const Eigen::VectorXd gn = 2.0 * (K * trial + phi);
    const double sy = s.dot(gn - g);
    step = sy > 0 ? s.squaredNorm() / sy : step;
    m = trial;
    g = gn;
    f = ft;
    kkt = kkt_of(0.5 * g, m, t, opt.support_threshold);
    out.residual_trace.push_back(kkt.residual);
    if (s.norm() == 0.0) break;
  }
  double w = kkt.w;
  if (kkt.residual > opt.kkt_tolerance) {
    out.used_active_set = true;
    std::vector<bool> S = kkt.support;
    Eigen::VectorXd ma = m;
    if (!active_set(K, phi, t, S, ma, w))
      throw EquilibriumError("active-set fallback did not converge", out.residual_trace);
    m = ma;
    const Eigen::VectorXd P = K * m + phi;
    kkt = kkt_of(P, m, t, opt.support_threshold);
    kkt.w = w;
    kkt.residual = 0.0;
    for (long i = 0; i < n; ++i) {
      const double d = P[i] - w;
      kkt.residual = std::max(kkt.residual, kkt.support[static_cast<std::size_t>(i)] ? std::abs(d) : std::max(0.0, -d));
    }
    out.residual_trace.push_back(kkt.residual);
  }
  if (kkt.residual > opt.kkt_tolerance)
    throw EquilibriumError("equilibrium KKT residual above tolerance", out.residual_trace);
  // Exact mass bookkeeping: the constraint is restored to rounding.
  m *= t / m.sum();
  out.measure = grid.with_weights(std::vector<double>(m.data(), m.data() + m.size()));
  out.w = kkt.w;
  out.kkt_residual = kkt.residual;
  out.support = kkt.support;
  return out;
}

ScalarEquilibrium scalar_weighted_equilibrium(const IntervalSet& F, const FieldSpec& phi, double t, std::size_t M,
                                              const SolverOptions& opt) {
  if (M < 50) throw std::invalid_argument("grid resolution must be at least 50 per interval");
  GridMeasure grid = GridMeasure::chebyshev(F, M);
  const Eigen::MatrixXd K = log_kernel(grid.nodes, grid.spacing);
  const std::vector<double> f = phi.on_nodes(grid.nodes);
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument("external field is not finite on the grid");
  const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<long>(f.size()));
  return solve_discrete_equilibrium(grid, K, fv, t, opt);
}

void AngelescoProblem::validate() const {
  if (sets.empty()) throw std::invalid_argument("Angelesco problem needs at least one component");
  if (!masses.empty() && masses.size() != sets.size()) throw std::invalid_argument("mass vector length mismatch");
  for (double t : masses)
    if (!(t > 0.0)) throw std::invalid_argument("masses must be positive");
  for (const auto& s : sets) s.validate();
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      for (const auto& a : sets[i].parts)
        for (const auto& b : sets[j].parts)
          if (!(a.b < b.a || b.b < a.a)) throw std::invalid_argument("Angelesco components must be disjoint");
  if (grid < 50) throw std::invalid_argument("grid resolution must be at least 50 per interval");
}

namespace {

struct Discretization {
  std::vector<GridMeasure> grids;
  std::vector<Eigen::MatrixXd> self;
  std::vector<std::vector<Eigen::MatrixXd>> cross;  // cross[k][l] rows on grid k
  std::vector<double> masses;
};

Discretization discretize(const AngelescoProblem& p) {
  Discretization d;
  const std::size_t s = p.sets.size();
  d.masses = p.masses.empty() ? std::vector<double>(s, 1.0) : p.masses;
  for (const auto& F : p.sets) {
    d.grids.push_back(GridMeasure::chebyshev(F, p.grid));
    d.self.push_back(log_kernel(d.grids.back().nodes, d.grids.back().spacing));
  }
  d.cross.assign(s, std::vector<Eigen::MatrixXd>(s));
  for (std::size_t k = 0; k < s; ++k)
    for (std::size_t l = 0; l < s; ++l)
      if (k != l) d.cross[k][l] = cross_log_kernel(d.grids[k].nodes, d.grids[l].nodes);
  return d;
}

double energy_of(const Discretization& d, const std::vector<Eigen::VectorXd>& m) {
  double e = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    e += 2.0 * m[k].dot(d.self[k] * m[k]);
    for (std::size_t l = 0; l < m.size(); ++l)
      if (l != k) e += m[k].dot(d.cross[k][l] * m[l]);
  }
  return e;
}

Eigen::VectorXd field_for(const Discretization& d, const std::vector<Eigen::VectorXd>& m, std::size_t k) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<long>(d.grids[k].nodes.size()));
  for (std::size_t l = 0; l < m.size(); ++l)
    if (l != k) phi += 0.5 * (d.cross[k][l] * m[l]);
  return phi;
}

Eigen::VectorXd total_potential(const Discretization& d, const std::vector<Eigen::VectorXd>& m, std::size_t k) {
  return 2.0 * (d.self[k] * m[k] + field_for(d, m, k));
}

}  // namespace

EquilibriumSolution solve_angelesco(const AngelescoProblem& problem, const SolverOptions& opt, Initialization init) {
  problem.validate();
  const Discretization d = discretize(problem);
  const std::size_t s = problem.sets.size();
  std::vector<Eigen::VectorXd> m(s);
  for (std::size_t k = 0; k < s; ++k) {
    const auto& g = d.grids[k];
    Eigen::VectorXd v(static_cast<long>(g.nodes.size()));
    for (std::size_t i = 0; i < g.nodes.size(); ++i) v[static_cast<long>(i)] = init == Initialization::arcsine ? 1.0 : g.spacing[i];
    m[k] = v * (d.masses[k] / v.sum());
  }
  EquilibriumSolution sol;
  sol.w.assign(s, 0.0);
  sol.kkt_residuals.assign(s, 0.0);
  sol.support.assign(s, {});
  // Component solves must be close to exact minimizers for the sweep energy to descend
  // and for symmetric problems to stay symmetric.
  SolverOptions sub = opt;
  sub.kkt_tolerance = 1e-4 * opt.kkt_tolerance;
  double prev = energy_of(d, m);
  double prev_worst = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    const std::vector<Eigen::VectorXd> before = m;
    for (std::size_t k = 0; k < s; ++k) {
      const Eigen::VectorXd phi = field_for(d, m, k);
      ScalarEquilibrium r = solve_discrete_equilibrium(d.grids[k], d.self[k], phi, d.masses[k], sub, &m[k]);
      m[k] = Eigen::Map<const Eigen::VectorXd>(r.measure.weights.data(), static_cast<long>(r.measure.weights.size()));
    }
    const double e = energy_of(d, m);
    // Exact block minimization never raises the energy, so a rise is rounding
    // at the minimum: keep the previous iterate and stop.
    if (e > prev) {
      m = before;
      converged = prev_worst <= opt.kkt_tolerance;
      break;
    }
    sol.energy_trace.push_back(e);
    sol.sweeps = sweep;
    double worst = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      const Eigen::VectorXd W = total_potential(d, m, k);
      Kkt kk = kkt_of(W, m[k], d.masses[k], opt.support_threshold);
      sol.w[k] = kk.w;
      sol.kkt_residuals[k] = kk.residual;
      sol.support[k] = kk.support;
      worst = std::max(worst, kk.residual);
    }
    const double decrease = prev - e;
    prev = e;
    prev_worst = worst;
    if (std::abs(decrease) < opt.energy_tolerance && worst <= opt.kkt_tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw EquilibriumError("vector equilibrium relaxation did not converge", sol.energy_trace);
  sol.energy = prev;
  for (std::size_t k = 0; k < s; ++k)
    sol.components.push_back(d.grids[k].with_weights(std::vector<double>(m[k].data(), m[k].data() + m[k].size())));
  return sol;
}

double mutual_energy(const Measure& mu, const Measure& nu) {
  auto atomic = [](const Measure& x) {
    return std::holds_alternative<DiscreteMeasure>(x) || std::holds_alternative<GridMeasure>(x);
  };
  auto pair_with_atoms = [](const Measure& field, const Measure& atoms) {
    double acc = 0.0;
    if (const auto* dm = std::get_if<DiscreteMeasure>(&atoms)) {
      for (const auto& [z, w] : dm->atoms) acc += w * potential(field, z);
    } else {
      const auto& g = std::get<GridMeasure>(atoms);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) acc += g.weights[i] * potential(field, cd(g.nodes[i], 0.0));
    }
    return acc;
  };
  if (atomic(nu)) return pair_with_atoms(mu, nu);
  if (atomic(mu)) return pair_with_atoms(nu, mu);
  const auto* a1 = std::get_if<ArcsineMeasure>(&mu);
  const auto* a2 = std::get_if<ArcsineMeasure>(&nu);
  if (a1 && a2 && a1->a == a2->a && a1->b == a2->b) return -a1->mass * a2->mass * std::log(0.25 * (a1->b - a1->a));
  const auto* u1 = std::get_if<UniformMeasure>(&mu);
  const auto* u2 = std::get_if<UniformMeasure>(&nu);
  if (u1 && u2 && u1->a == u2->a && u1->b == u2->b) return u1->mass * u2->mass * (1.5 - std::log(u1->b - u1->a));
  // Disjoint continuous supports: quadrature on nu.
  const int q = 400;
  double acc = 0.0;
  if (a2) {
    for (int i = 1; i <= q; ++i) {
      const double x = 0.5 * (a2->a + a2->b) - 0.5 * (a2->b - a2->a) * std::cos((2.0 * i - 1) * std::numbers::pi / (2.0 * q));
      acc += a2->mass / q * potential(mu, x);
    }
    return acc;
  }
  const auto& u = std::get<UniformMeasure>(nu);
  acc = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return potential(mu, cd(x, 0.0)); }, u.a, u.b, 15, 1e-14);
  acc *= u.mass / (u.b - u.a);
  return acc;
}

double vector_energy(const std::vector<Measure>& mu) {
  double e = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < mu.size(); ++j) e += (i == j ? 2.0 : 1.0) * mutual_energy(mu[i], mu[j]);
  return e;
}

std::vector<VariationalComponent> variational_report(const EquilibriumSolution& sol, const AngelescoProblem& problem) {
  const Discretization d = discretize(problem);
  std::vector<Eigen::VectorXd> m;
  for (const auto& g : sol.components)
    m.push_back(Eigen::Map<const Eigen::VectorXd>(g.weights.data(), static_cast<long>(g.weights.size())));
  std::vector<VariationalComponent> out;
  for (std::size_t k = 0; k < m.size(); ++k) {
    VariationalComponent vc;
    const Eigen::VectorXd W = total_potential(d, m, k);
    vc.W.assign(W.data(), W.data() + W.size());
    vc.min_off_support = std::numeric_limits<double>::infinity();
    for (long i = 0; i < W.size(); ++i) {
      const double diff = W[i] - sol.w[k];
      if (m[k][i] > SolverOptions{}.support_threshold * d.masses[k])
        vc.max_on_support = std::max(vc.max_on_support, std::abs(diff));
      else
        vc.min_off_support = std::min(vc.min_off_support, diff);
    }
    out.push_back(std::move(vc));
  }
  return out;
}

json to_json(const AngelescoProblem& p) {
  json j;
  j["sets"] = json::array();
  for (const auto& s : p.sets) j["sets"].push_back(to_json(s));
  j["masses"] = p.masses.empty() ? std::vector<double>(p.sets.size(), 1.0) : p.masses;
  j["grid"] = p.grid;
  return j;
}

AngelescoProblem angelesco_problem_from_json(const json& j) {
  AngelescoProblem p;
  for (const auto& s : j.at("sets")) p.sets.push_back(interval_set_from_json(s));
  if (j.contains("masses")) p.masses = j["masses"].get<std::vector<double>>();
  p.grid = j.value("grid", std::size_t{400});
  p.validate();
  return p;
}

json to_json(const EquilibriumSolution& s) {
  json j;
  j["components"] = json::array();
  for (const auto& g : s.components) j["components"].push_back(to_json(Measure(g)));
  j["w"] = s.w;
  j["energy"] = s.energy;
  j["kkt_residuals"] = s.kkt_residuals;
  j["energy_trace"] = s.energy_trace;
  j["sweeps"] = s.sweeps;
  return j;
}

std::string density_csv(const EquilibriumSolution& s) {
  std::ostringstream os;
  os.precision(17);
  os << "component,node,weight,density,on_support\n";
  for (std::size_t k = 0; k < s.components.size(); ++k) {
    const auto& g = s.components[k];
    const auto dens = g.density();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      os << k + 1 << ',' << g.nodes[i] << ',' << g.weights[i] << ',' << dens[i] << ','
         << (s.support.empty() ? 1 : static_cast<int>(s.support[k][i])) << '\n';
  }
  return os.str();
}

}  // namespace hpl
