#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hpl::oracle {

using cd = std::complex<double>;
using std::numbers::pi;

// Lawson-Hanson active set for min ||A x - b||, x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const long n = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> P(static_cast<std::size_t>(n), false);
  const double tol = 1e-12 * A.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff();
  for (int outer = 0; outer < 3 * n; ++outer) {
    const Eigen::VectorXd g = A.transpose() * (b - A * x);
    long j = -1;
    for (long i = 0; i < n; ++i)
      if (!P[static_cast<std::size_t>(i)] && g[i] > tol && (j < 0 || g[i] > g[j])) j = i;
    if (j < 0) break;
    P[static_cast<std::size_t>(j)] = true;
    for (;;) {
      std::vector<long> idx;
      for (long i = 0; i < n; ++i)
        if (P[static_cast<std::size_t>(i)]) idx.push_back(i);
      Eigen::MatrixXd AP(A.rows(), static_cast<long>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c) AP.col(static_cast<long>(c)) = A.col(idx[c]);
      const Eigen::VectorXd sP = AP.colPivHouseholderQr().solve(b);
      Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
      for (std::size_t c = 0; c < idx.size(); ++c) s[idx[c]] = sP[static_cast<long>(c)];
      bool feasible = true;
      double alpha = 1.0;
      for (long i : idx)
        if (s[i] <= 0.0) {
          feasible = false;
          alpha = std::min(alpha, x[i] / (x[i] - s[i]));
        }
      if (feasible) {
        x = s;
        break;
      }
      x += alpha * (s - x);
      for (long i : idx)
        if (x[i] <= 1e-300) {
          x[i] = 0.0;
          P[static_cast<std::size_t>(i)] = false;
        }
    }
  }
  return x;
}

// Minimizes m^T Q m + 2 f^T m under m >= 0 and block mass constraints, using
// an NNLS least-squares form with penalty rows for the masses.
inline Eigen::VectorXd qp_oracle(Eigen::MatrixXd Q, const Eigen::VectorXd& f, const std::vector<long>& blocks,
                          const std::vector<double>& masses) {
  // Adding a constant to each diagonal block is invisible on the constraint set.
  long off = 0;
  for (long sz : blocks) {
    Q.block(off, off, sz, sz).array() += 20.0;
    off += sz;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) throw std::runtime_error("oracle matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const long n = Q.rows();
  const double pen = 1e4;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + static_cast<long>(blocks.size()), n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
  A.topRows(n) = L.transpose();
  b.head(n) = -L.triangularView<Eigen::Lower>().solve(f);
  off = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    A.block(n + static_cast<long>(k), off, 1, blocks[k]).setConstant(pen);
    b[n + static_cast<long>(k)] = pen * masses[k];
    off += blocks[k];
  }
  return nnls(A, b);
}

// Boundary-element capacity of a union of polylines: piecewise-constant charge
// on straight panels, collocation at panel midpoints, exact panel log integrals.
inline double panel_log(cd z, cd P, cd Q) {
  const double L = std::abs(Q - P);
  const cd d = (Q - P) / L;
  const cd w = (z - P) * std::conj(d);
  const double x = w.real(), y = w.imag();
  auto F = [&](double u) {
    if (y == 0.0) return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u;
    return 0.5 * u * std::log(u * u + y * y) - u + y * std::atan(u / y);
  };
  return F(L - x) - F(-x);
}

inline double bem_capacity(const std::vector<std::vector<cd>>& arcs) {
  std::vector<std::pair<cd, cd>> P;
  for (const auto& a : arcs)
    for (std::size_t i = 0; i + 1 < a.size(); ++i) P.emplace_back(a[i], a[i + 1]);
  const long n = static_cast<long>(P.size());
  Eigen::MatrixXd A(n, n);
  for (long i = 0; i < n; ++i) {
    const cd m = 0.5 * (P[static_cast<std::size_t>(i)].first + P[static_cast<std::size_t>(i)].second);
    for (long j = 0; j < n; ++j)
      A(i, j) = -panel_log(m, P[static_cast<std::size_t>(j)].first, P[static_cast<std::size_t>(j)].second);
  }
  const Eigen::VectorXd q = A.partialPivLu().solve(Eigen::VectorXd::Ones(n));
  double Q = 0.0;
  for (long j = 0; j < n; ++j) Q += q[j] * std::abs(P[static_cast<std::size_t>(j)].second - P[static_cast<std::size_t>(j)].first);
  return std::exp(-1.0 / Q);
}

// Steiner tree with one interior point and sine-mode bends on each arc.
inline std::vector<std::vector<cd>> bent_tree(const std::vector<cd>& e, const std::vector<double>& x, int N) {
  const int modes = 2;
  const cd s(x[0], x[1]);
  std::vector<std::vector<cd>> arcs;
  for (std::size_t k = 0; k < e.size(); ++k) {
    std::vector<cd> a;
    for (int j = 0; j <= N; ++j) {
      const double t = 0.5 * (1.0 - std::cos(pi * j / N));
      double b = 0.0;
      for (int m = 0; m < modes; ++m) b += x[2 + k * modes + static_cast<std::size_t>(m)] * std::sin((m + 1) * pi * t);
      a.push_back(s + (e[k] - s) * cd(t, b));
    }
    arcs.push_back(a);
  }
  return arcs;
}

inline double richardson_capacity(const std::vector<cd>& e, const std::vector<double>& x, int N) {
  const double a = bem_capacity(bent_tree(e, x, N)), b = bem_capacity(bent_tree(e, x, 2 * N));
  return (4.0 * b - a) / 3.0;
}

inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                double step, int iters) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> S(n + 1, x0);
  std::vector<double> F(n + 1);
  for (std::size_t i = 0; i < n; ++i) S[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) F[i] = f(S[i]);
  for (int it = 0; it < iters; ++it) {
    std::vector<std::size_t> id(n + 1);
    for (std::size_t i = 0; i <= n; ++i) id[i] = i;
    std::sort(id.begin(), id.end(), [&](std::size_t a, std::size_t b) { return F[a] < F[b]; });
    const auto S0 = S;
    const auto F0 = F;
    for (std::size_t i = 0; i <= n; ++i) {
      S[i] = S0[id[i]];
      F[i] = F0[id[i]];
    }
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[j] += S[i][j] / static_cast<double>(n);
    auto along = [&](double a) {
      std::vector<double> r(n);
      for (std::size_t j = 0; j < n; ++j) r[j] = c[j] + a * (S[n][j] - c[j]);
      return r;
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < F[0]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      S[n] = fe < fr ? xe : xr;
      F[n] = std::min(fe, fr);
    } else if (fr < F[n - 1]) {
      S[n] = xr;
      F[n] = fr;
    } else {
      const auto xc = along(0.5);
      const double fc = f(xc);
      if (fc < F[n]) {
        S[n] = xc;
        F[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j) S[i][j] = S[0][j] + 0.5 * (S[i][j] - S[0][j]);
          F[i] = f(S[i]);
        }
      }
    }
  }
  return S[static_cast<std::size_t>(std::min_element(F.begin(), F.end()) - F.begin())];
}

inline double gap_integral(double y, const std::vector<double>& r) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto X = [&](double t) {
    double p = 1.0;
    for (double x : r) p *= (t - x);
    return p;
  };
  return ts.integrate([&](double t) { return (t - y) / std::sqrt(X(t)); }, r[1], r[2], 1e-14);
}


}  // namespace hpl::oracle
