#include "hpl/kernels.hpp"

#include <cmath>
#include <numbers>

namespace hpl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double self_entry(double h) { return -std::log(h / kTwoPi); }

}  // namespace

Eigen::MatrixXd log_kernel(const std::vector<double>& x, const std::vector<double>& h, Exec exec) {
  const long n = static_cast<long>(x.size());
  Eigen::MatrixXd K(n, n);
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        K(i, j) = i == j ? self_entry(h[static_cast<std::size_t>(i)])
                         : -std::log(std::abs(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]));
    return K;
  }
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i)
      K(i, j) = i == j ? self_entry(h[static_cast<std::size_t>(i)])
                       : -std::log(std::abs(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]));
  return K;
}

Eigen::MatrixXd cross_log_kernel(const std::vector<double>& x, const std::vector<double>& y, Exec exec) {
  const long n = static_cast<long>(x.size()), m = static_cast<long>(y.size());
  Eigen::MatrixXd C(n, m);
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < m; ++j) C(i, j) = -std::log(std::abs(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)]));
    return C;
  }
#pragma omp parallel for schedule(static)
  for (long j = 0; j < m; ++j)
    for (long i = 0; i < n; ++i) C(i, j) = -std::log(std::abs(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)]));
  return C;
}

std::vector<double> potentials(const std::vector<std::complex<double>>& z, const std::vector<std::complex<double>>& x,
                               const std::vector<double>& w, Exec exec) {
  const long n = static_cast<long>(z.size());
  std::vector<double> out(z.size(), 0.0);
  auto one = [&](long p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc -= w[i] * std::log(std::abs(z[static_cast<std::size_t>(p)] - x[i]));
    out[static_cast<std::size_t>(p)] = acc;
  };
  if (exec == Exec::serial) {
    for (long p = 0; p < n; ++p) one(p);
  } else {
#pragma omp parallel for schedule(static)
    for (long p = 0; p < n; ++p) one(p);
  }
  return out;
}

std::vector<std::complex<double>> cauchy_transforms(const std::vector<std::complex<double>>& z,
                                                    const std::vector<std::complex<double>>& x,
                                                    const std::vector<double>& w, Exec exec) {
  const long n = static_cast<long>(z.size());
  std::vector<std::complex<double>> out(z.size());
  auto one = [&](long p) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] / (x[i] - z[static_cast<std::size_t>(p)]);
    out[static_cast<std::size_t>(p)] = acc;
  };
  if (exec == Exec::serial) {
    for (long p = 0; p < n; ++p) one(p);
  } else {
#pragma omp parallel for schedule(static)
    for (long p = 0; p < n; ++p) one(p);
  }
  return out;
}

}  // namespace hpl
