#pragma once

// Data-parallel kernels over node and probe sets. Each kernel has a serial
// reference path and an OpenMP path; both produce identical results up to
// floating-point summation order (none of the parallel loops reduce across threads).

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace hpl {

enum class Exec { serial, parallel };

// Self log-kernel on a grid: K_ij = -ln|x_i - x_j| off the diagonal and
// -ln(h_i / (2 pi)) on it, where h_i is the quadrature weight of node i.
Eigen::MatrixXd log_kernel(const std::vector<double>& x, const std::vector<double>& h, Exec exec = Exec::parallel);

// Cross kernel C_ij = -ln|x_i - y_j| between disjoint node sets.
Eigen::MatrixXd cross_log_kernel(const std::vector<double>& x, const std::vector<double>& y,
                                 Exec exec = Exec::parallel);

// U(z) = -sum_i w_i ln|z - x_i| at each point.
std::vector<double> potentials(const std::vector<std::complex<double>>& z, const std::vector<std::complex<double>>& x,
                               const std::vector<double>& w, Exec exec = Exec::parallel);

// C(z) = sum_i w_i / (x_i - z) at each point.
std::vector<std::complex<double>> cauchy_transforms(const std::vector<std::complex<double>>& z,
                                                    const std::vector<std::complex<double>>& x,
                                                    const std::vector<double>& w, Exec exec = Exec::parallel);

}  // namespace hpl
