#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "hpl/kernels.hpp"
#include "hpl/measure.hpp"
#include "hpl/polynomial.hpp"

using namespace hpl;
using std::numbers::pi;

namespace {

std::vector<Rational> chebyshev_T(int n) {
  std::vector<Rational> t0{1}, t1{0, 1};
  if (n == 0) return t0;
  for (int k = 1; k < n; ++k) {
    std::vector<Rational> t2(t1.size() + 1, Rational(0));
    for (std::size_t j = 0; j < t1.size(); ++j) t2[j + 1] += 2 * t1[j];
    for (std::size_t j = 0; j < t0.size(); ++j) t2[j] -= t0[j];
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

}  // namespace

TEST_CASE("roots of simple polynomials") {
  auto r = roots(std::vector<Rational>{-1, 0, 1});
  REQUIRE(r.roots.size() == 2);
  CHECK(std::abs(r.roots[0] - cd(-1, 0)) < 1e-15);
  CHECK(std::abs(r.roots[1] - cd(1, 0)) < 1e-15);

  auto d = roots(std::vector<Rational>{9, -6, 1});
  REQUIRE(d.roots.size() == 2);
  for (const auto& z : d.roots) CHECK(std::abs(z - cd(3, 0)) < 1e-12);

  auto z0 = roots(std::vector<Rational>{0, 0, -4, 1});
  REQUIRE(z0.roots.size() == 3);
  CHECK(std::abs(z0.roots[0]) == 0.0);
  CHECK(std::abs(z0.roots[2] - cd(4, 0)) < 1e-15);

  CHECK_THROWS_AS(roots(std::vector<Rational>{0, 0}), std::invalid_argument);
}

TEST_CASE("Chebyshev T8 roots match the closed form") {
  auto r = roots(chebyshev_T(8));
  REQUIRE(r.roots.size() == 8);
  std::vector<double> expect;
  for (int j = 1; j <= 8; ++j) expect.push_back(std::cos((2 * j - 1) * pi / 16));
  std::sort(expect.begin(), expect.end());
  for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(r.roots[j] - cd(expect[j], 0)) <= 1e-12);
  CHECK(r.max_residual <= 1e-10);
}

TEST_CASE("counting measures") {
  auto m = counting_measure(std::vector<Rational>{-1, 0, 1});
  REQUIRE(m.atoms.size() == 2);
  CHECK(m.atoms[0].second == doctest::Approx(0.5));
  CHECK(m.total_mass() == doctest::Approx(1.0));
  // p(cz) has roots scaled by 1/c.
  std::vector<Rational> p{6, -5, 1};  // roots 2, 3
  const Rational c = 4;
  std::vector<Rational> pc{p[0], p[1] * c, p[2] * c * c};
  auto a = counting_measure(p), b = counting_measure(pc);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(b.atoms[i].first - a.atoms[i].first / 4.0) < 1e-14);
    CHECK(b.atoms[i].second == a.atoms[i].second);
  }
}

TEST_CASE("potentials of classical measures") {
  DiscreteMeasure d{{{0.0, 1.0}}};
  CHECK(potential(d, 2.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(std::isinf(potential(d, 0.0)));
  for (cd z : {cd(1.5, 0), cd(0, 2), cd(-3, 1)}) {
    const double expect = -std::log(std::abs(z + std::sqrt(z - 1.0) * std::sqrt(z + 1.0)) / 2.0);
    CHECK(std::abs(potential(ArcsineMeasure{-1, 1}, z) - expect) < 1e-14);
  }
  CHECK(potential(ArcsineMeasure{-1, 1}, 0.3) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("grid measure potential matches quadrature off the support") {
  // Density (1 + x^2/2) / (pi sqrt(1 - x^2) * 5/4) on [-1, 1], normalized.
  const double norm = 1.25;
  auto g = GridMeasure::chebyshev(IntervalSet({{-1, 1}}), 200);
  std::vector<double> w;
  for (double x : g.nodes) w.push_back((1 + x * x / 2) / norm / 200.0);
  g = g.with_weights(w);
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  for (cd z : {cd(1.3, 0), cd(0, 0.5), cd(-2, -2)}) {
    // Oracle in the angle variable, where the integrand is smooth.
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double th) {
          const double x = -std::cos(th);
          return -(1 + x * x / 2) / norm / pi * std::log(std::abs(z - x));
        },
        0.0, pi, 20, 1e-15);
    CHECK(std::abs(potential(g, z) - q) <= 1e-8);
  }
}

TEST_CASE("Cauchy transforms") {
  CHECK(std::abs(cauchy_transform(UniformMeasure{0, 1}, 2.0) - cd(-std::log(2.0), 0)) < 1e-15);
  CHECK(std::abs(cauchy_transform(ArcsineMeasure{-1, 1}, 3.0) - cd(-1 / std::sqrt(8.0), 0)) < 1e-15);
  CHECK_THROWS_AS(cauchy_transform(ArcsineMeasure{-1, 1}, 0.5), std::domain_error);
  // Counting measure: p'/(n p).
  std::vector<cd> p{cd(2, 1), cd(-1, 0), cd(0.5, -2), cd(1, 0)};
  auto mu = counting_measure(p);
  for (cd z : {cd(3, 3), cd(-2, 0.5), cd(0.1, 4)}) {
    const cd val = horner(p, z), der = horner(poly_derivative(p), z);
    CHECK(std::abs(-cauchy_transform(mu, z) - der / (3.0 * val)) <= 1e-12);
  }
  auto g = GridMeasure::chebyshev(IntervalSet({{-1, 1}}), 50);
  g = g.with_weights(std::vector<double>(50, 1.0 / 50));
  CHECK_THROWS_AS(cauchy_transform(g, g.nodes[10] + 0.1 * g.spacing[10]), std::domain_error);
  CHECK(std::abs(cauchy_transform(g, 3.0) - cd(-1 / std::sqrt(8.0), 0)) < 1e-14);
}

TEST_CASE("uniform potential matches quadrature") {
  for (cd z : {cd(2, 0), cd(0.5, 0.25), cd(-1, 0), cd(0.3, 0)}) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double x) { return std::log(std::abs(z - x)); };
    const double q = z.imag() == 0.0 && z.real() > 0 && z.real() < 1
                         ? -(ts.integrate(f, 0.0, z.real(), 1e-14) + ts.integrate(f, z.real(), 1.0, 1e-14))
                         : -ts.integrate(f, 0.0, 1.0, 1e-14);
    CHECK(potential(UniformMeasure{0, 1}, z) == doctest::Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("discrepancy metrics") {
  auto probes = circle_probes(2.0, 64);
  DiscreteMeasure d0{{{0.0, 1.0}}};
  auto same = discrepancy(d0, d0, probes);
  CHECK(same.sup_cauchy_error == 0.0);
  const double eps = 1e-3;
  DiscreteMeasure de{{{eps, 1.0}}};
  auto r = discrepancy(d0, de, probes);
  CHECK(r.sup_cauchy_error <= eps / ((2 - eps) * (2 - eps)) * 1.01);
  CHECK(r.sup_cauchy_error >= eps / ((2 + eps) * (2 + eps)) * 0.99);
  CHECK_THROWS_AS(discrepancy(d0, de, {}), std::invalid_argument);

  IntervalSet F({{-1, 1}});
  for (int n : {4, 8, 16}) {
    auto mu = counting_measure(chebyshev_T(n));
    auto rep = discrepancy(mu, ArcsineMeasure{-1, 1}, circle_probes(3.0, 32), &F);
    CHECK(rep.kolmogorov.size() == 1);
    CHECK(rep.kolmogorov[0] <= 1.0 / n + 1e-12);
    // Steps of height 1/n sit exactly halfway through each arcsine mass cell.
    CHECK(rep.kolmogorov[0] == doctest::Approx(0.5 / n).epsilon(1e-9));
  }
}

TEST_CASE("grid cdf of arcsine weights is the arcsine cdf") {
  auto g = GridMeasure::chebyshev(IntervalSet({{-1, 2}}), 40);
  g = g.with_weights(std::vector<double>(40, 1.0 / 40));
  CHECK(kolmogorov(g, ArcsineMeasure{-1, 2}, {-1, 2}) < 1e-13);
  CHECK(l1_on_cells(g, ArcsineMeasure{-1, 2}) < 1e-13);
}

TEST_CASE("potential superposition and Cauchy consistency") {
  DiscreteMeasure a{{{cd(0.2, 0), 0.3}, {cd(-0.7, 0), 0.7}}};
  ArcsineMeasure b{1, 2};
  auto g = GridMeasure::chebyshev(IntervalSet({{1, 2}}), 64);
  g = g.with_weights(std::vector<double>(64, 1.0 / 64));
  for (cd z : {cd(0.5, 0.5), cd(3, 0), cd(-2, -1)}) {
    const double sum = potential(a, z) + potential(b, z);
    double grid_sum = potential(a, z) + potential(g, z);
    CHECK(std::abs(sum - grid_sum) < 1e-12);
    DiscreteMeasure merged = a;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) merged.atoms.emplace_back(cd(g.nodes[i], 0), g.weights[i]);
    CHECK(std::abs(potential(merged, z) - grid_sum) < 1e-12);
  }
  // d/dx U(x) = Re C(x) for real-supported measures, off the support.
  for (double x : {3.0, -2.5, 0.5}) {
    const double h = 1e-6;
    const double dU = (potential(b, x + h) - potential(b, x - h)) / (2 * h);
    CHECK(std::abs(dU - cauchy_transform(b, x).real()) <= 1e-5);
    const double dUa = (potential(a, cd(x, 0.1) + h) - potential(a, cd(x, 0.1) - h)) / (2 * h);
    CHECK(std::abs(dUa - cauchy_transform(a, cd(x, 0.1)).real()) <= 1e-5);
  }
}

TEST_CASE("serial and parallel kernels agree") {
  auto g = GridMeasure::chebyshev(IntervalSet({{-2, -1}, {1, 2}}), 60);
  CHECK((log_kernel(g.nodes, g.spacing, Exec::serial) - log_kernel(g.nodes, g.spacing, Exec::parallel)).norm() == 0.0);
  std::vector<double> y(g.nodes.begin(), g.nodes.begin() + 60), x(g.nodes.begin() + 60, g.nodes.end());
  CHECK((cross_log_kernel(x, y, Exec::serial) - cross_log_kernel(x, y, Exec::parallel)).norm() == 0.0);
  auto probes = circle_probes(3.0, 50);
  std::vector<cd> xs(g.nodes.begin(), g.nodes.end());
  std::vector<double> w(xs.size(), 1.0 / 120);
  CHECK(potentials(probes, xs, w, Exec::serial) == potentials(probes, xs, w, Exec::parallel));
  CHECK(cauchy_transforms(probes, xs, w, Exec::serial) == cauchy_transforms(probes, xs, w, Exec::parallel));
}

TEST_CASE("measure json round trip") {
  auto g = GridMeasure::chebyshev(IntervalSet({{-1, 1}}), 10);
  g = g.with_weights(std::vector<double>(10, 0.1));
  Measure m = g;
  auto back = measure_from_json(to_json(m));
  CHECK(to_json(back) == to_json(m));
  Measure d = DiscreteMeasure{{{cd(1, 2), 0.5}}};
  CHECK(to_json(measure_from_json(to_json(d))) == to_json(d));
  CHECK_THROWS_AS(IntervalSet({{0, 2}, {1, 3}}), std::invalid_argument);
}
