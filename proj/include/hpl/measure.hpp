#pragma once

// Zero-counting measures, grid measures and the classical interval measures,
// with potentials, Cauchy transforms and discrepancies between them.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "hpl/scalar.hpp"

namespace hpl {

struct RootResult {
  std::vector<cd> roots;           // rounded to double
  std::vector<BigComplex> exact;   // at working precision
  double max_residual = 0.0;       // max |p(r)| / sum |c_j||r|^j
  int iterations = 0;
};

class RootError : public std::runtime_error {
 public:
  RootError(const std::string& what, RootResult partial) : std::runtime_error(what), partial(std::move(partial)) {}
  RootResult partial;
};

// All roots with multiplicity. Simultaneous Aberth-Ehrlich iteration at the given
// working precision, started from companion-matrix eigenvalues. Fails when any
// relative residual exceeds tolerance after the iteration budget.
RootResult roots(const std::vector<Rational>& poly, unsigned precision_bits = kDefaultPrecisionBits,
                 double tolerance = 1e-10);
RootResult roots(const std::vector<BigComplex>& poly, unsigned precision_bits = kDefaultPrecisionBits,
                 double tolerance = 1e-10);
RootResult roots(const std::vector<cd>& poly, unsigned precision_bits = kDefaultPrecisionBits,
                 double tolerance = 1e-10);

struct Interval {
  double a;
  double b;
  bool contains(double x, double slack = 0.0) const { return x >= a - slack && x <= b + slack; }
  double center() const { return 0.5 * (a + b); }
  double radius() const { return 0.5 * (b - a); }
};

struct IntervalSet {
  std::vector<Interval> parts;
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> p);
  void validate() const;
  // Distance from z to the union.
  double distance(cd z) const;
};

struct DiscreteMeasure {
  std::vector<std::pair<cd, double>> atoms;
  double total_mass() const;
};

// Point masses at per-interval Chebyshev nodes x_i = c - r cos(theta_i),
// theta_i = (2i-1) pi / (2M). Node i owns the cell between consecutive Lobatto
// points; its quadrature weight is h_i = (pi/M) r sin(theta_i).
struct GridMeasure {
  IntervalSet intervals;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> spacing;
  std::vector<std::size_t> component;
  std::size_t per_interval = 0;

  static GridMeasure chebyshev(const IntervalSet& F, std::size_t M);
  double total_mass() const;
  // Mass of [a_k, x] within component k, spreading each node's mass uniformly in angle over its cell.
  double cdf(std::size_t k, double x) const;
  std::vector<double> density() const;  // weights / spacing
  GridMeasure with_weights(std::vector<double> w) const;
};

// Normalized arcsine distribution on [a, b] scaled to the given mass.
struct ArcsineMeasure {
  double a;
  double b;
  double mass = 1.0;
};

struct UniformMeasure {
  double a;
  double b;
  double mass = 1.0;
};

using Measure = std::variant<DiscreteMeasure, GridMeasure, ArcsineMeasure, UniformMeasure>;

DiscreteMeasure counting_measure_of_zeros(const std::vector<cd>& zeros);
template <class T>
DiscreteMeasure counting_measure(const std::vector<T>& poly, unsigned precision_bits = kDefaultPrecisionBits) {
  return counting_measure_of_zeros(roots(poly, precision_bits).roots);
}

// U(z) = -int ln|z - x| dmu(x); +infinity at atoms. At a grid node the
// regularized self term -m_i ln(h_i / (2 pi)) replaces the singular one.
double potential(const Measure& mu, cd z);
// C(z) = int (x - z)^{-1} dmu(x). Throws when z is on the support.
cd cauchy_transform(const Measure& mu, cd z);
double total_mass(const Measure& mu);

// Mass of [a, x] for real-supported measures (atoms are matched by real part
// when their imaginary part is below 1e-8).
double cdf(const Measure& mu, double a, double x, bool left_limit = false);

struct DiscrepancyReport {
  double sup_cauchy_error = 0.0;
  std::vector<double> kolmogorov;  // one entry per component of the declared interval set
  double kolmogorov_sum = 0.0;
};

DiscrepancyReport discrepancy(const Measure& mu, const Measure& nu, const std::vector<cd>& probes,
                              const IntervalSet* components = nullptr);

// Kolmogorov distance of mass CDFs restricted to one interval.
double kolmogorov(const Measure& mu, const Measure& nu, const Interval& I);

// sum over grid cells of |grid mass - reference mass of the cell|.
double l1_on_cells(const GridMeasure& g, const Measure& reference);

std::vector<cd> circle_probes(double radius, std::size_t count, cd center = 0.0, double phase = 0.0);

nlohmann::json to_json(const Measure& mu);
Measure measure_from_json(const nlohmann::json& j);
IntervalSet interval_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const IntervalSet& s);
// CSV of (x, cdf_mu, cdf_nu) at the given abscissae.
std::string cdf_table_csv(const Measure& mu, const Measure& nu, const Interval& I, std::size_t samples);

}  // namespace hpl
