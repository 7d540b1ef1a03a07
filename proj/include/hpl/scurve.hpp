#pragma once

// Geometry of the quadratic differential -(V/A) dz^2: period conditions for
// Chebotarev continua and their fused variants, critical trajectories,
// hyperelliptic g-function data and the cubic equation for s = 2.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "hpl/measure.hpp"
#include "hpl/polynomial.hpp"

namespace hpl {

// Integrand prod (t - z)^{1/2} prod (t - p)^{-1/2} prod (t - w) * poly(t),
// continued along straight segments.
struct SqrtProduct {
  std::vector<cd> half_zeros;
  std::vector<cd> half_poles;
  std::vector<cd> full_zeros;
  std::vector<cd> poly{cd(1.0)};  // ascending
};

// Integral along the segment u -> w. Endpoint singularities at listed points are
// handled exactly; the branch of each factor is principal at u.
cd segment_integral(const SqrtProduct& f, cd u, cd w);
// Sum of segment integrals along a polyline with the branch continued across vertices.
cd polyline_integral(const SqrtProduct& f, const std::vector<cd>& points);

struct QDSpec {
  std::vector<cd> a;  // roots of A (distinct)
  std::vector<cd> v;  // roots of V with multiplicity, |v| = |a| - 2
  void validate() const;
  std::vector<cd> A() const { return poly_from_roots(a); }
  std::vector<cd> V() const { return poly_from_roots(v); }
  double scale() const;  // max |a_j| + 1
};

struct Endpoint {
  enum class Kind { a_root, v_root, unresolved };
  Kind kind = Kind::unresolved;
  std::size_t index = 0;  // into QDSpec::a or QDSpec::v
  bool escaped = false;
  cd z;
};

struct Trajectory {
  std::vector<cd> points;
  Endpoint start;
  Endpoint end;
  double arclength = 0.0;
  double constancy = 0.0;  // max |Re int sqrt(V/A)| along the polyline from the start
};

struct TraceOptions {
  double tolerance = 1e-12;  // local error per unit scale
  double capture = 1e-3;     // capture radius relative to the scale
};

// All trajectory rays leaving a zero of A*V: one from a simple root of A,
// m + 2 from a root of V of multiplicity m.
std::vector<Trajectory> trace_trajectories(const QDSpec& spec, cd from, const TraceOptions& opt = {});

struct ArcInfo {
  enum class Type { a_v, v_v, a_a };
  Type type;
  Endpoint first;
  Endpoint second;
};

class ScurveError : public std::runtime_error {
 public:
  ScurveError(const std::string& what, std::vector<cd> last_iterate, std::vector<double> residuals)
      : std::runtime_error(what), last_iterate(std::move(last_iterate)), residuals(std::move(residuals)) {}
  std::vector<cd> last_iterate;
  std::vector<double> residuals;
};

struct ChebotarevResult {
  QDSpec spec;
  std::vector<Trajectory> arcs;          // one traced trajectory per arc
  std::vector<ArcInfo> combinatorics;    // parallel to arcs
  std::vector<double> period_residuals;  // |Re int sqrt(V/A)| per arc
  std::vector<std::vector<std::size_t>> components;  // indices into spec.a, one entry per connected component
  double capacity = 0.0;
  bool non_generic = false;  // colliding V zeros
  int newton_iterations = 0;
  int starts_tried = 0;
  std::vector<std::size_t> double_zeros;  // indices into spec.v of double zeros (each listed once)
};

struct ChebotarevOptions {
  double residual_tolerance = 1e-10;
  int max_newton = 60;
  std::uint64_t seed = 20240601;
  int multistarts = 8;
  TraceOptions trace;
};

ChebotarevResult chebotarev_solve(const std::vector<cd>& e, const ChebotarevOptions& opt = {});
// Minimal capacity compact F1 u F2 with continua F_i containing the two parts.
// An empty second part falls back to chebotarev_solve.
ChebotarevResult fuse_partition(const std::vector<cd>& e1, const std::vector<cd>& e2,
                                const ChebotarevOptions& opt = {});

// Logarithmic capacity of the zero level of Re int sqrt(V/A), valid when all periods vanish.
double capacity_from_qd(const QDSpec& spec);

struct GFunctionData {
  std::vector<cd> x_roots;
  std::vector<cd> X;
  std::vector<cd> Y;  // monic, ascending
  std::vector<cd> y_roots;
  std::vector<double> period_residuals;
};

GFunctionData g_function_Y(const std::vector<cd>& x_roots);
GFunctionData g_function_Y_of_poly(const std::vector<cd>& X);

struct FixedPointReport {
  bool is_fixed = false;
  double residual = 0.0;
  std::vector<cd> Y;
};

// Y = T(V) through g_function_Y on X = A V, with multiple zeros of X reduced first.
FixedPointReport fixed_point_check(const std::vector<cd>& a, const std::vector<cd>& v, double tolerance);

struct CubicModel {
  std::vector<cd> a;  // roots of A
  std::vector<cd> E;  // ascending
  std::vector<cd> F;
  cd e_leading;
  cd f_leading;
  double fit_residual = 0.0;
  double heldout_residual = 0.0;       // max over held-out probes and the three branches
  std::vector<double> branch_residual;  // per branch, max over held-out probes
  double branch_sum = 0.0;              // max |C1 + C2 - C| over all probes
};

// Fits A w^3 - 3 E w + 2 F = 0 with branches C^{lambda1}, C^{lambda2}, -C^{lambda1+lambda2}.
CubicModel cubic_fit(const Measure& lambda1, const Measure& lambda2, const std::vector<cd>& a,
                     const std::vector<cd>& fit_probes, const std::vector<cd>& heldout_probes);

nlohmann::json to_json(const Trajectory& t);
nlohmann::json to_json(const ChebotarevResult& r);
nlohmann::json to_json(const GFunctionData& g);
nlohmann::json to_json(const CubicModel& m);
std::string to_string(Endpoint::Kind k);

// SVG 1.1 portrait of the arcs with branch points (filled) and V zeros (open).
std::string portrait_svg(const ChebotarevResult& r, int size = 480);

}  // namespace hpl
