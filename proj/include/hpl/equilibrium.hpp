#pragma once

// Scalar weighted equilibrium on real interval sets and the Angelesco vector
// equilibrium problem, discretized on per-interval Chebyshev grids.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "hpl/measure.hpp"

namespace hpl {

// External field phi on the real line as a sum of terms.
struct FieldSpec {
  struct Polynomial {
    std::vector<double> coeffs;  // ascending
  };
  struct HalfPotential {
    Measure measure;  // contributes U^measure / 2
  };
  std::vector<std::variant<Polynomial, HalfPotential>> terms;

  static FieldSpec zero() { return {}; }
  static FieldSpec polynomial(std::vector<double> c);
  static FieldSpec half_potential(Measure m);
  FieldSpec operator+(const FieldSpec& o) const;

  double operator()(double x) const;
  std::vector<double> on_nodes(const std::vector<double>& x) const;
};

struct SolverOptions {
  double kkt_tolerance = 1e-6;
  double energy_tolerance = 1e-10;
  int max_sweeps = 200;
  int gradient_iterations = 300;
  double support_threshold = 1e-12;  // relative to the component mass
};

class EquilibriumError : public std::runtime_error {
 public:
  EquilibriumError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  std::vector<double> trace;
};

struct ScalarEquilibrium {
  GridMeasure measure;
  double w = 0.0;          // U^lambda + phi = w on the support
  double kkt_residual = 0.0;
  std::vector<bool> support;
  bool used_active_set = false;
  std::vector<double> residual_trace;
};

// Minimizes m^T K m + 2 phi^T m over m >= 0 with sum m = t, where K is the
// discretized log kernel and phi the field at the nodes.
ScalarEquilibrium scalar_weighted_equilibrium(const IntervalSet& F, const FieldSpec& phi, double t, std::size_t M,
                                              const SolverOptions& opt = {});

// Same, on precomputed kernel and field values.
ScalarEquilibrium solve_discrete_equilibrium(const GridMeasure& grid, const Eigen::MatrixXd& K,
                                             const Eigen::VectorXd& phi, double t, const SolverOptions& opt,
                                             const Eigen::VectorXd* start = nullptr);

struct AngelescoProblem {
  std::vector<IntervalSet> sets;
  std::vector<double> masses;  // default all ones
  std::size_t grid = 400;      // nodes per interval
  void validate() const;
};

enum class Initialization { arcsine, uniform_density };

struct EquilibriumSolution {
  std::vector<GridMeasure> components;
  std::vector<double> w;             // W_k = w_k on supp lambda_k
  double energy = 0.0;
  std::vector<double> kkt_residuals;  // per component
  std::vector<double> energy_trace;   // after each sweep
  int sweeps = 0;
  std::vector<std::vector<bool>> support;
};

EquilibriumSolution solve_angelesco(const AngelescoProblem& problem, const SolverOptions& opt = {},
                                    Initialization init = Initialization::arcsine);

// sum a_ij [mu_i, mu_j] with a_ii = 2, a_ij = 1.
double vector_energy(const std::vector<Measure>& mu);
// [mu, nu] = -int int ln|x - y| dmu dnu; grid self-interaction uses the regularized diagonal.
double mutual_energy(const Measure& mu, const Measure& nu);

struct VariationalComponent {
  double max_on_support = 0.0;   // max |W_k - w_k| on the computed support
  double min_off_support = 0.0;  // min (W_k - w_k) on F_k off the support (+inf if none)
  std::vector<double> W;         // W_k at the nodes
};

std::vector<VariationalComponent> variational_report(const EquilibriumSolution& sol, const AngelescoProblem& problem);

nlohmann::json to_json(const AngelescoProblem& p);
AngelescoProblem angelesco_problem_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EquilibriumSolution& s);
std::string density_csv(const EquilibriumSolution& s);

}  // namespace hpl
