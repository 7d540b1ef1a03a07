#pragma once

// End-to-end experiments: series -> Hermite-Pade polynomials -> zeros, compared
// with the vector equilibrium of the supports. Results are persisted under
// <output>/<study id>/ with raw artifacts addressed by SHA-256.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "hpl/equilibrium.hpp"
#include "hpl/hp_solver.hpp"
#include "hpl/measure.hpp"
#include "hpl/scurve.hpp"
#include "hpl/series.hpp"

namespace hpl {

// Either Markov components (Cauchy transforms of densities on disjoint intervals)
// or Jacobi components prod (z - a_i)^{alpha_i}.
struct SystemSpec {
  std::vector<MarkovSpec> markov;
  std::vector<JacobiSpec> jacobi;

  bool is_markov() const { return !markov.empty(); }
  std::size_t size() const { return is_markov() ? markov.size() : jacobi.size(); }
  void validate() const;
  std::vector<LaurentSeries> expand(std::size_t order, ScalarKind kind, unsigned precision_bits) const;
  // f_k(z) for z off the support. Jacobi branches are continued from infinity
  // through the disk |z - center| > max |a_i - center|.
  cd evaluate(std::size_t k, cd z, cd center = 0.0) const;
  // Points the support of f_k stays within: interval ends or branch points.
  std::vector<cd> support_points(std::size_t k) const;
  IntervalSet support_set(std::size_t k) const;  // Markov only
};

nlohmann::json to_json(const SystemSpec& s);
SystemSpec system_spec_from_json(const nlohmann::json& j);

struct ProbeSpec {
  double radius = 3.0;
  std::size_t count = 64;
};

struct StudyParts {
  bool zero_distribution = true;
  bool leading_coefficients = true;
  bool remainder = true;
  bool orthogonality = true;
};

struct StudyConfig {
  SystemSpec system;
  std::vector<DegreeVector> schedule;
  ScalarKind scalar = ScalarKind::exact_rational;
  unsigned precision_bits = kDefaultPrecisionBits;
  std::size_t grid = 400;
  ProbeSpec probes;
  std::uint64_t seed = 20240601;
  std::size_t workers = 1;
  StudyParts parts;
  std::vector<cd> scurve_points;  // optional Chebotarev portrait
  std::filesystem::path output;   // empty: nothing is written

  void validate() const;
  // Canonical JSON: every field that can change a result, keys sorted.
  nlohmann::json canonical() const;
  std::string study_id() const;
};

// Throws std::invalid_argument for malformed or inconsistent configurations.
StudyConfig study_config_from_json(const nlohmann::json& j);

struct Circle {
  cd center = 0.0;
  double radius = 1.0;
};

struct OrthogonalityResult {
  std::vector<double> residual;   // |contour integral of R z^j|, j = 0..N-1
  std::vector<double> scale;      // 2 pi r max_z sum_k |q_k f_k z^j| on the contour
  std::vector<double> real_axis;  // |sum_k int q_k x^j dsigma_k| (Markov with exact moments)
  std::size_t nodes = 0;
  bool converged = false;
  std::size_t in_range() const { return residual.empty() ? 0 : residual.size() - 1; }
};

// Trapezoidal rule on the circle with node doubling (64 .. 2^14) until successive
// estimates agree to 1e-12 of the scale. Rejects circles that touch a support
// or do not enclose all of them.
template <class T>
OrthogonalityResult check_orthogonality(const HPFirst<T>& hp, const SystemSpec& system, const Circle& contour);

// R_n(z) = q_0 + sum q_k f_k off the supports, for Markov systems. Far from the
// supports it is summed directly at raised precision, otherwise evaluated
// through sum_k int q_k(x) (x/z)^{N-1} / (z - x) dsigma_k(x).
template <class T>
cd remainder_value(const HPFirst<T>& hp, const SystemSpec& system, cd z);
template <class T>
std::vector<cd> remainder_values(const HPFirst<T>& hp, const SystemSpec& system, const std::vector<cd>& zs);

struct ZeroRow {
  int n = 0;
  std::string kind;  // "first" or "second"
  std::size_t component = 0;
  std::size_t zeros_in_interval = 0;
  double kolmogorov = 0.0;
  double sup_cauchy = 0.0;
  double root_residual = 0.0;
  std::string artifact;
};

struct LeadingRow {
  int n = 0;
  std::size_t component = 0;
  double rate = 0.0;    // (1/n) ln |c_{n,k}| under c_{n,1} = 1
  double target = 0.0;  // w_k - w_1
  bool flagged = false;
  std::string artifact;
};

struct RemainderRow {
  int n = 0;
  std::size_t probe = 0;
  cd z;
  double rate = 0.0;       // (1/n) ln |R_n(z)|
  double potential = 0.0;  // U^lambda(z), lambda = sum of components
  // Against the reference probe 0: |(rate_j - rate_0) - (U_0 - U_j)| as stated,
  // and with the potential's sign reversed.
  double deviation_stated = 0.0;
  double deviation_sign_corrected = 0.0;
  std::string artifact;
};

struct RemainderSummary {
  int n = 0;
  double max_stated = 0.0;  // over all probe pairs
  double max_sign_corrected = 0.0;
};

struct OrthogonalityRow {
  int n = 0;
  std::size_t power = 0;
  bool in_range = true;
  double residual = 0.0;
  double scale = 0.0;
  double real_axis = 0.0;
  std::size_t nodes = 0;
  std::string artifact;
};

struct StageFailure {
  int n = 0;
  std::string stage;
  std::string message;
};

struct StudyReport {
  std::string study_id;
  nlohmann::json config;
  nlohmann::json environment;
  std::vector<double> w;  // equilibrium constants
  std::vector<std::vector<std::pair<double, double>>> density;  // (x, density) per component
  std::vector<std::vector<std::pair<int, std::vector<double>>>> zeros;  // per component: (n, real zeros)
  std::vector<ZeroRow> zero_rows;
  std::vector<LeadingRow> leading_rows;
  std::vector<RemainderRow> remainder_rows;
  std::vector<RemainderSummary> remainder_summary;
  std::vector<OrthogonalityRow> orthogonality_rows;
  std::vector<StageFailure> failures;
  std::vector<std::pair<std::string, std::string>> artifacts;  // (relative path, sha256)
  std::optional<ChebotarevResult> scurve;
  std::vector<std::string> notes;

  bool empty() const { return zero_rows.empty() && leading_rows.empty() && remainder_rows.empty() && !scurve; }
};

// Runs the parts selected in cfg.parts. Raw artifacts are written as each degree
// finishes; tables and the manifest are written at the end. A failure at one
// degree is recorded and the remaining degrees still run.
StudyReport run_study(const StudyConfig& cfg);
StudyReport run_zero_distribution_study(const StudyConfig& cfg);
StudyReport leading_coefficient_study(const StudyConfig& cfg);
StudyReport remainder_study(const StudyConfig& cfg);

std::string zero_table_csv(const StudyReport& r);
std::string leading_table_csv(const StudyReport& r);
std::string remainder_table_csv(const StudyReport& r);
std::string remainder_summary_csv(const StudyReport& r);
std::string orthogonality_table_csv(const StudyReport& r);

nlohmann::json to_json(const StudyReport& r);
StudyReport study_report_from_json(const nlohmann::json& j);

// Writes tables/*.csv, report.json and manifest.json under dir.
void persist_report(StudyReport& r, const std::filesystem::path& dir);

// SVG plots under dir/plots; returns the written paths. An empty report writes nothing.
std::vector<std::filesystem::path> emit_plots(const StudyReport& r, const std::filesystem::path& dir);
std::string zeros_svg(const StudyReport& r, int width = 640, int height = 360);

std::string sha256_hex(const std::string& bytes);
nlohmann::json environment_manifest(const StudyConfig& cfg);

}  // namespace hpl
