// hplab: command-line front end. Every subcommand reads one JSON document
// (--config) and writes its results under --out.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure (partial
// results are still written).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "hpl/equilibrium.hpp"
#include "hpl/hp_solver.hpp"
#include "hpl/measure.hpp"
#include "hpl/polynomial.hpp"
#include "hpl/scurve.hpp"
#include "hpl/series.hpp"
#include "hpl/study.hpp"

using namespace hpl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised after partial results have been written.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string out;
  std::optional<unsigned> precision_bits;
  std::optional<std::uint64_t> seed;
};

json load_config(const Common& c) {
  std::ifstream in(c.config);
  if (!in) throw ConfigError("cannot read configuration " + c.config);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  if (c.precision_bits) j["precision_bits"] = *c.precision_bits;
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

void require_keys(const json& j, const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown configuration key: " + key);
}

fs::path output_dir(const Common& c) {
  const fs::path dir = c.out.empty() ? fs::path("out") : fs::path(c.out);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << bytes;
}

void write_json(const fs::path& p, json j) {
  j["schema_version"] = kSchemaVersion;
  write(p, j.dump(1) + "\n");
}

json roots_json(const RootResult& r) {
  json j{{"max_residual", r.max_residual}, {"iterations", r.iterations}, {"roots", json::array()}};
  for (const auto& z : r.exact) j["roots"].push_back(json::array({z.re.to_string(), z.im.to_string()}));
  return j;
}

std::vector<cd> points_from_json(const json& j) {
  std::vector<cd> v;
  for (const auto& p : j) {
    if (p.is_array()) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    else v.emplace_back(p.get<double>(), 0.0);
  }
  return v;
}

json points_to_json(const std::vector<cd>& v) {
  json j = json::array();
  for (const cd& z : v) j.push_back(json::array({z.real(), z.imag()}));
  return j;
}

// ---------------------------------------------------------------------------

struct SeriesJob {
  SystemSpec system;
  ScalarKind scalar = ScalarKind::exact_rational;
  unsigned bits = kDefaultPrecisionBits;
};

SeriesJob series_job(const json& j) {
  SeriesJob job;
  job.system = system_spec_from_json(j.at("system"));
  if (j.contains("scalar")) job.scalar = scalar_kind_from_string(j["scalar"].get<std::string>());
  job.bits = j.value("precision_bits", job.bits);
  return job;
}

int run_series(const Common& c) {
  const json j = load_config(c);
  require_keys(j, {"system", "order", "scalar", "precision_bits", "seed"});
  const auto job = series_job(j);
  const auto order = j.at("order").get<std::size_t>();
  const auto f = job.system.expand(order, job.scalar, job.bits);
  json out{{"series", json::array()}};
  for (const auto& s : f) out["series"].push_back(to_json(s));
  write_json(output_dir(c) / "series.json", out);
  return 0;
}

template <class T>
int hp_pipeline(const Common& c, const SeriesJob& job, const DegreeVector& d, const std::string& kind,
                NormalizationPolicy policy) {
  const fs::path dir = output_dir(c);
  const bool first = kind != "second", second = kind != "first";
  const std::size_t s = job.system.size();
  int n = d.d.front();
  if (second)
    for (int x : d.d)
      if (x != n) throw ConfigError("second-kind polynomials need a diagonal degree vector");
  std::size_t order = 0;
  if (first) order = std::max(order, required_order_first_kind(d));
  if (second) order = std::max(order, required_order_second_kind(n, s));
  const auto f = job.system.expand(order, job.scalar, job.bits);

  std::vector<std::string> failures;
  if (first) {
    const auto hp = normalize(solve_first_kind<T>(f, d), policy);
    write_json(dir / "hp_first.json", to_json(hp));
    json rj = json::array();
    for (const auto& q : hp.q) {
      try {
        rj.push_back(roots_json(roots(q, job.bits)));
      } catch (const RootError& e) {
        rj.push_back(roots_json(e.partial));
        failures.push_back(e.what());
      }
    }
    write_json(dir / "roots_first.json", json{{"components", rj}});
  }
  if (second) {
    const auto hp = solve_second_kind<T>(f, n);
    write_json(dir / "hp_second.json", to_json(hp));
    try {
      write_json(dir / "roots_second.json", roots_json(roots(hp.P, job.bits)));
    } catch (const RootError& e) {
      write_json(dir / "roots_second.json", roots_json(e.partial));
      failures.push_back(e.what());
    }
  }
  if (!failures.empty()) throw NumericalFailure("root finding failed: " + failures.front());
  return 0;
}

int run_hp(const Common& c) {
  const json j = load_config(c);
  require_keys(j, {"system", "degrees", "kind", "normalization", "scalar", "precision_bits", "seed"});
  const auto job = series_job(j);
  DegreeVector d;
  const json& dj = j.at("degrees");
  if (dj.is_number_integer()) d = DegreeVector::diagonal(dj.get<int>(), job.system.size());
  else d.d = dj.get<std::vector<int>>();
  if (d.size() != job.system.size()) throw ConfigError("degree vector and system differ in s");
  d.validate();
  const std::string kind = j.value("kind", std::string("both"));
  if (kind != "first" && kind != "second" && kind != "both") throw ConfigError("kind must be first, second or both");
  const auto policy = normalization_from_string(j.value("normalization", std::string("unit_c1")));
  if (job.scalar == ScalarKind::exact_rational) return hp_pipeline<Rational>(c, job, d, kind, policy);
  return hp_pipeline<BigComplex>(c, job, d, kind, policy);
}

int run_equilibrium(const Common& c) {
  json j = load_config(c);
  j.erase("seed");
  j.erase("precision_bits");
  const auto problem = angelesco_problem_from_json(j);
  const fs::path dir = output_dir(c);
  try {
    const auto sol = solve_angelesco(problem);
    write_json(dir / "equilibrium.json", to_json(sol));
    write(dir / "density.csv", density_csv(sol));
  } catch (const EquilibriumError& e) {
    write_json(dir / "equilibrium_failure.json", json{{"message", e.what()}, {"energy_trace", e.trace}});
    throw NumericalFailure(e.what());
  }
  return 0;
}

int run_scurve(const Common& c) {
  const json j = load_config(c);
  require_keys(j, {"points", "partition", "seed", "max_newton", "multistarts", "residual_tolerance", "g_function",
                   "precision_bits"});
  ChebotarevOptions opt;
  opt.seed = j.value("seed", opt.seed);
  opt.max_newton = j.value("max_newton", opt.max_newton);
  opt.multistarts = j.value("multistarts", opt.multistarts);
  opt.residual_tolerance = j.value("residual_tolerance", opt.residual_tolerance);
  const fs::path dir = output_dir(c);
  try {
    ChebotarevResult r;
    if (j.contains("partition")) {
      const json& p = j["partition"];
      if (!p.is_array() || p.size() != 2) throw ConfigError("partition must list two point sets");
      r = fuse_partition(points_from_json(p[0]), points_from_json(p[1]), opt);
    } else {
      r = chebotarev_solve(points_from_json(j.at("points")), opt);
    }
    write_json(dir / "scurve.json", to_json(r));
    write(dir / "portrait.svg", portrait_svg(r));
    // Y for X = A V, the polynomial whose fixed point the solved V is.
    if (j.value("g_function", false))
      write_json(dir / "g_function.json", to_json(g_function_Y_of_poly(poly_mul(r.spec.A(), r.spec.V()))));
  } catch (const ScurveError& e) {
    write_json(dir / "scurve_failure.json",
               json{{"message", e.what()}, {"last_iterate", points_to_json(e.last_iterate)}, {"residuals", e.residuals}});
    throw NumericalFailure(e.what());
  }
  return 0;
}

StudyConfig study_config(const Common& c) {
  json j = load_config(c);
  if (!c.out.empty()) j["output"] = c.out;
  if (!j.contains("output")) j["output"] = "out";
  return study_config_from_json(j);
}

int run_study_command(const Common& c) {
  const auto cfg = study_config(c);
  const auto report = run_study(cfg);
  const fs::path dir = cfg.output / report.study_id;
  emit_plots(report, dir);
  std::cout << dir.string() << "\n";
  if (!report.failures.empty()) {
    for (const auto& f : report.failures) std::cerr << "n=" << f.n << " " << f.stage << ": " << f.message << "\n";
    throw NumericalFailure(std::to_string(report.failures.size()) + " stage failure(s); partial results persisted");
  }
  return 0;
}

int run_plot(const Common& c) {
  const auto cfg = study_config(c);
  const fs::path dir = cfg.output / cfg.study_id();
  std::ifstream in(dir / "report.json");
  if (!in) throw ConfigError("no persisted report at " + (dir / "report.json").string() + "; run the study first");
  json j;
  in >> j;
  auto report = study_report_from_json(j);
  if (!report.scurve && !cfg.scurve_points.empty()) {
    ChebotarevOptions opt;
    opt.seed = cfg.seed;
    try {
      report.scurve = chebotarev_solve(cfg.scurve_points, opt);
    } catch (const ScurveError& e) {
      emit_plots(report, dir);
      throw NumericalFailure(e.what());
    }
  }
  for (const auto& p : emit_plots(report, dir)) std::cout << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite-Pade laboratory"};
  app.require_subcommand(1);
  Common common;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", common.config, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--precision-bits", common.precision_bits, "override the working precision");
    sub->add_option("--seed", common.seed, "override the random seed");
    return sub;
  };
  const std::vector<std::pair<CLI::App*, int (*)(const Common&)>> commands{
      {add("series", "expand the system into Laurent series"), run_series},
      {add("hp", "Hermite-Pade polynomials and their zeros"), run_hp},
      {add("equilibrium", "vector equilibrium of an Angelesco system"), run_equilibrium},
      {add("scurve", "Chebotarev compact for a set of points"), run_scurve},
      {add("study", "end-to-end study with tables and plots"), run_study_command},
      {add("plot", "plots from a persisted study"), run_plot},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [sub, fn] : commands)
      if (sub->parsed()) return fn(common);
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
