#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "hpl/study.hpp"

using namespace hpl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json pair_config(const std::string& left, std::vector<int> degrees, double radius = 3.0) {
  return {{"system", {{"markov", {{{"interval", {left, "-1"}}}, {{"interval", {"1", "2"}}}}}}},
          {"degrees", degrees},
          {"probes", {{"radius", radius}, {"count", 16}}},
          {"grid", 200}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hplab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<LaurentSeries> pair_series(std::size_t order, const char* left = "-2") {
  return {expand_markov(MarkovSpec::unit(Rational(left), Rational(-1)), order, ScalarKind::exact_rational),
          expand_markov(MarkovSpec::unit(Rational(1), Rational(2)), order, ScalarKind::exact_rational)};
}

SystemSpec pair_system(const char* left = "-2") {
  SystemSpec s;
  s.markov = {MarkovSpec::unit(Rational(left), Rational(-1)), MarkovSpec::unit(Rational(1), Rational(2))};
  return s;
}

// Polyline coordinates of every <polyline ... points="..."/> in order.
std::vector<std::vector<std::pair<double, double>>> polylines(const std::string& svg) {
  std::vector<std::vector<std::pair<double, double>>> out;
  const std::regex re("points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    std::vector<std::pair<double, double>> pts;
    std::istringstream is((*it)[1].str());
    std::string tok;
    while (is >> tok) {
      const auto c = tok.find(',');
      pts.emplace_back(std::stod(tok.substr(0, c)), std::stod(tok.substr(c + 1)));
    }
    out.push_back(pts);
  }
  return out;
}

std::vector<std::pair<double, double>> circles(const std::string& svg, int component) {
  std::vector<std::pair<double, double>> out;
  const std::regex re("data-component=\"" + std::to_string(component) + "\" cx=\"([^\"]*)\" cy=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.emplace_back(std::stod((*it)[1].str()), std::stod((*it)[2].str()));
  return out;
}

}  // namespace

TEST_CASE("configuration parsing and validation") {
  const auto cfg = study_config_from_json(pair_config("-2", {2, 4}));
  CHECK(cfg.schedule.size() == 2);
  CHECK(cfg.schedule[1].d == std::vector<int>{4, 4});
  CHECK(cfg.study_id().size() == 64);

  // Output location and worker count do not change results, so they do not change the id.
  json j = pair_config("-2", {2, 4});
  j["output"] = "/somewhere/else";
  j["workers"] = 3;
  CHECK(study_config_from_json(j).study_id() == cfg.study_id());
  j["seed"] = 7;
  CHECK(study_config_from_json(j).study_id() != cfg.study_id());

  auto bad = [](json j) { CHECK_THROWS_AS(study_config_from_json(j), std::invalid_argument); };
  bad(pair_config("-2", {4, 4}));
  bad(pair_config("-2", {8, 4}));
  bad(pair_config("-2", {4}, 1.5));  // probe circle crosses a support
  bad(pair_config("-2", {4}, 2.0));
  json typo = pair_config("-2", {4});
  typo["degree"] = 4;
  bad(typo);
  json overlap = pair_config("-2", {4});
  overlap["system"]["markov"][1]["interval"] = {"-1.5", "2"};
  bad(overlap);
  json jac = pair_config("-2", {4});
  jac["system"] = {{"jacobi", {{{"points", {"-1", "1"}}, {"exponents", {"1/3", "-1/3"}}}}}};
  bad(jac);
  json inexact = pair_config("-2", {4});
  inexact["system"]["markov"][0] = {{"interval", {"-2", "-1"}}, {"density", "general-jacobi"},
                                    {"singular_points", {-1.5}}, {"singular_exponents", {0.5}}};
  bad(inexact);
  json shape = pair_config("-2", {4});
  shape["degrees"] = {{4, 4, 4}};
  bad(shape);
  bad(json::array());
}

TEST_CASE("arcsine input gives Chebyshev zeros") {
  json j{{"system", {{"markov", {{{"interval", {"-1", "1"}}, {"density", "arcsine"}}}}}},
         {"degrees", {3, 6, 9}},
         {"probes", {{"radius", 2.0}, {"count", 16}}},
         {"grid", 400},
         {"parts", {"zero_distribution"}}};
  const auto r = run_zero_distribution_study(study_config_from_json(j));
  CHECK(r.failures.empty());
  for (const auto& row : r.zero_rows) {
    if (row.kind != "first") continue;
    CHECK(row.zeros_in_interval == static_cast<std::size_t>(row.n));
    CHECK(row.kolmogorov <= 1.0 / row.n);
  }
  for (const auto& [n, z] : r.zeros[0]) {
    auto sorted = z;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(sorted[static_cast<std::size_t>(i)] + std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * n))) < 1e-12);
  }
}

TEST_CASE("symmetric pair: mirrored components and shrinking discrepancies") {
  auto j = pair_config("-2", {4, 8, 12, 16});
  j["grid"] = 400;
  const auto r = run_study(study_config_from_json(j));
  CHECK(r.failures.empty());
  std::map<std::pair<int, std::string>, std::vector<ZeroRow>> by;
  for (const auto& z : r.zero_rows) by[{z.n, z.kind}].push_back(z);
  double last = 1e300;
  for (const auto& [key, rows] : by) {
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(rows[0].kolmogorov - rows[1].kolmogorov) <= 1e-8);
    CHECK(std::abs(rows[0].sup_cauchy - rows[1].sup_cauchy) <= 1e-8);
    CHECK(rows[0].zeros_in_interval == static_cast<std::size_t>(key.first));
    if (key.second == "first") {
      CHECK(rows[0].sup_cauchy <= last);
      last = rows[0].sup_cauchy;
    }
  }
  // Leading coefficients: equal constants, and the normalized row is exactly zero.
  for (const auto& l : r.leading_rows) {
    if (l.component == 0) CHECK(l.rate == 0.0);
    CHECK(std::abs(l.rate) <= 1e-12);
    CHECK(std::abs(l.target) <= 1e-8);
  }
  // Probes 0 and count/2 are z = 3 and z = -3, equal by symmetry at every n.
  std::map<int, std::vector<RemainderRow>> rem;
  for (const auto& x : r.remainder_rows) rem[x.n].push_back(x);
  for (const auto& [n, rows] : rem) CHECK(std::abs(rows[0].rate - rows[8].rate) <= 1e-12);
  for (std::size_t i = 1; i < r.remainder_summary.size(); ++i)
    CHECK(r.remainder_summary[i].max_sign_corrected < r.remainder_summary[i - 1].max_sign_corrected);
  // Orthogonality holds in range, fails just beyond it, and the real-axis form is exactly zero.
  std::map<int, std::pair<double, double>> ortho;  // n -> (max in range, out of range)
  for (const auto& o : r.orthogonality_rows) {
    if (o.in_range) {
      CHECK(o.residual <= 1e-10 * o.scale);
      CHECK(o.real_axis == 0.0);
      ortho[o.n].first = std::max(ortho[o.n].first, o.residual);
    } else {
      CHECK(o.real_axis > 0.0);
      ortho[o.n].second = o.residual;
    }
  }
  for (const auto& [n, v] : ortho) CHECK(v.second > 1e3 * v.first);
}

TEST_CASE("remainder values agree with the exact tail expansion") {
  const DegreeVector d = DegreeVector::diagonal(4, 2);
  const std::size_t N = static_cast<std::size_t>(d.total());
  const std::size_t extra = 160;
  const auto f = pair_series(N + extra + 8);
  const auto hp = normalize(solve_first_kind<Rational>(f, d), NormalizationPolicy::unit_c1);
  const auto tail = remainder_series(hp, f, N + extra);
  for (const cd z : {cd(3.0, 0.0), cd(0.5, 2.9), cd(-2.2, -2.2)}) {
    cd acc = 0.0;
    for (std::size_t m = N; m <= N + extra; ++m) acc += tail.exact()[m].get_d() * std::pow(z, -static_cast<int>(m));
    const cd R = remainder_value(hp, pair_system(), z);
    CHECK(std::abs(R - acc) <= 1e-10 * std::abs(acc));
  }
}

TEST_CASE("orthogonality check rejects bad contours and handles Jacobi inputs") {
  const DegreeVector d = DegreeVector::diagonal(3, 2);
  const auto hp = solve_first_kind<Rational>(pair_series(20), d);
  CHECK_THROWS_AS(check_orthogonality(hp, pair_system(), Circle{0.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(check_orthogonality(hp, pair_system(), Circle{0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(check_orthogonality(hp, pair_system(), Circle{cd(5.0, 0.0), 1.0}), std::invalid_argument);
  const auto off = check_orthogonality(hp, pair_system(), Circle{cd(0.25, 0.0), 3.0});
  CHECK(off.converged);
  for (std::size_t j = 0; j < off.in_range(); ++j) CHECK(off.residual[j] <= 1e-10 * off.scale[j]);

  SystemSpec jac;
  jac.jacobi = {JacobiSpec{{{Rational(-1), Rational(0)}, {Rational(1), Rational(0)}},
                           {{Rational(1, 3), Rational(0)}, {Rational(-1, 3), Rational(0)}}}};
  const auto fj = jac.expand(30, ScalarKind::exact_rational, 0);
  const auto hj = solve_first_kind<Rational>(fj, DegreeVector{{6}});
  const auto o = check_orthogonality(hj, jac, Circle{0.0, 2.0});
  CHECK(o.converged);
  CHECK(o.real_axis.empty());
  double in = 0.0;
  for (std::size_t j = 0; j < o.in_range(); ++j) {
    CHECK(o.residual[j] <= 1e-10 * o.scale[j]);
    in = std::max(in, o.residual[j]);
  }
  CHECK(o.residual.back() > 1e3 * in);
  // Double and working-precision evaluations of the Jacobi branch agree.
  CHECK(std::abs(jac.evaluate(0, cd(0.3, 1.9)) - std::pow((cd(0.3, 1.9) - 1.0) / (cd(0.3, 1.9) + 1.0), -1.0 / 3.0)) < 1e-14);
}

TEST_CASE("asymmetric pair: leading coefficient rates approach the constants") {
  auto j = pair_config("-3", {4, 8, 12, 16}, 3.5);
  j["parts"] = {"leading_coefficients"};
  const auto r = leading_coefficient_study(study_config_from_json(j));
  CHECK(r.zero_rows.empty());
  REQUIRE(r.w.size() == 2);
  std::vector<double> gaps;
  for (const auto& l : r.leading_rows) {
    if (l.component == 0) {
      CHECK(l.rate == 0.0);
      continue;
    }
    CHECK(l.target == doctest::Approx(r.w[1] - r.w[0]).epsilon(1e-12));
    gaps.push_back(std::abs(l.rate - l.target));
  }
  REQUIRE(gaps.size() == 4);
  CHECK(gaps.back() < gaps.front());
  CHECK(gaps.back() <= 0.1);
}

TEST_CASE("persistence: hashes, tables, isolation and reproducibility") {
  const fs::path out = scratch("persist");
  auto j = pair_config("-2", {2, 3, 4});
  j["output"] = out.string();
  const auto cfg = study_config_from_json(j);
  const auto r = run_study(cfg);
  const fs::path root = out / cfg.study_id();
  REQUIRE(fs::exists(root / "manifest.json"));
  const json manifest = json::parse(slurp(root / "manifest.json"));
  std::set<std::string> hashes;
  for (const auto& a : manifest["artifacts"]) {
    const std::string path = a["path"];
    CHECK(sha256_hex(slurp(root / path)) == a["sha256"].get<std::string>());
    hashes.insert(a["sha256"].get<std::string>());
  }
  for (const auto& t : manifest["tables"]) CHECK(sha256_hex(slurp(root / t["path"].get<std::string>())) == t["sha256"].get<std::string>());
  for (const auto& z : r.zero_rows) CHECK(hashes.count(z.artifact) == 1);
  for (const auto& l : r.leading_rows) CHECK(hashes.count(l.artifact) == 1);
  for (const auto& x : r.remainder_rows) CHECK(hashes.count(x.artifact) == 1);
  CHECK(fs::exists(root / "raw/3/hp_first.json"));
  CHECK(fs::exists(root / "raw/3/roots_second.json"));
  CHECK(slurp(root / "tables/zero_distribution.csv").rfind("n,kind,component,", 0) == 0);

  // A second run into another directory reproduces every table byte for byte.
  const fs::path again = scratch("persist_again");
  j["output"] = again.string();
  run_study(study_config_from_json(j));
  for (const auto& t : manifest["tables"]) {
    const std::string p = t["path"];
    CHECK(slurp(again / cfg.study_id() / p) == slurp(root / p));
  }
  CHECK(slurp(again / cfg.study_id() / "manifest.json") == slurp(root / "manifest.json"));

  // The report survives a JSON round trip.
  const auto back = study_report_from_json(json::parse(slurp(root / "report.json")));
  CHECK(zero_table_csv(back) == zero_table_csv(r));
  CHECK(remainder_table_csv(back) == remainder_table_csv(r));
  CHECK(orthogonality_table_csv(back) == orthogonality_table_csv(r));

  // A failure at one degree leaves the other degrees intact.
  const fs::path iso = scratch("isolation");
  j["output"] = iso.string();
  fs::create_directories(iso / cfg.study_id() / "raw");
  std::ofstream(iso / cfg.study_id() / "raw" / "3") << "blocks the directory";
  const auto broken = run_study(study_config_from_json(j));
  REQUIRE(broken.failures.size() == 1);
  CHECK(broken.failures[0].n == 3);
  std::string kept;
  for (const auto& z : broken.zero_rows) CHECK(z.n != 3);
  std::istringstream full(zero_table_csv(r));
  std::string line, expected;
  while (std::getline(full, line))
    if (line.rfind("3,", 0) != 0) expected += line + "\n";
  CHECK(zero_table_csv(broken) == expected);
  fs::remove_all(out);
  fs::remove_all(again);
  fs::remove_all(iso);
}

TEST_CASE("plots") {
  StudyReport empty;
  const fs::path out = scratch("plots");
  CHECK(emit_plots(empty, out).empty());
  CHECK(!fs::exists(out));

  auto j = pair_config("-2", {2, 4});
  j["grid"] = 60;
  j["parts"] = {"zero_distribution"};
  j["scurve"] = {{"points", {{1.0, 0.0}, {-0.5, 0.8660254037844386}, {-0.5, -0.8660254037844386}}}};
  const auto r = run_study(study_config_from_json(j));
  const auto files = emit_plots(r, out);
  REQUIRE(files.size() == 2);
  const std::string svg = slurp(out / "plots/zeros.svg");
  CHECK(svg == zeros_svg(r));
  CHECK(slurp(out / "plots/portrait.svg") == portrait_svg(*r.scurve));

  // Mirror symmetry of the plot: x -> width - x maps component 1 onto component 2.
  const auto lines = polylines(svg);
  REQUIRE(lines.size() == 2);
  REQUIRE(lines[0].size() == lines[1].size());
  const std::size_t m = lines[0].size();
  for (std::size_t i = 0; i < m; ++i) {
    CHECK(std::abs(640.0 - lines[0][i].first - lines[1][m - 1 - i].first) <= 1.5e-3);
    CHECK(std::abs(lines[0][i].second - lines[1][m - 1 - i].second) <= 1.5e-3);
  }
  auto c1 = circles(svg, 1), c2 = circles(svg, 2);
  REQUIRE(c1.size() == c2.size());
  std::sort(c1.begin(), c1.end());
  for (auto& p : c2) p.first = 640.0 - p.first;
  std::sort(c2.begin(), c2.end());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(std::abs(c1[i].first - c2[i].first) <= 1.5e-3);
    CHECK(c1[i].second == c2[i].second);
  }

  // Golden fixture generated once from this configuration and reviewed by eye.
  const fs::path golden = fs::path(HPL_SOURCE_DIR) / "tests/golden/zeros_symmetric.svg";
  if (std::getenv("HPL_UPDATE_GOLDEN")) std::ofstream(golden, std::ios::binary) << svg;
  REQUIRE(fs::exists(golden));
  CHECK(svg == slurp(golden));
  fs::remove_all(out);
}
