#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "hplab_cli_test";

fs::path config(const std::string& name, const std::string& body) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / (name + ".json");
  std::ofstream(p) << body;
  return p;
}

int hplab(const std::string& args) {
  const std::string cmd = std::string(HPLAB_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string args(const std::string& sub, const fs::path& cfg, const fs::path& out) {
  return sub + " --config " + cfg.string() + " --out " + out.string();
}

const char* kPair = R"({"markov": [{"interval": ["-2", "-1"]}, {"interval": ["1", "2"]}]})";

}  // namespace

TEST_CASE("configuration errors exit with 2") {
  fs::remove_all(kRoot);
  const fs::path out = kRoot / "bad";
  CHECK(hplab("") == 2);
  CHECK(hplab("series --config " + (kRoot / "missing.json").string()) == 2);
  CHECK(hplab(args("series", config("garbled", "{not json"), out)) == 2);
  CHECK(hplab(args("series", config("typo", std::string(R"({"system": )") + kPair + R"(, "ordr": 10})"), out)) == 2);
  CHECK(hplab(args("hp", config("shape", std::string(R"({"system": )") + kPair + R"(, "degrees": [2, 2, 2]})"), out)) == 2);
  CHECK(hplab(args("study", config("sched", std::string(R"({"system": )") + kPair + R"(, "degrees": [4, 2]})"), out)) == 2);
  CHECK(hplab(args("scurve", config("nopts", R"({"points": [[0, 0]]})"), out)) == 2);
  // Plotting needs a persisted report.
  CHECK(hplab(args("plot", config("noplot", std::string(R"({"system": )") + kPair + R"(, "degrees": [2]})"), out)) == 2);
}

TEST_CASE("subcommands write their results") {
  const fs::path out = kRoot / "ok";
  fs::remove_all(out);
  CHECK(hplab(args("series", config("series", std::string(R"({"system": )") + kPair + R"(, "order": 12})"), out / "series")) == 0);
  const json s = json::parse(std::ifstream(out / "series/series.json"));
  CHECK(s["schema_version"] == 1);
  CHECK(s["series"].size() == 2);

  CHECK(hplab(args("hp", config("hp", std::string(R"({"system": )") + kPair + R"(, "degrees": 3})"), out / "hp")) == 0);
  for (const char* f : {"hp_first.json", "roots_first.json", "hp_second.json", "roots_second.json"})
    CHECK(fs::exists(out / "hp" / f));
  CHECK(json::parse(std::ifstream(out / "hp/roots_second.json"))["roots"].size() == 6);

  CHECK(hplab(args("hp", config("hpf", std::string(R"({"system": )") + kPair +
                                          R"(, "degrees": [3, 2], "kind": "first", "scalar": "big-float-complex", "precision_bits": 200})"),
                   out / "hpf")) == 0);
  CHECK(fs::exists(out / "hpf/hp_first.json"));
  CHECK(!fs::exists(out / "hpf/hp_second.json"));

  CHECK(hplab(args("equilibrium", config("eq", R"({"sets": [[[-2, -1]], [[1, 2]]], "grid": 100})"), out / "eq")) == 0);
  CHECK(fs::exists(out / "eq/equilibrium.json"));
  CHECK(fs::exists(out / "eq/density.csv"));

  CHECK(hplab(args("scurve", config("sc", R"({"points": [[1, 0], [-0.5, 0.8660254037844386], [-0.5, -0.8660254037844386]], "g_function": true})"),
                   out / "sc")) == 0);
  CHECK(fs::exists(out / "sc/scurve.json"));
  CHECK(fs::exists(out / "sc/portrait.svg"));
  CHECK(fs::exists(out / "sc/g_function.json"));

  const fs::path study = config("study", std::string(R"({"system": )") + kPair +
                                             R"(, "degrees": [2, 3], "grid": 60, "probes": {"radius": 3, "count": 8},
                                                  "scurve": {"points": [[0, 0], [1, 0], [0, 1]]}})");
  CHECK(hplab(args("study", study, out / "study") + " --seed 11") == 0);
  fs::path dir;
  for (const auto& e : fs::directory_iterator(out / "study")) dir = e.path();
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "plots/zeros.svg"));
  CHECK(json::parse(std::ifstream(dir / "manifest.json"))["environment"]["seed"] == 11);

  // Plot regenerates the figures from the persisted report and re-solves the portrait.
  fs::remove_all(dir / "plots");
  CHECK(hplab(args("plot", study, out / "study") + " --seed 11") == 0);
  CHECK(fs::exists(dir / "plots/zeros.svg"));
  CHECK(fs::exists(dir / "plots/portrait.svg"));
}

TEST_CASE("numerical failures exit with 3 and keep partial results") {
  const fs::path out = kRoot / "fail";
  fs::remove_all(out);
  const fs::path study = config("partial", std::string(R"({"system": )") + kPair +
                                               R"(, "degrees": [2, 3, 4], "grid": 60, "probes": {"radius": 3, "count": 8}})");
  // First run to learn the study directory, then block degree 3.
  CHECK(hplab(args("study", study, out)) == 0);
  fs::path dir;
  for (const auto& e : fs::directory_iterator(out)) dir = e.path();
  fs::remove_all(dir);
  fs::create_directories(dir / "raw");
  std::ofstream(dir / "raw" / "3") << "blocks the directory";
  CHECK(hplab(args("study", study, out)) == 3);
  CHECK(fs::exists(dir / "raw/2/hp_first.json"));
  CHECK(fs::exists(dir / "raw/4/hp_first.json"));
  CHECK(fs::exists(dir / "tables/zero_distribution.csv"));
  CHECK(json::parse(std::ifstream(dir / "manifest.json"))["failures"] == 1);

  CHECK(hplab(args("scurve", config("stuck", R"({"points": [[0, 0], [1, 0], [0, 1], [2, 3], [-1, 2]], "max_newton": 1, "multistarts": 1})"),
                   out / "sc")) == 3);
  CHECK(fs::exists(out / "sc/scurve_failure.json"));
  fs::remove_all(kRoot);
}
