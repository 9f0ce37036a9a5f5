#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qhit/experiment.hpp"

using namespace qhit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qhit_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json two_point_config(const std::string& kind) {
  return json{{"experiment", kind},
              {"base", {{"kind", "bernoulli"}, {"weights", {0.5, 0.5}}}},
              {"fiber", {{"W", {{0.3, 0.7}, {0.7, 0.3}}}}},
              {"seeds", {1, 2}}};
}

bool contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validation") {
  const json good = load_config_file(fs::path(QHIT_SOURCE_DIR) / "configs" / "quenched_two_point.json");
  CHECK(validate(good).empty());

  const json bad = load_config_file(fs::path(QHIT_SOURCE_DIR) / "tests" / "data" / "bad_row.json");
  CHECK(contains(validate(bad), "row 0 not stochastic"));

  json unsorted = good;
  unsorted["sweep"]["t"] = {0.0, 2.0, 1.0};
  CHECK(contains(validate(unsorted), "sweep.t must be increasing"));

  json no_seeds = good;
  no_seeds.erase("seeds");
  CHECK(contains(validate(no_seeds), "seeds"));

  json circle{{"experiment", "circle_law"},
              {"circle", {{"multipliers", {2, 3}}, {"precision_bits", 256}}},
              {"sweep", {{"r", {0.01}}, {"t", {0.0, 5.0}}}},
              {"seeds", {1}}};
  // 2 floor(5 / 0.02) = 500 steps need ceil(500 log2 3) + 64 = 857 bits.
  CHECK(contains(validate(circle), "needs 857 precision bits"));
  circle["circle"]["precision_bits"] = 857;
  CHECK(validate(circle).empty());

  const auto outcome = run_experiment(bad, {.out_dir = scratch("bad")});
  CHECK(outcome.exit_code == kExitValidation);
  CHECK_FALSE(outcome.errors.empty());
}

TEST_CASE("quenched run produces curves, report and manifest") {
  json cfg = two_point_config("quenched_shift");
  cfg["sweep"] = {{"n", {6, 10, 14}}, {"t", {{"stop", 2.0}, {"step", 0.5}}}};
  cfg["seeds"] = {3};
  const fs::path dir = scratch("quenched");
  const auto outcome = run_experiment(cfg, {.out_dir = dir, .threads = 2});
  CHECK(outcome.exit_code == kExitOk);
  for (const char* f : {"quenched_n6_seed3.csv", "quenched_n10_seed3.csv", "quenched_n14_seed3.csv", "report.json",
                        "manifest.json"})
    CHECK(fs::exists(dir / f));
  const std::string csv = slurp(dir / "quenched_n10_seed3.csv");
  CHECK(csv.starts_with("t,k,survival,exp_minus_t,abs_err\n"));
  CHECK(csv.find("\n1,1024,") != std::string::npos);

  const json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["files"].size() == 4);
  CHECK(manifest["code_version"] == code_version());
  CHECK(manifest["truncated"] == false);
  const json report = json::parse(slurp(dir / "report.json"));
  CHECK(report["curves"].size() == 3);
}

TEST_CASE("outputs do not depend on the worker count") {
  std::vector<json> configs;
  {
    json c = two_point_config("quenched_shift");
    c["sweep"] = {{"n", {6, 8}}, {"t", {0.0, 0.5, 1.0, 2.0}}};
    configs.push_back(c);
  }
  {
    json c = two_point_config("annealed_shift");
    c["sweep"] = {{"n", {6}}, {"t", {0.0, 1.0}}};
    c["windows"] = 16;
    configs.push_back(c);
  }
  {
    json c = two_point_config("ledger");
    c["sweep"] = {{"n", {4, 6}}, {"t", {1.0, 2.0}}};
    c["gap"] = "schedule";
    configs.push_back(c);
  }
  {
    json c = two_point_config("entropy");
    c["sweep"] = {{"n", {6, 8}}};
    c["samples"] = 30;
    configs.push_back(c);
  }
  {
    json c = two_point_config("singularity");
    c["sweep"] = {{"n", {50}}};
    c["draws"] = 100;
    configs.push_back(c);
  }
  {
    json c{{"experiment", "circle_law"},
           {"sweep", {{"r", {0.1, 0.05, 0.02}}, {"t", {0.0, 1.0, 2.0}}}},
           {"trials", 300},
           {"seeds", {1, 2}}};
    configs.push_back(c);
  }
  for (const auto& cfg : configs) {
    const std::string kind = cfg["experiment"];
    CAPTURE(kind);
    const fs::path a = scratch(kind + "_a"), b = scratch(kind + "_b");
    const auto ra = run_experiment(cfg, {.out_dir = a, .threads = 1});
    const auto rb = run_experiment(cfg, {.out_dir = b, .threads = 3});
    REQUIRE(ra.exit_code == kExitOk);
    REQUIRE(rb.exit_code == kExitOk);
    CHECK(ra.files == rb.files);
    for (const auto& f : ra.files) {
      CAPTURE(f);
      CHECK(slurp(a / f) == slurp(b / f));
    }
  }
}

TEST_CASE("seed override and rerun") {
  json cfg = two_point_config("singularity");
  cfg["sweep"] = {{"n", {20}}};
  cfg["draws"] = 10;
  const fs::path a = scratch("seed_a"), b = scratch("seed_b");
  const auto ra = run_experiment(cfg, {.out_dir = a, .seed = 9});
  const auto rb = run_experiment(cfg, {.out_dir = b, .seed = 9});
  CHECK(ra.files == std::vector<std::string>{"report.json", "singularity_n20_seed9.csv", "manifest.json"});
  CHECK(slurp(a / "singularity_n20_seed9.csv") == slurp(b / "singularity_n20_seed9.csv"));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
}

TEST_CASE("budget exhaustion truncates with markers") {
  json cfg = two_point_config("ledger");
  cfg["sweep"] = {{"n", {4, 12}}, {"t", {1.0}}};
  cfg["seeds"] = {1};
  cfg["gap"] = 1;
  cfg["budget"] = 1000.0;
  const fs::path dir = scratch("budget");
  const auto outcome = run_experiment(cfg, {.out_dir = dir});
  CHECK(outcome.exit_code == kExitBudget);
  CHECK(contains(outcome.errors, "n = 12, t = 1"));
  const std::string csv = slurp(dir / "ledger_seed1.csv");
  CHECK(csv.find("# TRUNCATED") != std::string::npos);
  CHECK(csv.find("\n4,1,1,16,") != std::string::npos);
  CHECK(json::parse(slurp(dir / "manifest.json"))["truncated"] == true);

  json q = two_point_config("quenched_shift");
  q["sweep"] = {{"n", {20}}, {"t", {0.0, 1.0}}};
  q["seeds"] = {1};
  q["budget"] = 1000.0;
  const auto qo = run_experiment(q, {.out_dir = scratch("budget_q")});
  CHECK(qo.exit_code == kExitBudget);
}
