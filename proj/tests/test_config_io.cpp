#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qlyap/config.hpp"
#include "qlyap/errors.hpp"
#include "qlyap/io.hpp"
#include "qlyap/runner.hpp"

namespace {

std::string source_dir() { return QLYAP_SOURCE_DIR; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

qlyap::json summary_without_wall_time(const std::filesystem::path& p) {
  qlyap::json j = qlyap::json::parse(slurp(p));
  j.erase("wall_time_seconds");
  return j;
}

qlyap::json small_run_doc() {
  return qlyap::json::parse(R"({
    "schema_version": 1,
    "name": "unit_run",
    "model": {
      "type": "position_kick",
      "cutoff": 5,
      "tau": {"resonant": true, "multiple": 1},
      "kick": {"alpha": 0.8, "g": {"axis1": [{"m": 1, "re": 0.5, "im": 0.0}],
                                   "axis2": [{"m": 1, "re": 0.5, "im": 0.0}]}}
    },
    "beta": [0.0, 0.0],
    "rho0": {"p0": [0, 0], "q0": [1.1, 0.35], "v1": [0.3, -0.2],
             "v2": [0.1, 0.4], "k_window": 2, "fd_step": 1e-4},
    "run": {"steps": 4, "leakage_budget": 0.001}
  })");
}

std::filesystem::path fresh_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("fnv1a64_reference_vectors") {
  CHECK(qlyap::fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(qlyap::fnv1a64("abc") == 0xe71fa2190541574bull);
  CHECK(qlyap::fnv1a64("qlyap") == 0x3bcca24ae93c1c2aull);
}

TEST_CASE("bundled_configs_parse") {
  const std::vector<std::string> names = {
      "free_resonant", "cos_kick",      "cat_kick",    "spectrum_kick",
      "spectrum_free", "spectrum_cat",  "sweep_alpha"};
  for (const auto& n : names) {
    const auto cfg = qlyap::load_config(source_dir() + "/configs/" + n +
                                        ".json");
    CHECK(!cfg.name.empty());
    CHECK(!cfg.hash.empty());
  }

  const auto free_cfg =
      qlyap::load_config(source_dir() + "/configs/free_resonant.json");
  CHECK(free_cfg.model.cutoff == 32);
  CHECK(free_cfg.steps == 50);
  CHECK(free_cfg.model.resonant);
  CHECK(std::abs(free_cfg.model.tau() - 4.0 * qlyap::kPi) < 1e-15);

  const auto cat_cfg =
      qlyap::load_config(source_dir() + "/configs/cat_kick.json");
  CHECK(cat_cfg.fit.leakage_budget == 1e-6);
  CHECK(cat_cfg.model.type == qlyap::ModelType::kCatMap);

  const auto sweep_cfg =
      qlyap::load_config(source_dir() + "/configs/sweep_alpha.json");
  REQUIRE(sweep_cfg.sweep.has_value());
  CHECK(sweep_cfg.sweep->parameter == "model.kick.alpha");
  REQUIRE(sweep_cfg.sweep->values.size() == 3);
  CHECK(sweep_cfg.sweep->values[1] == 0.5);

  const auto spec_cfg =
      qlyap::load_config(source_dir() + "/configs/spectrum_kick.json");
  CHECK(spec_cfg.spectral.bins == 8);
  CHECK(spec_cfg.spectral.compare_steps == 10);
}

TEST_CASE("invalid_configs_are_rejected") {
  auto expect_throw = [](qlyap::json doc) {
    CHECK_THROWS_AS(qlyap::parse_config(doc), qlyap::ConfigError);
  };

  qlyap::json doc = small_run_doc();
  doc["surprise"] = 1;
  expect_throw(doc);

  doc = small_run_doc();
  doc["rho0"]["qq0"] = {0.0, 0.0};
  expect_throw(doc);

  doc = small_run_doc();
  doc["run"]["steps"] = 0;
  expect_throw(doc);

  doc = small_run_doc();
  doc["beta"] = {1.0, 0.0};
  expect_throw(doc);

  doc = small_run_doc();
  doc["model"]["kick"]["g"]["axis1"] = {{{"m", 1}, {"re", 0.5}, {"im", 0.0}},
                                        {{"m", 1}, {"re", 0.1}, {"im", 0.0}}};
  expect_throw(doc);

  doc = small_run_doc();
  doc["model"]["kick"]["g"]["axis1"] = {{{"m", 0}, {"re", 0.5}, {"im", 0.2}}};
  expect_throw(doc);

  doc = small_run_doc();
  doc["model"]["type"] = "free";  // kick block now invalid
  expect_throw(doc);

  doc = small_run_doc();
  doc["name"] = "";
  expect_throw(doc);

  doc = small_run_doc();
  doc["rho0"]["v1"] = {0.0, 0.0};
  doc["rho0"]["v2"] = {0.0, 0.0};
  expect_throw(doc);

  doc = small_run_doc();
  doc["schema_version"] = 2;
  expect_throw(doc);
}

TEST_CASE("config_hash_ignores_key_order_but_not_content") {
  qlyap::json a = small_run_doc();
  // Same content, different insertion order at two levels.
  qlyap::json b;
  b["name"] = a["name"];
  b["schema_version"] = a["schema_version"];
  b["run"] = a["run"];
  b["rho0"] = a["rho0"];
  b["beta"] = a["beta"];
  b["model"] = a["model"];
  const auto ca = qlyap::parse_config(a);
  const auto cb = qlyap::parse_config(b);
  CHECK(ca.hash == cb.hash);

  qlyap::json c = small_run_doc();
  c["rho0"]["q0"] = {1.1, 0.36};
  CHECK(qlyap::parse_config(c).hash != ca.hash);
}

TEST_CASE("double_formatting_round_trips") {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-17, -0.0625, 12.295493169675781}) {
    const std::string s = qlyap::fmt_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(qlyap::fmt_double(1.0) == "1");
  CHECK(qlyap::fmt_fixed(1.2345, 2) == "1.23");
}

TEST_CASE("series_csv_golden") {
  qlyap::TraceSeries s;
  s.tau = 1.0;
  s.step = {0, 1};
  s.raw[0] = {{1.5, 0.0}, {-2.5, 0.5}};
  s.raw[1] = {{0.25, 0.0}, {3.0, 0.0}};
  s.raw[2] = {{-0.5, 0.0}, {-0.125, 0.0}};
  s.raw[3] = {{2.0, 0.0}, {0.5, 0.0}};
  s.delta = {1.0, 2.75};
  s.leakage = {0.0, 0.25};
  const std::string expected =
      "n,x1_re,x1_im,x2_re,x2_im,p1_re,p1_im,p2_re,p2_im,delta,leakage\n"
      "0,1.5,0,0.25,0,-0.5,0,2,0,1,0\n"
      "1,-2.5,0.5,3,0,-0.125,0,0.5,0,2.75,0.25\n";
  CHECK(qlyap::series_csv(s) == expected);
}

TEST_CASE("set_json_path_preserves_integer_slots") {
  qlyap::json doc = qlyap::json::parse(
      R"({"model": {"cutoff": 16, "kick": {"alpha": 1.0}}})");
  qlyap::set_json_path(doc, "model.kick.alpha", 0.25);
  CHECK(doc["model"]["kick"]["alpha"] == 0.25);
  qlyap::set_json_path(doc, "model.cutoff", 8.0);
  CHECK(doc["model"]["cutoff"].is_number_integer());
  CHECK(doc["model"]["cutoff"] == 8);
}

TEST_CASE("run_outputs_are_deterministic") {
  const auto cfg = qlyap::parse_config(small_run_doc());
  qlyap::RunOptions opt;
  opt.quiet = true;
  const auto dir_a = fresh_dir("qlyap_det_a");
  const auto dir_b = fresh_dir("qlyap_det_b");
  opt.out_dir = dir_a.string();
  qlyap::run_one(cfg, opt);
  opt.out_dir = dir_b.string();
  qlyap::run_one(cfg, opt);

  const auto ra = dir_a / "unit_run", rb = dir_b / "unit_run";
  CHECK(slurp(ra / "series.csv") == slurp(rb / "series.csv"));
  CHECK(slurp(ra / "delta.svg") == slurp(rb / "delta.svg"));
  CHECK(summary_without_wall_time(ra / "summary.json") ==
        summary_without_wall_time(rb / "summary.json"));
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("sweep_results_do_not_depend_on_worker_count") {
  qlyap::json doc = small_run_doc();
  doc["name"] = "unit_sweep";
  doc["sweep"] = {{"parameter", "model.kick.alpha"},
                  {"values", {0.3, 0.6, 0.9}}};
  const auto cfg = qlyap::parse_config(doc);

  qlyap::RunOptions opt;
  opt.quiet = true;
  opt.plot = false;
  const auto dir_a = fresh_dir("qlyap_sweep_a");
  const auto dir_b = fresh_dir("qlyap_sweep_b");
  opt.out_dir = dir_a.string();
  opt.workers = 1;
  qlyap::run_sweep(cfg, opt);
  opt.out_dir = dir_b.string();
  opt.workers = 3;
  qlyap::run_sweep(cfg, opt);

  CHECK(slurp(dir_a / "unit_sweep" / "sweep_summary.csv") ==
        slurp(dir_b / "unit_sweep" / "sweep_summary.csv"));
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("bundled_configs_pass_the_static_check") {
  const std::vector<std::string> names = {
      "free_resonant", "cos_kick",      "cat_kick",    "spectrum_kick",
      "spectrum_free", "spectrum_cat",  "sweep_alpha"};
  std::vector<std::string> paths;
  for (const auto& n : names)
    paths.push_back(source_dir() + "/configs/" + n + ".json");
  qlyap::RunOptions opt;
  opt.quiet = true;
  CHECK(qlyap::run_check(paths, opt) == 0);
}
