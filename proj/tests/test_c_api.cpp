#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "bipolar_formation/bipolar_formation.h"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string scenario_path(const char* name) {
  const char* dir = std::getenv("BF_SCENARIO_DIR");
  return std::string(dir != nullptr ? dir : "scenarios") + "/" + name;
}

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  bf_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(bf_status_name(BF_OK)) == "ok");
  CHECK(std::string(bf_status_name(BF_ERR_OUT_OF_BOUNDS)).size() > 0);
  CHECK(std::string(bf_status_name(static_cast<bf_status>(77))).size() > 0);
  CHECK(std::string(bf_version()).size() > 0);
  CHECK(bf_last_error() != nullptr);
}

TEST_CASE("null arguments are rejected") {
  bf_scenario* scn = nullptr;
  bf_run* run = nullptr;
  char* text = nullptr;
  int all = 0;
  CHECK(bf_scenario_load_file(nullptr, &scn) == BF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(bf_last_error()).size() > 0);
  CHECK(bf_scenario_load_json(nullptr, &scn) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_scenario_scaffold(nullptr, 0, 1, &scn) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_scenario_set(nullptr, "dt=1") == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_scenario_validate(nullptr) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_scenario_to_json(nullptr, &text) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_scenario_save(nullptr, "x.json") == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_run_execute(nullptr, &run) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_run_row(nullptr, 0, nullptr, nullptr, 0) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_run_summary_json(nullptr, &text) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_run_write_outputs(nullptr, "out") == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_verify(1, 10, nullptr, &all) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_run_completed(nullptr) == 0);
  CHECK(bf_run_row_count(nullptr) == 0);
  CHECK(bf_run_agent_count(nullptr) == 0);
  bf_scenario_destroy(nullptr);
  bf_run_destroy(nullptr);
  bf_string_free(nullptr);
}

TEST_CASE("load, set and validate") {
  bf_scenario* scn = nullptr;
  REQUIRE(bf_scenario_load_file(scenario_path("two_agents_static.json").c_str(), &scn) == BF_OK);
  CHECK(bf_scenario_validate(scn) == BF_OK);

  CHECK(bf_scenario_set(scn, "dt=0.01") == BF_OK);
  char* text = nullptr;
  REQUIRE(bf_scenario_to_json(scn, &text) == BF_OK);
  CHECK(json::parse(take(text))["dt"] == 0.01);

  // A rejected assignment leaves the scenario untouched.
  CHECK(bf_scenario_set(scn, "integrator=\"midpoint\"") == BF_ERR_PARSE);
  CHECK(bf_scenario_set(scn, "no_equals_sign") == BF_ERR_INVALID_ARGUMENT);
  REQUIRE(bf_scenario_to_json(scn, &text) == BF_OK);
  CHECK(json::parse(take(text))["integrator"] == "rk4");

  // Coincident agents fail validation.
  CHECK(bf_scenario_set(scn, "initial_positions.1=[0, 0]") == BF_OK);
  CHECK(bf_scenario_validate(scn) != BF_OK);
  bf_scenario_destroy(scn);

  CHECK(bf_scenario_load_file("/nonexistent/scenario.json", &scn) == BF_ERR_IO);
  CHECK(scn == nullptr);
  CHECK(bf_scenario_load_json("{ nope", &scn) == BF_ERR_PARSE);
  CHECK(bf_scenario_load_json("{\"agents\": 2}", &scn) == BF_ERR_PARSE);
  CHECK(std::string(bf_last_error()).size() > 0);
}

TEST_CASE("scaffold and save") {
  bf_scenario* scn = nullptr;
  CHECK(bf_scenario_scaffold("no_such_preset", 0, 1, &scn) == BF_ERR_INVALID_ARGUMENT);
  CHECK(scn == nullptr);
  REQUIRE(bf_scenario_scaffold("random_henneberg", 8, 3, &scn) == BF_OK);
  CHECK(bf_scenario_validate(scn) == BF_OK);
  const auto dir = std::filesystem::temp_directory_path() / "bform_c_api";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = (dir / "henneberg.json").string();
  REQUIRE(bf_scenario_save(scn, path.c_str()) == BF_OK);
  char* a = nullptr;
  REQUIRE(bf_scenario_to_json(scn, &a) == BF_OK);
  bf_scenario_destroy(scn);

  REQUIRE(bf_scenario_load_file(path.c_str(), &scn) == BF_OK);
  char* b = nullptr;
  REQUIRE(bf_scenario_to_json(scn, &b) == BF_OK);
  const json ja = json::parse(take(a));
  CHECK(ja == json::parse(take(b)));
  CHECK(ja["agents"] == 8);
  bf_scenario_destroy(scn);
}

TEST_CASE("run and read back") {
  bf_scenario* scn = nullptr;
  REQUIRE(bf_scenario_load_file(scenario_path("two_agents_static.json").c_str(), &scn) == BF_OK);
  bf_run* run = nullptr;
  REQUIRE(bf_run_execute(scn, &run) == BF_OK);
  CHECK(bf_run_completed(run) == 1);
  CHECK(bf_run_agent_count(run) == 2);
  const std::size_t rows = bf_run_row_count(run);
  CHECK(rows > 1);

  double t = -1.0;
  std::vector<double> xy(4);
  REQUIRE(bf_run_row(run, 0, &t, xy.data(), xy.size()) == BF_OK);
  CHECK(t == 0.0);
  REQUIRE(bf_run_row(run, rows - 1, &t, xy.data(), xy.size()) == BF_OK);
  CHECK(t > 0.0);
  CHECK(bf_run_row(run, rows, &t, nullptr, 0) == BF_ERR_INVALID_ARGUMENT);
  CHECK(bf_run_row(run, 0, nullptr, xy.data(), 3) == BF_ERR_INVALID_ARGUMENT);

  char* text = nullptr;
  REQUIRE(bf_run_summary_json(run, &text) == BF_OK);
  const json summary = json::parse(take(text));
  CHECK(summary["completed"] == true);
  CHECK(summary["bound_violation"] == false);

  const auto dir = std::filesystem::temp_directory_path() / "bform_c_api_out";
  std::filesystem::remove_all(dir);
  REQUIRE(bf_run_write_outputs(run, dir.string().c_str()) == BF_OK);
  CHECK(std::filesystem::exists(dir / "trajectory.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  bf_run_destroy(run);
  bf_scenario_destroy(scn);
}

TEST_CASE("aborted run keeps its partial log") {
  bf_scenario* scn = nullptr;
  REQUIRE(bf_scenario_load_file(scenario_path("sec4_maneuver.json").c_str(), &scn) == BF_OK);
  REQUIRE(bf_scenario_set(scn, "dt=0.5") == BF_OK);
  bf_run* run = nullptr;
  CHECK(bf_run_execute(scn, &run) == BF_ERR_OUT_OF_BOUNDS);
  const std::string message = bf_last_error();
  CHECK(message.size() > 0);
  REQUIRE(run != nullptr);
  CHECK(bf_run_completed(run) == 0);
  CHECK(bf_run_row_count(run) >= 1);
  char* text = nullptr;
  REQUIRE(bf_run_summary_json(run, &text) == BF_OK);
  const json summary = json::parse(take(text));
  CHECK(summary["completed"] == false);
  CHECK(summary["bound_violation"] == true);
  bf_run_destroy(run);
  bf_scenario_destroy(scn);
}

TEST_CASE("verify") {
  char* report = nullptr;
  int all = 0;
  REQUIRE(bf_verify(1, 20, &report, &all) == BF_OK);
  CHECK(all == 1);
  const json rows = json::parse(take(report));
  REQUIRE(rows.is_array());
  CHECK(rows.size() == 7);
  for (const auto& r : rows) {
    CHECK(r["pass"] == true);
    CHECK(r.contains("worst"));
    CHECK(r.contains("threshold"));
  }
}
