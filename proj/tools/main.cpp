// bipolar_form: run scenarios, verify the oracle suite, scaffold presets.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bipolar_formation/bipolar_formation.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRunAborted = 2;

void report(const char* what, bf_status st) {
  std::cerr << what << ": " << bf_status_name(st) << ": " << bf_last_error() << '\n';
}

int cmd_run(const std::string& path, const std::string& out_dir,
            const std::vector<std::string>& overrides) {
  bf_scenario* scn = nullptr;
  bf_status st = bf_scenario_load_file(path.c_str(), &scn);
  if (st != BF_OK) {
    report("cannot load scenario", st);
    return kExitInvalid;
  }
  for (const auto& kv : overrides) {
    st = bf_scenario_set(scn, kv.c_str());
    if (st != BF_OK) {
      report(("cannot apply --set " + kv).c_str(), st);
      bf_scenario_destroy(scn);
      return kExitInvalid;
    }
  }
  st = bf_scenario_validate(scn);
  if (st != BF_OK) {
    report("scenario rejected", st);
    bf_scenario_destroy(scn);
    return kExitInvalid;
  }
  bf_run* run = nullptr;
  st = bf_run_execute(scn, &run);
  const std::string run_error = bf_last_error();
  bf_scenario_destroy(scn);
  if (run == nullptr) {
    report("run failed", st);
    return kExitInvalid;
  }
  const bf_status written = bf_run_write_outputs(run, out_dir.c_str());
  char* summary = nullptr;
  if (bf_run_summary_json(run, &summary) == BF_OK) {
    const auto doc = nlohmann::json::parse(summary);
    std::printf("rows %zu, min neighbor distance %.4g, wall clock %.3g s\n",
                bf_run_row_count(run), doc["min_neighbor_distance"].get<double>(),
                doc["wall_clock_seconds"].get<double>());
    for (const auto& c : doc["channels"]) {
      std::printf("  %-8s max |e~|/b %.3f  steady |e| %.3g\n",
                  c["name"].get<std::string>().c_str(),
                  c["max_normalized_e_tilde"].get<double>(),
                  c["steady_state_max_abs_e"].get<double>());
    }
    bf_string_free(summary);
  }
  bf_run_destroy(run);
  if (written != BF_OK) {
    report("cannot write outputs", written);
    return kExitInvalid;
  }
  std::printf("outputs written to %s\n", out_dir.c_str());
  if (st != BF_OK) {
    std::cerr << "run aborted: " << bf_status_name(st) << ": " << run_error << '\n';
    return kExitRunAborted;
  }
  return kExitOk;
}

int cmd_verify(std::uint64_t seed, std::size_t samples) {
  char* text = nullptr;
  int all_pass = 0;
  const bf_status st = bf_verify(seed, samples, &text, &all_pass);
  if (st != BF_OK) {
    report("verify failed", st);
    return kExitInvalid;
  }
  const auto rows = nlohmann::json::parse(text);
  bf_string_free(text);
  std::printf("%-42s %-5s %12s %12s %8s %8s\n", "check", "", "worst", "threshold", "count",
              "seconds");
  for (const auto& r : rows) {
    std::printf("%-42s %-5s %12.4g %12.4g %8zu %8.3f\n", r["name"].get<std::string>().c_str(),
                r["pass"].get<bool>() ? "PASS" : "FAIL", r["worst"].get<double>(),
                r["threshold"].get<double>(), r["count"].get<std::size_t>(),
                r["seconds"].get<double>());
    const auto detail = r["detail"].get<std::string>();
    if (!detail.empty()) std::printf("    %s\n", detail.c_str());
  }
  std::printf("%s\n", all_pass ? "all checks passed" : "SOME CHECKS FAILED");
  return all_pass ? kExitOk : kExitInvalid;
}

int cmd_scaffold(const std::string& preset, const std::string& out, int n, std::uint64_t seed) {
  bf_scenario* scn = nullptr;
  bf_status st = bf_scenario_scaffold(preset.c_str(), n, seed, &scn);
  if (st != BF_OK) {
    report("cannot scaffold", st);
    return kExitInvalid;
  }
  st = bf_scenario_validate(scn);
  if (st == BF_OK) st = bf_scenario_save(scn, out.c_str());
  bf_scenario_destroy(scn);
  if (st != BF_OK) {
    report("cannot write scenario", st);
    return kExitInvalid;
  }
  std::printf("wrote %s\n", out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formation control simulator in bipolar coordinates"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "simulate a scenario and write CSV, JSON and SVG outputs");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--set", overrides, "override a scenario field, key.path=value");

  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  auto* verify = app.add_subcommand("verify", "run the numerical oracle suite");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--samples", samples, "base sample count per check");

  std::string preset;
  std::string out_path;
  int n = 10;
  std::uint64_t preset_seed = 7;
  auto* scaffold = app.add_subcommand("scaffold", "write a preset scenario file");
  scaffold->add_option("preset", preset, "sec4_maneuver | two_agents_static | random_henneberg")
      ->required();
  scaffold->add_option("out", out_path, "output JSON path")->required();
  scaffold->add_option("--n", n, "agent count (random_henneberg)");
  scaffold->add_option("--seed", preset_seed, "generator seed (random_henneberg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (*run) return cmd_run(scenario_path, out_dir, overrides);
  if (*verify) return cmd_verify(seed, samples);
  return cmd_scaffold(preset, out_path, n, preset_seed);
}
