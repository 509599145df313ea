#include "bipolar_formation/bipolar_formation.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "bipolar_formation/error.hpp"
#include "bipolar_formation/oracles.hpp"
#include "bipolar_formation/outputs.hpp"
#include "bipolar_formation/presets.hpp"
#include "bipolar_formation/scenario_io.hpp"
#include "bipolar_formation/simulation.hpp"

struct bf_scenario {
  nlohmann::json doc;
  bform::ScenarioConfig config;
};

struct bf_run {
  bform::ScenarioConfig config;
  bform::RunResult result;
};

namespace {

thread_local std::string g_last_error;

bf_status status_for(bform::ErrorCode code) {
  using bform::ErrorCode;
  switch (code) {
    case ErrorCode::kCollocated: return BF_ERR_COLLOCATED;
    case ErrorCode::kOutOfBounds: return BF_ERR_OUT_OF_BOUNDS;
    case ErrorCode::kInfeasibleInitialError: return BF_ERR_INFEASIBLE;
    case ErrorCode::kValidation: return BF_ERR_VALIDATION;
    case ErrorCode::kParse: return BF_ERR_PARSE;
    case ErrorCode::kIo: return BF_ERR_IO;
    case ErrorCode::kInvalidArgument: return BF_ERR_INVALID_ARGUMENT;
    default: return BF_ERR_GEOMETRY;
  }
}

bf_status fail(bf_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

template <typename F>
bf_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const bform::FormationError& err) {
    return fail(status_for(err.code()), err.what());
  } catch (const std::bad_alloc&) {
    return fail(BF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& err) {
    return fail(BF_ERR_INTERNAL, err.what());
  }
}

char* duplicate(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bf_status make_scenario(nlohmann::json doc, bf_scenario** out) {
  auto cfg = bform::scenario_from_json(doc);
  *out = new bf_scenario{std::move(doc), std::move(cfg)};
  return BF_OK;
}

}  // namespace

extern "C" {

const char* bf_last_error(void) { return g_last_error.c_str(); }

const char* bf_status_name(bf_status status) {
  switch (status) {
    case BF_OK: return "ok";
    case BF_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case BF_ERR_IO: return "io";
    case BF_ERR_PARSE: return "parse";
    case BF_ERR_VALIDATION: return "validation";
    case BF_ERR_INFEASIBLE: return "infeasible_initial_error";
    case BF_ERR_OUT_OF_BOUNDS: return "out_of_bounds";
    case BF_ERR_COLLOCATED: return "collocated";
    case BF_ERR_GEOMETRY: return "geometry";
    case BF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* bf_version(void) { return "1.0.0"; }

void bf_string_free(char* s) { std::free(s); }

bf_status bf_scenario_load_file(const char* path, bf_scenario** out) {
  if (path == nullptr || out == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return make_scenario(bform::read_json_file(path), out); });
}

bf_status bf_scenario_load_json(const char* json_text, bf_scenario** out) {
  if (json_text == nullptr || out == nullptr) {
    return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) return fail(BF_ERR_PARSE, "scenario text is not valid JSON");
    return make_scenario(std::move(doc), out);
  });
}

bf_status bf_scenario_scaffold(const char* preset, int n, uint64_t seed, bf_scenario** out) {
  if (preset == nullptr || out == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto cfg = bform::make_preset(preset, n, seed);
    return make_scenario(bform::scenario_to_json(cfg), out);
  });
}

bf_status bf_scenario_set(bf_scenario* scn, const char* assignment) {
  if (scn == nullptr || assignment == nullptr) {
    return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    nlohmann::json doc = scn->doc;
    bform::apply_override(doc, assignment);
    auto cfg = bform::scenario_from_json(doc);
    scn->doc = std::move(doc);
    scn->config = std::move(cfg);
    return BF_OK;
  });
}

bf_status bf_scenario_validate(const bf_scenario* scn) {
  if (scn == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    bform::prepare(scn->config);
    return BF_OK;
  });
}

bf_status bf_scenario_to_json(const bf_scenario* scn, char** out) {
  if (scn == nullptr || out == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = duplicate(scn->doc.dump(2));
    return BF_OK;
  });
}

bf_status bf_scenario_save(const bf_scenario* scn, const char* path) {
  if (scn == nullptr || path == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    bform::write_json_file(scn->doc, path);
    return BF_OK;
  });
}

void bf_scenario_destroy(bf_scenario* scn) { delete scn; }

bf_status bf_run_execute(const bf_scenario* scn, bf_run** out) {
  if (scn == nullptr || out == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto prepared = bform::prepare(scn->config);
    auto* run = new bf_run{scn->config, bform::run(prepared)};
    *out = run;
    const auto& failure = run->result.summary.failure;
    if (failure) return fail(status_for(failure->code), failure->message);
    return BF_OK;
  });
}

int bf_run_completed(const bf_run* run) {
  return run != nullptr && run->result.summary.completed ? 1 : 0;
}

size_t bf_run_row_count(const bf_run* run) {
  return run == nullptr ? 0 : run->result.log.rows.size();
}

int bf_run_agent_count(const bf_run* run) { return run == nullptr ? 0 : run->result.log.agents; }

bf_status bf_run_row(const bf_run* run, size_t row, double* t, double* xy, size_t xy_capacity) {
  if (run == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  const auto& rows = run->result.log.rows;
  if (row >= rows.size()) return fail(BF_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& r = rows[row];
  if (t != nullptr) *t = r.t;
  if (xy != nullptr) {
    if (xy_capacity < 2 * r.positions.size()) {
      return fail(BF_ERR_INVALID_ARGUMENT, "position buffer too small");
    }
    for (std::size_t a = 0; a < r.positions.size(); ++a) {
      xy[2 * a] = r.positions[a].x;
      xy[2 * a + 1] = r.positions[a].y;
    }
  }
  return BF_OK;
}

bf_status bf_run_summary_json(const bf_run* run, char** out) {
  if (run == nullptr || out == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = duplicate(bform::summary_to_json(run->result.summary, run->config).dump(2));
    return BF_OK;
  });
}

bf_status bf_run_write_outputs(const bf_run* run, const char* dir) {
  if (run == nullptr || dir == nullptr) return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    bform::write_outputs(run->result, run->config, dir);
    return BF_OK;
  });
}

void bf_run_destroy(bf_run* run) { delete run; }

bf_status bf_verify(uint64_t seed, size_t samples, char** report_json, int* all_pass) {
  if (report_json == nullptr || all_pass == nullptr) {
    return fail(BF_ERR_INVALID_ARGUMENT, "null argument");
  }
  *report_json = nullptr;
  *all_pass = 0;
  return guarded([&] {
    const auto rows = bform::run_verify_suite(seed, samples);
    nlohmann::json report = nlohmann::json::array();
    bool ok = true;
    for (const auto& r : rows) {
      ok = ok && r.pass;
      report.push_back({{"name", r.name},
                        {"pass", r.pass},
                        {"worst", r.worst},
                        {"threshold", r.threshold},
                        {"count", r.count},
                        {"seconds", r.seconds},
                        {"detail", r.detail}});
    }
    *all_pass = ok ? 1 : 0;
    *report_json = duplicate(report.dump(2));
    return BF_OK;
  });
}

}  // extern "C"
