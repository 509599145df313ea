/* C interface to the bipolar formation simulator. */
#ifndef BIPOLAR_FORMATION_H
#define BIPOLAR_FORMATION_H

#include <stddef.h>
#include <stdint.h>

#if defined(BF_BUILDING_LIBRARY)
#define BF_API __attribute__((visibility("default")))
#else
#define BF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bf_scenario bf_scenario;
typedef struct bf_run bf_run;

typedef enum bf_status {
  BF_OK = 0,
  BF_ERR_INVALID_ARGUMENT = 1,
  BF_ERR_IO = 2,
  BF_ERR_PARSE = 3,
  BF_ERR_VALIDATION = 4,
  BF_ERR_INFEASIBLE = 5,
  BF_ERR_OUT_OF_BOUNDS = 6,
  BF_ERR_COLLOCATED = 7,
  BF_ERR_GEOMETRY = 8,
  BF_ERR_INTERNAL = 9
} bf_status;

/* Message for the last failing call on this thread; never NULL. */
BF_API const char* bf_last_error(void);
BF_API const char* bf_status_name(bf_status status);
BF_API const char* bf_version(void);

/* Strings returned through char** are owned by the caller. */
BF_API void bf_string_free(char* s);

BF_API bf_status bf_scenario_load_file(const char* path, bf_scenario** out);
BF_API bf_status bf_scenario_load_json(const char* json_text, bf_scenario** out);
/* Presets: sec4_maneuver, two_agents_static, random_henneberg (uses n, seed). */
BF_API bf_status bf_scenario_scaffold(const char* preset, int n, uint64_t seed,
                                      bf_scenario** out);
/* "key.path=value"; value is JSON or a bare string. */
BF_API bf_status bf_scenario_set(bf_scenario* scn, const char* assignment);
/* Graph, desired shape and initial containment. */
BF_API bf_status bf_scenario_validate(const bf_scenario* scn);
BF_API bf_status bf_scenario_to_json(const bf_scenario* scn, char** out);
BF_API bf_status bf_scenario_save(const bf_scenario* scn, const char* path);
BF_API void bf_scenario_destroy(bf_scenario* scn);

/* Runs the scenario. When the run aborts early, *out still receives the
   partial run and the status names the cause. */
BF_API bf_status bf_run_execute(const bf_scenario* scn, bf_run** out);
BF_API int bf_run_completed(const bf_run* run);
BF_API size_t bf_run_row_count(const bf_run* run);
BF_API int bf_run_agent_count(const bf_run* run);
/* Copies t and the 2n coordinates of one logged row. */
BF_API bf_status bf_run_row(const bf_run* run, size_t row, double* t, double* xy,
                            size_t xy_capacity);
BF_API bf_status bf_run_summary_json(const bf_run* run, char** out);
BF_API bf_status bf_run_write_outputs(const bf_run* run, const char* dir);
BF_API void bf_run_destroy(bf_run* run);

/* Oracle suite; *all_pass is 1 when every check passes. */
BF_API bf_status bf_verify(uint64_t seed, size_t samples, char** report_json, int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* BIPOLAR_FORMATION_H */
