/*
 * Copyright (c) 2026 The negres Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NEGRES_H
#define NEGRES_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NEGRES_BUILDING)
#    define NEGRES_API __declspec(dllexport)
#  else
#    define NEGRES_API __declspec(dllimport)
#  endif
#else
#  define NEGRES_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values 1..10 mirror the engine's error kinds. */
typedef enum negres_status {
    NEGRES_OK = 0,
    NEGRES_GAP_OR_OVERLAP = 1,
    NEGRES_ASSUMPTION_VIOLATED = 2,
    NEGRES_OUT_OF_RANGE = 3,
    NEGRES_PRECONDITION_VIOLATED = 4,
    NEGRES_STEP_FAILURE = 5,
    NEGRES_TRADE_OUTSIDE_HORIZON = 6,
    NEGRES_DEGENERATE_Y = 7,
    NEGRES_PARSE_ERROR = 8,
    NEGRES_INVALID_ARGUMENT = 9,
    NEGRES_IO_ERROR = 10,
    NEGRES_NULL_ARGUMENT = 100,
    NEGRES_BUFFER_TOO_SMALL = 101,
    NEGRES_INTERNAL = 102
} negres_status;

typedef struct negres_scenario negres_scenario;
typedef struct negres_solution negres_solution;

NEGRES_API const char* negres_version(void);
NEGRES_API const char* negres_status_string(negres_status status);
/* Message of the most recent failure on the calling thread; "" if none. */
NEGRES_API const char* negres_last_error(void);

/* Scenarios. The handle owns a resolved, validated model. */
NEGRES_API negres_status negres_scenario_load_file(const char* path, negres_scenario** out);
NEGRES_API negres_status negres_scenario_load_text(const char* yaml, negres_scenario** out);
NEGRES_API negres_status negres_scenario_load_registered(const char* id, negres_scenario** out);
NEGRES_API void negres_scenario_free(negres_scenario* scenario);

/* Replaces the run block and re-resolves the model. grid <= 0 or paths == 0
 * keep the current value; the seed is always replaced. */
NEGRES_API negres_status negres_scenario_set_run(negres_scenario* scenario, double grid, uint64_t paths,
                                                 uint64_t seed);

typedef struct negres_scenario_info {
    double horizon;
    double grid;
    uint64_t paths;
    uint64_t seed;
    /* Deterministic schedules only; 0 for regime chains. */
    double eps_bar;
    double c_bar;
    size_t n_segments;
    size_t n_states;
    double kappa;
    int has_kappa;
    int is_chain;
    int deterministic;
} negres_scenario_info;

NEGRES_API negres_status negres_scenario_get_info(const negres_scenario* scenario, negres_scenario_info* out);

/* Copies a NUL-terminated string. With buf == NULL or a short buffer the
 * required size (including the terminator) is stored in *needed and
 * NEGRES_BUFFER_TOO_SMALL is returned (NEGRES_OK when buf is NULL). */
NEGRES_API negres_status negres_scenario_id(const negres_scenario* scenario, char* buf, size_t capacity,
                                            size_t* needed);
NEGRES_API negres_status negres_scenario_emit(const negres_scenario* scenario, char* buf, size_t capacity,
                                              size_t* needed);

/* Y and β on the scenario grid. Deterministic schedules only. */
NEGRES_API negres_status negres_solve(const negres_scenario* scenario, negres_solution** out);
NEGRES_API void negres_solution_free(negres_solution* solution);
NEGRES_API size_t negres_solution_size(const negres_solution* solution);

typedef enum negres_series {
    NEGRES_SERIES_TIME = 0,
    NEGRES_SERIES_Y = 1,
    NEGRES_SERIES_Y_LEFT = 2,
    NEGRES_SERIES_BETA = 3,
    NEGRES_SERIES_BETA_LEFT = 4,
    NEGRES_SERIES_RHO = 5,
    NEGRES_SERIES_RHO_LEFT = 6
} negres_series;

/* Same sizing protocol as negres_scenario_id, counted in doubles. */
NEGRES_API negres_status negres_solution_series(const negres_solution* solution, negres_series series, double* buf,
                                                size_t capacity, size_t* needed);

NEGRES_API negres_status negres_closed_form_y(const negres_scenario* scenario, double t, double* out);

typedef struct negres_effects {
    int overjump;
    int premature;
    size_t n_witnesses;
    /* NaN when there is no witness. */
    double first_witness_time;
    /* 0 none, 1 no overjump, 2 no effects. */
    int positive_guarantee;
    /* 0 none, 3 forced effect. */
    int negative_trigger;
} negres_effects;

NEGRES_API negres_status negres_classify_effects(const negres_scenario* scenario, const negres_solution* solution,
                                                 negres_effects* out);

typedef enum negres_strategy {
    NEGRES_STRATEGY_OPTIMAL = 0,
    NEGRES_STRATEGY_BLOCK_AT_START = 1,
    NEGRES_STRATEGY_BLOCK_AT_END = 2,
    NEGRES_STRATEGY_TWAP = 3,
    NEGRES_STRATEGY_TWO_BLOCKS = 4
} negres_strategy;

typedef struct negres_cost {
    double mean;
    double std_error;
    double deviation;
    double quadratic;
    size_t n_paths;
} negres_cost;

/* Uses the scenario's run block (grid, paths, seed). threads == 0 selects
 * the hardware concurrency; the result does not depend on it. */
NEGRES_API negres_status negres_expected_cost(const negres_scenario* scenario, negres_strategy strategy,
                                              unsigned threads, negres_cost* out);

typedef struct negres_run_options {
    /* <= 0: use the scenario's value. */
    double grid;
    /* 0: use the scenario's value. */
    uint64_t paths;
    uint64_t seed;
    int has_seed;
    /* NULL: environment variable, scenario outputs block, then default. */
    const char* out_dir;
    unsigned threads;
} negres_run_options;

/* Runs a CLI command, printing to stdout/stderr. `options` may be NULL.
 * *exit_code receives the process exit status the CLI should return. */
NEGRES_API negres_status negres_run_command(const char* command, const char* scenario_ref,
                                            const negres_run_options* options, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* NEGRES_H */
