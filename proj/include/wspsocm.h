/* SPDX-License-Identifier: Apache-2.0 */
#ifndef WSPSOCM_H
#define WSPSOCM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/*
 * C interface to the trajectory/communication optimizer. All objects are
 * opaque handles; every fallible call returns a status code and, on failure,
 * leaves a message readable through wspsocm_last_error() (thread-local).
 * Strings returned through char** out-parameters are heap copies the caller
 * releases with wspsocm_string_free().
 */

typedef enum wspsocm_status {
    WSPSOCM_OK = 0,
    WSPSOCM_ERR_VALIDATION = 1, /* bad arguments, config, or input file      */
    WSPSOCM_ERR_RUNTIME = 2,    /* optimizer, advisor, or I/O failure        */
    WSPSOCM_ERR_PROTOCOL = 3    /* transport or JSON-RPC failure             */
} wspsocm_status;

typedef struct wspsocm_scenario wspsocm_scenario;
typedef struct wspsocm_radio_map wspsocm_radio_map;
typedef struct wspsocm_result wspsocm_result;

/* Library version, static storage. */
const char* wspsocm_version(void);

/* Message of the calling thread's most recent failure; "" when none. */
const char* wspsocm_last_error(void);

void wspsocm_string_free(char* text);

/* ---- scenario ---------------------------------------------------------- */

wspsocm_status wspsocm_scenario_load(const char* path, wspsocm_scenario** out);
wspsocm_status wspsocm_scenario_parse(const char* text, wspsocm_scenario** out);
wspsocm_status wspsocm_scenario_to_text(const wspsocm_scenario* scenario,
                                        char** out_text);
wspsocm_status wspsocm_scenario_summary_json(const wspsocm_scenario* scenario,
                                             char** out_json);
void wspsocm_scenario_free(wspsocm_scenario* scenario);

/* ---- radio map --------------------------------------------------------- */

wspsocm_status wspsocm_radio_map_synthesize(const wspsocm_scenario* scenario,
                                            uint64_t seed,
                                            wspsocm_radio_map** out);
wspsocm_status wspsocm_radio_map_load(const char* path, wspsocm_radio_map** out);

/* Writes the binary snapshot format; forces full materialization. */
wspsocm_status wspsocm_radio_map_save(const wspsocm_radio_map* map,
                                      const char* path);
void wspsocm_radio_map_free(wspsocm_radio_map* map);

/* ---- optimizer --------------------------------------------------------- */

typedef struct wspsocm_hyper {
    int32_t p_num; /* particles, >= 2 */
    double omega;  /* inertia */
    double c1;     /* own-best pull */
    double c2;     /* swarm-best pull */
    double k1;     /* rate reward weight */
    double k2;     /* speed penalty weight */
    double k3;     /* turn penalty weight */
    double k4;     /* altitude penalty weight */
} wspsocm_hyper;

wspsocm_hyper wspsocm_hyper_baseline1(void);
wspsocm_hyper wspsocm_hyper_baseline2(void);

/* Runs the full optimizer. Identical inputs give identical results. */
wspsocm_status wspsocm_optimize(const wspsocm_scenario* scenario,
                                const wspsocm_radio_map* map,
                                const wspsocm_hyper* hyper, int32_t p_iter,
                                uint64_t seed, wspsocm_result** out);

double wspsocm_result_min_sum_rate(const wspsocm_result* result);
double wspsocm_result_fitness(const wspsocm_result* result);
int64_t wspsocm_result_evaluations(const wspsocm_result* result);

/* Best-so-far fitness trace, one entry per iteration plus the initial one. */
size_t wspsocm_result_history_len(const wspsocm_result* result);
double wspsocm_result_history_at(const wspsocm_result* result, size_t index);

/* Deterministic run record (JSON, no timing fields). */
wspsocm_status wspsocm_result_record_json(const wspsocm_result* result,
                                          char** out_json);

/* Plain table of the best trajectory: m t x y z ugv rate. */
wspsocm_status wspsocm_result_trajectory_table(const wspsocm_result* result,
                                               char** out_text);
void wspsocm_result_free(wspsocm_result* result);

/* ---- tool server ------------------------------------------------------- */

typedef struct wspsocm_server_config {
    const char* log_path;       /* NULL or "": no run log */
    int32_t rate_limit_per_min; /* 0 disables the limiter */
} wspsocm_server_config;

/* Serves line-delimited JSON-RPC on stdin/stdout until EOF. */
wspsocm_status wspsocm_serve_stdio(const wspsocm_scenario* scenario,
                                   const wspsocm_radio_map* map,
                                   const wspsocm_server_config* config);

/* Binds host:port and serves one client at a time, forever. */
wspsocm_status wspsocm_serve_tcp(const wspsocm_scenario* scenario,
                                 const wspsocm_radio_map* map,
                                 const wspsocm_server_config* config,
                                 const char* host, int32_t port);

/* ---- tuning ------------------------------------------------------------ */

typedef struct wspsocm_tune_config {
    const char* advisor;   /* "heuristic" | "random" | "hillclimb" | "llm" */
    const char* replay_dir; /* llm only: canned replies; NULL means live HTTP */
    const char* base_url;   /* llm HTTP endpoint, scheme://host[:port] */
    const char* model;
    const char* api_key_env; /* name of the env var holding the key */
    int32_t max_iters;       /* >= 1 */
    int32_t patience;        /* >= 1 */
    int32_t p_iter;
    uint64_t seed;         /* optimizer seed shared by every iteration */
    uint64_t advisor_seed; /* random/hillclimb draws */
} wspsocm_tune_config;

/*
 * Runs the tuning loop against an in-process tool server and returns the
 * session report, one JSON line per iteration plus a summary line.
 */
wspsocm_status wspsocm_tune(const wspsocm_scenario* scenario,
                            const wspsocm_radio_map* map,
                            const wspsocm_tune_config* config,
                            char** out_report_jsonl);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WSPSOCM_H */
