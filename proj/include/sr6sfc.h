/*
 * sr6sfc -- userspace SRv6 service-function-chaining dataplane.
 *
 * C API of the shared library. All objects are opaque handles; functions
 * return sr6sfc_status codes and leave a detailed message retrievable with
 * sr6sfc_last_error() (thread-local).
 */

#ifndef SR6SFC_H
#define SR6SFC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sr6sfc_status {
    SR6SFC_OK = 0,
    SR6SFC_ERR_INVALID_ARG = 1,
    SR6SFC_ERR_PARSE = 2,
    SR6SFC_ERR_CONFIG = 3,
    SR6SFC_ERR_STATE = 4,
    SR6SFC_ERR_IO = 5,
    SR6SFC_ERR_ASSERTION = 6,
} sr6sfc_status;

const char* sr6sfc_version(void);
const char* sr6sfc_status_str(sr6sfc_status st);

/* Thread-local message describing the most recent failure. */
const char* sr6sfc_last_error(void);

/* Strings returned by the library are released with this. */
void sr6sfc_string_free(char* s);

/* ------------------------------------------------------------------------ */
/* Nodes                                                                    */

typedef struct sr6sfc_node sr6sfc_node;

/* mode: "baseline", "policy", "extrule" or "preroute". */
sr6sfc_node* sr6sfc_node_create(const char* name, const char* mode);
void sr6sfc_node_destroy(sr6sfc_node* node);

sr6sfc_status sr6sfc_node_add_interface(sr6sfc_node* node, const char* name);

/* Applies one iproute2-style command line (see README for the grammar). */
sr6sfc_status sr6sfc_node_config_line(sr6sfc_node* node, const char* line);
/* Applies a whole script; stops at the first failing line. */
sr6sfc_status sr6sfc_node_config(sr6sfc_node* node, const char* script);

/* State dump; section is "all", "routes", "rules", "bindings", "cache" or
 * "counters". Returns a malloc'd string (sr6sfc_string_free). */
char* sr6sfc_node_show(const sr6sfc_node* node, const char* section);

/* Flat counters snapshot as "key value\n" lines. */
char* sr6sfc_node_counters(const sr6sfc_node* node);

/* Runs one frame through the node (including its VNF stubs, if any). The
 * callback receives each emitted frame; it may be NULL to just count. */
typedef void (*sr6sfc_emit_cb)(const char* oif, const uint8_t* frame, size_t len, void* user);
sr6sfc_status sr6sfc_node_process(sr6sfc_node* node, const char* iif, const uint8_t* frame,
                                  size_t len, sr6sfc_emit_cb cb, void* user);

/* ------------------------------------------------------------------------ */
/* Scenarios                                                                */

/* Runs a scenario file end to end. csv_override (optional) replaces the csv
 * path named in the file. report_out (optional) receives a malloc'd text
 * report. Returns SR6SFC_ERR_ASSERTION when an embedded assertion fails. */
sr6sfc_status sr6sfc_scenario_run(const char* path, const char* csv_override, char** report_out);

/* ------------------------------------------------------------------------ */
/* Benchmarks                                                               */

typedef struct sr6sfc_bench_opts {
    const char* mode;       /* "baseline", "policy", "extrule", "preroute" */
    int rules;              /* VNF / rule count of the topology */
    double age;             /* dynamic proxy age, seconds */
    double ps;              /* >0: run a single trial at this rate (cost engine) */
    double duration;        /* trial duration, simulated seconds */
    int reps;               /* wallclock repetitions */
    const char* threshold;  /* loss threshold, e.g. "0.005" */
    double precision;       /* PDR search precision, pps */
    const char* engine;     /* "cost" or "wallclock" */
    const char* cost_model; /* path to a cost model file (key value lines) */
    const char* sweep;      /* optional sweep variable: rule_count|mode|age */
    const char* values;     /* comma-separated sweep values */
    const char* csv;        /* optional CSV output path */
    size_t packets;         /* wallclock batch size */
} sr6sfc_bench_opts;

void sr6sfc_bench_opts_init(sr6sfc_bench_opts* opts);
sr6sfc_status sr6sfc_bench_run(const sr6sfc_bench_opts* opts, char** report_out);

#ifdef __cplusplus
}
#endif

#endif /* SR6SFC_H */
