/* C API for the hybridlab shared library.
 *
 * All functions return hl_status; on failure hl_last_error() carries a
 * human-readable message (thread-local).  Handles are opaque and freed with
 * the matching _free function.
 */
#ifndef HYBRIDLAB_H
#define HYBRIDLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hl_status {
    HL_OK = 0,
    HL_ERR_CONFIG = 2,   /* parse or validation failure */
    HL_ERR_NUMERICS = 3, /* stability or other numerical failure */
    HL_ERR_INVALID = 4,  /* bad handle or argument */
    HL_ERR_IO = 5        /* filesystem failure */
} hl_status;

typedef struct hl_config hl_config;
typedef struct hl_report hl_report;

const char* hl_version(void);
const char* hl_last_error(void);

hl_status hl_config_parse_file(const char* path, hl_config** out);
hl_status hl_config_parse_string(const char* text, hl_config** out);
/* Dotted-key override, e.g. hl_config_set(cfg, "numerics.dt", "1e-3"). */
hl_status hl_config_set(hl_config* cfg, const char* key, const char* value);
/* Normalized config text; caller must free() the returned string. */
hl_status hl_config_serialize(const hl_config* cfg, char** out);
void hl_config_free(hl_config* cfg);

hl_status hl_scenario_run(const hl_config* cfg, hl_report** out);
/* Space-separated verdict tags, e.g.
 * "seven_rejected_dynamics eight_rejected_positivity nine_accepted". */
const char* hl_report_verdict(const hl_report* report);
hl_status hl_report_write_csv(const hl_report* report, const char* path);
hl_status hl_report_write_json(const hl_report* report, const char* path);
hl_status hl_report_write_plotdata(const hl_report* report, const char* dir);

/* Sample accessors; candidate is "seven", "eight" or "nine"; field is one of
 * "t", "residual", "purity_defect", "min_eigenvalue", "entropy",
 * "prob_outcome_<k>" (1-based k). */
hl_status hl_report_num_samples(const hl_report* report, size_t* out);
hl_status hl_report_value(const hl_report* report, const char* candidate,
                          size_t sample, const char* field, double* out);
void hl_report_free(hl_report* report);

/* Full command entry point mirroring the CLI: command is one of "scenario",
 * "evolve-classical", "evolve-quantum", "evolve-hybrid", "diagnose"; writes
 * outputs under out_dir. */
hl_status hl_execute(const hl_config* cfg, const char* command,
                     const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* HYBRIDLAB_H */
