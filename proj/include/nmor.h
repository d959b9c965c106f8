/* Public C interface of the NMOR magnetometer simulator.
 *
 * Usage: create an experiment, point it at a config (and/or override single
 * keys), run one command, then read the result tables or write artifacts.
 * Every call returns an NMOR_* status; nmor_last_error() holds the message
 * for the most recent failure on that handle. Handles are not thread-safe;
 * distinct handles are independent.
 */
#ifndef NMOR_H
#define NMOR_H

#include <stddef.h>
#include <stdint.h>

/* The library is built with hidden visibility; only NMOR_API names are part
 * of the ABI. */
#if defined(_WIN32)
#define NMOR_API __declspec(dllexport)
#elif defined(__GNUC__)
#define NMOR_API __attribute__((visibility("default")))
#else
#define NMOR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct nmor_experiment nmor_experiment;

enum {
    NMOR_OK = 0,
    NMOR_EINVAL = 1,   /* bad handle / null argument / index out of range */
    NMOR_ECONFIG = 2,  /* unreadable, unparsable or out-of-range configuration */
    NMOR_ERUNTIME = 3, /* physics or numerics failure while running */
    NMOR_EIO = 4       /* filesystem trouble writing artifacts */
};

NMOR_API const char* nmor_version(void);

NMOR_API nmor_experiment* nmor_create(void);
NMOR_API void nmor_destroy(nmor_experiment* exp);

/* Message from the most recent failing call; empty string if none. Owned by
 * the handle, valid until the next call on it. */
NMOR_API const char* nmor_last_error(const nmor_experiment* exp);

/* Replace the configuration with defaults + the file at `path`. */
NMOR_API int nmor_load_config(nmor_experiment* exp, const char* path);
/* Set one "section.key" (e.g. "noise.cmrr_db") to a raw text value. */
NMOR_API int nmor_set(nmor_experiment* exp, const char* dotted_key, const char* value);
/* Full validation; writes a report ("ok\n" or one violation per line) into
 * `report` (truncated to `cap` bytes, always NUL-terminated; may be NULL). */
NMOR_API int nmor_validate(const nmor_experiment* exp, char* report, size_t cap);
NMOR_API uint64_t nmor_config_hash(const nmor_experiment* exp);

/* Run "b-sweep", "density-sweep", "spectrum" or "sensitivity"; the result
 * tables stay on the handle until the next run. */
NMOR_API int nmor_run(nmor_experiment* exp, const char* command);

NMOR_API int nmor_table_count(const nmor_experiment* exp);
NMOR_API const char* nmor_table_name(const nmor_experiment* exp, int table);
NMOR_API int nmor_table_rows(const nmor_experiment* exp, int table);
NMOR_API int nmor_table_cols(const nmor_experiment* exp, int table);
NMOR_API const char* nmor_table_column(const nmor_experiment* exp, int table, int col);
/* NaN on any out-of-range index. */
NMOR_API double nmor_table_value(const nmor_experiment* exp, int table, int row, int col);

/* Write the last run's artifacts in the configured formats. `dir` NULL or
 * empty uses the config / $NMOR_OUT_DIR default. */
NMOR_API int nmor_write_outputs(nmor_experiment* exp, const char* dir);
/* The directory nmor_write_outputs falls back to. Owned by the handle. */
NMOR_API const char* nmor_out_dir(const nmor_experiment* exp);

#ifdef __cplusplus
}
#endif

#endif /* NMOR_H */
