/*
 * C API for the ibfsi immersed-boundary fluid-structure interaction library.
 *
 * All functions return ibfsi_status; IBFSI_OK is zero. On failure a
 * thread-local message is available from ibfsi_last_error(). Objects are
 * opaque handles owned by the library; free them with the matching _free
 * call. Handles are not thread-safe; use one per thread.
 */
#ifndef IBFSI_H
#define IBFSI_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ibfsi_status {
    IBFSI_OK = 0,
    IBFSI_ERR_INVALID_ARGUMENT = 1,
    IBFSI_ERR_CONFIG = 2,
    IBFSI_ERR_STENCIL_OVERFLOW = 3,
    IBFSI_ERR_SOLVER_FAILURE = 4,
    IBFSI_ERR_INVERTED_ELEMENT = 5,
    IBFSI_ERR_MESH = 6,
    IBFSI_ERR_IO = 7,
    IBFSI_ERR_INTERNAL = 8
} ibfsi_status;

const char* ibfsi_status_name(ibfsi_status status);
const char* ibfsi_last_error(void);
const char* ibfsi_version(void);

/* ------------------------------------------------------------------ */
/* 1D kernel evaluation (names: IB3..IB6, BS1..BS6)                    */
/* ------------------------------------------------------------------ */

ibfsi_status ibfsi_kernel_eval(const char* kernel, double r, double* value);
ibfsi_status ibfsi_kernel_eval_deriv(const char* kernel, double r, double* value);
ibfsi_status ibfsi_kernel_points(const char* kernel, int* points);

/* Writes up to `cap` supported 2D kernel selection strings (IB*, BS*,
 * CBS*) into names[] (caller-owned char buffers of size >= 8); returns the
 * total count through *count. */
ibfsi_status ibfsi_kernel_names(char names[][8], int cap, int* count);

/* ------------------------------------------------------------------ */
/* Benchmark configuration and runs                                    */
/* ------------------------------------------------------------------ */

typedef struct ibfsi_config ibfsi_config;
typedef struct ibfsi_result ibfsi_result;

ibfsi_status ibfsi_config_load(const char* path, ibfsi_config** out);
ibfsi_status ibfsi_config_from_text(const char* json_text, ibfsi_config** out);
/* keys: "kernel", "out" */
ibfsi_status ibfsi_config_set_string(ibfsi_config* cfg, const char* key, const char* value);
/* keys: "mfac", "n", "final_time", "dt", "load_time", "output_every" */
ibfsi_status ibfsi_config_set_number(ibfsi_config* cfg, const char* key, double value);
void ibfsi_config_free(ibfsi_config* cfg);

/* Executes the benchmark; failures of the simulation itself (recorded
 * instabilities) still return IBFSI_OK with the outcome in the result. */
ibfsi_status ibfsi_run(const ibfsi_config* cfg, ibfsi_result** out);

int ibfsi_result_rows(const ibfsi_result* res);
int ibfsi_result_cols(const ibfsi_result* res);
const char* ibfsi_result_column_name(const ibfsi_result* res, int col);
double ibfsi_result_value(const ibfsi_result* res, int row, int col);
/* 1 when the run recorded an instability; the reason string is owned by the
 * result. */
int ibfsi_result_failed(const ibfsi_result* res);
const char* ibfsi_result_failure_reason(const ibfsi_result* res);
ibfsi_status ibfsi_result_write_csv(const ibfsi_result* res, const char* path);
void ibfsi_result_free(ibfsi_result* res);

/* ------------------------------------------------------------------ */
/* Kernel/coupling property suite                                      */
/* ------------------------------------------------------------------ */

/* Runs the full property suite; prints one line per property to stdout when
 * verbose is nonzero. *failures receives the number of failed properties. */
ibfsi_status ibfsi_props_run(int verbose, int* failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IBFSI_H */
