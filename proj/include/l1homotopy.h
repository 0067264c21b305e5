#ifndef L1HOMOTOPY_H
#define L1HOMOTOPY_H

/* C interface to the l1 homotopy solvers.
 *
 * Every fallible call returns an l1h_status. On failure a message describing
 * the problem is kept per thread and can be read with l1h_last_error() until
 * the next failing call on the same thread. Handles are opaque; each has a
 * matching _free function that accepts NULL. Matrices are passed row-major.
 * Vectors are matrices with one row or one column. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define L1H_API __declspec(dllexport)
#else
#define L1H_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum l1h_status {
  L1H_OK = 0,
  L1H_ERR_CONFIG = 1,
  L1H_ERR_IO = 2,
  L1H_ERR_INVALID_ARGUMENT = 3,
  L1H_ERR_NOT_POSITIVE_DEFINITE = 4,
  L1H_ERR_DEGENERATE_SUPPORT = 5,
  L1H_ERR_ITERATION_LIMIT = 6,
  L1H_ERR_SINGULAR_CROSS_GRAM = 7,
  L1H_ERR_STALE_WARM_START = 8,
  L1H_ERR_NONMONOTONE_EPSILON = 9,
  L1H_ERR_SINGULAR_BOOTSTRAP = 10,
  L1H_ERR_SINGULAR_SUBMATRIX = 11,
  L1H_ERR_SINGULAR_GRAM = 12,
  L1H_ERR_RANK_DEFICIENT = 13,
  L1H_ERR_BAD_LENGTH = 14,
  L1H_ERR_CONSTRAINT_ALREADY_VIOLATED = 15,
  L1H_ERR_NO_CERTIFIED_SOLUTION = 16,
  L1H_ERR_INTERNAL = 100
} l1h_status;

L1H_API const char* l1h_status_name(l1h_status status);
L1H_API const char* l1h_last_error(void);
L1H_API const char* l1h_version(void);
/* Releases strings returned through char** out parameters. */
L1H_API void l1h_string_free(char* s);

/* ---- dense matrices ---- */

typedef struct l1h_matrix l1h_matrix;

/* data may be NULL for a zero matrix. */
L1H_API l1h_status l1h_matrix_new(size_t rows, size_t cols, const double* data, l1h_matrix** out);
/* CSV or the binary layout, detected by content. */
L1H_API l1h_status l1h_matrix_read(const char* path, l1h_matrix** out);
/* Written through a temporary file and renamed into place. */
L1H_API l1h_status l1h_matrix_write(const l1h_matrix* m, const char* path, int binary);
L1H_API size_t l1h_matrix_rows(const l1h_matrix* m);
L1H_API size_t l1h_matrix_cols(const l1h_matrix* m);
/* Copies rows*cols values, row-major. */
L1H_API l1h_status l1h_matrix_copy(const l1h_matrix* m, double* out);
L1H_API void l1h_matrix_free(l1h_matrix* m);

/* ---- solver sessions ---- */

typedef enum l1h_program { L1H_BPDN = 0, L1H_DANTZIG = 1 } l1h_program;

typedef struct l1h_session l1h_session;

typedef struct l1h_run_stats {
  long steps;          /* homotopy steps of the last solve or update */
  double products;     /* applications of A^T A, A or A^T alone count 1/2 */
  size_t support;      /* current support size */
  double tau;
  int kkt_pass;        /* optimality certificate of the current solution */
} l1h_run_stats;

/* tau = tau_ratio * ||A^T y||_inf */
L1H_API l1h_status l1h_solve(l1h_program program, const l1h_matrix* a, const l1h_matrix* y, double tau_ratio,
                             l1h_session** out);
L1H_API l1h_status l1h_solve_tau(l1h_program program, const l1h_matrix* a, const l1h_matrix* y, double tau,
                                 l1h_session** out);
/* Moves the solution to a new right-hand side for the same matrix. */
L1H_API l1h_status l1h_session_update_signal(l1h_session* s, const l1h_matrix* y_new);
/* Appends rows b with values w. */
L1H_API l1h_status l1h_session_add_rows(l1h_session* s, const l1h_matrix* b, const l1h_matrix* w);
/* BPDN only. */
L1H_API l1h_status l1h_session_remove_row(l1h_session* s, size_t row);
/* Solution x as an n x 1 matrix; for the Dantzig selector the dual is
 * available through l1h_session_dual. */
L1H_API l1h_status l1h_session_solution(const l1h_session* s, l1h_matrix** x_out);
L1H_API l1h_status l1h_session_dual(const l1h_session* s, l1h_matrix** lambda_out);
L1H_API l1h_status l1h_session_stats(const l1h_session* s, l1h_run_stats* out);
L1H_API l1h_status l1h_session_save(const l1h_session* s, const char* path);
/* Fails with L1H_ERR_STALE_WARM_START if the stored solution does not
 * certify against the stored data. */
L1H_API l1h_status l1h_session_load(const char* path, l1h_session** out);
L1H_API void l1h_session_free(l1h_session* s);

/* ---- encode / corrupt / decode pipeline ---- */

typedef struct l1h_decode_config {
  int robust;       /* 0: exact l1 decoding, 1: robust decoding with tau */
  size_t n, m;
  size_t errors;    /* zeroed codeword entries */
  size_t block;     /* rows appended after the initial decode */
  double noise;
  double tau;
  uint64_t seed;
} l1h_decode_config;

typedef struct l1h_decode_result {
  double max_error;
  int recovered;
  int kkt_pass;
  int lucky_breakdown;
  long init_steps, add_steps;
  double init_products, add_products;
  size_t error_support;
} l1h_decode_result;

L1H_API void l1h_decode_config_init(l1h_decode_config* cfg);
L1H_API l1h_status l1h_decode_run(const l1h_decode_config* cfg, l1h_decode_result* out);

/* ---- experiments ---- */

typedef struct l1h_report l1h_report;

typedef struct l1h_experiment_config {
  const char* kind;    /* dynamic-x-bpdn, dynamic-x-ds, dynamic-seq-bpdn, dynamic-seq-ds, decode, robust-decode */
  const char* signal;  /* spikes, blocks, pcwpoly, slices */
  const char* image;   /* PGM path for slices, NULL for the synthetic image */
  size_t n, m, k, p;
  double lambda, tau, sigma, corruption;
  long trials;
  uint64_t seed;
  long jobs;
  int timing;
} l1h_experiment_config;

typedef struct l1h_experiment_summary {
  long trials;
  long flagged;
  size_t n, m, k, p;
  double lambda;
  double warm_products, cold_products;        /* means */
  double warm_products_sd, cold_products_sd;
  double warm_steps, cold_steps;              /* means */
  double final_error;                         /* mean */
} l1h_experiment_summary;

L1H_API void l1h_experiment_config_init(l1h_experiment_config* cfg);
L1H_API l1h_status l1h_bench_run(const l1h_experiment_config* cfg, l1h_report** out);
/* table: tableI, tableII or tableIII; scale: full or desk; trials <= 0
 * keeps the preset count. */
L1H_API l1h_status l1h_bench_table(const char* table, const char* scale, long trials, uint64_t seed, long jobs,
                                   int timing, l1h_report** out);
L1H_API int l1h_report_ok(const l1h_report* r);
L1H_API size_t l1h_report_size(const l1h_report* r);
L1H_API l1h_status l1h_report_summary(const l1h_report* r, size_t index, l1h_experiment_summary* out);
L1H_API l1h_status l1h_report_json(const l1h_report* r, char** out);
L1H_API l1h_status l1h_report_csv(const l1h_report* r, char** out);
L1H_API void l1h_report_free(l1h_report* r);

/* ---- self test ---- */

typedef struct l1h_selftest_counts {
  long bpdn, ds, decode, kkt;
} l1h_selftest_counts;

/* counts may be NULL for the defaults. *passed is 1 when every suite is
 * clean; summary (optional) receives a JSON description. */
L1H_API l1h_status l1h_selftest(const l1h_selftest_counts* counts, uint64_t seed, int* passed, char** summary);

/* ---- utilities ---- */

/* Decimal or 0x-prefixed hexadecimal 64-bit seed. */
L1H_API l1h_status l1h_parse_seed(const char* text, uint64_t* out);

/* Atomic write of a byte string (temporary file, then rename). */
L1H_API l1h_status l1h_write_file(const char* path, const char* bytes, size_t size);

#ifdef __cplusplus
}
#endif

#endif /* L1HOMOTOPY_H */
