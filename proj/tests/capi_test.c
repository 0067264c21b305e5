/* Exercises the C interface from C. */
#include "l1homotopy.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

#define OK(call) EXPECT((call) == L1H_OK)

/* Small deterministic pseudo-random fill, independent of the library. */
static double lcg(unsigned long long* s) {
  *s = *s * 6364136223846793005ULL + 1442695040888963407ULL;
  return ((double)(*s >> 11) / 9007199254740992.0) - 0.5;
}

static void test_errors(void) {
  l1h_matrix* m = NULL;
  EXPECT(l1h_matrix_read("/nonexistent/l1h.csv", &m) == L1H_ERR_IO);
  EXPECT(strlen(l1h_last_error()) > 0);
  EXPECT(strcmp(l1h_status_name(L1H_ERR_STALE_WARM_START), "StaleWarmStart") == 0);
  EXPECT(strcmp(l1h_status_name(L1H_OK), "Ok") == 0);
  uint64_t seed = 0;
  OK(l1h_parse_seed("0x10", &seed));
  EXPECT(seed == 16);
  EXPECT(l1h_parse_seed("ten", &seed) == L1H_ERR_CONFIG);
  l1h_matrix_free(NULL);
  l1h_session_free(NULL);
  l1h_report_free(NULL);
}

static void test_session(void) {
  enum { M = 12, N = 20 };
  double a[M * N], y[M];
  unsigned long long s = 42;
  for (int i = 0; i < M * N; ++i) a[i] = lcg(&s);
  double x[N] = {0};
  x[3] = 1.0;
  x[11] = -1.0;
  for (int i = 0; i < M; ++i) {
    y[i] = 0.0;
    for (int j = 0; j < N; ++j) y[i] += a[i * N + j] * x[j];
  }
  l1h_matrix *am = NULL, *ym = NULL;
  OK(l1h_matrix_new(M, N, a, &am));
  OK(l1h_matrix_new(M, 1, y, &ym));
  EXPECT(l1h_matrix_rows(am) == M && l1h_matrix_cols(am) == N);

  l1h_session* sess = NULL;
  EXPECT(l1h_solve(L1H_BPDN, am, ym, 0.0, &sess) == L1H_ERR_CONFIG);
  OK(l1h_solve(L1H_BPDN, am, ym, 1.0, &sess));
  l1h_matrix* sol = NULL;
  OK(l1h_session_solution(sess, &sol));
  double xs[N];
  OK(l1h_matrix_copy(sol, xs));
  double mx = 0.0;
  for (int j = 0; j < N; ++j) mx = fmax(mx, fabs(xs[j]));
  EXPECT(mx == 0.0);
  l1h_matrix_free(sol);
  l1h_session_free(sess);

  sess = NULL;
  OK(l1h_solve(L1H_BPDN, am, ym, 0.1, &sess));
  l1h_run_stats st;
  OK(l1h_session_stats(sess, &st));
  EXPECT(st.kkt_pass == 1);
  EXPECT(st.steps > 0);
  EXPECT(st.support > 0);

  const char* path = "capi_test.state";
  OK(l1h_session_save(sess, path));
  l1h_session* loaded = NULL;
  OK(l1h_session_load(path, &loaded));

  /* A new right-hand side, applied to both the live and the reloaded session. */
  double y2[M];
  for (int i = 0; i < M; ++i) y2[i] = y[i] + 0.05 * lcg(&s);
  l1h_matrix* y2m = NULL;
  OK(l1h_matrix_new(1, M, y2, &y2m));
  OK(l1h_session_update_signal(sess, y2m));
  OK(l1h_session_update_signal(loaded, y2m));
  l1h_matrix *s1 = NULL, *s2 = NULL;
  OK(l1h_session_solution(sess, &s1));
  OK(l1h_session_solution(loaded, &s2));
  double v1[N], v2[N];
  OK(l1h_matrix_copy(s1, v1));
  OK(l1h_matrix_copy(s2, v2));
  double gap = 0.0;
  for (int j = 0; j < N; ++j) gap = fmax(gap, fabs(v1[j] - v2[j]));
  EXPECT(gap <= 1e-12);

  double b[N], w = 0.0;
  for (int j = 0; j < N; ++j) {
    b[j] = lcg(&s);
    w += b[j] * x[j];
  }
  l1h_matrix *bm = NULL, *wm = NULL;
  OK(l1h_matrix_new(1, N, b, &bm));
  OK(l1h_matrix_new(1, 1, &w, &wm));
  OK(l1h_session_add_rows(loaded, bm, wm));
  OK(l1h_session_stats(loaded, &st));
  EXPECT(st.kkt_pass == 1);
  OK(l1h_session_remove_row(loaded, M));
  OK(l1h_session_stats(loaded, &st));
  EXPECT(st.kkt_pass == 1);
  EXPECT(l1h_session_remove_row(loaded, 1000) == L1H_ERR_INVALID_ARGUMENT);
  l1h_matrix* dual = NULL;
  EXPECT(l1h_session_dual(loaded, &dual) == L1H_ERR_CONFIG);

  l1h_session* ds = NULL;
  OK(l1h_solve(L1H_DANTZIG, am, ym, 0.2, &ds));
  OK(l1h_session_dual(ds, &dual));
  EXPECT(l1h_matrix_rows(dual) == N);
  OK(l1h_session_stats(ds, &st));
  EXPECT(st.kkt_pass == 1);

  l1h_matrix_free(dual);
  l1h_session_free(ds);
  l1h_matrix_free(bm);
  l1h_matrix_free(wm);
  l1h_matrix_free(s1);
  l1h_matrix_free(s2);
  l1h_matrix_free(y2m);
  l1h_session_free(loaded);
  l1h_session_free(sess);
  l1h_matrix_free(am);
  l1h_matrix_free(ym);
  remove(path);
}

static void test_decode_and_bench(void) {
  l1h_decode_config cfg;
  l1h_decode_config_init(&cfg);
  cfg.n = 24;
  cfg.m = 48;
  cfg.errors = 5;
  cfg.block = 3;
  l1h_decode_result r;
  OK(l1h_decode_run(&cfg, &r));
  EXPECT(r.recovered == 1);
  EXPECT(r.kkt_pass == 1);
  cfg.m = 10;
  EXPECT(l1h_decode_run(&cfg, &r) == L1H_ERR_CONFIG);

  l1h_experiment_config e;
  l1h_experiment_config_init(&e);
  e.kind = "dynamic-seq-bpdn";
  e.n = 40;
  e.m = 24;
  e.k = 4;
  e.trials = 3;
  l1h_report* rep = NULL;
  OK(l1h_bench_run(&e, &rep));
  EXPECT(l1h_report_ok(rep) == 1);
  EXPECT(l1h_report_size(rep) == 1);
  l1h_experiment_summary sum;
  OK(l1h_report_summary(rep, 0, &sum));
  EXPECT(sum.trials == 3 && sum.flagged == 0);
  EXPECT(sum.warm_products < sum.cold_products);
  char* json = NULL;
  OK(l1h_report_json(rep, &json));
  EXPECT(json && strstr(json, "\"records\"") != NULL);
  l1h_string_free(json);
  EXPECT(l1h_report_summary(rep, 5, &sum) == L1H_ERR_INVALID_ARGUMENT);
  l1h_report_free(rep);

  e.kind = "bogus";
  EXPECT(l1h_bench_run(&e, &rep) == L1H_ERR_CONFIG);
  EXPECT(strstr(l1h_last_error(), "kind") != NULL);

  l1h_selftest_counts counts = {5, 3, 3, 8};
  int passed = 0;
  char* summary = NULL;
  OK(l1h_selftest(&counts, 3, &passed, &summary));
  EXPECT(passed == 1);
  l1h_string_free(summary);
}

int main(void) {
  test_errors();
  test_session();
  test_decode_and_bench();
  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return 1;
  }
  printf("capi_test: all expectations met\n");
  return 0;
}
