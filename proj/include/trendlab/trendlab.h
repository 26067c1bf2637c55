/* C interface to trendlab: l1 trend filtering, dual certificates, change
 * point extraction and the inward refinement chain.
 *
 * Every function returns a tl_status. On failure the message for the calling
 * thread is available from tl_last_error() until the next failing call.
 * Handles are opaque and owned by the caller; release them with the
 * matching *_free function (passing NULL is allowed). Pointers returned by
 * accessors stay valid until the owning handle is freed. */
#ifndef TRENDLAB_H
#define TRENDLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TRENDLAB_BUILDING)
#    define TL_API __declspec(dllexport)
#  else
#    define TL_API __declspec(dllimport)
#  endif
#else
#  define TL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_INVALID_ARGUMENT = 1,
  TL_PARSE_ERROR = 2,
  TL_IO_ERROR = 3,
  TL_NOT_CONVERGED = 4, /* a result handle is still returned */
  TL_NOT_CERTIFIED = 5, /* diagnostics asked of an unconverged fit */
  TL_INTERNAL_ERROR = 6
} tl_status;

typedef enum tl_backend { TL_BACKEND_INTERIOR_POINT = 0, TL_BACKEND_ADMM = 1 } tl_backend;
typedef enum tl_shape { TL_SHAPE_ALTERNATING = 0, TL_SHAPE_STAIRCASE = 1 } tl_shape;

typedef struct tl_series tl_series;
typedef struct tl_spec tl_spec;
typedef struct tl_fit tl_fit;
typedef struct tl_refinement tl_refinement;
typedef struct tl_rate_table tl_rate_table;
typedef struct tl_text tl_text;

TL_API const char* tl_version(void);
TL_API const char* tl_generator_id(void);
TL_API const char* tl_status_string(tl_status status);
TL_API const char* tl_last_error(void);

/* text (JSON documents) */
TL_API const char* tl_text_data(const tl_text* text);
TL_API size_t tl_text_size(const tl_text* text);
TL_API void tl_text_free(tl_text* text);

/* series */
TL_API tl_status tl_series_create(const double* values, size_t n, tl_series** out);
/* `column` is the value header after "t,"; NULL means "y". Parse errors name the line. */
TL_API tl_status tl_series_read_csv(const char* path, const char* column, tl_series** out);
TL_API tl_status tl_series_write_csv(const tl_series* series, const char* column, const char* path);
TL_API size_t tl_series_length(const tl_series* series);
TL_API const double* tl_series_values(const tl_series* series);
TL_API void tl_series_free(tl_series* series);

/* ground-truth specs: {"n", "knots": [[t, value], ...], "sigma", "seed"} */
TL_API tl_status tl_spec_parse_json(const char* text, tl_spec** out);
TL_API tl_status tl_spec_read_json(const char* path, tl_spec** out);
/* which = 1 (alternating) or 2 (staircase), sigma 1, seed 0 */
TL_API tl_status tl_spec_example(int which, tl_spec** out);
TL_API tl_status tl_spec_set_noise(tl_spec* spec, double sigma, uint64_t seed);
TL_API double tl_spec_sigma(const tl_spec* spec);
TL_API uint64_t tl_spec_seed(const tl_spec* spec);
TL_API size_t tl_spec_length(const tl_spec* spec);
TL_API tl_status tl_spec_json(const tl_spec* spec, tl_text** out);
TL_API tl_status tl_spec_mean(const tl_spec* spec, tl_series** out);
TL_API tl_status tl_spec_generate(const tl_spec* spec, tl_series** out);
TL_API void tl_spec_free(tl_spec* spec);

/* solving */
typedef struct tl_solver_options {
  int order;          /* 1 or 2 */
  double lambda;
  int max_iterations;
  double tolerance;   /* primal and dual */
  int backend;        /* tl_backend */
} tl_solver_options;

TL_API void tl_solver_options_init(tl_solver_options* options);
TL_API tl_status tl_lambda_max(const tl_series* series, int order, double* out);

/* Returns TL_OK or TL_NOT_CONVERGED with *out set in both cases. */
TL_API tl_status tl_fit_run(const tl_series* series, const tl_solver_options* options, tl_fit** out);
TL_API int tl_fit_converged(const tl_fit* fit);
TL_API size_t tl_fit_length(const tl_fit* fit);
TL_API const double* tl_fit_trend(const tl_fit* fit);
TL_API const double* tl_fit_differences(const tl_fit* fit); /* length - order entries */
/* z_0..z_{N+1} */
TL_API const double* tl_fit_dual(const tl_fit* fit);
TL_API double tl_fit_lambda(const tl_fit* fit);
TL_API int tl_fit_order(const tl_fit* fit);
TL_API int tl_fit_iterations(const tl_fit* fit);
TL_API double tl_fit_objective(const tl_fit* fit);
TL_API void tl_fit_residuals(const tl_fit* fit, double* primal, double* dual);
TL_API tl_status tl_fit_kkt_json(const tl_fit* fit, tl_text** out);
/* cluster_radius < 0 selects the default max(5, N / 500) */
TL_API tl_status tl_fit_changepoints_json(const tl_fit* fit, long cluster_radius, tl_text** out);
TL_API tl_status tl_fit_write_trend_csv(const tl_fit* fit, const char* path);
TL_API tl_status tl_fit_write_dual_csv(const tl_fit* fit, const char* path);
TL_API void tl_fit_free(tl_fit* fit);

/* certificate for an arbitrary candidate trend */
TL_API tl_status tl_check_kkt(const tl_series* series, const tl_series* trend, double lambda, int order,
                              tl_text** out);
TL_API tl_status tl_check_kkt_passed(const tl_series* series, const tl_series* trend, double lambda,
                                     int order, int* passed);

/* refinement */
typedef struct tl_refine_options {
  double c;             /* power-law exponent, 1 < c < 2 */
  double kappa;         /* lambda(n) = kappa n^c; ignored when lambda0 > 0 */
  double lambda0;       /* > 0: anchor kappa so lambda(N) = lambda0 */
  long cluster_radius;  /* < 0: default */
  size_t min_segment;
  int max_depth;
  tl_solver_options solver;
} tl_refine_options;

TL_API void tl_refine_options_init(tl_refine_options* options);
/* Returns TL_OK or TL_NOT_CONVERGED (partial trace) with *out set. */
TL_API tl_status tl_refine_run(const tl_series* series, const tl_refine_options* options,
                               tl_refinement** out);
TL_API size_t tl_refinement_point_count(const tl_refinement* refinement);
TL_API size_t tl_refinement_round_count(const tl_refinement* refinement);
TL_API double tl_refinement_round0_lambda(const tl_refinement* refinement);
TL_API tl_status tl_refinement_trace_json(const tl_refinement* refinement, tl_text** out);
TL_API tl_status tl_refinement_final_json(const tl_refinement* refinement, tl_text** out);
TL_API tl_status tl_refinement_monitor_json(const tl_refinement* refinement, tl_text** out);
TL_API tl_status tl_refinement_write_final_trend_csv(const tl_refinement* refinement, const char* path);
TL_API void tl_refinement_free(tl_refinement* refinement);

/* Monte Carlo */
typedef struct tl_scenario_options {
  int shape;               /* tl_shape, used when spec is NULL */
  const tl_spec* spec;     /* optional template mean */
  const size_t* sizes;     /* NULL: 500, 2000, 8000 */
  size_t size_count;
  double c;
  double kappa;            /* <= 0: the shape's default */
  int trials;
  uint64_t base_seed;
  double window_fraction;
  double sigma;
  int use_refine;
  unsigned threads;        /* 0: hardware, capped by TRENDLAB_THREADS */
  tl_solver_options solver;
} tl_scenario_options;

TL_API void tl_scenario_options_init(tl_scenario_options* options);
TL_API tl_status tl_monte_carlo(const tl_scenario_options* options, tl_rate_table** out);
TL_API tl_status tl_rate_table_json(const tl_rate_table* table, tl_text** out);
TL_API tl_status tl_rate_table_write_csv(const tl_rate_table* table, const char* path);
TL_API int tl_rate_table_failed_trials(const tl_rate_table* table);
TL_API void tl_rate_table_free(tl_rate_table* table);

/* Writes the plot-ready bundle for example 1 or 2 into `dir`; *summary
 * (optional) receives the detection metrics as JSON. */
TL_API tl_status tl_reproduce(int which, uint64_t seed, const char* dir, tl_text** summary);

#ifdef __cplusplus
}
#endif

#endif /* TRENDLAB_H */
