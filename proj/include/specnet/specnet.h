/* specnet - spectral sensitivity toolkit for directed weighted networks.
 *
 * C API over the C++ core. All objects are opaque handles released with the
 * matching *_free function; strings returned through char** are owned by the
 * caller and released with sn_string_free. Every fallible call returns an
 * sn_status; on failure sn_last_error() describes the problem (thread-local).
 */
#ifndef SPECNET_H
#define SPECNET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sn_status {
  SN_OK = 0,
  SN_ERROR = 1,            /* unclassified failure */
  SN_ERR_PARSE = 2,        /* malformed input file */
  SN_ERR_INVALID_ARG = 3,  /* bad configuration or call contract */
  SN_ERR_ASSUMPTION = 4,   /* spectral assumptions A1-A3 (or branch) violated */
  SN_ERR_NUMERIC = 5,      /* solver failure */
  SN_ERR_INTEGRATION = 6,  /* ODE step-size underflow */
  SN_ERR_IO = 7            /* filesystem failure */
} sn_status;

const char* sn_version(void);
const char* sn_last_error(void);
void sn_string_free(char* s);

/* --- graphs -------------------------------------------------------------- */

typedef struct sn_graph sn_graph;

typedef struct sn_edge {
  int32_t src;
  int32_t dst;
} sn_edge;

typedef struct sn_weighted_edge {
  int32_t src;
  int32_t dst;
  double weight;
} sn_weighted_edge;

sn_status sn_graph_create(int32_t n, const sn_weighted_edge* edges, size_t n_edges,
                          sn_graph** out);
sn_status sn_graph_load(const char* path, int* dropped_self_loops, sn_graph** out);
sn_status sn_graph_save(const sn_graph* g, const char* path);
void sn_graph_free(sn_graph* g);

int32_t sn_graph_order(const sn_graph* g);
size_t sn_graph_edge_count(const sn_graph* g);
double sn_graph_weight(const sn_graph* g, int32_t src, int32_t dst);
/* Fills up to cap edges sorted by (src, dst); *n_edges gets the total count. */
sn_status sn_graph_edges(const sn_graph* g, sn_weighted_edge* buf, size_t cap, size_t* n_edges);

sn_status sn_graph_to_json(const sn_graph* g, char** out);
/* 64 hex digits plus NUL. */
sn_status sn_graph_sha256(const sn_graph* g, char out_hex[65]);

/* mapping (length n of g, may be NULL) receives old->new indices, -1 = dropped. */
sn_status sn_graph_largest_scc(const sn_graph* g, int32_t* mapping, sn_graph** out);
int sn_graph_is_strongly_connected(const sn_graph* g);

sn_status sn_graph_generate_layered(sn_graph** out);
sn_status sn_graph_generate_er(int32_t n, double p, double w_low, double w_high, uint64_t seed,
                               int32_t max_retries, sn_graph** out);
sn_status sn_graph_generate_small_world(int32_t n, double rewire_p, double w_low, double w_high,
                                        uint64_t seed, int32_t max_retries, sn_graph** out);

sn_status sn_graph_perturb(const sn_graph* g, const sn_edge* edges, size_t n_edges, double eps,
                           sn_graph** out);

/* --- spectral ------------------------------------------------------------ */

typedef struct sn_spectral sn_spectral;

typedef struct sn_assumption_report {
  int a1, a2, a3, pass;
  double a1_zero_gap;
  double a1_min_re_nonzero;
  double a2_min_xi;
  double a3_lambda1;
  double a3_gap;
  double a3_kappa;
} sn_assumption_report;

/* Always succeeds on solver-healthy graphs; assumption failures are recorded
 * in the report and kappa/gamma may be NaN. */
sn_status sn_spectral_compute(const sn_graph* g, sn_spectral** out);
void sn_spectral_free(sn_spectral* s);

double sn_spectral_kappa(const sn_spectral* s);
double sn_spectral_gamma(const sn_spectral* s);
sn_status sn_spectral_report(const sn_spectral* s, sn_assumption_report* out);
/* buf must hold n doubles. */
sn_status sn_spectral_xi(const sn_spectral* s, double* buf);
sn_status sn_spectral_y(const sn_spectral* s, double* buf);
sn_status sn_spectral_to_json(const sn_spectral* s, char** out);
double sn_kappa_upper_bound(const sn_graph* g);

/* --- sensitivities --------------------------------------------------------- */

typedef struct sn_edge_sensitivity {
  sn_edge edge;
  double total;
  double cut_energy;
  double redistribution;
} sn_edge_sensitivity;

/* per_edge may be NULL when only the additive total is wanted; otherwise it
 * must hold n_edges entries. Requires a state passing A1-A3. */
sn_status sn_kappa_sensitivity(const sn_graph* g, const sn_edge* edges, size_t n_edges,
                               int threads, sn_edge_sensitivity* per_edge, double* total);
sn_status sn_sensitivity_report_json(const sn_graph* g, const sn_edge* edges, size_t n_edges,
                                     int threads, char** out);
sn_status sn_gamma_sensitivity(const sn_graph* g, const sn_edge* edges, size_t n_edges,
                               double* out);

typedef enum sn_quantity { SN_QUANTITY_KAPPA = 0, SN_QUANTITY_GAMMA = 1 } sn_quantity;

sn_status sn_fd_check(const sn_graph* g, const sn_edge* edges, size_t n_edges, double h,
                      sn_quantity quantity, double* analytic, double* numeric, double* rel_err);

/* CSV with columns eps,kappa,dkappa,cut_energy,redistribution. */
sn_status sn_kappa_sweep_csv(const sn_graph* g, const sn_edge* edges, size_t n_edges,
                             double eps_min, double eps_max, int32_t points, char** out);

/* --- modification algorithms ------------------------------------------------ */

typedef enum sn_choose_mode {
  SN_CHOOSE_TOPK = 0,
  SN_CHOOSE_RANDOMK = 1,
  SN_CHOOSE_ALL = 2,
  SN_CHOOSE_SORTRANDOMK = 3
} sn_choose_mode;

typedef struct sn_weaken_config {
  double step;                /* s > 0 */
  double derivative_fraction; /* d_f >= 0 */
  int32_t batch;              /* k >= 1 */
  sn_choose_mode choose_mode; /* topk | randomk | all */
  double tau_w;
  double tol;
  int32_t t_max;
  uint64_t seed;
  int fixed_step; /* nonzero: uniform decrement min(sigma, w) */
} sn_weaken_config;

typedef enum sn_discrete_op { SN_OP_DELETE = 0, SN_OP_ADDNEG = 1 } sn_discrete_op;

typedef struct sn_discrete_config {
  sn_discrete_op op;
  sn_choose_mode choose_mode; /* sortrandomk | randomk | all */
  int32_t batch;
  double tau_w;
  double tol;
  int32_t t_max;
  double omega_neg; /* < 0, addneg only */
  uint64_t seed;
} sn_discrete_config;

typedef enum sn_alloc_mode { SN_ALLOC_FIXED = 0, SN_ALLOC_GUIDED = 1 } sn_alloc_mode;

typedef struct sn_budget_config {
  double budget;
  double step;
  int32_t batch;
  sn_choose_mode choose_mode; /* topk | randomk | all */
  double tol;
  sn_alloc_mode alloc;
  uint64_t seed;
} sn_budget_config;

typedef enum sn_baseline {
  SN_BASELINE_DIR_EBC = 0,
  SN_BASELINE_DIR_DAC = 1,
  SN_BASELINE_RANDOM = 2,
  SN_BASELINE_UNIFORM = 3
} sn_baseline;

/* Paper-default configurations. */
void sn_weaken_config_default(sn_weaken_config* cfg);
void sn_discrete_config_default(sn_discrete_config* cfg);
void sn_budget_config_default(sn_budget_config* cfg);

typedef struct sn_trace sn_trace;

sn_status sn_weaken(const sn_graph* g, const sn_weaken_config* cfg, int threads, sn_trace** out);
sn_status sn_discrete_modify(const sn_graph* g, const sn_discrete_config* cfg, int threads,
                             sn_trace** out);
sn_status sn_budget_strengthen(const sn_graph* g, const sn_budget_config* cfg, int threads,
                               sn_trace** out);
sn_status sn_baseline_modify(const sn_graph* g, sn_baseline strategy, const sn_budget_config* cfg,
                             int threads, sn_trace** out);
void sn_trace_free(sn_trace* t);

size_t sn_trace_step_count(const sn_trace* t);
double sn_trace_kappa_initial(const sn_trace* t);
double sn_trace_kappa_final(const sn_trace* t);
/* "exhausted_iterations" | "empty_candidates" | "backtracking_failed" |
 * "budget_exhausted"; storage owned by the library. */
const char* sn_trace_termination(const sn_trace* t);
/* step 0 = input graph, step i = after the i-th accepted step. */
sn_status sn_trace_graph_at(const sn_trace* t, size_t step, sn_graph** out);
sn_status sn_trace_to_csv(const sn_trace* t, char** out);
sn_status sn_trace_to_json(const sn_trace* t, char** out);

/* Per-edge scores for the structural baselines (sorted by (src, dst); buf may
 * be NULL to query the count). */
sn_status sn_dir_ebc_scores(const sn_graph* g, sn_weighted_edge* buf, size_t cap, size_t* count);
sn_status sn_dir_dac_scores(const sn_graph* g, sn_weighted_edge* buf, size_t cap, size_t* count);

/* --- consensus dynamics ------------------------------------------------------ */

typedef struct sn_sim_config {
  double t_end;
  double dt_sample;
  double rtol;
  double atol;
  double initial_scale;
  uint64_t seed;
} sn_sim_config;

void sn_sim_config_default_first(sn_sim_config* cfg);  /* t_end 300 */
void sn_sim_config_default_second(sn_sim_config* cfg); /* t_end 500 */

typedef struct sn_trajectory sn_trajectory;

/* x0 (and v0) may be NULL: a seeded Gaussian initial condition scaled by
 * cfg->initial_scale is drawn instead. */
sn_status sn_simulate_first(const sn_graph* g, double coupling, double drift,
                            const sn_sim_config* cfg, const double* x0, sn_trajectory** out);
sn_status sn_simulate_second(const sn_graph* g, double alpha, double beta, double drift,
                             const sn_sim_config* cfg, const double* x0, const double* v0,
                             sn_trajectory** out);
void sn_trajectory_free(sn_trajectory* t);

size_t sn_trajectory_sample_count(const sn_trajectory* t);
/* times / e must hold sample_count doubles; either may be NULL. */
sn_status sn_trajectory_error_series(const sn_trajectory* t, double* times, double* e);
sn_status sn_windowed_error(const sn_trajectory* t, double t_start, double window, double* out);
sn_status sn_trajectory_to_csv(const sn_trajectory* t, char** out);

/* Integrates the same seeded initial condition on every graph along a trace;
 * CSV columns step,kappa,E_window,log10_E. */
typedef struct sn_experiment_config {
  int second_order;
  double coupling; /* first-order */
  double alpha;    /* second-order */
  double beta;
  double drift;
  double window_start;
  double window_width;
} sn_experiment_config;

sn_status sn_run_experiment_csv(const sn_trace* t, const sn_experiment_config* sys,
                                const sn_sim_config* cfg, char** out);

#ifdef __cplusplus
}
#endif

#endif /* SPECNET_H */
