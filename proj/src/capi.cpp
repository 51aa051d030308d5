#include "specnet/specnet.h"

#include <cstring>
#include <string>

#include "dynamics.hpp"
#include "graph.hpp"
#include "modify.hpp"
#include "sensitivity.hpp"
#include "spectral.hpp"
#include "textio.hpp"

using namespace specnet;

struct sn_graph {
  Graph g;
};
struct sn_spectral {
  SpectralState s;
};
struct sn_trace {
  ModificationTrace t;
};
struct sn_trajectory {
  TrajectoryResult t;
};

namespace {

thread_local std::string g_last_error;

sn_status status_of(Errc c) {
  switch (c) {
    case Errc::parse: return SN_ERR_PARSE;
    case Errc::invalid_argument: return SN_ERR_INVALID_ARG;
    case Errc::assumption: return SN_ERR_ASSUMPTION;
    case Errc::numeric: return SN_ERR_NUMERIC;
    case Errc::integration: return SN_ERR_INTEGRATION;
    case Errc::io: return SN_ERR_IO;
  }
  return SN_ERROR;
}

template <class F>
sn_status guarded(F&& body) {
  try {
    body();
    return SN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SN_ERROR;
  } catch (...) {
    g_last_error = "unknown failure";
    return SN_ERROR;
  }
}

sn_status require(bool ok, const char* msg) {
  if (ok) return SN_OK;
  g_last_error = msg;
  return SN_ERR_INVALID_ARG;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

EdgeList to_edges(const sn_edge* edges, size_t n) {
  EdgeList out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back({edges[i].src, edges[i].dst});
  return out;
}

ChooseMode to_choose(sn_choose_mode m) {
  switch (m) {
    case SN_CHOOSE_TOPK: return ChooseMode::topk;
    case SN_CHOOSE_RANDOMK: return ChooseMode::randomk;
    case SN_CHOOSE_ALL: return ChooseMode::all;
    case SN_CHOOSE_SORTRANDOMK: return ChooseMode::sortrandomk;
  }
  fail(Errc::invalid_argument, "bad choose_mode");
}

SimConfig to_sim(const sn_sim_config* cfg) {
  return {cfg->t_end, cfg->dt_sample, cfg->rtol, cfg->atol, cfg->initial_scale, cfg->seed};
}

}  // namespace

extern "C" {

const char* sn_version(void) { return "0.1.0"; }
const char* sn_last_error(void) { return g_last_error.c_str(); }
void sn_string_free(char* s) { delete[] s; }

/* --- graphs -------------------------------------------------------------- */

sn_status sn_graph_create(int32_t n, const sn_weighted_edge* edges, size_t n_edges,
                          sn_graph** out) {
  if (auto s = require(out && (edges || n_edges == 0), "sn_graph_create: null argument")) return s;
  return guarded([&] {
    std::vector<WeightedEdge> es;
    es.reserve(n_edges);
    for (size_t i = 0; i < n_edges; ++i)
      es.push_back({edges[i].src, edges[i].dst, edges[i].weight});
    *out = new sn_graph{Graph(n, es)};
  });
}

sn_status sn_graph_load(const char* path, int* dropped_self_loops, sn_graph** out) {
  if (auto s = require(path && out, "sn_graph_load: null argument")) return s;
  return guarded([&] { *out = new sn_graph{load_edge_list(path, dropped_self_loops)}; });
}

sn_status sn_graph_save(const sn_graph* g, const char* path) {
  if (auto s = require(g && path, "sn_graph_save: null argument")) return s;
  return guarded([&] { save_edge_list(g->g, path); });
}

void sn_graph_free(sn_graph* g) { delete g; }

int32_t sn_graph_order(const sn_graph* g) { return g ? g->g.order() : 0; }

size_t sn_graph_edge_count(const sn_graph* g) {
  return g ? static_cast<size_t>(g->g.edge_count()) : 0;
}

double sn_graph_weight(const sn_graph* g, int32_t src, int32_t dst) {
  if (!g || src < 0 || dst < 0 || src >= g->g.order() || dst >= g->g.order()) return 0.0;
  return g->g.weight(src, dst);
}

sn_status sn_graph_edges(const sn_graph* g, sn_weighted_edge* buf, size_t cap, size_t* n_edges) {
  if (auto s = require(g && n_edges, "sn_graph_edges: null argument")) return s;
  return guarded([&] {
    auto edges = g->g.edges();
    *n_edges = edges.size();
    if (!buf) return;
    for (size_t i = 0; i < edges.size() && i < cap; ++i)
      buf[i] = {edges[i].src, edges[i].dst, edges[i].weight};
  });
}

sn_status sn_graph_to_json(const sn_graph* g, char** out) {
  if (auto s = require(g && out, "sn_graph_to_json: null argument")) return s;
  return guarded([&] { *out = dup_string(graph_to_json(g->g)); });
}

sn_status sn_graph_sha256(const sn_graph* g, char out_hex[65]) {
  if (auto s = require(g && out_hex, "sn_graph_sha256: null argument")) return s;
  return guarded([&] {
    std::string hex = graph_sha256(g->g);
    std::memcpy(out_hex, hex.data(), 64);
    out_hex[64] = '\0';
  });
}

sn_status sn_graph_largest_scc(const sn_graph* g, int32_t* mapping, sn_graph** out) {
  if (auto s = require(g && out, "sn_graph_largest_scc: null argument")) return s;
  return guarded([&] {
    SccResult r = largest_scc(g->g);
    if (mapping)
      for (int i = 0; i < g->g.order(); ++i) mapping[i] = r.mapping[i];
    *out = new sn_graph{std::move(r.graph)};
  });
}

int sn_graph_is_strongly_connected(const sn_graph* g) {
  return g && is_strongly_connected(g->g) ? 1 : 0;
}

sn_status sn_graph_generate_layered(sn_graph** out) {
  if (auto s = require(out != nullptr, "sn_graph_generate_layered: null argument")) return s;
  return guarded([&] { *out = new sn_graph{generate_layered()}; });
}

sn_status sn_graph_generate_er(int32_t n, double p, double w_low, double w_high, uint64_t seed,
                               int32_t max_retries, sn_graph** out) {
  if (auto s = require(out != nullptr, "sn_graph_generate_er: null argument")) return s;
  return guarded([&] { *out = new sn_graph{generate_er(n, p, w_low, w_high, seed, max_retries)}; });
}

sn_status sn_graph_generate_small_world(int32_t n, double rewire_p, double w_low, double w_high,
                                        uint64_t seed, int32_t max_retries, sn_graph** out) {
  if (auto s = require(out != nullptr, "sn_graph_generate_small_world: null argument")) return s;
  return guarded([&] {
    *out = new sn_graph{generate_small_world(n, rewire_p, w_low, w_high, seed, max_retries)};
  });
}

sn_status sn_graph_perturb(const sn_graph* g, const sn_edge* edges, size_t n_edges, double eps,
                           sn_graph** out) {
  if (auto s = require(g && out && (edges || n_edges == 0), "sn_graph_perturb: null argument"))
    return s;
  return guarded([&] {
    *out = new sn_graph{apply_perturbation(g->g, to_edges(edges, n_edges), eps)};
  });
}

/* --- spectral ------------------------------------------------------------ */

sn_status sn_spectral_compute(const sn_graph* g, sn_spectral** out) {
  if (auto s = require(g && out, "sn_spectral_compute: null argument")) return s;
  return guarded([&] { *out = new sn_spectral{analyze(g->g)}; });
}

void sn_spectral_free(sn_spectral* s) { delete s; }

double sn_spectral_kappa(const sn_spectral* s) {
  return s ? s->s.kappa : std::numeric_limits<double>::quiet_NaN();
}

double sn_spectral_gamma(const sn_spectral* s) {
  return s ? s->s.gamma : std::numeric_limits<double>::quiet_NaN();
}

sn_status sn_spectral_report(const sn_spectral* s, sn_assumption_report* out) {
  if (auto st = require(s && out, "sn_spectral_report: null argument")) return st;
  const AssumptionReport& r = s->s.report;
  *out = {r.a1 ? 1 : 0,     r.a2 ? 1 : 0, r.a3 ? 1 : 0, r.pass() ? 1 : 0,
          r.a1_zero_gap,    r.a1_min_re_nonzero,
          r.a2_min_xi,      r.a3_lambda1, r.a3_gap,     r.a3_kappa};
  return SN_OK;
}

sn_status sn_spectral_xi(const sn_spectral* s, double* buf) {
  if (auto st = require(s && buf, "sn_spectral_xi: null argument")) return st;
  if (auto st = require(s->s.xi.size() > 0, "sn_spectral_xi: xi unavailable (A1/A2 failed)"))
    return st;
  std::memcpy(buf, s->s.xi.data(), sizeof(double) * s->s.xi.size());
  return SN_OK;
}

sn_status sn_spectral_y(const sn_spectral* s, double* buf) {
  if (auto st = require(s && buf, "sn_spectral_y: null argument")) return st;
  if (auto st = require(s->s.y.size() > 0, "sn_spectral_y: y unavailable (A1/A2 failed)"))
    return st;
  std::memcpy(buf, s->s.y.data(), sizeof(double) * s->s.y.size());
  return SN_OK;
}

sn_status sn_spectral_to_json(const sn_spectral* s, char** out) {
  if (auto st = require(s && out, "sn_spectral_to_json: null argument")) return st;
  return guarded([&] { *out = dup_string(spectral_to_json(s->s)); });
}

double sn_kappa_upper_bound(const sn_graph* g) {
  return g ? kappa_upper_bound(g->g) : std::numeric_limits<double>::quiet_NaN();
}

/* --- sensitivities --------------------------------------------------------- */

sn_status sn_kappa_sensitivity(const sn_graph* g, const sn_edge* edges, size_t n_edges,
                               int threads, sn_edge_sensitivity* per_edge, double* total) {
  if (auto s = require(g && (edges || n_edges == 0), "sn_kappa_sensitivity: null argument"))
    return s;
  return guarded([&] {
    SpectralState state = analyze_strict(g->g);
    BorderedSolver solver(state.laplacian, state.graph_hash);
    SetSensitivity ss = kappa_sensitivity_set(state, to_edges(edges, n_edges), solver, threads);
    if (total) *total = ss.total;
    if (per_edge)
      for (size_t i = 0; i < ss.per_edge.size(); ++i) {
        const auto& e = ss.per_edge[i];
        per_edge[i] = {{e.edge.src, e.edge.dst}, e.total, e.cut_energy, e.redistribution};
      }
  });
}

sn_status sn_sensitivity_report_json(const sn_graph* g, const sn_edge* edges, size_t n_edges,
                                     int threads, char** out) {
  if (auto s = require(g && out && (edges || n_edges == 0),
                       "sn_sensitivity_report_json: null argument"))
    return s;
  return guarded([&] {
    SpectralState state = analyze_strict(g->g);
    BorderedSolver solver(state.laplacian, state.graph_hash);
    SetSensitivity ss = kappa_sensitivity_set(state, to_edges(edges, n_edges), solver, threads);
    *out = dup_string(sensitivity_report_json(ss));
  });
}

sn_status sn_gamma_sensitivity(const sn_graph* g, const sn_edge* edges, size_t n_edges,
                               double* out) {
  if (auto s = require(g && out && (edges || n_edges == 0), "sn_gamma_sensitivity: null argument"))
    return s;
  return guarded([&] {
    GammaState gs = gamma_state(build_laplacian(g->g));
    *out = gamma_sensitivity(gs, to_edges(edges, n_edges));
  });
}

sn_status sn_fd_check(const sn_graph* g, const sn_edge* edges, size_t n_edges, double h,
                      sn_quantity quantity, double* analytic, double* numeric, double* rel_err) {
  if (auto s = require(g && (edges || n_edges == 0), "sn_fd_check: null argument")) return s;
  return guarded([&] {
    FdCheck fd = finite_difference_check(
        g->g, to_edges(edges, n_edges), h,
        quantity == SN_QUANTITY_KAPPA ? Quantity::kappa : Quantity::gamma);
    if (analytic) *analytic = fd.analytic;
    if (numeric) *numeric = fd.numeric;
    if (rel_err) *rel_err = fd.rel_err;
  });
}

sn_status sn_kappa_sweep_csv(const sn_graph* g, const sn_edge* edges, size_t n_edges,
                             double eps_min, double eps_max, int32_t points, char** out) {
  if (auto s = require(g && out && (edges || n_edges == 0), "sn_kappa_sweep_csv: null argument"))
    return s;
  return guarded([&] {
    auto pts = kappa_sweep(g->g, to_edges(edges, n_edges), eps_min, eps_max, points);
    std::string csv = "eps,kappa,dkappa,cut_energy,redistribution\n";
    for (const auto& p : pts) {
      csv += fmt17(p.eps);
      csv += ',';
      csv += fmt17(p.kappa);
      csv += ',';
      csv += fmt17(p.total);
      csv += ',';
      csv += fmt17(p.cut_energy);
      csv += ',';
      csv += fmt17(p.redistribution);
      csv += '\n';
    }
    *out = dup_string(csv);
  });
}

/* --- modification --------------------------------------------------------- */

void sn_weaken_config_default(sn_weaken_config* cfg) {
  *cfg = {0.2, 0.1, 10, SN_CHOOSE_TOPK, 1e-4, 1e-12, 40, 0, 0};
}

void sn_discrete_config_default(sn_discrete_config* cfg) {
  *cfg = {SN_OP_DELETE, SN_CHOOSE_SORTRANDOMK, 10, 1e-4, 1e-12, 40, -1.0, 0};
}

void sn_budget_config_default(sn_budget_config* cfg) {
  *cfg = {10.0, 1.0, 10, SN_CHOOSE_TOPK, 1e-12, SN_ALLOC_GUIDED, 0};
}

sn_status sn_weaken(const sn_graph* g, const sn_weaken_config* cfg, int threads, sn_trace** out) {
  if (auto s = require(g && cfg && out, "sn_weaken: null argument")) return s;
  return guarded([&] {
    WeakenConfig c{cfg->step,  cfg->derivative_fraction,
                   cfg->batch, to_choose(cfg->choose_mode),
                   cfg->tau_w, cfg->tol,
                   cfg->t_max, cfg->seed,
                   cfg->fixed_step != 0};
    *out = new sn_trace{iterative_weakening(g->g, c, threads)};
  });
}

sn_status sn_discrete_modify(const sn_graph* g, const sn_discrete_config* cfg, int threads,
                             sn_trace** out) {
  if (auto s = require(g && cfg && out, "sn_discrete_modify: null argument")) return s;
  return guarded([&] {
    DiscreteConfig c{cfg->op == SN_OP_DELETE ? DiscreteOp::remove : DiscreteOp::addneg,
                     to_choose(cfg->choose_mode),
                     cfg->batch,
                     cfg->tau_w,
                     cfg->tol,
                     cfg->t_max,
                     cfg->omega_neg,
                     cfg->seed};
    *out = new sn_trace{discrete_modify(g->g, c, threads)};
  });
}

sn_status sn_budget_strengthen(const sn_graph* g, const sn_budget_config* cfg, int threads,
                               sn_trace** out) {
  if (auto s = require(g && cfg && out, "sn_budget_strengthen: null argument")) return s;
  return guarded([&] {
    BudgetConfig c{cfg->budget,
                   cfg->step,
                   cfg->batch,
                   to_choose(cfg->choose_mode),
                   cfg->tol,
                   cfg->alloc == SN_ALLOC_FIXED ? AllocMode::fixed : AllocMode::guided,
                   cfg->seed};
    *out = new sn_trace{budget_strengthening(g->g, c, threads)};
  });
}

sn_status sn_baseline_modify(const sn_graph* g, sn_baseline strategy, const sn_budget_config* cfg,
                             int threads, sn_trace** out) {
  if (auto s = require(g && cfg && out, "sn_baseline_modify: null argument")) return s;
  return guarded([&] {
    Baseline b;
    switch (strategy) {
      case SN_BASELINE_DIR_EBC: b = Baseline::dir_ebc; break;
      case SN_BASELINE_DIR_DAC: b = Baseline::dir_dac; break;
      case SN_BASELINE_RANDOM: b = Baseline::random; break;
      case SN_BASELINE_UNIFORM: b = Baseline::uniform; break;
      default: fail(Errc::invalid_argument, "bad baseline");
    }
    BudgetConfig c{cfg->budget,
                   cfg->step,
                   cfg->batch,
                   to_choose(cfg->choose_mode),
                   cfg->tol,
                   cfg->alloc == SN_ALLOC_FIXED ? AllocMode::fixed : AllocMode::guided,
                   cfg->seed};
    *out = new sn_trace{baseline_modify(g->g, b, c, threads)};
  });
}

void sn_trace_free(sn_trace* t) { delete t; }

size_t sn_trace_step_count(const sn_trace* t) { return t ? t->t.steps.size() : 0; }

double sn_trace_kappa_initial(const sn_trace* t) {
  return t ? t->t.kappa_initial : std::numeric_limits<double>::quiet_NaN();
}

double sn_trace_kappa_final(const sn_trace* t) {
  return t ? t->t.kappa_final() : std::numeric_limits<double>::quiet_NaN();
}

const char* sn_trace_termination(const sn_trace* t) {
  return t ? termination_name(t->t.termination) : "?";
}

sn_status sn_trace_graph_at(const sn_trace* t, size_t step, sn_graph** out) {
  if (auto s = require(t && out, "sn_trace_graph_at: null argument")) return s;
  if (auto s = require(step < t->t.graphs.size(), "sn_trace_graph_at: step out of range"))
    return s;
  return guarded([&] { *out = new sn_graph{t->t.graphs[step]}; });
}

sn_status sn_trace_to_csv(const sn_trace* t, char** out) {
  if (auto s = require(t && out, "sn_trace_to_csv: null argument")) return s;
  return guarded([&] { *out = dup_string(trace_to_csv(t->t)); });
}

sn_status sn_trace_to_json(const sn_trace* t, char** out) {
  if (auto s = require(t && out, "sn_trace_to_json: null argument")) return s;
  return guarded([&] { *out = dup_string(trace_to_json(t->t)); });
}

namespace {

sn_status scores_out(const std::vector<std::pair<Edge, double>>& scores, sn_weighted_edge* buf,
                     size_t cap, size_t* count) {
  if (auto s = require(count != nullptr, "scores: null count")) return s;
  *count = scores.size();
  if (buf)
    for (size_t i = 0; i < scores.size() && i < cap; ++i)
      buf[i] = {scores[i].first.src, scores[i].first.dst, scores[i].second};
  return SN_OK;
}

}  // namespace

sn_status sn_dir_ebc_scores(const sn_graph* g, sn_weighted_edge* buf, size_t cap, size_t* count) {
  if (auto s = require(g != nullptr, "sn_dir_ebc_scores: null graph")) return s;
  sn_status st = SN_OK;
  sn_status guard = guarded([&] { st = scores_out(dir_ebc_scores(g->g), buf, cap, count); });
  return guard != SN_OK ? guard : st;
}

sn_status sn_dir_dac_scores(const sn_graph* g, sn_weighted_edge* buf, size_t cap, size_t* count) {
  if (auto s = require(g != nullptr, "sn_dir_dac_scores: null graph")) return s;
  sn_status st = SN_OK;
  sn_status guard = guarded([&] { st = scores_out(dir_dac_scores(g->g), buf, cap, count); });
  return guard != SN_OK ? guard : st;
}

/* --- dynamics --------------------------------------------------------------- */

void sn_sim_config_default_first(sn_sim_config* cfg) {
  *cfg = {300.0, 0.05, 1e-8, 1e-10, 0.02, 0};
}

void sn_sim_config_default_second(sn_sim_config* cfg) {
  *cfg = {500.0, 0.05, 1e-8, 1e-10, 0.02, 0};
}

sn_status sn_simulate_first(const sn_graph* g, double coupling, double drift,
                            const sn_sim_config* cfg, const double* x0, sn_trajectory** out) {
  if (auto s = require(g && cfg && out, "sn_simulate_first: null argument")) return s;
  return guarded([&] {
    const int n = g->g.order();
    Eigen::VectorXd ic = x0 ? Eigen::Map<const Eigen::VectorXd>(x0, n).eval()
                            : gaussian_initial(n, cfg->initial_scale, cfg->seed);
    FirstOrderSystem sys{build_laplacian(g->g), coupling, drift};
    *out = new sn_trajectory{integrate(sys, to_sim(cfg), ic)};
  });
}

sn_status sn_simulate_second(const sn_graph* g, double alpha, double beta, double drift,
                             const sn_sim_config* cfg, const double* x0, const double* v0,
                             sn_trajectory** out) {
  if (auto s = require(g && cfg && out, "sn_simulate_second: null argument")) return s;
  return guarded([&] {
    const int n = g->g.order();
    Eigen::VectorXd xi = x0 ? Eigen::Map<const Eigen::VectorXd>(x0, n).eval()
                            : gaussian_initial(n, cfg->initial_scale, cfg->seed);
    Eigen::VectorXd vi = v0 ? Eigen::Map<const Eigen::VectorXd>(v0, n).eval()
                            : gaussian_initial(n, cfg->initial_scale, cfg->seed + 1);
    SecondOrderSystem sys{build_laplacian(g->g), alpha, beta, drift};
    *out = new sn_trajectory{integrate(sys, to_sim(cfg), xi, vi)};
  });
}

void sn_trajectory_free(sn_trajectory* t) { delete t; }

size_t sn_trajectory_sample_count(const sn_trajectory* t) { return t ? t->t.times.size() : 0; }

sn_status sn_trajectory_error_series(const sn_trajectory* t, double* times, double* e) {
  if (auto s = require(t != nullptr, "sn_trajectory_error_series: null trajectory")) return s;
  for (size_t i = 0; i < t->t.times.size(); ++i) {
    if (times) times[i] = t->t.times[i];
    if (e) e[i] = t->t.e_series[i];
  }
  return SN_OK;
}

sn_status sn_windowed_error(const sn_trajectory* t, double t_start, double window, double* out) {
  if (auto s = require(t && out, "sn_windowed_error: null argument")) return s;
  return guarded([&] { *out = windowed_error(t->t.e_series, t->t.times, t_start, window); });
}

sn_status sn_trajectory_to_csv(const sn_trajectory* t, char** out) {
  if (auto s = require(t && out, "sn_trajectory_to_csv: null argument")) return s;
  return guarded([&] { *out = dup_string(trajectory_to_csv(t->t)); });
}

sn_status sn_run_experiment_csv(const sn_trace* t, const sn_experiment_config* sys,
                                const sn_sim_config* cfg, char** out) {
  if (auto s = require(t && sys && cfg && out, "sn_run_experiment_csv: null argument")) return s;
  return guarded([&] {
    ExperimentSystem es{sys->second_order != 0, sys->coupling, sys->alpha, sys->beta, sys->drift};
    auto rows = run_experiment(t->t, es, to_sim(cfg), sys->window_start, sys->window_width);
    *out = dup_string(experiment_to_csv(rows));
  });
}

}  // extern "C"
