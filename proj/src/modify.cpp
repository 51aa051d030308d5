#include "modify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "rng.hpp"
#include "textio.hpp"

namespace specnet {

namespace {

struct Scored {
  Edge edge;
  double score;  // sensitivity or baseline score
};

/// Largest |score| first, ties by (src, dst).
void sort_by_magnitude(std::vector<Scored>& xs) {
  std::sort(xs.begin(), xs.end(), [](const Scored& a, const Scored& b) {
    double ma = std::abs(a.score), mb = std::abs(b.score);
    if (ma != mb) return ma > mb;
    return a.edge < b.edge;
  });
}

std::vector<Scored> take_k(std::vector<Scored> xs, int k) {
  if (static_cast<int>(xs.size()) > k) xs.resize(k);
  return xs;
}

std::vector<Scored> choose_randomk(const std::vector<Scored>& pool, int k, Rng& rng) {
  auto idx = rng.sample(static_cast<int>(pool.size()), k);
  std::vector<Scored> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(pool[i]);
  return out;
}

struct Eval {
  double kappa;
  bool pass;
  AssumptionReport report;
};

Eval eval_graph(const Graph& g) {
  SpectralState s = analyze(g);
  return {s.kappa, s.report.pass(), s.report};
}

void push_step(ModificationTrace& trace, Graph&& accepted, TraceStep&& step) {
  trace.steps.push_back(std::move(step));
  trace.graphs.push_back(std::move(accepted));
}

SpectralState analyze_for_iteration(const Graph& g) {
  // Accepted graphs always satisfy A1-A3 for the weakening/discrete loops, so
  // a failure here is a broken invariant rather than user input.
  SpectralState s = analyze(g);
  if (!s.report.pass())
    fail(Errc::numeric, "internal: working graph lost assumptions mid-run: " + s.report.describe());
  return s;
}

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::exhausted_iterations: return "exhausted_iterations";
    case Termination::empty_candidates: return "empty_candidates";
    case Termination::backtracking_failed: return "backtracking_failed";
    case Termination::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

// --- Algorithm 1: iterative weakening ---------------------------------------

ModificationTrace iterative_weakening(const Graph& g, const WeakenConfig& cfg, int threads) {
  if (!(cfg.step > 0)) fail(Errc::invalid_argument, "weaken: step must be > 0");
  if (cfg.derivative_fraction < 0) fail(Errc::invalid_argument, "weaken: d_f must be >= 0");
  if (cfg.batch < 1) fail(Errc::invalid_argument, "weaken: batch must be >= 1");
  if (!(cfg.tau_w > 0)) fail(Errc::invalid_argument, "weaken: tau_w must be > 0");
  if (!(cfg.tol > 0)) fail(Errc::invalid_argument, "weaken: tol must be > 0");
  if (cfg.t_max < 0) fail(Errc::invalid_argument, "weaken: t_max must be >= 0");
  if (cfg.choose_mode == ChooseMode::sortrandomk)
    fail(Errc::invalid_argument, "weaken: sortrandomk is not a weakening mode");

  SpectralState state = analyze_strict(g);
  Rng rng(cfg.seed);

  ModificationTrace trace;
  trace.kappa_initial = state.kappa;
  trace.graphs.push_back(g);
  trace.termination = Termination::exhausted_iterations;

  double kappa_cur = state.kappa;
  for (int t = 1; t <= cfg.t_max; ++t) {
    if (t > 1) state = analyze_for_iteration(trace.graphs.back());
    const Graph& B = trace.graphs.back();
    BorderedSolver solver(state.laplacian, state.graph_hash);

    EdgeList admissible;
    for (const auto& e : B.edges())
      if (e.weight > cfg.tau_w) admissible.push_back({e.src, e.dst});
    SetSensitivity sens = kappa_sensitivity_set(state, admissible, solver, threads);

    std::vector<Scored> pool;
    for (const auto& es : sens.per_edge)
      if (es.total < 0) pool.push_back({es.edge, es.total});
    if (pool.empty()) {
      trace.termination = Termination::empty_candidates;
      break;
    }

    std::vector<Scored> selected;
    switch (cfg.choose_mode) {
      case ChooseMode::topk:
        sort_by_magnitude(pool);
        selected = take_k(pool, cfg.batch);
        break;
      case ChooseMode::randomk:
        selected = choose_randomk(pool, cfg.batch, rng);
        break;
      default:
        selected = pool;
    }

    double d_max = 0;
    for (const auto& s : selected) d_max = std::max(d_max, std::abs(s.score));

    double sigma = cfg.step;
    bool accepted = false;
    while (sigma > cfg.tol && !accepted) {
      Graph trial = B;
      std::vector<EdgeChange> changes;
      for (const auto& s : selected) {
        double w = B.weight(s.edge.src, s.edge.dst);
        if (w <= 0) continue;
        double delta = cfg.fixed_step
                           ? std::min(sigma, w)
                           : std::min(sigma * (w + cfg.derivative_fraction * std::abs(s.score) / d_max), w);
        double w_new = std::max(0.0, w - delta);
        trial.set_weight(s.edge.src, s.edge.dst, w_new);
        changes.push_back({s.edge, w, w_new});
      }
      Eval ev = eval_graph(trial);
      if (ev.pass && ev.kappa > kappa_cur) {
        std::sort(changes.begin(), changes.end(),
                  [](const EdgeChange& a, const EdgeChange& b) { return a.edge < b.edge; });
        push_step(trace, std::move(trial),
                  {t, std::move(changes), kappa_cur, ev.kappa, sigma, 0.0, false});
        kappa_cur = ev.kappa;
        accepted = true;
      } else {
        sigma *= 0.5;
      }
    }
    if (!accepted) {
      trace.termination = Termination::backtracking_failed;
      break;
    }
  }
  return trace;
}

// --- Algorithm 2: discrete delete / negative insertion -----------------------

ModificationTrace discrete_modify(const Graph& g, const DiscreteConfig& cfg, int threads) {
  if (cfg.batch < 1) fail(Errc::invalid_argument, "discrete: batch must be >= 1");
  if (!(cfg.tau_w > 0)) fail(Errc::invalid_argument, "discrete: tau_w must be > 0");
  if (!(cfg.tol > 0)) fail(Errc::invalid_argument, "discrete: tol must be > 0");
  if (cfg.t_max < 0) fail(Errc::invalid_argument, "discrete: t_max must be >= 0");
  if (cfg.op == DiscreteOp::addneg && !(cfg.omega_neg < 0))
    fail(Errc::invalid_argument, "discrete: addneg requires omega_neg < 0");
  if (cfg.choose_mode == ChooseMode::topk)
    fail(Errc::invalid_argument, "discrete: use sortrandomk, randomk or all");

  SpectralState state = analyze_strict(g);
  Rng rng(cfg.seed);

  ModificationTrace trace;
  trace.kappa_initial = state.kappa;
  trace.graphs.push_back(g);
  trace.termination = Termination::exhausted_iterations;

  double kappa_cur = state.kappa;
  const int n = g.order();
  for (int t = 1; t <= cfg.t_max; ++t) {
    if (t > 1) state = analyze_for_iteration(trace.graphs.back());
    const Graph& B = trace.graphs.back();
    BorderedSolver solver(state.laplacian, state.graph_hash);

    EdgeList candidates;
    for (int src = 0; src < n; ++src)
      for (int dst = 0; dst < n; ++dst) {
        if (src == dst) continue;
        double w = B.weight(src, dst);
        bool ok = cfg.op == DiscreteOp::remove ? w > cfg.tau_w : std::abs(w) <= cfg.tau_w;
        if (ok) candidates.push_back({src, dst});
      }
    SetSensitivity sens = kappa_sensitivity_set(state, candidates, solver, threads);

    std::vector<Scored> pool;
    for (const auto& es : sens.per_edge)
      if (es.total < -cfg.tol) pool.push_back({es.edge, es.total});
    if (pool.empty()) {
      trace.termination = Termination::empty_candidates;
      break;
    }

    std::vector<Scored> selected;
    switch (cfg.choose_mode) {
      case ChooseMode::sortrandomk:
        sort_by_magnitude(pool);
        selected = take_k(pool, cfg.batch);
        break;
      case ChooseMode::randomk:
        selected = choose_randomk(pool, cfg.batch, rng);
        break;
      default:
        // canonical order before the permutation so that sortrandomk with
        // k >= |P| and `all` produce identical runs
        sort_by_magnitude(pool);
        selected = pool;
    }
    rng.shuffle(selected);

    bool accepted = false;
    for (const auto& s : selected) {
      double w_old = B.weight(s.edge.src, s.edge.dst);
      double w_new = cfg.op == DiscreteOp::remove ? 0.0 : cfg.omega_neg;
      Graph trial = B;
      trial.set_weight(s.edge.src, s.edge.dst, w_new);
      Eval ev = eval_graph(trial);
      if (ev.pass && ev.kappa > kappa_cur + cfg.tol) {
        push_step(trace, std::move(trial),
                  {t, {{s.edge, w_old, w_new}}, kappa_cur, ev.kappa, 0.0, 0.0, false});
        kappa_cur = ev.kappa;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      trace.termination = Termination::backtracking_failed;
      break;
    }
  }
  return trace;
}

// --- Algorithm 3: budget strengthening ---------------------------------------

namespace {

void require_positive_weights(const Graph& g, const char* who) {
  for (const auto& e : g.edges())
    if (e.weight <= 0)
      fail(Errc::invalid_argument,
           std::string(who) + ": requires a positively weighted graph, found weight " +
               fmt17(e.weight) + " on edge (" + std::to_string(e.src) + ", " +
               std::to_string(e.dst) + ")");
}

void validate_budget_config(const BudgetConfig& cfg) {
  if (!(cfg.budget > 0)) fail(Errc::invalid_argument, "strengthen: budget must be > 0");
  if (!(cfg.step > 0)) fail(Errc::invalid_argument, "strengthen: step must be > 0");
  if (cfg.batch < 1) fail(Errc::invalid_argument, "strengthen: batch must be >= 1");
  if (!(cfg.tol > 0)) fail(Errc::invalid_argument, "strengthen: tol must be > 0");
}

}  // namespace

ModificationTrace budget_strengthening(const Graph& g, const BudgetConfig& cfg, int threads) {
  validate_budget_config(cfg);
  if (cfg.choose_mode == ChooseMode::sortrandomk)
    fail(Errc::invalid_argument, "strengthen: use topk, randomk or all");
  require_positive_weights(g, "strengthen");

  SpectralState state = analyze_strict(g);
  Rng rng(cfg.seed);

  ModificationTrace trace;
  trace.kappa_initial = state.kappa;
  trace.graphs.push_back(g);
  trace.budget_algorithm = true;
  trace.budget_total = cfg.budget;
  trace.termination = Termination::budget_exhausted;

  double kappa_cur = state.kappa;
  double budget_left = cfg.budget;
  constexpr int kIterationCap = 100000;
  for (int t = 1; t <= kIterationCap; ++t) {
    if (budget_left <= cfg.tol) {
      trace.termination = Termination::budget_exhausted;
      break;
    }
    // Sensitivities are taken once per outer iteration and reused while the
    // trial increment is halved.
    SpectralState st = analyze(trace.graphs.back());
    if (!st.report.pass())
      // Warn-but-accept can leave the working graph outside A1-A3; without a
      // valid state there is nothing further to rank.
      { trace.termination = Termination::backtracking_failed; break; }
    const Graph& B = trace.graphs.back();
    BorderedSolver solver(st.laplacian, st.graph_hash);

    EdgeList existing;
    for (const auto& e : B.edges()) existing.push_back({e.src, e.dst});
    SetSensitivity sens = kappa_sensitivity_set(st, existing, solver, threads);

    std::vector<Scored> pool;
    for (const auto& es : sens.per_edge)
      if (es.total > 0) pool.push_back({es.edge, es.total});
    if (pool.empty()) {
      trace.termination = Termination::empty_candidates;
      break;
    }

    std::vector<Scored> selected;
    switch (cfg.choose_mode) {
      case ChooseMode::topk:
        sort_by_magnitude(pool);
        selected = take_k(pool, cfg.batch);
        break;
      case ChooseMode::randomk:
        selected = choose_randomk(pool, cfg.batch, rng);
        break;
      default:
        selected = pool;
    }

    double sum_sens = 0;
    for (const auto& s : selected) sum_sens += s.score;

    double alpha = std::min(cfg.step, budget_left);
    bool accepted = false;
    while (alpha > cfg.tol && !accepted) {
      Graph trial = trace.graphs.back();
      std::vector<EdgeChange> changes;
      for (const auto& s : selected) {
        double delta = cfg.alloc == AllocMode::fixed
                           ? alpha / static_cast<double>(selected.size())
                           : alpha * s.score / sum_sens;
        double w = trial.weight(s.edge.src, s.edge.dst);
        trial.set_weight(s.edge.src, s.edge.dst, w + delta);
        changes.push_back({s.edge, w, w + delta});
      }
      Eval ev = eval_graph(trial);
      if (ev.kappa > kappa_cur) {  // pseudocode tests the kappa increase only
        std::sort(changes.begin(), changes.end(),
                  [](const EdgeChange& a, const EdgeChange& b) { return a.edge < b.edge; });
        push_step(trace, std::move(trial),
                  {t, std::move(changes), kappa_cur, ev.kappa, alpha, alpha, !ev.pass});
        kappa_cur = ev.kappa;
        budget_left -= alpha;
        accepted = true;
      } else {
        alpha *= 0.5;
      }
    }
    if (!accepted) {
      trace.termination = Termination::backtracking_failed;
      break;
    }
  }
  return trace;
}

// --- structural baselines -----------------------------------------------------

std::vector<std::pair<Edge, double>> dir_ebc_scores(const Graph& g) {
  require_positive_weights(g, "dir_ebc");
  const int n = g.order();
  const auto& A = g.adjacency();

  std::vector<std::vector<int>> succ(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (A(i, j) != 0.0) succ[j].push_back(i);

  std::map<std::pair<int, int>, double> score;
  for (const auto& e : g.edges()) score[{e.src, e.dst}] = 0.0;

  // Brandes accumulation per source over the shortest-path DAG.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n; ++s) {
    std::vector<double> dist(n, kInf), sigma(n, 0.0), delta(n, 0.0);
    std::vector<std::vector<int>> pred(n);
    std::vector<int> settle_order;
    dist[s] = 0.0;
    sigma[s] = 1.0;

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0.0, s});
    std::vector<bool> done(n, false);
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = true;
      settle_order.push_back(u);
      for (int v : succ[u]) {
        double len = 1.0 / A(v, u);
        double nd = d + len;
        double tol = 1e-12 * (1.0 + std::abs(nd));
        if (nd < dist[v] - tol) {
          dist[v] = nd;
          sigma[v] = sigma[u];
          pred[v] = {u};
          pq.push({nd, v});
        } else if (std::abs(nd - dist[v]) <= tol) {
          sigma[v] += sigma[u];
          pred[v].push_back(u);
        }
      }
    }

    for (auto it = settle_order.rbegin(); it != settle_order.rend(); ++it) {
      int w = *it;
      for (int v : pred[w]) {
        double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
        score[{v, w}] += c;
        delta[v] += c;
      }
    }
  }

  std::vector<std::pair<Edge, double>> out;
  out.reserve(score.size());
  for (const auto& [key, val] : score) out.push_back({{key.first, key.second}, val});
  return out;
}

std::vector<std::pair<Edge, double>> dir_dac_scores(const Graph& g) {
  const int n = g.order();
  const auto& A = g.adjacency();
  Eigen::VectorXd in_deg = A.rowwise().sum();
  Eigen::VectorXd out_deg = A.colwise().sum();
  double mean_in = in_deg.mean(), mean_out = out_deg.mean();

  std::vector<std::pair<Edge, double>> out;
  for (const auto& e : g.edges())
    out.push_back({{e.src, e.dst}, (out_deg(e.src) - mean_out) * (in_deg(e.dst) - mean_in)});
  return out;
}

ModificationTrace baseline_modify(const Graph& g, Baseline strategy, const BudgetConfig& cfg,
                                  int threads) {
  (void)threads;
  validate_budget_config(cfg);
  require_positive_weights(g, "baseline");

  SpectralState state = analyze_strict(g);
  Rng rng(cfg.seed);

  ModificationTrace trace;
  trace.kappa_initial = state.kappa;
  trace.graphs.push_back(g);
  trace.budget_algorithm = true;
  trace.budget_total = cfg.budget;
  trace.termination = Termination::budget_exhausted;

  if (strategy == Baseline::uniform) {
    // The whole budget in one pass over every existing edge, accepted without
    // a per-step kappa test; the kappa outcome is recorded as-is.
    Graph trial = g;
    std::vector<EdgeChange> changes;
    double inc = cfg.budget / g.edge_count();
    for (const auto& e : g.edges()) {
      trial.set_weight(e.src, e.dst, e.weight + inc);
      changes.push_back({{e.src, e.dst}, e.weight, e.weight + inc});
    }
    Eval ev = eval_graph(trial);
    push_step(trace, std::move(trial),
              {1, std::move(changes), state.kappa, ev.kappa, inc, cfg.budget, !ev.pass});
    return trace;
  }

  double kappa_cur = state.kappa;
  double budget_left = cfg.budget;
  constexpr int kIterationCap = 100000;
  for (int t = 1; t <= kIterationCap; ++t) {
    if (budget_left <= cfg.tol) {
      trace.termination = Termination::budget_exhausted;
      break;
    }
    const Graph& B = trace.graphs.back();

    std::vector<Scored> pool;
    if (strategy == Baseline::random) {
      for (const auto& e : B.edges()) pool.push_back({{e.src, e.dst}, rng.uniform()});
    } else {
      auto scores = strategy == Baseline::dir_ebc ? dir_ebc_scores(B) : dir_dac_scores(B);
      for (const auto& [edge, sc] : scores) pool.push_back({edge, sc});
    }
    // sortrandomk: rank by score, keep the top k, then test in random order.
    std::sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.edge < b.edge;
    });
    std::vector<Scored> selected = take_k(std::move(pool), cfg.batch);
    rng.shuffle(selected);

    double alpha = std::min(cfg.step, budget_left);
    bool accepted = false;
    for (const auto& s : selected) {
      Graph trial = B;
      double w = trial.weight(s.edge.src, s.edge.dst);
      trial.set_weight(s.edge.src, s.edge.dst, w + alpha);
      Eval ev = eval_graph(trial);
      if (ev.kappa > kappa_cur) {
        push_step(trace, std::move(trial),
                  {t, {{s.edge, w, w + alpha}}, kappa_cur, ev.kappa, alpha, alpha, !ev.pass});
        kappa_cur = ev.kappa;
        budget_left -= alpha;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      trace.termination = Termination::backtracking_failed;
      break;
    }
  }
  return trace;
}

// --- exports --------------------------------------------------------------------

std::string trace_to_csv(const ModificationTrace& t) {
  std::ostringstream os;
  os << "iter,kappa_before,kappa_after,n_edges_modified,step_scale,budget_left\n";
  double spent = 0;
  for (const auto& s : t.steps) {
    spent += s.budget_spent;
    os << s.iteration << ',' << fmt17(s.kappa_before) << ',' << fmt17(s.kappa_after) << ','
       << s.changes.size() << ',' << fmt17(s.step_scale) << ',';
    if (t.budget_algorithm) os << fmt17(t.budget_total - spent);
    os << '\n';
  }
  return os.str();
}

std::string trace_to_json(const ModificationTrace& t) {
  std::ostringstream os;
  os << "{\"kappa_initial\": " << json_number(t.kappa_initial) << ", \"kappa_final\": "
     << json_number(t.kappa_final()) << ", \"termination\": \"" << termination_name(t.termination)
     << "\", \"steps\": [";
  for (size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (i) os << ", ";
    os << "{\"iteration\": " << s.iteration << ", \"kappa_before\": " << json_number(s.kappa_before)
       << ", \"kappa_after\": " << json_number(s.kappa_after)
       << ", \"step_scale\": " << json_number(s.step_scale)
       << ", \"budget_spent\": " << json_number(s.budget_spent) << ", \"assumption_warning\": "
       << (s.assumption_warning ? "true" : "false") << ", \"edges\": [";
    for (size_t k = 0; k < s.changes.size(); ++k) {
      const auto& c = s.changes[k];
      if (k) os << ", ";
      os << "{\"src\": " << c.edge.src << ", \"dst\": " << c.edge.dst
         << ", \"old_weight\": " << json_number(c.old_weight)
         << ", \"new_weight\": " << json_number(c.new_weight) << "}";
    }
    os << "]}";
  }
  os << "], \"final_graph\": " << graph_to_json(t.final_graph()) << "}";
  return os.str();
}

}  // namespace specnet
