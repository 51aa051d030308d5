#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graph.hpp"
#include "sensitivity.hpp"

namespace specnet {

enum class ChooseMode { topk, randomk, all, sortrandomk };
enum class DiscreteOp { remove, addneg };
enum class AllocMode { fixed, guided };
enum class Baseline { dir_ebc, dir_dac, random, uniform };

/// Iterative sensitivity-guided edge weakening. `fixed_step` switches the
/// composite decrement min(sigma (w + d_f |d|/d_max), w) to the uniform
/// decrement min(sigma, w) used by the fixed-step comparison strategy.
struct WeakenConfig {
  double step = 0.2;
  double derivative_fraction = 0.1;
  int batch = 10;
  ChooseMode choose_mode = ChooseMode::topk;
  double tau_w = 1e-4;
  double tol = 1e-12;
  int t_max = 40;
  uint64_t seed = 0;
  bool fixed_step = false;
};

/// Discrete modification: delete an existing edge (weight set to exactly 0)
/// or insert a negative edge (weight set to exactly omega_neg < 0).
struct DiscreteConfig {
  DiscreteOp op = DiscreteOp::remove;
  ChooseMode choose_mode = ChooseMode::sortrandomk;
  int batch = 10;
  double tau_w = 1e-4;
  double tol = 1e-12;
  int t_max = 40;
  double omega_neg = -1.0;
  uint64_t seed = 0;
};

/// Budget-constrained strengthening; alloc picks between spreading each trial
/// increment evenly over the selected edges or proportionally to sensitivity.
struct BudgetConfig {
  double budget = 10.0;
  double step = 1.0;
  int batch = 10;
  ChooseMode choose_mode = ChooseMode::topk;
  double tol = 1e-12;
  AllocMode alloc = AllocMode::guided;
  uint64_t seed = 0;
};

enum class Termination {
  exhausted_iterations,
  empty_candidates,
  backtracking_failed,
  budget_exhausted,
};

const char* termination_name(Termination t);

struct EdgeChange {
  Edge edge;
  double old_weight = 0;
  double new_weight = 0;
};

struct TraceStep {
  int iteration = 0;
  std::vector<EdgeChange> changes;
  double kappa_before = 0;
  double kappa_after = 0;
  double step_scale = 0;       // accepted sigma/alpha; 0 for discrete steps
  double budget_spent = 0;     // weight actually added (strengthening only)
  bool assumption_warning = false;  // strengthening accepted despite A-check
};

/// Ordered record of accepted steps plus every intermediate graph
/// (graphs[0] is the input, graphs[i] the state after step i).
struct ModificationTrace {
  double kappa_initial = 0;
  Termination termination = Termination::exhausted_iterations;
  std::vector<TraceStep> steps;
  std::vector<Graph> graphs;
  bool budget_algorithm = false;
  double budget_total = 0;

  const Graph& final_graph() const { return graphs.back(); }
  double kappa_final() const {
    return steps.empty() ? kappa_initial : steps.back().kappa_after;
  }
};

ModificationTrace iterative_weakening(const Graph& g, const WeakenConfig& cfg, int threads = 1);
ModificationTrace discrete_modify(const Graph& g, const DiscreteConfig& cfg, int threads = 1);
ModificationTrace budget_strengthening(const Graph& g, const BudgetConfig& cfg, int threads = 1);
ModificationTrace baseline_modify(const Graph& g, Baseline strategy, const BudgetConfig& cfg,
                                  int threads = 1);

/// Directed edge betweenness with edge lengths 1/w; unreachable pairs
/// contribute nothing. Requires strictly positive weights.
std::vector<std::pair<Edge, double>> dir_ebc_scores(const Graph& g);

/// Degree-assortativity score (d_out(src) - mean_out) * (d_in(dst) - mean_in)
/// with weighted degrees.
std::vector<std::pair<Edge, double>> dir_dac_scores(const Graph& g);

/// One row per accepted step: iter, kappa_before, kappa_after,
/// n_edges_modified, step_scale, budget_left (empty for non-budget runs).
std::string trace_to_csv(const ModificationTrace& t);
std::string trace_to_json(const ModificationTrace& t);

}  // namespace specnet
