#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace specnet {

/// Directed weighted graph over vertices 0..n-1, stored densely.
/// adjacency()(i, j) holds a_ij, the (possibly negative) weight of the
/// directed edge j -> i; an edge exists iff its entry is nonzero.
class Graph {
 public:
  explicit Graph(int n);
  Graph(int n, const std::vector<WeightedEdge>& edges);

  int order() const { return static_cast<int>(adj_.rows()); }
  const Eigen::MatrixXd& adjacency() const { return adj_; }

  double weight(int src, int dst) const;
  void set_weight(int src, int dst, double w);

  bool has_edge(int src, int dst) const { return weight(src, dst) != 0.0; }
  int edge_count() const;

  /// Existing edges sorted by (src, dst).
  std::vector<WeightedEdge> edges() const;

  /// FNV-1a over dimensions and raw weight bytes; identifies graph content
  /// for factorization staleness checks.
  uint64_t content_hash() const;

 private:
  void check_vertex(int v) const;
  Eigen::MatrixXd adj_;
};

// --- file I/O ------------------------------------------------------------

/// Parses `src dst [weight]` rows, whitespace- or comma-separated; `#` lines
/// are skipped and a single non-numeric header row is tolerated. Vertex ids
/// are relabeled to 0..n-1 in increasing id order. Self-loop rows are dropped
/// (counted in *dropped_self_loops); duplicate (src, dst) rows are an error.
Graph load_edge_list(const std::string& path, int* dropped_self_loops = nullptr);

void save_edge_list(const Graph& g, const std::string& path);

/// {"n": ..., "edges": [[src, dst, weight], ...]} sorted by (src, dst).
std::string graph_to_json(const Graph& g);

/// SHA-256 (hex) of the canonical JSON export.
std::string graph_sha256(const Graph& g);

// --- structure -----------------------------------------------------------

bool is_strongly_connected(const Graph& g);

struct SccResult {
  Graph graph;
  std::vector<int> mapping;  // old index -> new index, -1 if dropped
};

/// Induced subgraph on the largest SCC; ties broken by the component whose
/// minimum original vertex label is smallest. Fails if the result has n < 2.
SccResult largest_scc(const Graph& g);

// --- generators ----------------------------------------------------------

/// The 10-node layered demonstration graph: four layers 1 | 2,3 | 4,5,6 |
/// 7,8,9,10 with forward and adjacent intra-layer edges of weight 1 and the
/// twelve inter-layer backward edges of weight 0.3.
Graph generate_layered();

Graph generate_er(int n, double p, double w_low, double w_high, uint64_t seed,
                  int max_retries = 1000);

Graph generate_small_world(int n, double rewire_p, double w_low, double w_high,
                           uint64_t seed, int max_retries = 1000);

// --- perturbation --------------------------------------------------------

/// Validates an edge set against the graph order: indices in range, no
/// self-loops, no duplicate ordered pairs.
void validate_edge_set(const EdgeList& F, int n);

/// A(eps) = A + eps * sum over F of the single-entry indicator; absent edges
/// may be created, signed weights are allowed.
Graph apply_perturbation(const Graph& g, const EdgeList& F, double eps);

}  // namespace specnet
