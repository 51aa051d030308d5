#include "graph.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rng.hpp"
#include "textio.hpp"

namespace specnet {

Graph::Graph(int n) {
  if (n < 2) fail(Errc::invalid_argument, "graph needs at least 2 vertices, got " + std::to_string(n));
  adj_ = Eigen::MatrixXd::Zero(n, n);
}

Graph::Graph(int n, const std::vector<WeightedEdge>& edges) : Graph(n) {
  for (const auto& e : edges) set_weight(e.src, e.dst, e.weight);
}

void Graph::check_vertex(int v) const {
  if (v < 0 || v >= order())
    fail(Errc::invalid_argument, "vertex index " + std::to_string(v) + " out of range [0, " +
                                     std::to_string(order()) + ")");
}

double Graph::weight(int src, int dst) const {
  check_vertex(src);
  check_vertex(dst);
  return adj_(dst, src);
}

void Graph::set_weight(int src, int dst, double w) {
  check_vertex(src);
  check_vertex(dst);
  if (src == dst) fail(Errc::invalid_argument, "self-loops are not representable");
  adj_(dst, src) = w;
}

int Graph::edge_count() const {
  int m = 0;
  for (int i = 0; i < order(); ++i)
    for (int j = 0; j < order(); ++j)
      if (adj_(i, j) != 0.0) ++m;
  return m;
}

std::vector<WeightedEdge> Graph::edges() const {
  std::vector<WeightedEdge> out;
  for (int src = 0; src < order(); ++src)
    for (int dst = 0; dst < order(); ++dst)
      if (adj_(dst, src) != 0.0) out.push_back({src, dst, adj_(dst, src)});
  std::sort(out.begin(), out.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  return out;
}

uint64_t Graph::content_hash() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const unsigned char* p, size_t len) {
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  int n = order();
  mix(reinterpret_cast<const unsigned char*>(&n), sizeof n);
  mix(reinterpret_cast<const unsigned char*>(adj_.data()), sizeof(double) * adj_.size());
  return h;
}

// --- file I/O ------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        toks.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

bool parse_long(const std::string& s, long& out) {
  try {
    size_t pos = 0;
    out = std::stol(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

Graph load_edge_list(const std::string& path, int* dropped_self_loops) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open " + path);

  struct Row {
    long src, dst;
    double w;
    int line;
  };
  std::vector<Row> rows;
  std::set<long> ids;
  int dropped = 0;
  bool header_allowed = true;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    long src;
    if (!parse_long(toks[0], src)) {
      if (header_allowed) {  // single non-numeric header row
        header_allowed = false;
        continue;
      }
      fail(Errc::parse, path + ":" + std::to_string(lineno) + ": malformed row");
    }
    header_allowed = false;
    long dst;
    double w = 1.0;
    if (toks.size() < 2 || toks.size() > 3 || !parse_long(toks[1], dst) ||
        (toks.size() == 3 && !parse_double(toks[2], w)))
      fail(Errc::parse, path + ":" + std::to_string(lineno) + ": malformed row");
    if (src == dst) {
      ++dropped;
      continue;
    }
    rows.push_back({src, dst, w, lineno});
    ids.insert(src);
    ids.insert(dst);
  }

  if (ids.size() < 2)
    fail(Errc::parse, path + ": fewer than 2 vertices");

  std::map<long, int> relabel;
  int next = 0;
  for (long id : ids) relabel[id] = next++;

  Graph g(static_cast<int>(ids.size()));
  std::set<std::pair<int, int>> seen;
  for (const auto& r : rows) {
    int s = relabel[r.src], d = relabel[r.dst];
    if (!seen.insert({s, d}).second)
      fail(Errc::parse, path + ":" + std::to_string(r.line) + ": duplicate edge " +
                            std::to_string(r.src) + " -> " + std::to_string(r.dst));
    g.set_weight(s, d, r.w);
  }
  if (dropped_self_loops) *dropped_self_loops = dropped;
  return g;
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io, "cannot write " + path);
  for (const auto& e : g.edges())
    out << e.src << '\t' << e.dst << '\t' << fmt17(e.weight) << '\n';
  if (!out) fail(Errc::io, "write failed: " + path);
}

std::string graph_to_json(const Graph& g) {
  std::string s = "{\"n\": " + std::to_string(g.order()) + ", \"edges\": [";
  bool first = true;
  for (const auto& e : g.edges()) {
    if (!first) s += ", ";
    first = false;
    s += "[" + std::to_string(e.src) + ", " + std::to_string(e.dst) + ", " + fmt17(e.weight) + "]";
  }
  s += "]}";
  return s;
}

std::string graph_sha256(const Graph& g) {
  std::string json = graph_to_json(g);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(json.data(), json.size(), digest, &len, EVP_sha256(), nullptr))
    fail(Errc::numeric, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

// --- structure -----------------------------------------------------------

namespace {

/// Tarjan's SCC, iterative. Edge j -> i exists iff adj(i, j) != 0.
std::vector<std::vector<int>> tarjan_sccs(const Graph& g) {
  int n = g.order();
  const auto& A = g.adjacency();
  std::vector<std::vector<int>> succ(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (A(i, j) != 0.0) succ[j].push_back(i);

  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int next_index = 0;

  struct Frame {
    int v;
    size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      int v = call.back().v;
      if (call.back().child < succ[v].size()) {
        int w = succ[v][call.back().child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          std::vector<int> comp;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
          } while (w != v);
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return comps;
}

}  // namespace

bool is_strongly_connected(const Graph& g) {
  return tarjan_sccs(g).size() == 1;
}

SccResult largest_scc(const Graph& g) {
  auto comps = tarjan_sccs(g);
  const std::vector<int>* best = nullptr;
  for (const auto& c : comps) {
    if (!best || c.size() > best->size() ||
        (c.size() == best->size() && c.front() < best->front()))
      best = &c;
  }
  if (best->size() < 2)
    fail(Errc::invalid_argument, "largest strongly connected component has fewer than 2 vertices");

  std::vector<int> mapping(g.order(), -1);
  for (size_t k = 0; k < best->size(); ++k) mapping[(*best)[k]] = static_cast<int>(k);

  Graph sub(static_cast<int>(best->size()));
  for (int old_src = 0; old_src < g.order(); ++old_src) {
    if (mapping[old_src] < 0) continue;
    for (int old_dst = 0; old_dst < g.order(); ++old_dst) {
      if (mapping[old_dst] < 0 || old_src == old_dst) continue;
      double w = g.adjacency()(old_dst, old_src);
      if (w != 0.0) sub.set_weight(mapping[old_src], mapping[old_dst], w);
    }
  }
  return {std::move(sub), std::move(mapping)};
}

// --- generators ----------------------------------------------------------

Graph generate_layered() {
  // Backward inter-layer edges (1-based) of weight 0.3; each has a weight-1
  // forward companion. Intra-layer neighbors are tied both ways with weight 1.
  static const int backward[][2] = {{2, 1}, {3, 1},  {4, 2}, {5, 2}, {5, 3}, {6, 3},
                                    {7, 4}, {8, 4},  {8, 5}, {9, 5}, {9, 6}, {10, 6}};
  static const int intra[][2] = {{2, 3}, {4, 5}, {5, 6}, {7, 8}, {8, 9}, {9, 10}};
  Graph g(10);
  for (const auto& e : backward) {
    g.set_weight(e[0] - 1, e[1] - 1, 0.3);
    g.set_weight(e[1] - 1, e[0] - 1, 1.0);
  }
  for (const auto& e : intra) {
    g.set_weight(e[0] - 1, e[1] - 1, 1.0);
    g.set_weight(e[1] - 1, e[0] - 1, 1.0);
  }
  return g;
}

Graph generate_er(int n, double p, double w_low, double w_high, uint64_t seed, int max_retries) {
  if (n < 2) fail(Errc::invalid_argument, "generate_er: n must be >= 2");
  if (!(p > 0.0 && p < 1.0)) fail(Errc::invalid_argument, "generate_er: p must be in (0, 1)");
  if (w_low > w_high) fail(Errc::invalid_argument, "generate_er: w_low > w_high");

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(seed + static_cast<uint64_t>(attempt));
    Graph g(n);
    for (int src = 0; src < n; ++src)
      for (int dst = 0; dst < n; ++dst) {
        if (src == dst) continue;
        if (rng.uniform() < p) g.set_weight(src, dst, rng.uniform(w_low, w_high));
      }
    if (is_strongly_connected(g)) return g;
  }
  fail(Errc::numeric, "generate_er: no strongly connected graph with n=" + std::to_string(n) +
                          ", p=" + std::to_string(p) + " after " + std::to_string(max_retries) +
                          " attempts");
}

Graph generate_small_world(int n, double rewire_p, double w_low, double w_high, uint64_t seed,
                           int max_retries) {
  if (n < 8) fail(Errc::invalid_argument, "generate_small_world: n must be >= 8");
  if (!(rewire_p >= 0.0 && rewire_p < 1.0))
    fail(Errc::invalid_argument, "generate_small_world: rewire_p must be in [0, 1)");
  if (w_low > w_high) fail(Errc::invalid_argument, "generate_small_world: w_low > w_high");

  static const int offsets[] = {-1, 1, 2, 3};
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(seed + static_cast<uint64_t>(attempt));
    std::vector<std::set<int>> out(n);
    for (int i = 0; i < n; ++i)
      for (int off : offsets) out[i].insert(((i + off) % n + n) % n);

    for (int i = 0; i < n; ++i) {
      for (int off : offsets) {
        int tgt = ((i + off) % n + n) % n;
        if (!out[i].count(tgt)) continue;  // already rewired away
        if (rng.uniform() >= rewire_p) continue;
        int fresh;
        do {
          fresh = static_cast<int>(rng.index(static_cast<uint64_t>(n)));
        } while (fresh == i || out[i].count(fresh));
        out[i].erase(tgt);
        out[i].insert(fresh);
      }
    }

    Graph g(n);
    for (int i = 0; i < n; ++i)
      for (int tgt : out[i]) g.set_weight(i, tgt, rng.uniform(w_low, w_high));
    if (is_strongly_connected(g)) return g;
  }
  fail(Errc::numeric, "generate_small_world: no strongly connected graph with n=" +
                          std::to_string(n) + ", rewire_p=" + std::to_string(rewire_p) +
                          " after " + std::to_string(max_retries) + " attempts");
}

// --- perturbation --------------------------------------------------------

void validate_edge_set(const EdgeList& F, int n) {
  std::set<std::pair<int, int>> seen;
  for (const auto& e : F) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      fail(Errc::invalid_argument, "edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                                       ") out of range for n=" + std::to_string(n));
    if (e.src == e.dst)
      fail(Errc::invalid_argument, "edge set contains self-loop at " + std::to_string(e.src));
    if (!seen.insert({e.src, e.dst}).second)
      fail(Errc::invalid_argument, "duplicate edge (" + std::to_string(e.src) + ", " +
                                       std::to_string(e.dst) + ") in edge set");
  }
}

Graph apply_perturbation(const Graph& g, const EdgeList& F, double eps) {
  validate_edge_set(F, g.order());
  Graph out = g;
  for (const auto& e : F) out.set_weight(e.src, e.dst, out.weight(e.src, e.dst) + eps);
  return out;
}

}  // namespace specnet
