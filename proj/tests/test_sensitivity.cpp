#include <doctest.h>

#include <cmath>

#include "graph.hpp"
#include "sensitivity.hpp"

using namespace specnet;

namespace {

Graph make_k2(double a12 = 1.0, double a21 = 1.0) {
  Graph g(2);
  g.set_weight(1, 0, a12);
  g.set_weight(0, 1, a21);
  return g;
}

Graph symmetrize_er(int n, double p, uint64_t seed) {
  Graph d = generate_er(n, p, 0.6, 1.4, seed);
  Graph g(n);
  for (const auto& e : d.edges()) {
    g.set_weight(e.src, e.dst, e.weight);
    g.set_weight(e.dst, e.src, e.weight);
  }
  return g;
}

struct Setup {
  SpectralState state;
  BorderedSolver solver;
  explicit Setup(const Graph& g)
      : state(analyze_strict(g)), solver(state.laplacian, state.graph_hash) {}
};

}  // namespace

TEST_CASE("K2 closed form: cut energy 1, redistribution 0") {
  Setup s(make_k2());
  EdgeSensitivity es = kappa_sensitivity_edge(s.state, {1, 0}, s.solver);  // edge 2 -> 1
  CHECK(es.cut_energy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(es.redistribution) <= 1e-12);
  CHECK(es.total == doctest::Approx(1.0).epsilon(1e-12));
  // d xi for this edge has the closed form (-1/4, 1/4)
  CHECK(es.d_xi(0) == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(es.d_xi(1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(es.d_xi.sum()) <= 1e-12);
}

TEST_CASE("kappa(eps) = 2 + eps for the one-sided K2 perturbation") {
  FdCheck fd = finite_difference_check(make_k2(), {{1, 0}}, 1e-5, Quantity::kappa);
  CHECK(fd.analytic == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fd.rel_err <= 1e-9);
}

TEST_CASE("undirected symmetric perturbation: redistribution vanishes, classic law") {
  Graph g = symmetrize_er(8, 0.5, 5);
  Setup s(g);
  int n = g.order();
  // pick two existing undirected pairs
  EdgeList F;
  for (const auto& e : g.edges()) {
    if (e.src < e.dst && F.size() < 4) {
      F.push_back({e.src, e.dst});
      F.push_back({e.dst, e.src});
    }
  }
  SetSensitivity ss = kappa_sensitivity_set(s.state, F, s.solver);
  double classic = 0;
  for (size_t k = 0; k < F.size(); k += 2) {
    int i = F[k].dst, j = F[k].src;
    classic += (s.state.y(i) - s.state.y(j)) * (s.state.y(i) - s.state.y(j)) / n;
  }
  CHECK(ss.total == doctest::Approx(classic).epsilon(1e-9));
  CHECK(ss.total >= 0.0);
  for (const auto& es : ss.per_edge) CHECK(std::abs(es.redistribution) <= 1e-10);
}

TEST_CASE("additivity: empty, singleton, disjoint union") {
  Graph g = generate_er(12, 0.3, 0.6, 1.4, 9);
  Setup s(g);

  SetSensitivity empty = kappa_sensitivity_set(s.state, {}, s.solver);
  CHECK(empty.total == 0.0);

  EdgeList f1 = {{0, 1}, {2, 5}};
  EdgeList f2 = {{3, 4}, {7, 2}};
  EdgeList both = f1;
  both.insert(both.end(), f2.begin(), f2.end());

  double t1 = kappa_sensitivity_set(s.state, f1, s.solver).total;
  double t2 = kappa_sensitivity_set(s.state, f2, s.solver).total;
  double tb = kappa_sensitivity_set(s.state, both, s.solver).total;
  CHECK(tb == doctest::Approx(t1 + t2).epsilon(1e-14));

  EdgeSensitivity single = kappa_sensitivity_edge(s.state, {0, 1}, s.solver);
  CHECK(kappa_sensitivity_set(s.state, {{0, 1}}, s.solver).total == single.total);
}

TEST_CASE("decomposition identity: direct redistribution equals (1/2) y^T D C y") {
  for (uint64_t seed : {2, 4, 6}) {
    Graph g = generate_er(14, 0.3, 0.6, 1.4, seed);
    Setup s(g);
    double l_norm = s.state.laplacian.norm();
    for (const auto& e : g.edges()) {
      EdgeSensitivity es = kappa_sensitivity_edge(s.state, {e.src, e.dst}, s.solver);
      double alt = redistribution_via_cd(s.state, es.d_xi);
      CHECK(std::abs(es.redistribution - alt) <= 1e-9 * l_norm);
    }
  }
}

TEST_CASE("y^T C y = 0 (skew symmetry)") {
  Graph g = generate_er(15, 0.3, 0.6, 1.4, 21);
  Setup s(g);
  Eigen::MatrixXd xl = s.state.xi.asDiagonal() * s.state.laplacian;
  Eigen::MatrixXd C = xl - xl.transpose();
  CHECK(std::abs(s.state.y.dot(C * s.state.y)) <= 1e-10);
}

TEST_CASE("homogeneity: kappa scales with the weights, unit-eps sensitivities do not") {
  // kappa(cA) = c kappa(A); since kappa(cA + eps E) = c kappa(A + (eps/c) E),
  // the per-unit-eps derivative is invariant under the scaling. Both facts
  // are checked against finite differences.
  Graph g = generate_er(10, 0.3, 0.6, 1.4, 13);
  Graph g2(g.order());
  for (const auto& e : g.edges()) g2.set_weight(e.src, e.dst, 2.0 * e.weight);
  Setup a(g), b(g2);
  CHECK(b.state.kappa == doctest::Approx(2.0 * a.state.kappa).epsilon(1e-10));
  for (const auto& e : g.edges()) {
    double da = kappa_sensitivity_edge(a.state, {e.src, e.dst}, a.solver).total;
    double db = kappa_sensitivity_edge(b.state, {e.src, e.dst}, b.solver).total;
    CHECK(db == doctest::Approx(da).epsilon(1e-9));
  }
  FdCheck fd = finite_difference_check(g2, {{0, 1}}, 1e-5, Quantity::kappa);
  CHECK(fd.rel_err <= 1e-4);
}

TEST_CASE("stale factorization is rejected") {
  Graph g = generate_er(8, 0.4, 0.6, 1.4, 3);
  Graph h = apply_perturbation(g, {{0, 1}}, 0.25);
  SpectralState sg = analyze_strict(g);
  SpectralState sh = analyze_strict(h);
  BorderedSolver wrong(sh.laplacian, sh.graph_hash);
  try {
    kappa_sensitivity_edge(sg, {0, 1}, wrong);
    FAIL("expected contract violation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
    CHECK(std::string(e.what()).find("stale") != std::string::npos);
  }
}

TEST_CASE("threaded sweep matches the sequential one bit for bit") {
  Graph g = generate_er(16, 0.3, 0.6, 1.4, 33);
  Setup s(g);
  EdgeList F;
  for (const auto& e : g.edges()) F.push_back({e.src, e.dst});
  SetSensitivity seq = kappa_sensitivity_set(s.state, F, s.solver, 1);
  SetSensitivity par = kappa_sensitivity_set(s.state, F, s.solver, 4);
  REQUIRE(seq.per_edge.size() == par.per_edge.size());
  CHECK(seq.total == par.total);
  for (size_t i = 0; i < seq.per_edge.size(); ++i)
    CHECK(seq.per_edge[i].total == par.per_edge[i].total);
}

TEST_CASE("gamma sensitivity: K2 symmetric pair gives exactly 2") {
  GammaState gs = gamma_state(build_laplacian(make_k2()));
  double d = gamma_sensitivity(gs, {{0, 1}, {1, 0}});
  CHECK(d == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("gamma sensitivity agrees with central differences") {
  for (uint64_t seed : {5, 8}) {
    Graph g = generate_er(12, 0.3, 0.6, 1.4, seed);
    GammaState gs = gamma_state(build_laplacian(g));
    if (gs.margin <= 1e-6) continue;
    EdgeList F = {{0, 1}, {3, 7}};
    FdCheck fd = finite_difference_check(g, F, 1e-5, Quantity::gamma);
    CHECK(fd.rel_err <= 1e-4);
  }
}

TEST_CASE("finite difference guards") {
  CHECK_THROWS_AS(finite_difference_check(make_k2(), {{1, 0}}, 0.0, Quantity::kappa), Error);

  // h large enough to disconnect the +h side: K2 with a -1 edge weight goes
  // through zero at eps = -1
  Graph g = make_k2();
  try {
    finite_difference_check(g, {{1, 0}, {0, 1}}, 1.0, Quantity::kappa);
    FAIL("expected assumption failure on one side");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::assumption);
    CHECK(std::string(e.what()).find("-h") != std::string::npos);
  }
}

TEST_CASE("layered graph: the demo edge set has negative set sensitivity") {
  Graph g = generate_layered();
  Setup s(g);
  EdgeList all;
  for (const auto& e : g.edges()) all.push_back({e.src, e.dst});
  SetSensitivity ss = kappa_sensitivity_set(s.state, all, s.solver);

  // three most negative existing edges plus the most negative absent pair
  std::vector<std::pair<double, Edge>> ranked;
  for (const auto& es : ss.per_edge) ranked.push_back({es.total, es.edge});
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  EdgeList F = {ranked[0].second, ranked[1].second, ranked[2].second};

  EdgeList absent;
  for (int src = 0; src < 10; ++src)
    for (int dst = 0; dst < 10; ++dst)
      if (src != dst && !g.has_edge(src, dst)) absent.push_back({src, dst});
  SetSensitivity sa = kappa_sensitivity_set(s.state, absent, s.solver);
  const EdgeSensitivity* best = &sa.per_edge.front();
  for (const auto& es : sa.per_edge)
    if (es.total < best->total) best = &es;
  F.push_back(best->edge);

  double total = kappa_sensitivity_set(s.state, F, s.solver).total;
  CHECK(total < 0.0);

  FdCheck fd = finite_difference_check(g, F, 1e-5, Quantity::kappa);
  CHECK(fd.rel_err <= 1e-4);
}

TEST_CASE("kappa sweep brackets the analytic derivative") {
  Graph g = generate_layered();
  Setup s(g);
  EdgeList F = {{8, 4}, {5, 2}};  // backward edges 9->5 and 6->3 (0-based)
  auto pts = kappa_sweep(g, F, -0.25, 0.25, 11);
  REQUIRE(pts.size() == 11);
  CHECK(pts.front().eps == doctest::Approx(-0.25));
  CHECK(pts.back().eps == doctest::Approx(0.25));
  // kappa decreasing in eps near 0 for this negatively sensitive pair
  CHECK(pts[5].total < 0.0);
  CHECK(pts[4].kappa > pts[6].kappa);
  for (const auto& p : pts) {
    CHECK(std::isfinite(p.kappa));
    CHECK(p.total == doctest::Approx(p.cut_energy + p.redistribution).epsilon(1e-12));
  }
}

TEST_CASE("sensitivity report json is sorted by total") {
  Graph g = generate_layered();
  Setup s(g);
  EdgeList F = {{0, 1}, {8, 4}, {1, 3}};
  SetSensitivity ss = kappa_sensitivity_set(s.state, F, s.solver);
  std::string js = sensitivity_report_json(ss);
  CHECK(js.find("\"total\"") != std::string::npos);
  size_t first = js.find("\"src\"");
  size_t last = js.rfind("\"src\"");
  CHECK(first != std::string::npos);
  CHECK(first != last);
}
