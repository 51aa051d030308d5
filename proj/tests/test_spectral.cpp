#include <doctest.h>

#include <cmath>

#include "graph.hpp"
#include "spectral.hpp"

using namespace specnet;

namespace {

Graph make_k2(double a12 = 1.0, double a21 = 1.0) {
  Graph g(2);
  g.set_weight(1, 0, a12);  // edge 2 -> 1 carries a_12
  g.set_weight(0, 1, a21);
  return g;
}

Graph make_cycle3() {
  Graph g(3);
  g.set_weight(0, 1, 1);
  g.set_weight(1, 2, 1);
  g.set_weight(2, 0, 1);
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

}  // namespace

TEST_CASE("laplacian of K2 and the 3-cycle") {
  Eigen::MatrixXd L = build_laplacian(make_k2());
  CHECK(L(0, 0) == 1.0);
  CHECK(L(0, 1) == -1.0);
  CHECK(L(1, 0) == -1.0);
  CHECK(L(1, 1) == 1.0);

  Eigen::MatrixXd Lc = build_laplacian(make_cycle3());
  // 1->2->3->1: a_21 = a_32 = a_13 = 1
  CHECK(Lc(1, 0) == -1.0);
  CHECK(Lc(2, 1) == -1.0);
  CHECK(Lc(0, 2) == -1.0);
  for (int i = 0; i < 3; ++i) CHECK(Lc(i, i) == 1.0);
  CHECK((Lc * Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian of an edgeless matrix is zero") {
  Graph g(3);
  CHECK(build_laplacian(g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stationary vector: symmetric, cycle, asymmetric K2") {
  Eigen::VectorXd xi = stationary_vector(build_laplacian(symmetrize_er(7, 0.5, 3)));
  for (int i = 0; i < 7; ++i) CHECK(xi(i) == doctest::Approx(1.0 / 7).epsilon(1e-12));

  Eigen::VectorXd xc = stationary_vector(build_laplacian(make_cycle3()));
  for (int i = 0; i < 3; ++i) CHECK(xc(i) == doctest::Approx(1.0 / 3).epsilon(1e-12));

  double eps = 0.25;
  Eigen::VectorXd xa = stationary_vector(build_laplacian(make_k2(1 + eps, 1)));
  CHECK(xa(0) == doctest::Approx(1.0 / (2 + eps)).epsilon(1e-13));
  CHECK(xa(1) == doctest::Approx((1 + eps) / (2 + eps)).epsilon(1e-13));
}

TEST_CASE("stationary vector rejects disconnected graphs") {
  Graph g(4);
  g.set_weight(0, 1, 1);
  g.set_weight(1, 0, 1);
  g.set_weight(2, 3, 1);
  g.set_weight(3, 2, 1);
  try {
    stationary_vector(build_laplacian(g));
    FAIL("expected assumption error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::assumption);
  }
}

TEST_CASE("generalized connectivity on K2") {
  Graph g = make_k2();
  SpectralState s = analyze(g);
  CHECK(s.report.pass());
  CHECK(s.kappa == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.y(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.y(1) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("asymmetric K2: kappa = tr(L) = 2 + eps") {
  double eps = 0.25;
  SpectralState s = analyze(make_k2(1 + eps, 1));
  CHECK(s.report.pass());
  CHECK(s.kappa == doctest::Approx(2 + eps).epsilon(1e-12));
}

TEST_CASE("K3 exercises the A3 multiplicity failure with kappa = 3") {
  Graph g(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) g.set_weight(i, j, 1.0);
  SpectralState s = analyze(g);
  CHECK(s.kappa == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(!s.report.a3);  // lambda_2 = lambda_3 = n
  CHECK(s.report.a1);
  CHECK(s.report.a2);
  CHECK_THROWS_AS(analyze_strict(g), Error);
}

TEST_CASE("assumption triad on the named examples") {
  CHECK(check_assumptions(generate_layered()).pass());

  AssumptionReport cyc = check_assumptions(make_cycle3());
  CHECK(cyc.a1);
  CHECK(cyc.a2);
  CHECK(!cyc.a3);  // (L + L^T)/2 is the half-weight triangle: 3/2 double
  CHECK(cyc.a3_kappa == doctest::Approx(1.5).epsilon(1e-10));

  Graph two(4);
  two.set_weight(0, 1, 1);
  two.set_weight(1, 0, 1);
  two.set_weight(2, 3, 1);
  two.set_weight(3, 2, 1);
  CHECK(!check_assumptions(two).a1);
}

TEST_CASE("gamma on K2, the directed cycle, and the ambiguous star") {
  Eigen::MatrixXd L2 = build_laplacian(make_k2());
  GammaState g2 = gamma_state(L2);
  CHECK(g2.gamma == doctest::Approx(2.0).epsilon(1e-12));

  GammaState gc = gamma_state(build_laplacian(make_cycle3()));
  CHECK(gc.gamma == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::abs(gc.lambda.imag()) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));

  // undirected star K_{1,3}: Laplacian spectrum {0, 1, 1, 4}
  Graph star(4);
  for (int leaf = 1; leaf < 4; ++leaf) {
    star.set_weight(0, leaf, 1);
    star.set_weight(leaf, 0, 1);
  }
  CHECK(gamma_value(build_laplacian(star)) == doctest::Approx(1.0).epsilon(1e-10));
  try {
    gamma_state(build_laplacian(star));
    FAIL("expected branch ambiguity");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::assumption);
    CHECK(std::string(e.what()).find("ambiguity") != std::string::npos);
  }
}

TEST_CASE("gamma left/right eigenvectors satisfy their definitions") {
  Graph g = generate_er(12, 0.3, 0.6, 1.4, 17);
  Eigen::MatrixXd L = build_laplacian(g);
  GammaState gs = gamma_state(L);
  double scale = L.norm();
  CHECK((L * gs.x - gs.lambda * gs.x).norm() <= 1e-9 * scale);
  CHECK((gs.p.adjoint() * L - gs.lambda * gs.p.adjoint()).norm() <= 1e-9 * scale);
  std::complex<double> one = gs.p.dot(gs.x);
  CHECK(std::abs(one - 1.0) <= 1e-10);
}

TEST_CASE("spectral invariants across random generated graphs") {
  int checked = 0;
  for (uint64_t seed = 1; checked < 100; ++seed) {
    Graph g = seed % 2 ? generate_er(10 + 2 * (seed % 5), 0.3, 0.6, 1.4, seed)
                       : generate_small_world(12 + (seed % 4), 0.2, 0.6, 1.4, seed);
    SpectralState s = analyze(g);
    if (!s.report.pass()) continue;
    ++checked;

    const Eigen::MatrixXd& L = s.laplacian;
    double l_norm = L.norm();
    int n = g.order();

    CHECK((L * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12 * l_norm);
    CHECK((L.transpose() * s.xi).norm() <= 1e-10 * l_norm);
    CHECK(std::abs(s.xi.sum() - 1.0) <= 1e-10);

    // generalized eigenpair residual and normalization
    Eigen::MatrixXd sym = 0.5 * (s.xi.asDiagonal() * L + L.transpose() * s.xi.asDiagonal());
    CHECK((sym * s.y - s.kappa * s.xi.asDiagonal() * s.y).norm() <= 1e-8 * l_norm);
    CHECK(std::abs(s.y.dot(s.xi.asDiagonal() * s.y) - 1.0) <= 1e-10);

    // trace identity and the Prop.-3 bound
    Eigen::VectorXd inv_sqrt = s.xi.array().sqrt().inverse();
    Eigen::MatrixXd M = inv_sqrt.asDiagonal() * sym * inv_sqrt.asDiagonal();
    CHECK(std::abs(M.trace() - L.trace()) <= 1e-10 * std::max(1.0, l_norm));
    CHECK(std::abs(s.report.a3_lambda1) <= 1e-8 * std::max(1.0, M.norm()));
    CHECK(s.kappa <= kappa_upper_bound(g) + 1e-10);

    // sign convention: the largest-magnitude entry of v is positive
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(s.v(i)) > std::abs(s.v(imax))) imax = i;
    CHECK(s.v(imax) > 0.0);
  }
  CHECK(checked == 100);
}

TEST_CASE("symmetric adjacency: xi uniform and kappa = lambda_2(L)") {
  for (uint64_t seed : {1, 2, 3}) {
    Graph g = symmetrize_er(9, 0.4, seed);
    SpectralState s = analyze(g);
    REQUIRE(s.report.pass());
    for (int i = 0; i < 9; ++i) CHECK(std::abs(s.xi(i) - 1.0 / 9) <= 1e-12);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.laplacian);
    CHECK(std::abs(s.kappa - es.eigenvalues()(1)) <= 1e-10);
  }
}

TEST_CASE("trace bound is tight on K2") {
  SpectralState s = analyze(make_k2());
  CHECK(std::abs(s.kappa - kappa_upper_bound(make_k2())) <= 1e-12);
}

TEST_CASE("spectral json export carries kappa and margins") {
  std::string js = spectral_to_json(analyze(make_k2()));
  auto pos = js.find("\"kappa\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(js.substr(pos + 9)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(js.find("\"assumptions\"") != std::string::npos);
  CHECK(js.find("\"pass\": true") != std::string::npos);
}
