#include "sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "textio.hpp"

namespace specnet {

namespace {

void require_usable(const SpectralState& state, const BorderedSolver& solver) {
  if (state.graph_hash != solver.graph_hash())
    fail(Errc::invalid_argument,
         "stale factorization: solver was built from a different graph than the spectral state");
  if (!state.report.pass())
    fail(Errc::assumption, "sensitivities need A1-A3: " + state.report.describe());
}

EdgeSensitivity sensitivity_one(const SpectralState& state, Edge e, const BorderedSolver& solver,
                                const Eigen::VectorXd& yz) {
  EdgeSensitivity s;
  s.edge = e;
  const int i = e.dst, j = e.src;
  s.cut_energy = state.xi(i) * state.y(i) * (state.y(i) - state.y(j));
  s.d_xi = solver.stationary_derivative(e.src, e.dst, state.xi);
  s.redistribution = s.d_xi.dot(yz);
  s.total = s.cut_energy + s.redistribution;
  return s;
}

}  // namespace

EdgeSensitivity kappa_sensitivity_edge(const SpectralState& state, Edge e,
                                       const BorderedSolver& solver) {
  require_usable(state, solver);
  validate_edge_set({e}, static_cast<int>(state.laplacian.rows()));
  Eigen::VectorXd z = (state.laplacian - state.kappa * Eigen::MatrixXd::Identity(
                                             state.laplacian.rows(), state.laplacian.cols())) *
                      state.y;
  Eigen::VectorXd yz = state.y.cwiseProduct(z);
  return sensitivity_one(state, e, solver, yz);
}

SetSensitivity kappa_sensitivity_set(const SpectralState& state, const EdgeList& F,
                                     const BorderedSolver& solver, int threads) {
  require_usable(state, solver);
  validate_edge_set(F, static_cast<int>(state.laplacian.rows()));

  SetSensitivity out;
  out.edges = F;
  out.per_edge.resize(F.size());

  Eigen::VectorXd z = (state.laplacian - state.kappa * Eigen::MatrixXd::Identity(
                                             state.laplacian.rows(), state.laplacian.cols())) *
                      state.y;
  Eigen::VectorXd yz = state.y.cwiseProduct(z);

  auto work = [&](size_t begin, size_t end) {
    for (size_t k = begin; k < end; ++k)
      out.per_edge[k] = sensitivity_one(state, F[k], solver, yz);
  };

  if (threads <= 1 || F.size() < 2) {
    work(0, F.size());
  } else {
    size_t nw = std::min<size_t>(threads, F.size());
    std::vector<std::thread> pool;
    size_t chunk = (F.size() + nw - 1) / nw;
    for (size_t w = 0; w < nw; ++w) {
      size_t b = w * chunk, e = std::min(F.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& t : pool) t.join();
  }

  // Sequential reduction in input order keeps the sum independent of the
  // thread count.
  out.total = 0.0;
  for (const auto& s : out.per_edge) out.total += s.total;
  return out;
}

double redistribution_via_cd(const SpectralState& state, const Eigen::VectorXd& d_xi) {
  if (!state.report.pass())
    fail(Errc::assumption, "redistribution_via_cd needs A1-A3: " + state.report.describe());
  const Eigen::MatrixXd& L = state.laplacian;
  Eigen::MatrixXd xl = state.xi.asDiagonal() * L;
  Eigen::MatrixXd C = xl - xl.transpose();
  Eigen::VectorXd cy = C * state.y;
  double r = 0.0;
  for (int k = 0; k < state.y.size(); ++k)
    r += state.y(k) * (d_xi(k) / state.xi(k)) * cy(k);
  return 0.5 * r;
}

double gamma_sensitivity(const GammaState& gs, const EdgeList& F) {
  double total = 0.0;
  for (const auto& e : F) {
    const int i = e.dst, j = e.src;
    total += std::real(std::conj(gs.p(i)) * (gs.x(i) - gs.x(j)));
  }
  return total;
}

FdCheck finite_difference_check(const Graph& g, const EdgeList& F, double h, Quantity q) {
  if (!(h > 0.0)) fail(Errc::invalid_argument, "finite_difference_check: h must be positive");
  validate_edge_set(F, g.order());

  FdCheck out;
  if (q == Quantity::kappa) {
    SpectralState state = analyze_strict(g);
    BorderedSolver solver(state.laplacian, state.graph_hash);
    out.analytic = kappa_sensitivity_set(state, F, solver).total;
  } else {
    out.analytic = gamma_sensitivity(gamma_state(build_laplacian(g)), F);
  }

  auto evaluate = [&](double eps, const char* side) {
    Graph gp = apply_perturbation(g, F, eps);
    if (q == Quantity::kappa) {
      SpectralState s = analyze(gp);
      if (!s.report.pass())
        fail(Errc::assumption, std::string("finite_difference_check: ") + side +
                                   " perturbation fails assumptions: " + s.report.describe());
      return s.kappa;
    }
    double gv = gamma_value(build_laplacian(gp));
    if (!std::isfinite(gv))
      fail(Errc::assumption,
           std::string("finite_difference_check: ") + side + " perturbation violates A1");
    return gv;
  };

  double plus = evaluate(h, "+h");
  double minus = evaluate(-h, "-h");
  out.numeric = (plus - minus) / (2.0 * h);
  out.rel_err = std::abs(out.numeric - out.analytic) / std::max(std::abs(out.analytic), 1e-12);
  return out;
}

std::vector<SweepPoint> kappa_sweep(const Graph& g, const EdgeList& F, double eps_min,
                                    double eps_max, int points) {
  if (points < 2) fail(Errc::invalid_argument, "kappa_sweep: need at least 2 points");
  if (!(eps_min < eps_max)) fail(Errc::invalid_argument, "kappa_sweep: eps_min must be < eps_max");
  validate_edge_set(F, g.order());

  std::vector<SweepPoint> out;
  out.reserve(points);
  for (int k = 0; k < points; ++k) {
    double eps = eps_min + (eps_max - eps_min) * k / (points - 1);
    SweepPoint pt;
    pt.eps = eps;
    pt.kappa = pt.total = pt.cut_energy = pt.redistribution =
        std::numeric_limits<double>::quiet_NaN();
    Graph gp = apply_perturbation(g, F, eps);
    SpectralState s = analyze(gp);
    if (s.report.pass()) {
      pt.kappa = s.kappa;
      BorderedSolver solver(s.laplacian, s.graph_hash);
      SetSensitivity ss = kappa_sensitivity_set(s, F, solver);
      pt.total = ss.total;
      pt.cut_energy = pt.redistribution = 0.0;
      for (const auto& es : ss.per_edge) {
        pt.cut_energy += es.cut_energy;
        pt.redistribution += es.redistribution;
      }
    }
    out.push_back(pt);
  }
  return out;
}

std::string sensitivity_report_json(const SetSensitivity& s) {
  std::vector<const EdgeSensitivity*> order;
  order.reserve(s.per_edge.size());
  for (const auto& e : s.per_edge) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const EdgeSensitivity* a, const EdgeSensitivity* b) {
    if (a->total != b->total) return a->total < b->total;
    return a->edge < b->edge;
  });

  std::ostringstream os;
  os << "{\"total\": " << json_number(s.total) << ", \"edges\": [";
  bool first = true;
  for (const auto* e : order) {
    if (!first) os << ", ";
    first = false;
    os << "{\"src\": " << e->edge.src << ", \"dst\": " << e->edge.dst
       << ", \"total\": " << json_number(e->total)
       << ", \"cut_energy\": " << json_number(e->cut_energy)
       << ", \"redistribution\": " << json_number(e->redistribution) << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace specnet
