#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "textio.hpp"

namespace specnet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double eig_tol(double mat_norm) { return 1e-8 * std::max(1.0, mat_norm); }
}  // namespace

Eigen::MatrixXd build_laplacian(const Graph& g) {
  const Eigen::MatrixXd& A = g.adjacency();
  Eigen::MatrixXd L = -A;
  for (int i = 0; i < A.rows(); ++i) L(i, i) = A.row(i).sum();
  return L;
}

// --- bordered solver -------------------------------------------------------

BorderedSolver::BorderedSolver(const Eigen::MatrixXd& L, uint64_t graph_hash)
    : L_(L), l_norm_(L.norm()), graph_hash_(graph_hash) {
  const int n = static_cast<int>(L.rows());
  Eigen::MatrixXd H(n + 1, n + 1);
  H.topLeftCorner(n, n) = L.transpose();
  H.topRightCorner(n, 1).setOnes();
  H.bottomLeftCorner(1, n).setOnes();
  H(n, n) = 0.0;
  lu_.compute(H);
}

Eigen::VectorXd BorderedSolver::solve(const Eigen::VectorXd& rhs_top, double rhs_bottom) const {
  const int n = static_cast<int>(rhs_top.size());
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = rhs_top;
  rhs(n) = rhs_bottom;
  Eigen::VectorXd sol = lu_.solve(rhs);
  if (!sol.allFinite())
    fail(Errc::assumption, "bordered system is singular: A1 violated or graph disconnected");
  // Backward check of the full bordered system; catches near-singularity the
  // LU itself does not report.
  Eigen::VectorXd residual = L_.transpose() * sol.head(n) + Eigen::VectorXd::Constant(n, sol(n)) - rhs_top;
  double r = std::max(residual.norm(), std::abs(sol.head(n).sum() - rhs_bottom));
  if (r > 1e-10 * std::max(1.0, l_norm_))
    fail(Errc::assumption, "bordered solve residual " + fmt17(r) +
                               " too large: A1 violated or graph disconnected");
  return sol.head(n);
}

Eigen::VectorXd BorderedSolver::stationary() const {
  const int n = static_cast<int>(L_.rows());
  return solve(Eigen::VectorXd::Zero(n), 1.0);
}

Eigen::VectorXd BorderedSolver::stationary_derivative(int src, int dst,
                                                      const Eigen::VectorXd& xi) const {
  const int n = static_cast<int>(L_.rows());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(dst) -= xi(dst);
  rhs(src) += xi(dst);
  return solve(rhs, 0.0);
}

Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& L) {
  BorderedSolver solver(L, 0);
  Eigen::VectorXd xi = solver.stationary();
  if (xi.minCoeff() <= 0.0)
    fail(Errc::assumption, "stationary vector has a non-positive entry (min " +
                               fmt17(xi.minCoeff()) + "): A2 violated");
  return xi;
}

// --- generalized connectivity ----------------------------------------------

KappaResult generalized_connectivity(const Eigen::MatrixXd& L, const Eigen::VectorXd& xi) {
  const int n = static_cast<int>(L.rows());
  if (xi.size() != n || xi.minCoeff() <= 0.0)
    fail(Errc::invalid_argument, "generalized_connectivity requires an entrywise positive xi");

  Eigen::VectorXd inv_sqrt = xi.array().sqrt().inverse();
  Eigen::MatrixXd xl = xi.asDiagonal() * L;
  Eigen::MatrixXd sym = 0.5 * (xl + xl.transpose());
  Eigen::MatrixXd M = inv_sqrt.asDiagonal() * sym * inv_sqrt.asDiagonal();
  M = 0.5 * (M + M.transpose());  // symmetrize away rounding

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) fail(Errc::numeric, "symmetric eigensolver failed on M");

  KappaResult r;
  r.lambda1 = es.eigenvalues()(0);
  r.kappa = es.eigenvalues()(1);
  r.lambda3 = n >= 3 ? es.eigenvalues()(2) : kInf;
  r.m_norm = M.norm();
  r.v = es.eigenvectors().col(1);

  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(r.v(i)) > std::abs(r.v(imax))) imax = i;
  if (r.v(imax) < 0.0) r.v = -r.v;
  r.y = inv_sqrt.asDiagonal() * r.v;
  return r;
}

// --- assumptions / analysis --------------------------------------------------

std::string AssumptionReport::describe() const {
  std::ostringstream os;
  os << "A1 " << (a1 ? "pass" : "FAIL") << " (zero-gap=" << fmt17(a1_zero_gap)
     << ", min-re-nonzero=" << fmt17(a1_min_re_nonzero) << "); ";
  os << "A2 " << (a2 ? "pass" : "FAIL") << " (min-xi=" << fmt17(a2_min_xi) << "); ";
  os << "A3 " << (a3 ? "pass" : "FAIL") << " (lambda1=" << fmt17(a3_lambda1)
     << ", kappa=" << fmt17(a3_kappa) << ", gap=" << fmt17(a3_gap) << ")";
  return os.str();
}

SpectralState analyze(const Graph& g) {
  SpectralState s;
  s.graph_hash = g.content_hash();
  s.laplacian = build_laplacian(g);
  const int n = g.order();
  const double tol_l = eig_tol(s.laplacian.norm());

  Eigen::EigenSolver<Eigen::MatrixXd> es(s.laplacian, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) fail(Errc::numeric, "eigensolver failed on L");
  Eigen::VectorXcd lam = es.eigenvalues();

  std::vector<double> mags(n);
  for (int i = 0; i < n; ++i) mags[i] = std::abs(lam(i));
  std::sort(mags.begin(), mags.end());
  s.report.a1_zero_gap = n >= 2 ? mags[1] : 0.0;

  int zero_count = 0;
  double min_re = kInf;
  for (int i = 0; i < n; ++i) {
    if (std::abs(lam(i)) <= tol_l)
      ++zero_count;
    else
      min_re = std::min(min_re, lam(i).real());
  }
  s.report.a1_min_re_nonzero = min_re;
  s.report.a1 = zero_count == 1 && (min_re == kInf || min_re > 0.0);
  if (s.report.a1) s.gamma = min_re == kInf ? kNaN : min_re;

  BorderedSolver solver(s.laplacian, s.graph_hash);
  try {
    s.xi = solver.stationary();
  } catch (const Error&) {
    s.report.a2 = false;
    s.report.a2_min_xi = kNaN;
    return s;
  }
  s.report.a2_min_xi = s.xi.minCoeff();
  s.report.a2 = s.report.a2_min_xi > 0.0;
  if (!s.report.a2) return s;

  KappaResult k = generalized_connectivity(s.laplacian, s.xi);
  const double tol_m = eig_tol(k.m_norm);
  s.kappa = k.kappa;
  s.v = k.v;
  s.y = k.y;
  s.report.a3_lambda1 = k.lambda1;
  s.report.a3_kappa = k.kappa;
  s.report.a3_gap = k.lambda3 - k.kappa;
  s.report.a3 = std::abs(k.lambda1) <= tol_m && k.kappa > tol_m && s.report.a3_gap > tol_m;

  return s;
}

SpectralState analyze_strict(const Graph& g) {
  SpectralState s = analyze(g);
  if (!s.report.pass()) fail(Errc::assumption, "assumptions violated: " + s.report.describe());
  return s;
}

AssumptionReport check_assumptions(const Graph& g) { return analyze(g).report; }

double kappa_upper_bound(const Graph& g) {
  double total = 0.0;
  for (const auto& e : g.edges()) total += e.weight;
  return total / (g.order() - 1);
}

// --- gamma -------------------------------------------------------------------

double gamma_value(const Eigen::MatrixXd& L) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(L, false);
  if (es.info() != Eigen::Success) fail(Errc::numeric, "eigensolver failed on L");
  const double tol = eig_tol(L.norm());
  double g = kInf;
  int zero_count = 0;
  for (int i = 0; i < L.rows(); ++i) {
    if (std::abs(es.eigenvalues()(i)) <= tol)
      ++zero_count;
    else
      g = std::min(g, es.eigenvalues()(i).real());
  }
  if (zero_count != 1 || (g != kInf && g <= 0.0)) return kNaN;
  return g;
}

GammaState gamma_state(const Eigen::MatrixXd& L) {
  const int n = static_cast<int>(L.rows());
  const double tol = eig_tol(L.norm());

  Eigen::EigenSolver<Eigen::MatrixXd> right(L, true);
  if (right.info() != Eigen::Success) fail(Errc::numeric, "eigensolver failed on L");
  Eigen::VectorXcd lam = right.eigenvalues();

  std::vector<int> nonzero;
  int zero_count = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(lam(i)) <= tol)
      ++zero_count;
    else
      nonzero.push_back(i);
  }
  if (zero_count != 1)
    fail(Errc::assumption, "gamma: zero eigenvalue of L is not simple (A1 violated)");
  if (nonzero.empty()) fail(Errc::assumption, "gamma: L has no nonzero eigenvalues");

  double gamma = kInf;
  for (int i : nonzero) gamma = std::min(gamma, lam(i).real());
  if (gamma <= 0.0)
    fail(Errc::assumption, "gamma: nonzero eigenvalue with non-positive real part (A1 violated)");

  // Eigenvalues attaining the minimum real part; conjugate pairs are a single
  // branch, anything else at the same real part is an ambiguity.
  std::vector<int> attain;
  for (int i : nonzero)
    if (lam(i).real() - gamma <= tol) attain.push_back(i);

  std::vector<bool> used(attain.size(), false);
  int branches = 0;
  int chosen = -1;
  for (size_t a = 0; a < attain.size(); ++a) {
    if (used[a]) continue;
    used[a] = true;
    ++branches;
    std::complex<double> la = lam(attain[a]);
    if (chosen < 0) chosen = attain[a];
    if (std::abs(la.imag()) > tol) {
      if (la.imag() > 0.0) chosen = attain[a];
      for (size_t b = a + 1; b < attain.size(); ++b) {
        if (used[b]) continue;
        if (std::abs(lam(attain[b]) - std::conj(la)) <= 100.0 * tol) {
          used[b] = true;
          break;
        }
      }
    }
  }
  if (branches >= 2)
    fail(Errc::assumption,
         "gamma: minimum real part attained by " + std::to_string(branches) +
             " distinct eigenvalue branches (branch ambiguity)");

  double margin = kInf;
  for (int i : nonzero) {
    double d = lam(i).real() - gamma;
    if (d > tol) margin = std::min(margin, d);
  }

  GammaState out;
  out.gamma = gamma;
  out.lambda = lam(chosen);
  out.x = right.eigenvectors().col(chosen);
  out.margin = margin;

  Eigen::EigenSolver<Eigen::MatrixXd> left(L.transpose(), true);
  if (left.info() != Eigen::Success) fail(Errc::numeric, "eigensolver failed on L^T");
  std::complex<double> target = std::conj(out.lambda);
  int best = 0;
  double best_dist = kInf;
  for (int i = 0; i < n; ++i) {
    double d = std::abs(left.eigenvalues()(i) - target);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  if (best_dist > 100.0 * tol)
    fail(Errc::numeric, "gamma: no left eigenvalue matches the selected branch");
  Eigen::VectorXcd p = left.eigenvectors().col(best);
  std::complex<double> scale = p.dot(out.x);  // p^H x
  if (std::abs(scale) < 1e-12)
    fail(Errc::numeric, "gamma: left/right eigenvectors nearly orthogonal (defective branch)");
  out.p = p / std::conj(scale);
  return out;
}

// --- export ------------------------------------------------------------------

std::string spectral_to_json(const SpectralState& s) {
  std::ostringstream os;
  os << "{";
  os << "\"kappa\": " << json_number(s.kappa) << ", ";
  os << "\"gamma\": " << json_number(s.gamma) << ", ";
  os << "\"xi\": [";
  for (int i = 0; i < s.xi.size(); ++i) os << (i ? ", " : "") << json_number(s.xi(i));
  os << "], \"y\": [";
  for (int i = 0; i < s.y.size(); ++i) os << (i ? ", " : "") << json_number(s.y(i));
  os << "], \"assumptions\": {";
  os << "\"pass\": " << (s.report.pass() ? "true" : "false") << ", ";
  os << "\"a1\": {\"pass\": " << (s.report.a1 ? "true" : "false")
     << ", \"zero_gap\": " << json_number(s.report.a1_zero_gap)
     << ", \"min_re_nonzero\": " << json_number(s.report.a1_min_re_nonzero) << "}, ";
  os << "\"a2\": {\"pass\": " << (s.report.a2 ? "true" : "false")
     << ", \"min_xi\": " << json_number(s.report.a2_min_xi) << "}, ";
  os << "\"a3\": {\"pass\": " << (s.report.a3 ? "true" : "false")
     << ", \"lambda1\": " << json_number(s.report.a3_lambda1)
     << ", \"kappa\": " << json_number(s.report.a3_kappa)
     << ", \"gap\": " << json_number(s.report.a3_gap) << "}";
  os << "}}";
  return os.str();
}

}  // namespace specnet
