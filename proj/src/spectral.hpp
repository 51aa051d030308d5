#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

#include "graph.hpp"
#include "types.hpp"

namespace specnet {

/// L = D - A with D = diag of row sums of A, so L * 1 = 0 exactly in the
/// arithmetic of the stored weights.
Eigen::MatrixXd build_laplacian(const Graph& g);

/// One LU factorization of the bordered matrix [[L^T, 1], [1^T, 0]], reused
/// for the stationary vector and for every edgewise stationary derivative.
/// Carries the content hash of the graph it was built from; solves against a
/// different graph are a contract violation.
class BorderedSolver {
 public:
  BorderedSolver(const Eigen::MatrixXd& L, uint64_t graph_hash);

  /// xi with xi^T L = 0 and 1^T xi = 1. Residual above 1e-10 * ||L||_F means
  /// the zero eigenvalue is not simple (or the graph is disconnected).
  Eigen::VectorXd stationary() const;

  /// d xi for a unit perturbation of edge src -> dst: solves
  /// L^T d = -xi_dst (e_dst - e_src) subject to 1^T d = 0.
  Eigen::VectorXd stationary_derivative(int src, int dst, const Eigen::VectorXd& xi) const;

  uint64_t graph_hash() const { return graph_hash_; }

 private:
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs_top, double rhs_bottom) const;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  const Eigen::MatrixXd L_;  // kept for residual checks
  double l_norm_;
  uint64_t graph_hash_;
};

/// Convenience wrapper: factor, solve, residual-check, positivity-check.
Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& L);

struct KappaResult {
  double kappa;
  Eigen::VectorXd v;  // unit eigenvector of M at kappa, sign-fixed
  Eigen::VectorXd y;  // Xi^{-1/2} v
  double lambda1;     // smallest eigenvalue of M (zero mode)
  double lambda3;     // third smallest
  double m_norm;      // Frobenius norm of M
};

/// M = Xi^{-1/2} (Xi L + L^T Xi)/2 Xi^{-1/2}; kappa = lambda_2(M) from a full
/// symmetric eigendecomposition. Sign convention: the largest-magnitude entry
/// of v is positive, ties broken by lowest index.
KappaResult generalized_connectivity(const Eigen::MatrixXd& L, const Eigen::VectorXd& xi);

struct AssumptionReport {
  bool a1 = false, a2 = false, a3 = false;
  double a1_zero_gap = 0;         // second-smallest |lambda(L)|
  double a1_min_re_nonzero = 0;   // min real part among nonzero eigenvalues
  double a2_min_xi = 0;
  double a3_lambda1 = 0;          // lambda_1(M)
  double a3_gap = 0;              // lambda_3(M) - lambda_2(M)
  double a3_kappa = 0;
  bool pass() const { return a1 && a2 && a3; }
  std::string describe() const;   // one line per assumption with margins
};

/// Full spectral summary of one graph. `analyze` never rejects a graph on
/// assumption grounds: fields that cannot be computed are left NaN/empty and
/// the report says why. `analyze_strict` throws Errc::assumption instead.
struct SpectralState {
  Eigen::MatrixXd laplacian;
  Eigen::VectorXd xi;        // empty when the bordered solve fails
  double kappa = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd v, y;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  AssumptionReport report;
  uint64_t graph_hash = 0;
};

SpectralState analyze(const Graph& g);
SpectralState analyze_strict(const Graph& g);

AssumptionReport check_assumptions(const Graph& g);

/// Prop.-3 bound: sum of all edge weights divided by n - 1.
double kappa_upper_bound(const Graph& g);

/// The eigenvalue branch attaining gamma = min Re over nonzero spectrum of L,
/// with right/left eigenvectors normalized to p^* x = 1. Margin is the
/// distance from gamma to the next distinct real part (infinity if none).
struct GammaState {
  double gamma;
  std::complex<double> lambda;
  Eigen::VectorXcd x;  // right eigenvector
  Eigen::VectorXcd p;  // left eigenvector, p^* x = 1
  double margin;
};

/// Throws Errc::assumption when A1 fails or when the minimum real part is
/// attained by two or more distinct branches (conjugate pairs count as one).
GammaState gamma_state(const Eigen::MatrixXd& L);

/// Just the value of gamma (NaN if A1 fails); never throws on multiplicity.
double gamma_value(const Eigen::MatrixXd& L);

/// Export with 17-significant-digit numbers: kappa, gamma, xi, y, margins.
std::string spectral_to_json(const SpectralState& s);

}  // namespace specnet
