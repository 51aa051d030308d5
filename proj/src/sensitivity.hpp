#pragma once

#include <string>
#include <vector>

#include "spectral.hpp"

namespace specnet {

/// First-order response of kappa to a unit perturbation of one directed edge,
/// split into the local cut-energy part and the global stationary
/// redistribution part (total is their sum by construction).
struct EdgeSensitivity {
  Edge edge;
  double total = 0;
  double cut_energy = 0;      // xi_i y_i (y_i - y_j) for edge j -> i
  double redistribution = 0;  // y^T (d xi) (L - kappa I) y
  Eigen::VectorXd d_xi;
};

struct SetSensitivity {
  EdgeList edges;
  double total = 0;  // sum of per-edge totals (additivity)
  std::vector<EdgeSensitivity> per_edge;
};

/// Requires a state passing all assumptions and a factorization built from
/// the same graph (hash-checked). One O(n^2) bordered back-solve per edge.
EdgeSensitivity kappa_sensitivity_edge(const SpectralState& state, Edge e,
                                       const BorderedSolver& solver);

/// Per-edge results in the order of F; `threads` > 1 fans the independent
/// edge solves out over that many workers with identical results.
SetSensitivity kappa_sensitivity_set(const SpectralState& state, const EdgeList& F,
                                     const BorderedSolver& solver, int threads = 1);

/// Independent route for the redistribution term: (1/2) y^T D C y with
/// C = Xi L - L^T Xi and D = diag(d_xi) Xi^{-1}.
double redistribution_via_cd(const SpectralState& state, const Eigen::VectorXd& d_xi);

/// Eq.-style first-order variation of gamma over an edge set:
/// sum of Re(conj(p_i) (x_i - x_j)).
double gamma_sensitivity(const GammaState& gs, const EdgeList& F);

enum class Quantity { kappa, gamma };

struct FdCheck {
  double analytic = 0;
  double numeric = 0;
  double rel_err = 0;
};

/// Central difference (q(A + h E_F) - q(A - h E_F)) / 2h against the analytic
/// derivative at A. Both displaced graphs must satisfy the assumptions the
/// quantity needs; failures name the side.
FdCheck finite_difference_check(const Graph& g, const EdgeList& F, double h, Quantity q);

struct SweepPoint {
  double eps;
  double kappa;           // NaN where assumptions fail at this eps
  double total;           // d kappa / d eps at this eps (NaN if unavailable)
  double cut_energy;
  double redistribution;
};

/// kappa(eps) and its analytic derivative along A + eps E_F on a uniform grid.
std::vector<SweepPoint> kappa_sweep(const Graph& g, const EdgeList& F, double eps_min,
                                    double eps_max, int points);

/// JSON report: per-edge entries sorted by total ascending plus the set total.
std::string sensitivity_report_json(const SetSensitivity& s);

}  // namespace specnet
