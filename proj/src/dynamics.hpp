#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "graph.hpp"
#include "modify.hpp"

namespace specnet {

/// dx/dt = drift * sin(x) - coupling * L x
struct FirstOrderSystem {
  Eigen::MatrixXd laplacian;
  double coupling = 1.65e-3;
  double drift = 0.1;
};

/// dx/dt = v,  dv/dt = drift * (tanh(x) + tanh(v)) - alpha L x - beta L v
struct SecondOrderSystem {
  Eigen::MatrixXd laplacian;
  double alpha = 40.0;
  double beta = 0.0158;
  double drift = 0.1;
};

struct SimConfig {
  double t_end = 300.0;
  double dt_sample = 0.05;
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_scale = 0.02;
  uint64_t seed = 0;
};

void validate_sim_config(const SimConfig& cfg);

struct TrajectoryResult {
  std::vector<double> times;
  Eigen::MatrixXd states;      // one column per sample time
  Eigen::MatrixXd velocities;  // empty for first-order runs
  std::vector<double> e_series;
};

/// Seeded standard-normal initial condition scaled by `scale`.
Eigen::VectorXd gaussian_initial(int n, double scale, uint64_t seed);

TrajectoryResult integrate(const FirstOrderSystem& sys, const SimConfig& cfg,
                           const Eigen::VectorXd& x0);
TrajectoryResult integrate(const SecondOrderSystem& sys, const SimConfig& cfg,
                           const Eigen::VectorXd& x0, const Eigen::VectorXd& v0);

/// Mean-square deviation from the per-sample network average; the velocity
/// block, when present, contributes the same form additively.
std::vector<double> error_series(const Eigen::MatrixXd& states, const Eigen::MatrixXd& velocities);

/// Trapezoid average of e over [t_start, t_start + window] on the sample grid.
double windowed_error(const std::vector<double>& e, const std::vector<double>& times,
                      double t_start, double window);

struct ExperimentRow {
  int step = 0;
  double kappa = 0;
  double e_window = 0;
};

/// Integrates the same seeded initial condition on every graph along a
/// modification trace and reports kappa and the windowed error per step.
/// System parameters come from `first` / `second`; exactly one is used.
struct ExperimentSystem {
  bool second_order = false;
  double coupling = 1.65e-3;  // first order
  double alpha = 40.0;        // second order
  double beta = 0.0158;
  double drift = 0.1;
};

std::vector<ExperimentRow> run_experiment(const ModificationTrace& trace,
                                          const ExperimentSystem& sys, const SimConfig& cfg,
                                          double window_start, double window_width);

std::string trajectory_to_csv(const TrajectoryResult& t);
std::string experiment_to_csv(const std::vector<ExperimentRow>& rows);

}  // namespace specnet
