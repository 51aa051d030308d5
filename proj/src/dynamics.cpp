#include "dynamics.hpp"

#include <cmath>
#include <sstream>

#include "ode.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "textio.hpp"

namespace specnet {

void validate_sim_config(const SimConfig& cfg) {
  if (!(cfg.dt_sample > 0) || !(cfg.dt_sample < cfg.t_end))
    fail(Errc::invalid_argument, "sim: need 0 < dt_sample < t_end");
  if (!(cfg.rtol > 0) || !(cfg.atol > 0))
    fail(Errc::invalid_argument, "sim: tolerances must be > 0");
}

Eigen::VectorXd gaussian_initial(int n, double scale, uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = scale * rng.normal();
  return x;
}

namespace {

TrajectoryResult run_ode(const Dopri5& stepper, const Eigen::VectorXd& y0, int n, bool second,
                         const SimConfig& cfg) {
  long samples = static_cast<long>(std::floor(cfg.t_end / cfg.dt_sample + 1e-9)) + 1;
  TrajectoryResult out;
  out.times.reserve(samples);
  out.states.resize(n, samples);
  if (second) out.velocities.resize(n, samples);

  long col = 0;
  stepper.integrate(y0, 0.0, cfg.t_end, cfg.dt_sample, [&](double t, const Eigen::VectorXd& y) {
    if (col >= samples) return;
    out.times.push_back(t);
    out.states.col(col) = y.head(n);
    if (second) out.velocities.col(col) = y.tail(n);
    ++col;
  });
  out.states.conservativeResize(n, col);
  if (second) out.velocities.conservativeResize(n, col);
  out.e_series = error_series(out.states, out.velocities);
  return out;
}

}  // namespace

TrajectoryResult integrate(const FirstOrderSystem& sys, const SimConfig& cfg,
                           const Eigen::VectorXd& x0) {
  validate_sim_config(cfg);
  const int n = static_cast<int>(sys.laplacian.rows());
  if (x0.size() != n) fail(Errc::invalid_argument, "sim: x0 dimension mismatch");

  Dopri5 stepper(
      [&sys](double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
        // L 1 = 0, so centering x is exact in real arithmetic; it keeps the
        // consensus manifold invariant to rounding as well.
        Eigen::VectorXd xc = x.array() - x.mean();
        dx = sys.drift * x.array().sin().matrix() - sys.coupling * (sys.laplacian * xc);
      },
      cfg.rtol, cfg.atol);
  return run_ode(stepper, x0, n, false, cfg);
}

TrajectoryResult integrate(const SecondOrderSystem& sys, const SimConfig& cfg,
                           const Eigen::VectorXd& x0, const Eigen::VectorXd& v0) {
  validate_sim_config(cfg);
  const int n = static_cast<int>(sys.laplacian.rows());
  if (x0.size() != n || v0.size() != n) fail(Errc::invalid_argument, "sim: x0/v0 dimension mismatch");

  Eigen::VectorXd y0(2 * n);
  y0.head(n) = x0;
  y0.tail(n) = v0;
  Dopri5 stepper(
      [&sys, n](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.resize(2 * n);
        auto x = y.head(n);
        auto v = y.tail(n);
        Eigen::VectorXd xc = x.array() - x.mean();
        Eigen::VectorXd vc = v.array() - v.mean();
        dy.head(n) = v;
        dy.tail(n) = sys.drift * (x.array().tanh() + v.array().tanh()).matrix() -
                     sys.alpha * (sys.laplacian * xc) - sys.beta * (sys.laplacian * vc);
      },
      cfg.rtol, cfg.atol);
  return run_ode(stepper, y0, n, true, cfg);
}

std::vector<double> error_series(const Eigen::MatrixXd& states, const Eigen::MatrixXd& velocities) {
  const long n = states.rows(), m = states.cols();
  std::vector<double> e(m, 0.0);
  for (long k = 0; k < m; ++k) {
    double mean = states.col(k).mean();
    e[k] = (states.col(k).array() - mean).square().sum() / static_cast<double>(n);
    if (velocities.size() > 0) {
      double vmean = velocities.col(k).mean();
      e[k] += (velocities.col(k).array() - vmean).square().sum() / static_cast<double>(n);
    }
  }
  return e;
}

double windowed_error(const std::vector<double>& e, const std::vector<double>& times,
                      double t_start, double window) {
  if (e.size() != times.size() || e.size() < 2)
    fail(Errc::invalid_argument, "windowed_error: need matching series of length >= 2");
  if (!(window > 0)) fail(Errc::invalid_argument, "windowed_error: window must be > 0");
  double t_end = t_start + window;
  double slack = 1e-9 * std::max(1.0, std::abs(times.back()));
  if (t_end > times.back() + slack)
    fail(Errc::invalid_argument, "windowed_error: window [" + fmt17(t_start) + ", " + fmt17(t_end) +
                                     "] exceeds trajectory end " + fmt17(times.back()));

  double integral = 0.0, t_lo = -1, t_hi = -1;
  for (size_t k = 0; k + 1 < e.size(); ++k) {
    if (times[k] < t_start - slack || times[k + 1] > t_end + slack) continue;
    if (t_lo < 0) t_lo = times[k];
    t_hi = times[k + 1];
    integral += 0.5 * (e[k] + e[k + 1]) * (times[k + 1] - times[k]);
  }
  if (t_lo < 0 || t_hi <= t_lo)
    fail(Errc::invalid_argument, "windowed_error: window contains no complete sample interval");
  return integral / (t_hi - t_lo);
}

std::vector<ExperimentRow> run_experiment(const ModificationTrace& trace,
                                          const ExperimentSystem& sys, const SimConfig& cfg,
                                          double window_start, double window_width) {
  validate_sim_config(cfg);
  const int n = trace.graphs.front().order();
  // One realization of the initial condition, reused across all steps.
  Eigen::VectorXd x0 = gaussian_initial(n, cfg.initial_scale, cfg.seed);
  Eigen::VectorXd v0 = sys.second_order ? gaussian_initial(n, cfg.initial_scale, cfg.seed + 1)
                                        : Eigen::VectorXd();

  std::vector<ExperimentRow> rows;
  for (size_t step = 0; step < trace.graphs.size(); ++step) {
    const Graph& g = trace.graphs[step];
    SpectralState state = analyze_strict(g);

    TrajectoryResult traj;
    if (sys.second_order) {
      SecondOrderSystem s{state.laplacian, sys.alpha, sys.beta, sys.drift};
      traj = integrate(s, cfg, x0, v0);
    } else {
      FirstOrderSystem s{state.laplacian, sys.coupling, sys.drift};
      traj = integrate(s, cfg, x0);
    }
    rows.push_back({static_cast<int>(step), state.kappa,
                    windowed_error(traj.e_series, traj.times, window_start, window_width)});
  }
  return rows;
}

std::string trajectory_to_csv(const TrajectoryResult& t) {
  const long n = t.states.rows();
  const bool second = t.velocities.size() > 0;
  std::ostringstream os;
  os << "t";
  for (long i = 0; i < n; ++i) os << ",x_" << i;
  if (second)
    for (long i = 0; i < n; ++i) os << ",v_" << i;
  os << ",e\n";
  for (size_t k = 0; k < t.times.size(); ++k) {
    os << fmt17(t.times[k]);
    for (long i = 0; i < n; ++i) os << ',' << fmt17(t.states(i, k));
    if (second)
      for (long i = 0; i < n; ++i) os << ',' << fmt17(t.velocities(i, k));
    os << ',' << fmt17(t.e_series[k]) << '\n';
  }
  return os.str();
}

std::string experiment_to_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream os;
  os << "step,kappa,E_window,log10_E\n";
  for (const auto& r : rows)
    os << r.step << ',' << fmt17(r.kappa) << ',' << fmt17(r.e_window) << ','
       << fmt17(std::log10(r.e_window)) << '\n';
  return os.str();
}

}  // namespace specnet
