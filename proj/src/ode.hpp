#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "types.hpp"

namespace specnet {

/// Explicit embedded Runge-Kutta 5(4) (Dormand-Prince coefficients) with a
/// PI step controller and cubic Hermite interpolation between accepted steps.
/// Error test: RMS of e_i / (atol + rtol * max(|y0_i|, |y1_i|)) <= 1.
class Dopri5 {
 public:
  using Deriv = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

  Dopri5(Deriv f, double rtol, double atol) : f_(std::move(f)), rtol_(rtol), atol_(atol) {
    if (!(rtol > 0) || !(atol > 0)) fail(Errc::invalid_argument, "ode: tolerances must be > 0");
  }

  /// Integrates from t0 to t1, invoking `sample(t, y)` at every grid time
  /// t0 + k*dt (k = 0, 1, ...) that falls in [t0, t1]. Throws
  /// Errc::integration with the last valid time on step-size underflow.
  void integrate(Eigen::VectorXd y, double t0, double t1, double dt_sample,
                 const std::function<void(double, const Eigen::VectorXd&)>& sample) const;

 private:
  double initial_step(double t0, const Eigen::VectorXd& y0, const Eigen::VectorXd& f0) const;

  Deriv f_;
  double rtol_, atol_;
};

inline void Dopri5::integrate(Eigen::VectorXd y, double t0, double t1, double dt_sample,
                              const std::function<void(double, const Eigen::VectorXd&)>& sample) const {
  // Dormand-Prince tableau (FSAL).
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  // 5th-minus-4th order error weights.
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const long n = y.size();
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

  double t = t0;
  f_(t, y, k1);

  double next_sample = t0;
  long sample_index = 0;
  auto emit_through = [&](double t_lo, const Eigen::VectorXd& y_lo, const Eigen::VectorXd& f_lo,
                          double t_hi, const Eigen::VectorXd& y_hi, const Eigen::VectorXd& f_hi) {
    while (next_sample <= t_hi + 1e-9 * std::max(1.0, std::abs(t_hi))) {
      if (next_sample > t1 + 1e-9 * std::max(1.0, std::abs(t1))) return;
      double h = t_hi - t_lo;
      if (h <= 0 || next_sample <= t_lo) {
        sample(next_sample, y_lo);
      } else {
        // Cubic Hermite on (t_lo, y_lo, f_lo) x (t_hi, y_hi, f_hi).
        double th = (next_sample - t_lo) / h;
        double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
        double h10 = th * (1 - th) * (1 - th);
        double h01 = th * th * (3 - 2 * th);
        double h11 = th * th * (th - 1);
        ytmp = h00 * y_lo + (h10 * h) * f_lo + h01 * y_hi + (h11 * h) * f_hi;
        sample(next_sample, ytmp);
      }
      ++sample_index;
      next_sample = t0 + dt_sample * static_cast<double>(sample_index);
    }
  };

  double h = initial_step(t, y, k1);
  const double safety = 0.9, min_factor = 0.2, max_factor = 10.0, beta = 0.04;
  const double expo = 0.2 - 0.75 * beta;
  double err_old = 1e-4;
  bool rejected_last = false;

  emit_through(t, y, k1, t, y, k1);  // the t0 sample

  while (t < t1) {
    double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (t1 - t <= h_floor) break;  // residual gap below grid slack
    h = std::min(h, t1 - t);
    if (h < h_floor)
      fail(Errc::integration,
           "ode: step size underflow at t = " + std::to_string(t) + " (stiff blow-up?)");

    ytmp = y + h * (a21 * k1);
    f_(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f_(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f_(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f_(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f_(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f_(t + h, ynew, k7);  // FSAL

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double norm2 = 0;
    for (long i = 0; i < n; ++i) {
      double sc = atol_ + rtol_ * std::max(std::abs(y(i)), std::abs(ynew(i)));
      double q = err(i) / sc;
      norm2 += q * q;
    }
    double err_norm = std::sqrt(norm2 / static_cast<double>(n));

    if (err_norm <= 1.0 || !std::isfinite(err_norm)) {
      if (!std::isfinite(err_norm))
        fail(Errc::integration, "ode: non-finite state at t = " + std::to_string(t));
      emit_through(t, y, k1, t + h, ynew, k7);
      t += h;
      y.swap(ynew);
      k1.swap(k7);

      double fac = safety * std::pow(std::max(err_norm, 1e-16), -expo) * std::pow(err_old, beta);
      fac = std::clamp(fac, min_factor, rejected_last ? 1.0 : max_factor);
      h *= fac;
      err_old = std::max(err_norm, 1e-4);
      rejected_last = false;
    } else {
      h *= std::clamp(safety * std::pow(err_norm, -0.2), min_factor, 1.0);
      rejected_last = true;
    }
  }
}

inline double Dopri5::initial_step(double t0, const Eigen::VectorXd& y0,
                                   const Eigen::VectorXd& f0) const {
  // Hairer-Norsett-Wanner starting-step heuristic.
  const long n = y0.size();
  double d0 = 0, d1 = 0;
  for (long i = 0; i < n; ++i) {
    double sc = atol_ + rtol_ * std::abs(y0(i));
    d0 += (y0(i) / sc) * (y0(i) / sc);
    d1 += (f0(i) / sc) * (f0(i) / sc);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;

  Eigen::VectorXd y1 = y0 + h0 * f0, f1(n);
  f_(t0 + h0, y1, f1);
  double d2 = 0;
  for (long i = 0; i < n; ++i) {
    double sc = atol_ + rtol_ * std::abs(y0(i));
    double df = (f1(i) - f0(i)) / sc;
    d2 += df * df;
  }
  d2 = std::sqrt(d2 / n) / h0;

  double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                        : std::pow(0.01 / std::max(d1, d2), 0.2);
  return std::min(100.0 * h0, h1);
}

}  // namespace specnet
