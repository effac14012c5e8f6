#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "jacobi/errors.hpp"

namespace jacobi {

// Adaptive Dormand-Prince 5(4) integrator. Error control can be restricted to
// a leading block of the state (err_dim); components past it ride along on the
// step sequence chosen by that block. Paired integrations exploit this: the
// controller sees only the reference block, so the step sequence is a function
// of the reference trajectory alone.
struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0: (t1-t0)/64
  double max_step = 0.0;      // 0: no cap
  long max_steps = 2000000;
  int err_dim = 0;  // 0: all components
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

// f(t, y, dydt) evaluates the right-hand side; y has dim components.
template <class F>
OdeStats integrate_rk45(F&& f, double t0, double t1, double* y, int dim, const OdeOptions& opt) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(t1 > t0)) throw ConfigError("integration interval must have positive length");
  const int ne = opt.err_dim > 0 ? opt.err_dim : dim;
  const double span = t1 - t0;
  double h = opt.initial_step > 0.0 ? opt.initial_step : span / 64.0;
  if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
  h = std::min(h, span);

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), yt(dim),
      ynew(dim);
  double t = t0;
  OdeStats stats;
  f(t, y, k1.data());

  while (t < t1) {
    if (stats.accepted + stats.rejected >= opt.max_steps)
      throw NonConvergenceError("ODE step limit exceeded");
    bool clipped = false;
    if (t + h >= t1) {
      h = t1 - t;
      clipped = true;
    }

    for (int i = 0; i < dim; ++i) yt[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, yt.data(), k2.data());
    for (int i = 0; i < dim; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, yt.data(), k3.data());
    for (int i = 0; i < dim; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, yt.data(), k4.data());
    for (int i = 0; i < dim; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, yt.data(), k5.data());
    for (int i = 0; i < dim; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, yt.data(), k6.data());
    for (int i = 0; i < dim; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + h, ynew.data(), k7.data());

    double errsq = 0.0;
    for (int i = 0; i < ne; ++i) {
      double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * k7[i]);
      double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double q = err / scale;
      errsq += q * q;
    }
    double norm = std::sqrt(errsq / ne);

    if (norm <= 1.0) {
      t = clipped ? t1 : t + h;
      std::memcpy(y, ynew.data(), sizeof(double) * dim);
      std::swap(k1, k7);  // FSAL
      ++stats.accepted;
      double fac = norm > 0.0 ? 0.9 * std::pow(norm, -0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
      // k1 still holds f at (t, y); no re-evaluation needed after rejection
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
    if (!(h > 1e-14 * span)) throw NonConvergenceError("ODE step size underflow");
  }
  return stats;
}

}  // namespace jacobi
