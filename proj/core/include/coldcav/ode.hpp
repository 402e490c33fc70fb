#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "coldcav/errors.hpp"

namespace coldcav {

// Embedded Dormand-Prince 5(4) pair with PI step-size control and the
// standard order-4 continuous extension for dense output.

struct OdeOptions {
  double rel_tol = 1.0e-8;
  double abs_tol = 1.0e-11;
  double initial_step = 0.0;  // 0: choose automatically
  double max_step = 0.0;      // 0: no bound
  std::uint64_t max_steps = 500'000'000;
};

struct OdeStats {
  std::uint64_t n_steps = 0;
  std::uint64_t n_accepted = 0;
  std::uint64_t n_rejected = 0;
};

namespace dopri5_detail {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// error coefficients (5th minus 4th order solution)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output coefficients
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

}  // namespace dopri5_detail

// One accepted step's interpolant, valid for t in [t0, t0+h].
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<std::array<double, N>, 5> cont{};

  void evaluate(double t, std::array<double, N>& out) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = cont[0][i] +
               th * (cont[1][i] +
                     th1 * (cont[2][i] + th * (cont[3][i] + th1 * cont[4][i])));
    }
  }
};

// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0). After every accepted
// step calls post_step(y) (state fix-ups such as clamping), then
// on_segment(segment, y_new) for dense sampling. Throws numerical_error on
// step-size underflow or non-finite state.
template <std::size_t N, class Rhs, class PostStep, class OnSegment>
OdeStats integrate_dopri5(Rhs&& rhs, std::array<double, N>& y, double t0,
                          double t1, const OdeOptions& opt, PostStep&& post_step,
                          OnSegment&& on_segment) {
  using namespace dopri5_detail;
  using Vec = std::array<double, N>;

  static_assert(N >= 1);
  if (!(t1 > t0)) throw std::invalid_argument("integrate_dopri5: need t1 > t0");
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol >= 0.0))
    throw std::invalid_argument("integrate_dopri5: bad tolerances");

  OdeStats stats;
  const double hmax = opt.max_step > 0.0 ? opt.max_step : (t1 - t0);

  Vec k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  rhs(t0, y, k1);

  auto err_norm = [&](const Vec& ynow, const Vec& ynext, const Vec& errv) {
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk =
          opt.abs_tol + opt.rel_tol * std::max(std::abs(ynow[i]), std::abs(ynext[i]));
      const double r = errv[i] / sk;
      sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(N));
  };

  // initial step: compare solution scale with derivative scale
  double h = opt.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sk) * (y[i] / sk);
      d1n += (k1[i] / sk) * (k1[i] / sk);
    }
    d0 = std::sqrt(d0 / N);
    d1n = std::sqrt(d1n / N);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * (d0 / d1n);
    h = std::min(h, hmax);
  }

  double t = t0;
  double facold = 1e-4;
  constexpr double beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  constexpr double safe = 0.9, facmin = 0.2, facmax = 10.0;

  while (t < t1) {
    if (stats.n_steps++ >= opt.max_steps)
      throw numerical_error("integrate_dopri5: max step count exceeded at t = " +
                            std::to_string(t));
    h = std::min(h, t1 - t);
    if (!(h > std::abs(t) * 1e-15 + 1e-300))
      throw numerical_error("integrate_dopri5: step size underflow at t = " +
                            std::to_string(t));

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                            a75 * k5[i] + a76 * k6[i]);
    rhs(t + h, ynew, k7);

    Vec errv;
    for (std::size_t i = 0; i < N; ++i)
      errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                     e6 * k6[i] + e7 * k7[i]);
    const double err = err_norm(y, ynew, errv);

    const double fac11 = std::pow(err, expo1);
    if (err <= 1.0) {
      // accept
      double fac = fac11 / std::pow(facold, beta);
      fac = std::clamp(fac / safe, 1.0 / facmax, 1.0 / facmin);
      facold = std::max(err, 1e-4);
      ++stats.n_accepted;

      DenseSegment<N> seg;
      seg.t0 = t;
      seg.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double dy = ynew[i] - y[i];
        const double bspl = h * k1[i] - dy;
        seg.cont[0][i] = y[i];
        seg.cont[1][i] = dy;
        seg.cont[2][i] = bspl;
        seg.cont[3][i] = dy - h * k7[i] - bspl;
        seg.cont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                              d6 * k6[i] + d7 * k7[i]);
      }

      t += h;
      y = ynew;
      post_step(y);
      for (std::size_t i = 0; i < N; ++i)
        if (!std::isfinite(y[i]))
          throw numerical_error("integrate_dopri5: non-finite state at t = " +
                                std::to_string(t));
      on_segment(seg, y);
      k1 = k7;
      h = std::min(h / fac, hmax);
    } else {
      // reject
      ++stats.n_rejected;
      h /= std::min(1.0 / facmin, fac11 / safe);
    }
  }
  return stats;
}

// Convenience overload without fix-ups or dense output.
template <std::size_t N, class Rhs>
OdeStats integrate_dopri5(Rhs&& rhs, std::array<double, N>& y, double t0,
                          double t1, const OdeOptions& opt) {
  return integrate_dopri5<N>(
      rhs, y, t0, t1, opt, [](std::array<double, N>&) {},
      [](const DenseSegment<N>&, const std::array<double, N>&) {});
}

}  // namespace coldcav
