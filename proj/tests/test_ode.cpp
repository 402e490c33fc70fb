#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "coldcav/ode.hpp"

using namespace coldcav;

TEST_CASE("dopri5 reproduces exp decay to tolerance") {
  auto rhs = [](double, const std::array<double, 1>& y, std::array<double, 1>& dy) {
    dy[0] = -y[0];
  };
  std::array<double, 1> y{1.0};
  OdeOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-13;
  integrate_dopri5<1>(rhs, y, 0.0, 5.0, opt);
  CHECK(y[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-8));
}

TEST_CASE("dopri5 dense output hits interior samples of a harmonic oscillator") {
  auto rhs = [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  std::array<double, 2> y{1.0, 0.0};
  OdeOptions opt;
  opt.rel_tol = 1e-9;
  opt.abs_tol = 1e-12;

  std::vector<double> samples;
  for (int i = 1; i <= 200; ++i) samples.push_back(10.0 * i / 200.0);
  std::size_t next = 0;
  double worst = 0.0;
  integrate_dopri5<2>(
      rhs, y, 0.0, 10.0, opt, [](std::array<double, 2>&) {},
      [&](const DenseSegment<2>& seg, const std::array<double, 2>&) {
        std::array<double, 2> ys;
        while (next < samples.size() && samples[next] <= seg.t0 + seg.h) {
          seg.evaluate(samples[next], ys);
          worst = std::max(worst, std::abs(ys[0] - std::cos(samples[next])));
          ++next;
        }
      });
  CHECK(next == samples.size());
  CHECK(worst < 1e-6);  // order-4 interpolant between order-5 steps
}

TEST_CASE("dopri5 error decreases with tolerance") {
  auto rhs = [](double t, const std::array<double, 1>& y, std::array<double, 1>& dy) {
    dy[0] = std::sin(t) * y[0];
  };
  auto run = [&](double tol) {
    std::array<double, 1> y{1.0};
    OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-3;
    integrate_dopri5<1>(rhs, y, 0.0, 12.0, opt);
    return y[0];
  };
  const double exact = std::exp(1.0 - std::cos(12.0));
  const double e4 = std::abs(run(1e-4) - exact);
  const double e6 = std::abs(run(1e-6) - exact);
  const double e8 = std::abs(run(1e-8) - exact);
  CHECK(e6 < e4);
  CHECK(e8 < e6);
  CHECK(e8 < 1e-7);
}

TEST_CASE("dopri5 post-step hook is applied") {
  auto rhs = [](double, const std::array<double, 1>&, std::array<double, 1>& dy) {
    dy[0] = 1.0;
  };
  std::array<double, 1> y{0.0};
  OdeOptions opt;
  integrate_dopri5<1>(
      rhs, y, 0.0, 1.0, opt,
      [](std::array<double, 1>& s) { s[0] = std::min(s[0], 0.5); },
      [](const DenseSegment<1>&, const std::array<double, 1>&) {});
  CHECK(y[0] == doctest::Approx(0.5));
}

TEST_CASE("dopri5 rejects bad arguments and catches non-finite states") {
  auto rhs = [](double, const std::array<double, 1>& y, std::array<double, 1>& dy) {
    dy[0] = y[0] * y[0];  // blows up at t = 1 from y0 = 1
  };
  std::array<double, 1> y{1.0};
  OdeOptions opt;
  CHECK_THROWS_AS(integrate_dopri5<1>(rhs, y, 1.0, 0.0, opt), std::invalid_argument);
  y = {1.0};
  CHECK_THROWS_AS(integrate_dopri5<1>(rhs, y, 0.0, 2.0, opt), numerical_error);
}
