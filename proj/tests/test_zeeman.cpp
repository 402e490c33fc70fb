#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "coldcav/errors.hpp"
#include "coldcav/ode.hpp"
#include "coldcav/zeeman.hpp"

using namespace coldcav;
using namespace coldcav::zeeman;

namespace {

// brute-force Wigner-3j cross-check of the sigma+ CG table:
// |<4,m;1,1|5,m+1>|^2 = (2*5+1) * 3j(4,1,5; m,1,-(m+1))^2
double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double wigner3j_squared(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  // Racah formula
  const double prefac = factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) *
                        factorial(-j1 + j2 + j3) / factorial(j1 + j2 + j3 + 1);
  const double roots = factorial(j1 + m1) * factorial(j1 - m1) * factorial(j2 + m2) *
                       factorial(j2 - m2) * factorial(j3 + m3) * factorial(j3 - m3);
  double sum = 0.0;
  for (int k = 0; k <= j1 + j2 + j3; ++k) {
    const int a = j1 + j2 - j3 - k;
    const int b = j1 - m1 - k;
    const int c = j2 + m2 - k;
    const int d = j3 - j2 + m1 + k;
    const int e = j3 - j1 - m2 + k;
    if (a < 0 || b < 0 || c < 0 || d < 0 || e < 0) continue;
    sum += ((k % 2) ? -1.0 : 1.0) /
           (factorial(k) * factorial(a) * factorial(b) * factorial(c) *
            factorial(d) * factorial(e));
  }
  return prefac * roots * sum * sum;
}

}  // namespace

TEST_CASE("sigma+ Clebsch-Gordan squares") {
  CHECK(cg_squared_sigma_plus(4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cg_squared_sigma_plus(-4) == doctest::Approx(2.0 / 90.0).epsilon(1e-15));
  CHECK_THROWS_AS(cg_squared_sigma_plus(5), std::invalid_argument);
  CHECK_THROWS_AS(cg_squared_sigma_plus(-5), std::invalid_argument);

  SUBCASE("against brute-force Wigner 3j") {
    // normalize both tables to the stretched transition
    const double norm = wigner3j_squared(4, 1, 5, 4, 1, -5);
    for (int m = -4; m <= 4; ++m) {
      const double w = wigner3j_squared(4, 1, 5, m, 1, -(m + 1)) / norm;
      CHECK(cg_squared_sigma_plus(m) == doctest::Approx(w).epsilon(1e-12));
    }
  }

  SUBCASE("max/mean ratio anchors the 'about twice' statement") {
    double mean = 0.0;
    for (int m = -4; m <= 4; ++m) mean += cg_squared_sigma_plus(m);
    mean /= 9.0;
    const double ratio = 1.0 / mean;
    CHECK(ratio == doctest::Approx(810.0 / 330.0).epsilon(1e-12));
    CHECK(ratio >= 2.0);
    CHECK(ratio <= 2.5);
  }
}

TEST_CASE("branching weights") {
  SUBCASE("stretched states have a single decay channel") {
    const auto top = branching_weights(5);
    CHECK(top.sigma_minus == 0.0);
    CHECK(top.pi == 0.0);
    CHECK(top.sigma_plus == doctest::Approx(1.0).epsilon(1e-15));
    const auto bottom = branching_weights(-5);
    CHECK(bottom.sigma_minus == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bottom.pi == 0.0);
    CHECK(bottom.sigma_plus == 0.0);
  }
  SUBCASE("rows sum to one") {
    for (int mp = -5; mp <= 5; ++mp) {
      const auto w = branching_weights(mp);
      CHECK(w.sigma_minus + w.pi + w.sigma_plus == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(w.sigma_minus >= 0.0);
      CHECK(w.pi >= 0.0);
      CHECK(w.sigma_plus >= 0.0);
    }
  }
  CHECK_THROWS_AS(branching_weights(6), std::invalid_argument);
}

TEST_CASE("population evolution conserves, stays positive, and pumps up") {
  const auto init = SublevelPopulations::equal_ground();

  SUBCASE("no light, no pumping") {
    const auto traj = evolve_populations(init, 0.0, 40.0, 50.0, 40);
    for (double n : traj.stretched) CHECK(n == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
  }

  SUBCASE("conservation and positivity along the I=60 trajectory") {
    const auto traj = evolve_populations(init, 60.0, 40.0, 2.0e4, 200, 1e-8, true);
    for (const auto& pops : traj.populations) {
      CHECK(std::abs(pops.total() - 1.0) < 1e-9);
      for (double g : pops.ground) CHECK(g > -1e-12);
      for (double e : pops.excited) CHECK(e > -1e-12);
    }
    CHECK(traj.stretched.front() == doctest::Approx(1.0 / 9.0));
    CHECK(traj.stretched.back() > 0.95);
    // sigma+ light only moves population toward the stretched pair
    for (std::size_t i = 1; i < traj.stretched.size(); ++i)
      CHECK(traj.stretched[i] >= traj.stretched[i - 1] - 1e-10);
  }

  SUBCASE("equilibrium from the rate-matrix null space") {
    const auto eq = steady_populations(60.0, 40.0);
    CHECK(std::abs(eq.total() - 1.0) < 1e-9);
    CHECK(eq.stretched() > 0.999);  // closed cycling transition traps everything
    const auto traj = evolve_populations(init, 60.0, 40.0, 3.0e4, 150);
    CHECK(std::abs(traj.stretched.back() - eq.stretched()) < 1e-3);
    // one-dimensional kernel concentrates the population at every intensity
    for (double intensity : {1.0, 10.0}) {
      const auto e = steady_populations(intensity, 40.0);
      CHECK(e.stretched() > 0.95);
    }
    CHECK_THROWS_AS(steady_populations(0.0, 40.0), std::invalid_argument);
  }

  SUBCASE("stretched population never decreases once other sublevels are empty") {
    SublevelPopulations stretched_only{};
    stretched_only.ground[8] = 0.7;   // m = 4
    stretched_only.excited[10] = 0.3; // m' = 5
    const auto traj = evolve_populations(stretched_only, 20.0, 40.0, 200.0, 100);
    for (std::size_t i = 1; i < traj.stretched.size(); ++i)
      CHECK(traj.stretched[i] >= traj.stretched[i - 1] - 1e-10);
  }
}

TEST_CASE("two-level reduction: fitted rate matches the 2x2 eigenvalue") {
  // single ground + excited level with R = 0.02, Gamma = 1; rate = R + Gamma
  const double excitation = 0.02;
  auto rhs = [&](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = -excitation * y[0] + y[1];
    dy[1] = excitation * y[0] - y[1];
  };
  std::array<double, 2> y{1.0, 0.0};
  OdeOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-13;

  std::vector<double> ts, vs;
  const int n = 400;
  const double t_end = 300.0;
  ts.push_back(0.0);
  vs.push_back(y[1]);
  int next = 1;
  integrate_dopri5<2>(
      rhs, y, 0.0, t_end, opt, [](std::array<double, 2>&) {},
      [&](const DenseSegment<2>& seg, const std::array<double, 2>&) {
        std::array<double, 2> ys;
        while (next < n && t_end * next / (n - 1.0) <= seg.t0 + seg.h) {
          const double t = t_end * next / (n - 1.0);
          seg.evaluate(t, ys);
          ts.push_back(t);
          vs.push_back(ys[1]);
          ++next;
        }
      });
  const double r = fit_exponential_rise(ts, vs);
  CHECK(r == doctest::Approx(1.0 + excitation).epsilon(0.01));
}

TEST_CASE("beta extraction across the pumping intensity grid") {
  const auto init = SublevelPopulations::equal_ground();
  const double delta = 40.0;
  double prev_beta = 1e9;
  for (double intensity : {1.0, 10.0, 60.0}) {
    const double t_end = 6.0e5 / intensity;
    const auto traj = evolve_populations(init, intensity, delta, t_end, 500);
    const double beta = extract_beta(traj, intensity);
    CHECK(beta > 0.0);
    CHECK(beta < prev_beta * 1.0001);  // saturation slows per-unit-intensity pumping
    CHECK(beta * intensity < 0.2);     // pumping much slower than the linewidth
    prev_beta = beta;
  }
}

TEST_CASE("extract_beta error paths") {
  PumpTrajectory flat;
  for (int i = 0; i < 50; ++i) {
    flat.times.push_back(i);
    flat.stretched.push_back(1.0 / 9.0 + 1e-6 * i / 50.0);
  }
  CHECK_THROWS_AS(extract_beta(flat, 10.0), numerical_error);
  CHECK_THROWS_AS(extract_beta(flat, 0.0), std::invalid_argument);
}

TEST_CASE("derived default beta is in the expected range") {
  const double beta = derive_default_beta(44.0, 10.0);
  CHECK(beta > 5e-6);
  CHECK(beta < 3e-5);
}
