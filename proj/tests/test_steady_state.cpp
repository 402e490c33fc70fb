#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "coldcav/errors.hpp"
#include "coldcav/model.hpp"
#include "coldcav/steady_state.hpp"

using namespace coldcav;

namespace {

ModelParams kerr_params() {
  ModelParams p;
  p.delta = 44.0;
  p.gamma_cav = 0.05;
  p.kappa = 0.96;
  p.cooperativity = 400.0;
  p.beta = 0.0;
  p.gamma_p = 1e-3;
  return p;
}

// independent oracle: number of real roots of the pure-Kerr steady-state
// cubic I(g^2 + (theta - K I)^2) = D via the cubic discriminant
int cubic_real_roots(double g, double k, double theta, double d) {
  // k^2 I^3 - 2 k theta I^2 + (g^2 + theta^2) I - d = 0
  const double a = k * k;
  const double b = -2.0 * k * theta;
  const double c = g * g + theta * theta;
  const double e = -d;
  const double disc = 18 * a * b * c * e - 4 * b * b * b * e + b * b * c * c -
                      4 * a * c * c * c - 27 * a * a * e * e;
  return disc > 0.0 ? 3 : 1;
}

double residual_norm(const ModelParams& p, const FixedPoint& fp) {
  SystemState s;
  s.field = steady_field(p, fp.intensity, fp.orientation);
  s.orientation = fp.orientation;
  return std::max(std::abs(field_rhs(s, p)), std::abs(orientation_rhs(s, p)));
}

}  // namespace

TEST_CASE("bistability threshold formula") {
  ModelParams p = kerr_params();

  SUBCASE("direct value for gamma=0.05, K=0.1") {
    // pick C so that K = 0.1: K = 4 C g/delta^3
    p.delta = 2.0;
    p.cooperativity = 0.1 * 8.0 / (4.0 * p.gamma_cav);
    CHECK(kerr_coefficient(p) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(bistability_threshold(p) == doctest::Approx(0.038490).epsilon(1e-4));
  }

  SUBCASE("doubling gamma_cav quadruples the threshold") {
    const double base = bistability_threshold(p);
    ModelParams q = p;
    q.gamma_cav = 2.0 * p.gamma_cav;
    // K also scales with gamma_cav; isolate the gamma^2 scaling by fixing K
    q.cooperativity = p.cooperativity / 2.0;
    CHECK(kerr_coefficient(q) == doctest::Approx(kerr_coefficient(p)).epsilon(1e-12));
    CHECK(bistability_threshold(q) == doctest::Approx(4.0 * base).epsilon(1e-12));
  }

  SUBCASE("negative K is rejected") {
    p.delta = -44.0;
    CHECK_THROWS_AS(bistability_threshold(p), std::invalid_argument);
  }
}

TEST_CASE("brute-force threshold scan: 3-root cells appear at the predicted drive") {
  // For each drive row of a (drive, phi0) grid, the cubic has 3-root cells
  // iff the input-side intensity 2 a_in^2 exceeds I_bist (grid tolerance 2%).
  // theta = phi0 + Phi_L; the fold window opens at theta = sqrt(3) gamma and
  // is ~0.0025 gamma wide 2% above threshold, which sets the grid design.
  ModelParams p = kerr_params();
  const double g = p.gamma_cav;
  const double k = kerr_coefficient(p);
  const double i_bist = bistability_threshold(p);

  auto row_has_three = [&](double ratio, double th_lo, double th_hi, int n_phi) {
    const double d = g * ratio * i_bist;  // D = 2 g a_in^2, 2 a_in^2 = ratio I_bist
    for (int ip = 0; ip < n_phi; ++ip) {
      const double theta = g * (th_lo + (th_hi - th_lo) * ip / (n_phi - 1.0));
      if (cubic_real_roots(g, k, theta, d) == 3) return true;
    }
    return false;
  };

  SUBCASE("onset localized within 2% of I_bist") {
    int first_three = -1;
    for (int id = 0; id < 200; ++id) {
      const double ratio = 0.90 + 0.20 * id / 199.0;
      const bool three = row_has_three(ratio, 1.70, 2.00, 200);
      if (ratio <= 0.98) CHECK(!three);
      if (ratio >= 1.02) CHECK(three);
      if (three && first_three < 0) first_three = id;
    }
    REQUIRE(first_three >= 0);
    const double measured = 0.90 + 0.20 * first_three / 199.0;
    CHECK(measured == doctest::Approx(1.0).epsilon(0.02));
  }

  SUBCASE("wide sweep: deep bistability persists, subthreshold rows stay clean") {
    for (double ratio : {0.3, 0.6, 0.9}) CHECK(!row_has_three(ratio, 0.0, 4.5, 200));
    for (double ratio : {1.2, 1.8, 2.5}) CHECK(row_has_three(ratio, 0.0, 4.5, 200));
  }
}

TEST_CASE("find_fixed_points: empty cavity Lorentzian") {
  ModelParams p = kerr_params();
  p.cooperativity = 0.0;
  p.drive = 1.3;
  p.phi0 = 0.07;
  const auto fps = find_fixed_points(p);
  REQUIRE(fps.size() == 1);
  const double expected = 2.0 * p.gamma_cav * p.drive * p.drive /
                          (p.gamma_cav * p.gamma_cav + p.phi0 * p.phi0);
  CHECK(fps[0].intensity == doctest::Approx(expected).epsilon(1e-10));
  CHECK(fps[0].orientation == 0.0);
  CHECK(residual_norm(p, fps[0]) < 1e-9);

  SUBCASE("phi0 sweep traces a Lorentzian of HWHM gamma_cav") {
    const double peak = 2.0 * p.drive * p.drive / p.gamma_cav;
    for (int i = 0; i <= 40; ++i) {
      p.phi0 = -4.0 * p.gamma_cav + 8.0 * p.gamma_cav * i / 40.0;
      const auto swept = find_fixed_points(p);
      REQUIRE(swept.size() == 1);
      const double lorentz =
          peak / (1.0 + (p.phi0 / p.gamma_cav) * (p.phi0 / p.gamma_cav));
      CHECK(swept[0].intensity == doctest::Approx(lorentz).epsilon(1e-10));
    }
    p.phi0 = p.gamma_cav;  // half maximum at one HWHM
    CHECK(find_fixed_points(p)[0].intensity ==
          doctest::Approx(0.5 * peak).epsilon(1e-10));
  }
}

TEST_CASE("find_fixed_points: pure Kerr branch counts match the discriminant oracle") {
  ModelParams p = kerr_params();
  const double i_bist = bistability_threshold(p);
  const double k = kerr_coefficient(p);
  const double phi_l = linear_phase(p);

  SUBCASE("below threshold: one stable fixed point everywhere") {
    p.drive = std::sqrt(0.5 * i_bist / 2.0);
    for (int i = 0; i < 60; ++i) {
      p.phi0 = -phi_l - 3 * p.gamma_cav + 10 * p.gamma_cav * i / 59.0;
      const auto fps = find_fixed_points(p);
      CHECK(fps.size() == 1);
      CHECK((fps[0].stability == StabilityClass::StableFocus ||
             fps[0].stability == StabilityClass::StableNode));
    }
  }

  SUBCASE("2x threshold: oracle agreement cell by cell, and a 3-root region exists") {
    p.drive = std::sqrt(2.0 * i_bist / 2.0);
    const double d = p.drive_intensity();
    int three_cells = 0;
    for (int i = 0; i < 120; ++i) {
      p.phi0 = -phi_l - 2 * p.gamma_cav + 9 * p.gamma_cav * i / 119.0;
      const auto fps = find_fixed_points(p);
      const int expected = cubic_real_roots(p.gamma_cav, k, p.phi0 + phi_l, d);
      CHECK(static_cast<int>(fps.size()) == expected);
      if (fps.size() == 3) {
        ++three_cells;
        // outer fixed points attract, the middle one is a saddle
        CHECK((fps[0].stability == StabilityClass::StableFocus ||
               fps[0].stability == StabilityClass::StableNode));
        CHECK(fps[1].stability == StabilityClass::Saddle);
        CHECK((fps[2].stability == StabilityClass::StableFocus ||
               fps[2].stability == StabilityClass::StableNode));
      }
      for (const auto& fp : fps) CHECK(residual_norm(p, fp) < 1e-9);
    }
    CHECK(three_cells > 0);
  }
}

TEST_CASE("find_fixed_points: pumping variants keep residuals tiny") {
  ModelParams p = kerr_params();
  p.beta = 1.07e-5;
  p.gamma_cav = 0.055;
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> pu(-1.35, -1.1), du(1.0, 4.0);
  for (int i = 0; i < 40; ++i) {
    p.phi0 = pu(rng);
    p.drive = du(rng);
    p.gamma_p = (i % 3) ? 1e-3 : 0.0;  // gamma_p = 0 pins p* = 1 on lit branches
    p.variant = (i % 2) ? ModelVariant::Saturated : ModelVariant::Simple;
    const auto fps = find_fixed_points(p);
    CHECK(!fps.empty());
    CHECK(fps.size() % 2 == 1);  // odd count off the turning set
    for (const auto& fp : fps) {
      CHECK(residual_norm(p, fp) < 1e-9);
      CHECK(fp.intensity >= 0.0);
      CHECK(fp.orientation >= 0.0);
      CHECK(fp.orientation <= 1.0);
    }
  }
}

TEST_CASE("jacobian: empty cavity on resonance decouples") {
  ModelParams p = kerr_params();
  p.cooperativity = 0.0;
  p.phi0 = 0.0;
  p.drive = 0.8;
  p.beta = 0.0;
  const auto fps = find_fixed_points(p);
  REQUIRE(fps.size() == 1);
  std::array<double, 3> expected{-p.kappa, -p.kappa, -p.gamma_p};
  std::array<double, 3> got;
  for (int i = 0; i < 3; ++i) got[i] = fps[0].eigenvalues[i].real();
  std::sort(got.begin(), got.end());
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 3; ++i) {
    CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-9));
    CHECK(std::abs(fps[0].eigenvalues[i].imag()) < 1e-9);
  }
}

TEST_CASE("jacobian matches central finite differences of the right-hand sides") {
  ModelParams p = kerr_params();
  p.gamma_cav = 0.055;
  p.beta = 1.07e-5;
  p.drive = 2.1;
  p.phi0 = -1.25;

  for (ModelVariant variant : {ModelVariant::Simple, ModelVariant::Saturated}) {
    p.variant = variant;
    const auto fps = find_fixed_points(p);
    REQUIRE(!fps.empty());
    for (const auto& fp : fps) {
      const Eigen::Matrix3d j = jacobian(fp, p);
      const std::complex<double> a0 = steady_field(p, fp.intensity, fp.orientation);

      auto flow = [&](const Eigen::Vector3d& x) {
        SystemState s;
        s.field = {x(0), x(1)};
        s.orientation = x(2);
        const auto fa = field_rhs(s, p);
        return Eigen::Vector3d(fa.real(), fa.imag(), orientation_rhs(s, p));
      };
      Eigen::Vector3d x0(a0.real(), a0.imag(), fp.orientation);
      const double jnorm = j.cwiseAbs().maxCoeff();
      for (int col = 0; col < 3; ++col) {
        const double h = 1e-6 * std::max(1.0, std::abs(x0(col)));
        Eigen::Vector3d xp = x0, xm = x0;
        xp(col) += h;
        xm(col) -= h;
        const Eigen::Vector3d fd = (flow(xp) - flow(xm)) / (2.0 * h);
        for (int row = 0; row < 3; ++row) {
          CHECK(std::abs(fd(row) - j(row, col)) <= std::max(1e-6, 1e-4 * jnorm));
        }
      }
    }
  }
}

TEST_CASE("classification rules") {
  using C = std::complex<double>;
  CHECK(classify_stability({C(-1, 0), C(-2, 0), C(-3, 0)}) == StabilityClass::StableNode);
  CHECK(classify_stability({C(0.01, 2), C(0.01, -2), C(-1, 0)}) ==
        StabilityClass::UnstableFocus);
  CHECK(classify_stability({C(-0.01, 2), C(-0.01, -2), C(-1, 0)}) ==
        StabilityClass::StableFocus);
  CHECK(classify_stability({C(1, 0), C(-2, 0), C(-3, 0)}) == StabilityClass::Saddle);
  CHECK(classify_stability({C(1, 0), C(2, 0), C(3, 0)}) == StabilityClass::UnstableNode);

  SUBCASE("invariant under positive rescaling") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ru(-2.0, 2.0), su(1e-8, 1e6);
    for (int i = 0; i < 300; ++i) {
      std::array<C, 3> ev;
      if (i % 2) {
        ev = {C(ru(rng), 0), C(ru(rng), 0), C(ru(rng), 0)};
      } else {
        const double re = ru(rng), im = std::abs(ru(rng)) + 0.1;
        ev = {C(re, im), C(re, -im), C(ru(rng), 0)};
      }
      const double s = su(rng);
      std::array<C, 3> scaled{ev[0] * s, ev[1] * s, ev[2] * s};
      CHECK(classify_stability(ev) == classify_stability(scaled));
    }
  }
}

TEST_CASE("branch diagram finds the fold pair of a bistable Kerr scan") {
  ModelParams p = kerr_params();
  const double i_bist = bistability_threshold(p);
  p.drive = std::sqrt(3.0 * i_bist / 2.0);
  const double phi_l = linear_phase(p);
  const auto diagram = branch_diagram(p, -phi_l + 0.05, -phi_l + 0.35, 240);

  REQUIRE(diagram.turning_points.size() == 2);
  CHECK(diagram.turning_points[0] < diagram.turning_points[1]);
  // counts: 1 outside the folds, 3 inside
  bool saw_three = false;
  for (std::size_t i = 0; i < diagram.phi0_grid.size(); ++i) {
    const double f = diagram.phi0_grid[i];
    const auto n = diagram.branches[i].size();
    if (f > diagram.turning_points[0] + 1e-4 && f < diagram.turning_points[1] - 1e-4) {
      CHECK(n == 3);
      saw_three = true;
    } else if (f < diagram.turning_points[0] - 1e-4 || f > diagram.turning_points[1] + 1e-4) {
      CHECK(n == 1);
    }
  }
  CHECK(saw_three);
}

TEST_CASE("instability map: pure Kerr never shows a Hopf, empty cavity all stable") {
  ModelParams p = kerr_params();

  SUBCASE("beta = 0") {
    const auto map = instability_map(p, -1.1, -0.6, 40, 1.0, 4.0, 10);
    for (const auto& cell : map.cells) {
      CHECK(!cell.failed);
      for (auto c : cell.classes) CHECK(c != StabilityClass::UnstableFocus);
    }
  }

  SUBCASE("C = 0") {
    ModelParams q = p;
    q.cooperativity = 0.0;
    const auto map = instability_map(q, -0.2, 0.2, 20, 0.5, 3.0, 8);
    for (const auto& cell : map.cells) {
      CHECK(cell.n_roots == 1);
      REQUIRE(cell.classes.size() == 1);
      CHECK((cell.classes[0] == StabilityClass::StableFocus ||
             cell.classes[0] == StabilityClass::StableNode));
    }
  }
}

TEST_CASE("instability map: released-trap parameters contain a connected UnstableFocus window") {
  ModelParams p = kerr_params();
  p.gamma_cav = 0.055;
  p.beta = 1.07e-5;
  p.gamma_p = 1e-3;
  const double i_bist = bistability_threshold(p);
  const double lo = std::sqrt(2.0 * i_bist / 2.0);
  const auto map = instability_map(p, -1.30, -1.18, 49, lo, lo, 1);
  // cells where self-pulsing is the only attractor (UnstableFocus, no stable root)
  std::vector<int> uf_cells;
  for (int ip = 0; ip < 49; ++ip) {
    const auto& cell = map.at(0, ip);
    const bool has_uf = std::any_of(cell.classes.begin(), cell.classes.end(),
                                    [](StabilityClass c) {
                                      return c == StabilityClass::UnstableFocus;
                                    });
    const bool has_stable = std::any_of(cell.classes.begin(), cell.classes.end(),
                                        [](StabilityClass c) {
                                          return c == StabilityClass::StableFocus ||
                                                 c == StabilityClass::StableNode;
                                        });
    if (has_uf && !has_stable) uf_cells.push_back(ip);
  }
  REQUIRE(!uf_cells.empty());
  // connected window
  for (std::size_t i = 1; i < uf_cells.size(); ++i)
    CHECK(uf_cells[i] == uf_cells[i - 1] + 1);
}
