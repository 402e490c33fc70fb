#include "coldcav/steady_state.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coldcav/errors.hpp"

namespace coldcav {

namespace {

// ascending-coefficient polynomial helpers
using Poly = std::vector<double>;

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly add(Poly a, const Poly& b, double scale = 1.0) {
  if (b.size() > a.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
  return a;
}

Poly shift_up(const Poly& a) {  // multiply by I
  Poly out(a.size() + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i + 1] = a[i];
  return out;
}

std::vector<std::complex<double>> companion_roots(Poly c) {
  double maxc = 0.0;
  for (double v : c) maxc = std::max(maxc, std::abs(v));
  if (maxc == 0.0) throw numerical_error("find_fixed_points: zero polynomial");
  while (c.size() > 1 && std::abs(c.back()) < 1e-14 * maxc) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -c[i] / c[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw numerical_error("find_fixed_points: companion eigensolver failed");
  std::vector<std::complex<double>> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

// steady orientation p*(I); the beta = 0 = gamma_p corner freezes p at 0
double steady_orientation(const ModelParams& p, double intensity) {
  const double g = pump_rate(p, intensity);
  const double denom = p.gamma_p + g;
  if (denom <= 0.0) return 0.0;
  return g / denom;
}

double steady_orientation_dI(const ModelParams& p, double intensity) {
  const double g = pump_rate(p, intensity);
  const double denom = p.gamma_p + g;
  if (denom <= 0.0) return 0.0;
  return p.gamma_p * pump_rate_dI(p, intensity) / (denom * denom);
}

// modulus-equation residual f(I) = I (loss^2 + phase^2) - D and its derivative
double modulus_residual(const ModelParams& p, double intensity, double* deriv) {
  const double ps = steady_orientation(p, intensity);
  const PhaseResponse r = phase_response(p, intensity, ps);
  const double m2 = r.loss * r.loss + r.phase * r.phase;
  if (deriv) {
    const double dps = steady_orientation_dI(p, intensity);
    const double dl = r.dloss_dI + r.dloss_dp * dps;
    const double dph = r.dphase_dI + r.dphase_dp * dps;
    *deriv = m2 + 2.0 * intensity * (r.loss * dl + r.phase * dph);
  }
  return intensity * m2 - p.drive_intensity();
}

// Clears p*(I) denominators out of I (loss^2 + phase^2) = D. Orientation
// corners pin p* outright (beta = 0 -> p* = 0; gamma_p = 0 with pumping ->
// p* = 1 on lit branches); clearing their vanishing denominators would plant
// spurious roots at I = 0.
Poly modulus_polynomial(const ModelParams& p) {
  const double d = p.drive_intensity();
  const bool pinned = p.beta == 0.0 || p.gamma_p == 0.0;
  if (p.variant == ModelVariant::Simple) {
    const double phi_l = linear_phase(p);
    const double k = kerr_coefficient(p);
    if (pinned) {
      const double one_plus_p = p.beta == 0.0 ? 1.0 : 2.0;
      const Poly phase{p.phi0 + one_plus_p * phi_l, -k};
      Poly f = shift_up(add(mul(phase, phase), Poly{p.gamma_cav * p.gamma_cav}));
      return add(f, Poly{d}, -1.0);
    }
    // denominator gamma_p + beta I; 1 + p* = (gamma_p + 2 beta I)/(gamma_p + beta I)
    const Poly den{p.gamma_p, p.beta};
    const Poly phase = add(mul(Poly{p.phi0, -k}, den),
                           Poly{phi_l * p.gamma_p, 2.0 * phi_l * p.beta});
    const Poly den2 = mul(den, den);
    Poly f = shift_up(
        add(mul(phase, phase), den2, p.gamma_cav * p.gamma_cav));
    return add(f, den2, -d);
  }

  // Saturated: s = 1 + delta^2 + 2I; Phi_1 s = 2 C g (delta + i)
  const double d2 = p.delta * p.delta;
  const double cg2 = 2.0 * p.cooperativity * p.gamma_cav;
  const Poly s{1.0 + d2, 2.0};
  if (pinned) {
    const double one_plus_p = p.beta == 0.0 ? 1.0 : 2.0;
    Poly loss_num = add(mul(Poly{p.gamma_cav}, s), Poly{one_plus_p * cg2});
    Poly phase_num = add(mul(Poly{p.phi0}, s), Poly{one_plus_p * cg2 * p.delta});
    Poly f = shift_up(add(mul(loss_num, loss_num), mul(phase_num, phase_num)));
    return add(f, mul(s, s), -d);
  }
  // pump g(I) = beta_sat I / s with beta_sat = beta (1 + delta^2);
  // denominator u = gamma_p s + beta_sat I; 1 + p* = (gamma_p s + 2 beta_sat I)/u
  const double beta_sat = p.beta * (1.0 + d2);
  Poly u = add(Poly{0.0, beta_sat}, s, p.gamma_p);
  Poly su = mul(s, u);
  Poly one_plus_p_num = add(Poly{0.0, 2.0 * beta_sat}, s, p.gamma_p);
  // loss*su = gamma su + cg2 * (gamma_p s + 2 beta_sat I)
  Poly loss_num = add(mul(Poly{p.gamma_cav}, su), one_plus_p_num, cg2);
  Poly phase_num = add(mul(Poly{p.phi0}, su), one_plus_p_num, cg2 * p.delta);
  Poly f = shift_up(add(mul(loss_num, loss_num), mul(phase_num, phase_num)));
  return add(f, mul(su, su), -d);
}

FixedPoint make_fixed_point(const ModelParams& p, double intensity) {
  FixedPoint fp;
  fp.intensity = intensity;
  fp.orientation = steady_orientation(p, intensity);
  fp.phase = phase_response(p, intensity, fp.orientation).phase;
  const Eigen::Matrix3d j = jacobian(fp, p);
  Eigen::EigenSolver<Eigen::Matrix3d> es(j);
  for (int i = 0; i < 3; ++i) fp.eigenvalues[i] = es.eigenvalues()(i);
  fp.stability = classify_stability(fp.eigenvalues);
  return fp;
}

}  // namespace

std::string to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::StableNode: return "StableNode";
    case StabilityClass::StableFocus: return "StableFocus";
    case StabilityClass::Saddle: return "Saddle";
    case StabilityClass::UnstableFocus: return "UnstableFocus";
    case StabilityClass::UnstableNode: return "UnstableNode";
  }
  return "?";
}

double bistability_threshold(const ModelParams& params) {
  const double k = kerr_coefficient(params);
  if (k <= 0.0)
    throw std::invalid_argument(
        "bistability_threshold: K <= 0 (no Kerr bistability for this sign convention)");
  return 8.0 * params.gamma_cav * params.gamma_cav / (3.0 * std::sqrt(3.0) * k);
}

std::complex<double> steady_field(const ModelParams& params, double intensity,
                                  double orientation) {
  const PhaseResponse r = phase_response(params, intensity, orientation);
  return params.input_coupling() * params.drive /
         std::complex<double>(r.loss, -r.phase);
}

std::vector<FixedPoint> find_fixed_points(const ModelParams& params) {
  params.validate();
  const double d = params.drive_intensity();
  if (d == 0.0) return {make_fixed_point(params, 0.0)};  // dark cavity

  const Poly poly = modulus_polynomial(params);
  const auto raw = companion_roots(poly);

  const double resid_tol = 1e-12 * std::max(1.0, d);
  std::vector<double> polished;
  for (const auto& z : raw) {
    if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z))) continue;
    if (z.real() < -1e-10) continue;
    double x = std::max(z.real(), 0.0);

    // spurious roots sit where the cleared denominator vanishes (I = 0 with
    // gamma_p = 0); the rational residual rejects them
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      double deriv = 0.0;
      const double f = modulus_residual(params, x, &deriv);
      if (std::abs(f) <= resid_tol) {
        ok = true;
        break;
      }
      if (deriv == 0.0) break;
      double step = -f / deriv;
      double lambda = 1.0;
      double xn = x + step;
      double fn = (xn >= 0.0) ? modulus_residual(params, xn, nullptr) : std::abs(f) * 2;
      while (std::abs(fn) > std::abs(f) && lambda > 1.0 / 1024.0) {
        lambda *= 0.5;
        xn = x + lambda * step;
        fn = (xn >= 0.0) ? modulus_residual(params, xn, nullptr) : std::abs(f) * 2;
      }
      if (std::abs(xn - x) < 1e-15 * std::max(1.0, std::abs(x))) {
        ok = std::abs(fn) <= 1e4 * resid_tol;  // stagnated on a tangency
        x = xn;
        break;
      }
      x = xn;
    }
    if (ok && x >= -1e-10) polished.push_back(std::max(x, 0.0));
  }

  // Cluster to centroids, keeping multiplicity for tangencies.
  std::sort(polished.begin(), polished.end());
  std::vector<FixedPoint> out;
  std::size_t i = 0;
  while (i < polished.size()) {
    std::size_t j = i + 1;
    double sum = polished[i];
    while (j < polished.size() &&
           polished[j] - polished[j - 1] < 1e-7 * std::max(1.0, polished[j])) {
      sum += polished[j];
      ++j;
    }
    const double centroid = sum / static_cast<double>(j - i);
    const FixedPoint fp = make_fixed_point(params, centroid);
    for (std::size_t k = i; k < j; ++k) out.push_back(fp);
    i = j;
  }
  return out;
}

Eigen::Matrix3d jacobian(const FixedPoint& point, const ModelParams& params) {
  const double intensity = point.intensity;
  const double p = point.orientation;
  const PhaseResponse r = phase_response(params, intensity, p);
  const std::complex<double> a = steady_field(params, intensity, p);
  const double x1 = a.real(), x2 = a.imag();
  const double rr = params.inv_round_trip();
  const double gd = pump_rate_dI(params, intensity);

  Eigen::Matrix3d j;
  j(0, 0) = rr * (-r.loss - 2.0 * x1 * (x1 * r.dloss_dI + x2 * r.dphase_dI));
  j(0, 1) = rr * (-r.phase - 2.0 * x2 * (x1 * r.dloss_dI + x2 * r.dphase_dI));
  j(0, 2) = rr * (-x1 * r.dloss_dp - x2 * r.dphase_dp);
  j(1, 0) = rr * (r.phase + 2.0 * x1 * (x1 * r.dphase_dI - x2 * r.dloss_dI));
  j(1, 1) = rr * (-r.loss + 2.0 * x2 * (x1 * r.dphase_dI - x2 * r.dloss_dI));
  j(1, 2) = rr * (x1 * r.dphase_dp - x2 * r.dloss_dp);
  j(2, 0) = 2.0 * x1 * gd * (1.0 - p);
  j(2, 1) = 2.0 * x2 * gd * (1.0 - p);
  j(2, 2) = -params.gamma_p - pump_rate(params, intensity);
  return j;
}

StabilityClass classify_stability(
    const std::array<std::complex<double>, 3>& eigenvalues) {
  double mag = 0.0;
  for (const auto& ev : eigenvalues) mag = std::max(mag, std::abs(ev));
  const double tie = 1e-9 * mag;

  bool has_pair = false;
  double max_re = -std::numeric_limits<double>::infinity();
  int n_pos = 0, n_neg = 0;
  for (const auto& ev : eigenvalues) {
    if (std::abs(ev.imag()) > tie) has_pair = true;
    max_re = std::max(max_re, ev.real());
    if (ev.real() > tie) ++n_pos;
    if (ev.real() < -tie) ++n_neg;
  }
  if (has_pair)
    return max_re < 0.0 ? StabilityClass::StableFocus : StabilityClass::UnstableFocus;
  if (n_pos > 0 && n_neg > 0) return StabilityClass::Saddle;
  return max_re < 0.0 ? StabilityClass::StableNode : StabilityClass::UnstableNode;
}

BranchDiagram branch_diagram(const ModelParams& params, double phi0_min,
                             double phi0_max, int n_points) {
  if (n_points < 2) throw std::invalid_argument("branch_diagram: need n_points >= 2");
  if (!(phi0_max > phi0_min))
    throw std::invalid_argument("branch_diagram: need phi0_max > phi0_min");

  BranchDiagram diagram;
  diagram.phi0_grid.resize(n_points);
  diagram.branches.resize(n_points);
  ModelParams local = params;
  for (int i = 0; i < n_points; ++i) {
    diagram.phi0_grid[i] =
        phi0_min + (phi0_max - phi0_min) * static_cast<double>(i) / (n_points - 1);
    local.phi0 = diagram.phi0_grid[i];
    diagram.branches[i] = find_fixed_points(local);
  }

  auto count_at = [&](double phi0) {
    ModelParams q = params;
    q.phi0 = phi0;
    return find_fixed_points(q).size();
  };
  for (int i = 0; i + 1 < n_points; ++i) {
    const std::size_t cl = diagram.branches[i].size();
    const std::size_t cr = diagram.branches[i + 1].size();
    if (cl == cr) continue;
    double lo = diagram.phi0_grid[i], hi = diagram.phi0_grid[i + 1];
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      if (count_at(mid) == cl) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    diagram.turning_points.push_back(0.5 * (lo + hi));
  }
  return diagram;
}

InstabilityMap instability_map(const ModelParams& params, double phi0_min,
                               double phi0_max, int n_phi, double drive_min,
                               double drive_max, int n_drive) {
  if (n_phi < 1 || n_drive < 1)
    throw std::invalid_argument("instability_map: resolution must be positive");
  if (!(phi0_max >= phi0_min) || !(drive_max >= drive_min))
    throw std::invalid_argument("instability_map: empty range");

  InstabilityMap map;
  map.phi0_grid.resize(n_phi);
  map.drive_grid.resize(n_drive);
  for (int i = 0; i < n_phi; ++i)
    map.phi0_grid[i] =
        n_phi == 1 ? phi0_min
                   : phi0_min + (phi0_max - phi0_min) * static_cast<double>(i) / (n_phi - 1);
  for (int i = 0; i < n_drive; ++i)
    map.drive_grid[i] =
        n_drive == 1
            ? drive_min
            : drive_min + (drive_max - drive_min) * static_cast<double>(i) / (n_drive - 1);

  map.cells.reserve(static_cast<std::size_t>(n_phi) * n_drive);
  ModelParams local = params;
  for (int id = 0; id < n_drive; ++id) {
    for (int ip = 0; ip < n_phi; ++ip) {
      StabilityCell cell;
      cell.phi0 = map.phi0_grid[ip];
      cell.drive = map.drive_grid[id];
      local.phi0 = cell.phi0;
      local.drive = cell.drive;
      try {
        const auto fps = find_fixed_points(local);
        cell.n_roots = static_cast<int>(fps.size());
        cell.classes.reserve(fps.size());
        for (const auto& fp : fps) cell.classes.push_back(fp.stability);
      } catch (const numerical_error&) {
        cell.failed = true;
      }
      map.cells.push_back(std::move(cell));
    }
  }
  return map;
}

}  // namespace coldcav
