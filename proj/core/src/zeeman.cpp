#include "coldcav/zeeman.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "coldcav/errors.hpp"
#include "coldcav/ode.hpp"

namespace coldcav::zeeman {

namespace {

constexpr int gi(int m) { return m + 4; }        // ground index
constexpr int ei(int mp) { return 9 + mp + 5; }  // excited index

double excitation_rate(double intensity, double delta, int m) {
  const double c = cg_squared_sigma_plus(m);
  return 0.5 * intensity * c / (1.0 + delta * delta + 2.0 * intensity * c);
}

Eigen::Matrix<double, state_count, state_count> rate_matrix(double intensity,
                                                            double delta) {
  Eigen::Matrix<double, state_count, state_count> a;
  a.setZero();
  for (int m = -4; m <= 4; ++m) {
    const double r = excitation_rate(intensity, delta, m);
    a(gi(m), gi(m)) -= r;
    a(ei(m + 1), gi(m)) += r;
  }
  for (int mp = -5; mp <= 5; ++mp) {
    const BranchingWeights w = branching_weights(mp);
    a(ei(mp), ei(mp)) -= 1.0;  // Gamma = 1
    if (std::abs(mp + 1) <= 4) a(gi(mp + 1), ei(mp)) += w.sigma_minus;
    if (std::abs(mp) <= 4) a(gi(mp), ei(mp)) += w.pi;
    if (std::abs(mp - 1) <= 4) a(gi(mp - 1), ei(mp)) += w.sigma_plus;
  }
  return a;
}

}  // namespace

SublevelPopulations SublevelPopulations::equal_ground() {
  SublevelPopulations p;
  p.ground.fill(1.0 / ground_count);
  return p;
}

double SublevelPopulations::total() const {
  double s = 0.0;
  for (double g : ground) s += g;
  for (double e : excited) s += e;
  return s;
}

double SublevelPopulations::stretched() const {
  return ground[gi(4)] + excited[ei(5) - ground_count];
}

void SublevelPopulations::validate() const {
  for (double g : ground)
    if (g < 0.0) throw std::invalid_argument("SublevelPopulations: negative ground population");
  for (double e : excited)
    if (e < 0.0) throw std::invalid_argument("SublevelPopulations: negative excited population");
  if (std::abs(total() - 1.0) > 1e-9)
    throw std::invalid_argument("SublevelPopulations: total population != 1");
}

double cg_squared_sigma_plus(int m) {
  if (m < -4 || m > 4)
    throw std::invalid_argument("cg_squared_sigma_plus: m out of range [-4,4]");
  return static_cast<double>((m + 5) * (m + 6)) / 90.0;
}

BranchingWeights branching_weights(int m_excited) {
  if (m_excited < -5 || m_excited > 5)
    throw std::invalid_argument("branching_weights: m' out of range [-5,5]");
  const int mp = m_excited;
  BranchingWeights w{};
  if (std::abs(mp + 1) <= 4)
    w.sigma_minus = static_cast<double>((4 - mp) * (5 - mp)) / 90.0;
  if (std::abs(mp) <= 4) w.pi = 2.0 * static_cast<double>(25 - mp * mp) / 90.0;
  if (std::abs(mp - 1) <= 4)
    w.sigma_plus = static_cast<double>((mp + 4) * (mp + 5)) / 90.0;
  return w;
}

PumpTrajectory evolve_populations(const SublevelPopulations& initial,
                                  double intensity, double delta, double t_end,
                                  int n_points, double rel_tol,
                                  bool keep_populations) {
  initial.validate();
  if (intensity < 0.0) throw std::invalid_argument("evolve_populations: intensity < 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("evolve_populations: t_end must be > 0");
  if (n_points < 2) throw std::invalid_argument("evolve_populations: need n_points >= 2");

  const auto a = rate_matrix(intensity, delta);

  std::array<double, state_count> y{};
  for (int i = 0; i < ground_count; ++i) y[i] = initial.ground[i];
  for (int i = 0; i < excited_count; ++i) y[ground_count + i] = initial.excited[i];

  auto rhs = [&a](double, const std::array<double, state_count>& x,
                  std::array<double, state_count>& dx) {
    for (int i = 0; i < state_count; ++i) {
      double s = 0.0;
      for (int j = 0; j < state_count; ++j) s += a(i, j) * x[j];
      dx[i] = s;
    }
  };

  PumpTrajectory traj;
  traj.times.resize(n_points);
  traj.stretched.resize(n_points);
  for (int i = 0; i < n_points; ++i)
    traj.times[i] = t_end * static_cast<double>(i) / (n_points - 1);
  if (keep_populations) traj.populations.resize(n_points);

  auto record = [&](int idx, const std::array<double, state_count>& x) {
    SublevelPopulations p;
    for (int i = 0; i < ground_count; ++i) p.ground[i] = x[i];
    for (int i = 0; i < excited_count; ++i) p.excited[i] = x[ground_count + i];
    traj.stretched[idx] = p.stretched();
    if (keep_populations) traj.populations[idx] = p;
  };

  record(0, y);
  int next = 1;

  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = rel_tol * 1e-3;
  integrate_dopri5<state_count>(
      rhs, y, 0.0, t_end, opt, [](std::array<double, state_count>&) {},
      [&](const DenseSegment<state_count>& seg,
          const std::array<double, state_count>&) {
        std::array<double, state_count> xs;
        while (next < n_points && traj.times[next] <= seg.t0 + seg.h) {
          seg.evaluate(traj.times[next], xs);
          record(next, xs);
          ++next;
        }
      });
  // the final grid point coincides with t_end; cover any roundoff leftover
  while (next < n_points) record(next++, y);
  return traj;
}

SublevelPopulations steady_populations(double intensity, double delta) {
  if (!(intensity > 0.0))
    throw std::invalid_argument("steady_populations: requires intensity > 0");
  const auto a = rate_matrix(intensity, delta);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  const Eigen::MatrixXd kernel = lu.kernel();
  if (kernel.cols() != 1)
    throw numerical_error("steady_populations: rate matrix null space is not one-dimensional");
  Eigen::VectorXd v = kernel.col(0);
  const double s = v.sum();
  if (std::abs(s) < 1e-300)
    throw numerical_error("steady_populations: degenerate null vector");
  v /= s;
  SublevelPopulations p;
  for (int i = 0; i < ground_count; ++i) p.ground[i] = v(i);
  for (int i = 0; i < excited_count; ++i) p.excited[i] = v(ground_count + i);
  return p;
}

double fit_exponential_rise(std::span<const double> times,
                            std::span<const double> values) {
  if (times.size() != values.size() || times.size() < 4)
    throw std::invalid_argument("fit_exponential_rise: need >= 4 samples");
  const double v0 = values.front();
  const double vinf = values.back();
  const double span = vinf - v0;
  if (span < 1e-3)
    throw numerical_error("fit_exponential_rise: curve spans less than 1e-3, nothing to fit");

  const double lo = v0 + 0.1 * span;
  const double hi = v0 + 0.9 * span;
  // linear regression of log(vinf - v) against t inside the window
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i] < lo || values[i] > hi) continue;
    const double resid = vinf - values[i];
    if (resid <= 0.0) continue;
    const double t = times[i];
    const double yl = std::log(resid);
    st += t;
    sy += yl;
    stt += t * t;
    sty += t * yl;
    ++n;
  }
  if (n < 3) throw numerical_error("fit_exponential_rise: too few samples in the 10-90% window");
  const double denom = n * stt - st * st;
  if (std::abs(denom) < 1e-300)
    throw numerical_error("fit_exponential_rise: degenerate time window");
  const double slope = (static_cast<double>(n) * sty - st * sy) / denom;
  return -slope;
}

double extract_beta(const PumpTrajectory& trajectory, double intensity) {
  if (!(intensity > 0.0)) throw std::invalid_argument("extract_beta: intensity must be > 0");
  return fit_exponential_rise(trajectory.times, trajectory.stretched) / intensity;
}

double derive_default_beta(double delta, double intensity) {
  const auto init = SublevelPopulations::equal_ground();
  const double n0 = init.stretched();
  double t_end = 2.0e4;
  for (int attempt = 0; attempt < 12; ++attempt) {
    const PumpTrajectory traj =
        evolve_populations(init, intensity, delta, t_end, 800);
    if (traj.stretched.back() >= n0 + 0.92 * (1.0 - n0))
      return extract_beta(traj, intensity);
    t_end *= 2.0;
  }
  throw numerical_error("derive_default_beta: pumping did not complete; intensity too small?");
}

}  // namespace coldcav::zeeman
