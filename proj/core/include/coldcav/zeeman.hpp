#pragma once

#include <array>
#include <span>
#include <vector>

namespace coldcav::zeeman {

// Rate-equation model of sigma+ optical pumping on the F=4 -> F'=5 cycling
// transition. Zeeman coherences are dropped; the 20 populations evolve under
//   d rho_g(m)/dt  = -R_m rho_g(m) + sum of spontaneous decay into m
//   d rho_e(m')/dt =  R_{m'-1} rho_g(m'-1) - rho_e(m')        (Gamma = 1)
// with per-transition excitation rate
//   R_m = (1/2) I cg2(m) / (1 + delta^2 + 2 I cg2(m)).

inline constexpr int ground_count = 9;    // |F=4, m>, m = -4..4
inline constexpr int excited_count = 11;  // |F'=5, m'>, m' = -5..5
inline constexpr int state_count = ground_count + excited_count;

struct SublevelPopulations {
  std::array<double, ground_count> ground{};
  std::array<double, excited_count> excited{};

  static SublevelPopulations equal_ground();  // 1/9 in each ground sublevel

  double total() const;
  double stretched() const;  // ground[m=4] + excited[m'=5]
  // Throws std::invalid_argument if any population < 0 or total differs from
  // 1 by more than 1e-9.
  void validate() const;
};

struct PumpTrajectory {
  std::vector<double> times;
  std::vector<double> stretched;
  std::vector<SublevelPopulations> populations;  // empty unless requested
};

// |<F=4,m; 1,+1 | F'=5,m+1>|^2 = (m+5)(m+6)/90, normalized to 1 at m=4.
double cg_squared_sigma_plus(int m);

// Normalized decay weights |F'=5,m'> -> |F=4, m'+1 / m' / m'-1>.
// Weights to nonexistent ground sublevels are zero; the rest sum to 1.
struct BranchingWeights {
  double sigma_minus;  // -> m'+1
  double pi;           // -> m'
  double sigma_plus;   // -> m'-1
};
BranchingWeights branching_weights(int m_excited);

// Integrates the rate equations from `initial` and samples the stretched-state
// population on a uniform grid of n_points over [0, t_end].
PumpTrajectory evolve_populations(const SublevelPopulations& initial,
                                  double intensity, double delta, double t_end,
                                  int n_points, double rel_tol = 1.0e-8,
                                  bool keep_populations = false);

// Equilibrium populations from the one-dimensional null space of the rate
// matrix (requires intensity > 0).
SublevelPopulations steady_populations(double intensity, double delta);

// Least-squares rate of p(t) = p_inf - (p_inf - p0) exp(-r t) over the window
// where the curve rises from 10% to 90% of its span. Throws numerical_error
// when the curve spans less than 1e-3.
double fit_exponential_rise(std::span<const double> times,
                            std::span<const double> values);

// beta = r / intensity from the fit above applied to the stretched curve.
double extract_beta(const PumpTrajectory& trajectory, double intensity);

// Pumping coefficient used by presets: evolve from the equal distribution at
// the given intensity until the rise is covered, then extract beta.
double derive_default_beta(double delta, double intensity = 10.0);

}  // namespace coldcav::zeeman
