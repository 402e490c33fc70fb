#pragma once

#include <complex>

namespace coldcav {

// Dimensionless model of a driven ring cavity filled with motionless
// two-level-plus-orientation atoms. Time is measured in units of the inverse
// natural linewidth (Gamma = 1 internally); all rates below are in units of
// Gamma.
//
// The round-trip phase is built from
//   Phi_L = 2 C gamma_cav / delta          (linear atomic dispersion)
//   K     = 4 C gamma_cav / delta^3        (Kerr coefficient, Phi_NL = -K I)
//   Phi_p = p Phi_L                        (orientation contribution)
// in the Simple variant, or from the saturated complex phase
//   Phi_1(I) = 2 C gamma_cav (delta + i) / (1 + delta^2 + 2 I)
// in the Saturated variant, where Im(Phi_1) acts as extra round-trip loss.

enum class ModelVariant { Simple, Saturated };

struct ModelParams {
  double delta = 44.0;          // 2(w_atom - w_laser)/Gamma
  double phi0 = 0.0;            // geometric round-trip phase [rad]
  double gamma_cav = 0.055;     // mirror decay coefficient per round trip
  double kappa = 0.96;          // cavity field rate gamma_cav/tau [Gamma]
  double cooperativity = 400.0; // C = g^2 N / (gamma_cav Gamma)
  double beta = 1.0e-5;         // pumping rate per unit intensity [Gamma]
  double gamma_p = 1.0e-3;      // orientation decay [Gamma]
  double drive = 0.0;           // input field amplitude a_in, |a_in|^2 ~ I units
  ModelVariant variant = ModelVariant::Simple;

  // t of the coupling mirror; gamma_cav = t^2/2
  double input_coupling() const;
  // 1/tau in Gamma units
  double inv_round_trip() const { return kappa / gamma_cav; }
  // drive intensity D = t^2 a_in^2 entering the steady-state modulus equation
  double drive_intensity() const;

  // Throws std::invalid_argument on violated invariants (gamma_cav/kappa > 0,
  // beta/gamma_p/C >= 0, delta != 0 in the Simple variant).
  void validate() const;
};

struct SystemState {
  std::complex<double> field{0.0, 0.0};  // a, with |a|^2 = I
  double orientation = 0.0;              // p in [0,1]
  double time = 0.0;                     // units of 1/Gamma

  double intensity() const { return std::norm(field); }
};

// Phi_L; requires delta != 0
double linear_phase(const ModelParams& params);

// K = 4 C gamma_cav / delta^3; satisfies K delta^2 / 2 == Phi_L
double kerr_coefficient(const ModelParams& params);

// Phi_cav = phi0 + Phi_L (1 + p) - K I  (Simple variant)
double total_phase_simple(const ModelParams& params, double intensity,
                          double orientation);

// Phi_1(I); imaginary part is the absorption contribution
std::complex<double> phi1_saturated(const ModelParams& params, double intensity);

// Effective round-trip loss/phase and their partial derivatives at (I, p),
// covering both variants. field_rhs uses (loss - i*phase); the Jacobian in
// steady_state uses the derivatives.
struct PhaseResponse {
  double loss;       // gamma_cav (+ Im Phi_1 (1+p) when saturated)
  double phase;      // dispersive round-trip phase
  double dloss_dI;
  double dphase_dI;
  double dloss_dp;
  double dphase_dp;
};
PhaseResponse phase_response(const ModelParams& params, double intensity,
                             double orientation);

// Pumping source g(I): beta*I (Simple) or beta (1+delta^2) I / (1+delta^2+2I)
// (Saturated; the rescaling by 1+delta^2 makes both variants agree at small I).
double pump_rate(const ModelParams& params, double intensity);
double pump_rate_dI(const ModelParams& params, double intensity);

// da/dt = (t a_in - (loss - i phase) a) / tau
std::complex<double> field_rhs(const SystemState& state, const ModelParams& params);

// dp/dt = -gamma_p p + g(I)(1 - p); leaves [0,1] forward-invariant
double orientation_rhs(const SystemState& state, const ModelParams& params);

}  // namespace coldcav
