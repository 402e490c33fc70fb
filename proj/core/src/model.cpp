#include "coldcav/model.hpp"

#include <cmath>
#include <stdexcept>

namespace coldcav {

double ModelParams::input_coupling() const { return std::sqrt(2.0 * gamma_cav); }

double ModelParams::drive_intensity() const {
  return 2.0 * gamma_cav * drive * drive;
}

void ModelParams::validate() const {
  if (!(gamma_cav > 0.0)) throw std::invalid_argument("ModelParams: gamma_cav must be > 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("ModelParams: kappa must be > 0");
  if (beta < 0.0) throw std::invalid_argument("ModelParams: beta must be >= 0");
  if (gamma_p < 0.0) throw std::invalid_argument("ModelParams: gamma_p must be >= 0");
  if (cooperativity < 0.0) throw std::invalid_argument("ModelParams: cooperativity must be >= 0");
  if (variant == ModelVariant::Simple && delta == 0.0)
    throw std::invalid_argument("ModelParams: delta = 0 is degenerate in the Simple variant");
}

double linear_phase(const ModelParams& params) {
  if (params.delta == 0.0)
    throw std::invalid_argument("linear_phase: delta = 0 (degenerate detuning)");
  return 2.0 * params.cooperativity * params.gamma_cav / params.delta;
}

double kerr_coefficient(const ModelParams& params) {
  if (params.delta == 0.0)
    throw std::invalid_argument("kerr_coefficient: delta = 0 (degenerate detuning)");
  const double d3 = params.delta * params.delta * params.delta;
  return 4.0 * params.cooperativity * params.gamma_cav / d3;
}

double total_phase_simple(const ModelParams& params, double intensity,
                          double orientation) {
  return params.phi0 + linear_phase(params) * (1.0 + orientation) -
         kerr_coefficient(params) * intensity;
}

std::complex<double> phi1_saturated(const ModelParams& params, double intensity) {
  const double s = 1.0 + params.delta * params.delta + 2.0 * intensity;
  const double scale = 2.0 * params.cooperativity * params.gamma_cav / s;
  return {scale * params.delta, scale};
}

PhaseResponse phase_response(const ModelParams& params, double intensity,
                             double orientation) {
  PhaseResponse r{};
  if (params.variant == ModelVariant::Simple) {
    const double phi_l = linear_phase(params);
    const double k = kerr_coefficient(params);
    r.loss = params.gamma_cav;
    r.phase = params.phi0 + phi_l * (1.0 + orientation) - k * intensity;
    r.dloss_dI = 0.0;
    r.dphase_dI = -k;
    r.dloss_dp = 0.0;
    r.dphase_dp = phi_l;
  } else {
    const double s = 1.0 + params.delta * params.delta + 2.0 * intensity;
    const std::complex<double> phi1 = phi1_saturated(params, intensity);
    const double op = 1.0 + orientation;
    r.loss = params.gamma_cav + phi1.imag() * op;
    r.phase = params.phi0 + phi1.real() * op;
    // d(Phi_1)/dI = -2 Phi_1 / s
    r.dloss_dI = -2.0 * phi1.imag() * op / s;
    r.dphase_dI = -2.0 * phi1.real() * op / s;
    r.dloss_dp = phi1.imag();
    r.dphase_dp = phi1.real();
  }
  return r;
}

double pump_rate(const ModelParams& params, double intensity) {
  if (params.variant == ModelVariant::Simple) return params.beta * intensity;
  const double d2 = params.delta * params.delta;
  const double s = 1.0 + d2 + 2.0 * intensity;
  return params.beta * (1.0 + d2) * intensity / s;
}

double pump_rate_dI(const ModelParams& params, double intensity) {
  if (params.variant == ModelVariant::Simple) return params.beta;
  const double d2 = params.delta * params.delta;
  const double s = 1.0 + d2 + 2.0 * intensity;
  return params.beta * (1.0 + d2) * (1.0 + d2) / (s * s);
}

std::complex<double> field_rhs(const SystemState& state, const ModelParams& params) {
  const PhaseResponse r = phase_response(params, state.intensity(), state.orientation);
  const std::complex<double> decay(r.loss, -r.phase);
  return (params.input_coupling() * params.drive - decay * state.field) *
         params.inv_round_trip();
}

double orientation_rhs(const SystemState& state, const ModelParams& params) {
  const double p = state.orientation;
  return -params.gamma_p * p + pump_rate(params, state.intensity()) * (1.0 - p);
}

}  // namespace coldcav
