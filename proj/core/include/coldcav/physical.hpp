#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coldcav/dynamics.hpp"
#include "coldcav/model.hpp"

namespace coldcav {

// Raw experimental quantities; to_dimensionless folds them into ModelParams.
struct PhysicalConfig {
  double gamma_over_2pi = 5.2e6;   // natural linewidth Gamma/2pi [Hz]
  double wavelength = 852.35e-9;   // probe wavelength [m]
  double cavity_length = 0.25;     // geometric length [m], linear cavity
  double input_transmission = 0.10;  // t^2 of the coupling mirror
  double extra_loss = 0.01;        // other round-trip intensity losses
  double waist = 260e-6;           // beam waist [m]
  std::optional<double> dipole;    // transition dipole [C m]; default from Gamma
  std::optional<double> saturation_intensity;  // alternative to dipole [W/m^2]
  double atom_number = 2.7e7;      // N
  double atomic_detuning = 1.144e8;  // (w_atom - w_laser)/2pi [Hz]
  double input_power = 100e-6;     // P_in [W]

  void validate() const;
};

// Cs D2 line constants used by the presets.
namespace cesium_d2 {
inline constexpr double wavelength = 852.35e-9;   // m
inline constexpr double gamma_over_2pi = 5.2e6;   // Hz
}  // namespace cesium_d2

// g^2 = d^2 w_L / (2 eps0 hbar S c) with S = pi w^2 / 2; gamma_cav = t^2/2 +
// extra_loss/2; kappa = (gamma_cav/tau)/Gamma with tau = 2L/c; delta =
// 2*detuning/(Gamma/2pi); C = g^2 N/(gamma_cav Gamma); drive = 2 g
// sqrt(P/hbar w_L)/Gamma. The dipole defaults to the two-level
// spontaneous-emission value d^2 = 3 pi eps0 hbar c^3 Gamma / w0^3; a
// configured saturation intensity is converted through
// I_sat = c eps0 hbar^2 Gamma^2 / (4 d^2) and must agree with a configured
// dipole within 5%.
ModelParams to_dimensionless(const PhysicalConfig& config);

struct Preset {
  std::string name;
  std::string description;  // measured anchors vs derived defaults
  ModelParams params;
  ScanProtocol protocol;
};

// Known names: fig2, fig3_p1..fig3_p4, fig4, fig6_p1..fig6_p4, kerr_pure,
// stepwise. Throws std::invalid_argument for anything else.
Preset preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace coldcav
