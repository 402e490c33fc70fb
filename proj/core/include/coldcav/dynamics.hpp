#pragma once

#include <vector>

#include "coldcav/model.hpp"

namespace coldcav {

enum class ScanKind { StaticPhase, LinearPhaseRamp, AtomDecayDrift };

// Time dependence of the externally controlled quantities during a run:
// phi0(t) for cavity-length scans and C(t) for the atom-loss drift.
struct ScanProtocol {
  ScanKind kind = ScanKind::StaticPhase;
  double phi0_start = 0.0;
  double phi0_end = 0.0;        // ramps only
  double ramp_rate = 0.0;       // rad per 1/Gamma, sign = sweep direction
  double atom_decay_rate = 0.0; // 1/e rate of C, AtomDecayDrift only
  double duration = 0.0;

  static ScanProtocol static_phase(double phi0, double duration);
  static ScanProtocol linear_ramp(double phi0_start, double phi0_end, double duration);
  static ScanProtocol atom_decay(double phi0, double decay_rate, double duration);

  double phi0_at(double t) const;
  double cooperativity_factor(double t) const;  // multiplies params.cooperativity
  // Experimental scans are adiabatic on cavity timescales: |rate|/kappa < 1e-2.
  bool is_quasi_static(double kappa) const;
  void validate() const;
};

struct ScanTrace {
  std::vector<double> times;
  std::vector<double> output_power;  // gamma_out * I, normalized units
  std::vector<double> intensity;
  std::vector<double> orientation;
  std::vector<double> phi_cav;  // dispersive round-trip phase

  std::size_t size() const { return times.size(); }
};

struct SwitchEvent {
  double time = 0.0;
  bool upward = false;
  double delta_power = 0.0;  // signed jump across the detection window
};

struct CycleReport {
  bool detected = false;
  double period = 0.0;     // units of 1/Gamma
  double amplitude = 0.0;  // peak-to-trough of output_power
  double window_start = 0.0;
  double window_end = 0.0;

  double frequency() const { return detected ? 1.0 / period : 0.0; }
};

// Adaptive RK5(4) integration of the coupled field/orientation system under
// `protocol`, sampled on a uniform grid via dense output. The orientation is
// clamped to [0,1] after every step (roundoff guard, tolerance 1e-12).
// n_samples = 0 picks a grid fine enough for the switch detector (spacing
// <= 1/kappa, capped at 400k samples).
ScanTrace integrate(const ModelParams& params, const ScanProtocol& protocol,
                    const SystemState& initial, double rel_tol,
                    int n_samples = 0, double output_coupling = 1.0);

// Jumps of output power exceeding 50% of the trace's global range within a
// window of 5/kappa, labeled up/down. Requires >= 100 samples.
std::vector<SwitchEvent> detect_switches(const ScanTrace& trace, double kappa);

// Discards the first settle_fraction of the trace, finds output-power peaks
// above half the residual amplitude (sub-sample accuracy via quadratic
// interpolation), and reports a cycle when >= 5 consecutive peaks have period
// dispersion < 10%. Throws numerical_error when the analysis window is
// shorter than two candidate periods.
CycleReport detect_limit_cycle(const ScanTrace& trace, double settle_fraction);

// gamma_p = 0 staircase run: ramp protocol, dark-cavity start. Returns the
// trace; the orientation is nondecreasing by construction.
ScanTrace stepwise_pumping_run(const ModelParams& params,
                               const ScanProtocol& protocol, double rel_tol);

}  // namespace coldcav
