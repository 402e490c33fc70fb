#include "coldcav/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coldcav/errors.hpp"
#include "coldcav/ode.hpp"

namespace coldcav {

ScanProtocol ScanProtocol::static_phase(double phi0, double duration) {
  ScanProtocol p;
  p.kind = ScanKind::StaticPhase;
  p.phi0_start = p.phi0_end = phi0;
  p.duration = duration;
  return p;
}

ScanProtocol ScanProtocol::linear_ramp(double phi0_start, double phi0_end,
                                       double duration) {
  ScanProtocol p;
  p.kind = ScanKind::LinearPhaseRamp;
  p.phi0_start = phi0_start;
  p.phi0_end = phi0_end;
  p.duration = duration;
  p.ramp_rate = (phi0_end - phi0_start) / duration;
  return p;
}

ScanProtocol ScanProtocol::atom_decay(double phi0, double decay_rate,
                                      double duration) {
  ScanProtocol p;
  p.kind = ScanKind::AtomDecayDrift;
  p.phi0_start = p.phi0_end = phi0;
  p.atom_decay_rate = decay_rate;
  p.duration = duration;
  return p;
}

double ScanProtocol::phi0_at(double t) const {
  if (kind == ScanKind::LinearPhaseRamp) return phi0_start + ramp_rate * t;
  return phi0_start;
}

double ScanProtocol::cooperativity_factor(double t) const {
  if (kind == ScanKind::AtomDecayDrift) return std::exp(-atom_decay_rate * t);
  return 1.0;
}

bool ScanProtocol::is_quasi_static(double kappa) const {
  if (kind != ScanKind::LinearPhaseRamp) return true;
  return std::abs(ramp_rate) / kappa < 1e-2;
}

void ScanProtocol::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("ScanProtocol: duration must be > 0");
  if (kind == ScanKind::LinearPhaseRamp) {
    const double implied = (phi0_end - phi0_start) / duration;
    if (std::abs(implied - ramp_rate) > 1e-9 * std::max(1.0, std::abs(implied)))
      throw std::invalid_argument("ScanProtocol: ramp_rate inconsistent with endpoints/duration");
  }
  if (kind == ScanKind::AtomDecayDrift && atom_decay_rate < 0.0)
    throw std::invalid_argument("ScanProtocol: atom_decay_rate must be >= 0");
}

ScanTrace integrate(const ModelParams& params, const ScanProtocol& protocol,
                    const SystemState& initial, double rel_tol, int n_samples,
                    double output_coupling) {
  params.validate();
  protocol.validate();
  if (rel_tol < 1e-12 || rel_tol > 1e-3)
    throw std::invalid_argument("integrate: rel_tol outside [1e-12, 1e-3]");
  if (initial.orientation < 0.0 || initial.orientation > 1.0)
    throw std::invalid_argument("integrate: initial orientation outside [0,1]");

  if (n_samples <= 0) {
    const double want = protocol.duration * params.kappa + 2.0;
    n_samples = static_cast<int>(std::clamp(want, 500.0, 400000.0));
  }

  ScanTrace trace;
  trace.times.resize(n_samples);
  for (int i = 0; i < n_samples; ++i)
    trace.times[i] = protocol.duration * static_cast<double>(i) / (n_samples - 1);
  trace.output_power.resize(n_samples);
  trace.intensity.resize(n_samples);
  trace.orientation.resize(n_samples);
  trace.phi_cav.resize(n_samples);

  ModelParams at_t = params;
  auto rhs = [&](double t, const std::array<double, 3>& y,
                 std::array<double, 3>& dy) {
    at_t.phi0 = protocol.phi0_at(t);
    at_t.cooperativity = params.cooperativity * protocol.cooperativity_factor(t);
    SystemState s;
    s.field = {y[0], y[1]};
    s.orientation = std::clamp(y[2], 0.0, 1.0);
    s.time = t;
    const std::complex<double> fa = field_rhs(s, at_t);
    dy[0] = fa.real();
    dy[1] = fa.imag();
    dy[2] = orientation_rhs(s, at_t);
  };

  auto record = [&](int idx, double t, const std::array<double, 3>& y) {
    const double intensity = y[0] * y[0] + y[1] * y[1];
    const double p = std::clamp(y[2], 0.0, 1.0);
    at_t.phi0 = protocol.phi0_at(t);
    at_t.cooperativity = params.cooperativity * protocol.cooperativity_factor(t);
    trace.intensity[idx] = intensity;
    trace.output_power[idx] = output_coupling * intensity;
    trace.orientation[idx] = p;
    trace.phi_cav[idx] = phase_response(at_t, intensity, p).phase;
  };

  std::array<double, 3> y{initial.field.real(), initial.field.imag(),
                          initial.orientation};
  record(0, 0.0, y);
  int next = 1;

  OdeOptions opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = rel_tol * 1e-2;
  integrate_dopri5<3>(
      rhs, y, 0.0, protocol.duration, opt,
      [](std::array<double, 3>& s) { s[2] = std::clamp(s[2], 0.0, 1.0); },
      [&](const DenseSegment<3>& seg, const std::array<double, 3>&) {
        std::array<double, 3> ys;
        while (next < n_samples && trace.times[next] <= seg.t0 + seg.h) {
          seg.evaluate(trace.times[next], ys);
          record(next, trace.times[next], ys);
          ++next;
        }
      });
  while (next < n_samples) record(next++, protocol.duration, y);
  return trace;
}

std::vector<SwitchEvent> detect_switches(const ScanTrace& trace, double kappa) {
  if (trace.size() < 100)
    throw std::invalid_argument("detect_switches: need at least 100 samples");
  if (!(kappa > 0.0)) throw std::invalid_argument("detect_switches: kappa must be > 0");

  const auto& p = trace.output_power;
  const auto& t = trace.times;
  const std::size_t n = p.size();
  const double lo = *std::min_element(p.begin(), p.end());
  const double hi = *std::max_element(p.begin(), p.end());
  const double range = hi - lo;
  std::vector<SwitchEvent> events;
  if (range <= 0.0) return events;

  const double window = 5.0 / kappa;
  const double threshold = 0.5 * range;

  // forward difference across the window; contiguous same-sign crossings
  // collapse to one event at the steepest sample
  std::size_t j = 0;
  int active_sign = 0;
  std::size_t best_idx = 0;
  double best_slope = 0.0, jump = 0.0;

  auto flush = [&]() {
    if (active_sign != 0) {
      events.push_back({t[best_idx], active_sign > 0, jump});
      active_sign = 0;
    }
  };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    while (j + 1 < n && t[j] < t[i] + window) ++j;
    const double d = p[j] - p[i];
    const int sign = (d > threshold) ? 1 : (d < -threshold ? -1 : 0);
    if (sign != active_sign) flush();
    if (sign != 0) {
      const double slope = std::abs(p[i + 1] - p[i]);
      if (active_sign == 0) {
        active_sign = sign;
        best_idx = i;
        best_slope = slope;
        jump = d;
      } else {
        if (slope > best_slope) {
          best_slope = slope;
          best_idx = i;
        }
        if (std::abs(d) > std::abs(jump)) jump = d;
      }
    }
  }
  flush();
  return events;
}

CycleReport detect_limit_cycle(const ScanTrace& trace, double settle_fraction) {
  if (settle_fraction <= 0.0 || settle_fraction >= 1.0)
    throw std::invalid_argument("detect_limit_cycle: settle_fraction must be in (0,1)");
  if (trace.size() < 16)
    throw std::invalid_argument("detect_limit_cycle: trace too short");

  const auto& tt = trace.times;
  const auto& pp = trace.output_power;
  const double t_settle = tt.front() + settle_fraction * (tt.back() - tt.front());
  std::size_t start = 0;
  while (start < tt.size() && tt[start] < t_settle) ++start;
  if (tt.size() - start < 8)
    throw std::invalid_argument("detect_limit_cycle: nothing left after settling");

  CycleReport report;
  report.window_start = tt[start];
  report.window_end = tt.back();

  double lo = pp[start], hi = pp[start];
  for (std::size_t i = start; i < pp.size(); ++i) {
    lo = std::min(lo, pp[i]);
    hi = std::max(hi, pp[i]);
  }
  report.amplitude = hi - lo;
  // converged trace: residual ripple at the integrator-tolerance scale is not
  // an oscillation (physical cycles swing at least at the percent level)
  if (report.amplitude <= 1e-12 + 1e-6 * std::max(std::abs(hi), std::abs(lo)))
    return report;

  const double level = lo + 0.5 * report.amplitude;
  std::vector<double> peaks;
  for (std::size_t i = std::max(start + 1, std::size_t{1}); i + 1 < pp.size(); ++i) {
    if (pp[i] > level && pp[i] >= pp[i - 1] && pp[i] > pp[i + 1]) {
      // quadratic interpolation around the discrete maximum
      const double y0 = pp[i - 1], y1 = pp[i], y2 = pp[i + 1];
      const double denom = y0 - 2.0 * y1 + y2;
      double shift = 0.0;
      if (denom < 0.0) shift = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
      const double dt = tt[i + 1] - tt[i];
      peaks.push_back(tt[i] + shift * dt);
    }
  }

  const double window_len = report.window_end - report.window_start;
  if (peaks.size() < 3) {
    if (peaks.size() == 2) {
      const double candidate = peaks[1] - peaks[0];
      if (window_len < 2.0 * candidate)
        throw numerical_error(
            "detect_limit_cycle: window shorter than two candidate periods");
    }
    return report;  // not periodic as far as this window can tell
  }

  std::vector<double> periods(peaks.size() - 1);
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) periods[i] = peaks[i + 1] - peaks[i];

  {
    std::vector<double> sorted = periods;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (window_len < 2.0 * median)
      throw numerical_error("detect_limit_cycle: window shorter than two candidate periods");
  }

  // longest run of consecutive periods with (max-min)/mean < 10%
  std::size_t best_begin = 0, best_len = 0;
  std::size_t run_begin = 0;
  double run_min = periods[0], run_max = periods[0], run_sum = periods[0];
  std::size_t run_len = 1;
  auto consider = [&]() {
    if (run_len > best_len) {
      best_len = run_len;
      best_begin = run_begin;
    }
  };
  for (std::size_t i = 1; i < periods.size(); ++i) {
    const double nmin = std::min(run_min, periods[i]);
    const double nmax = std::max(run_max, periods[i]);
    const double nmean = (run_sum + periods[i]) / static_cast<double>(run_len + 1);
    if ((nmax - nmin) / nmean < 0.10) {
      run_min = nmin;
      run_max = nmax;
      run_sum += periods[i];
      ++run_len;
    } else {
      consider();
      run_begin = i;
      run_min = run_max = run_sum = periods[i];
      run_len = 1;
    }
  }
  consider();

  // >= 5 consecutive agreeing peaks means >= 4 periods in the run
  if (best_len >= 4) {
    double sum = 0.0;
    for (std::size_t i = best_begin; i < best_begin + best_len; ++i) sum += periods[i];
    report.detected = true;
    report.period = sum / static_cast<double>(best_len);
  }
  return report;
}

ScanTrace stepwise_pumping_run(const ModelParams& params,
                               const ScanProtocol& protocol, double rel_tol) {
  if (params.gamma_p != 0.0)
    throw std::invalid_argument("stepwise_pumping_run: requires gamma_p = 0");
  if (protocol.kind != ScanKind::LinearPhaseRamp)
    throw std::invalid_argument("stepwise_pumping_run: requires a LinearPhaseRamp protocol");
  SystemState dark;
  return integrate(params, protocol, dark, rel_tol);
}

}  // namespace coldcav
