// Command-line front end: optical pumping curves, steady-state branch
// diagrams, instability maps, time-domain scans, and unit conversion.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coldcav/errors.hpp"
#include "coldcav/io.hpp"
#include "coldcav/model.hpp"
#include "coldcav/physical.hpp"
#include "coldcav/steady_state.hpp"
#include "coldcav/zeeman.hpp"

namespace {

using namespace coldcav;

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
  std::string format = "csv";
  double tol = 1e-8;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_preset = true) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  if (with_preset)
    cmd->add_option("--preset", opts.preset, "scenario preset name");
  cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--format", opts.format, "csv|json|svg")
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->capture_default_str();
  cmd->add_option("--tol", opts.tol, "integrator relative tolerance")
      ->capture_default_str();
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  return (std::filesystem::path(opts.out_dir) / name).string();
}

// preset, then config overrides
struct Loaded {
  ModelParams params;
  ScanProtocol protocol;
  bool has_protocol = false;
};

Loaded load_scenario(const CommonOpts& opts) {
  Loaded l;
  if (!opts.preset.empty()) {
    const Preset p = preset_scenario(opts.preset);
    l.params = p.params;
    l.protocol = p.protocol;
    l.has_protocol = true;
  }
  if (!opts.config_path.empty()) {
    const auto kv = io::parse_config_file(opts.config_path);
    const io::RunConfig rc = io::apply_config(kv);
    if (opts.preset.empty()) {
      l.params = rc.params;
    } else {
      // keys present in the config override the preset field by field
      ModelParams& base = l.params;
      auto has = [&kv](const char* k) { return kv.count(k) > 0; };
      if (has("delta")) base.delta = rc.params.delta;
      if (has("phi0")) base.phi0 = rc.params.phi0;
      if (has("gamma_cav")) base.gamma_cav = rc.params.gamma_cav;
      if (has("kappa")) base.kappa = rc.params.kappa;
      if (has("cooperativity")) base.cooperativity = rc.params.cooperativity;
      if (has("beta")) base.beta = rc.params.beta;
      if (has("gamma_p")) base.gamma_p = rc.params.gamma_p;
      if (has("drive")) base.drive = rc.params.drive;
      if (has("variant")) base.variant = rc.params.variant;
    }
    if (rc.has_protocol) {
      l.protocol = rc.protocol;
      l.has_protocol = true;
    }
  }
  if (opts.preset.empty() && opts.config_path.empty())
    throw std::invalid_argument("need --preset or --config");
  return l;
}

int cmd_pump(const CommonOpts& opts, const std::vector<double>& intensities,
             double delta, double t_end, int n_points, bool populations) {
  std::ostringstream beta_json;
  beta_json << "{\n  \"delta\": " << io::format_double(delta) << ",\n  \"beta\": [";
  bool first = true;
  for (double intensity : intensities) {
    const auto traj = zeeman::evolve_populations(
        zeeman::SublevelPopulations::equal_ground(), intensity, delta,
        t_end > 0 ? t_end : 40.0 / (1.3e-5 * intensity), n_points, opts.tol,
        populations);
    char name[64];
    std::snprintf(name, sizeof name, "pump_I%g.csv", intensity);
    io::write_pump_csv(traj, out_path(opts, name), populations);
    const double beta = zeeman::extract_beta(traj, intensity);
    beta_json << (first ? "" : ",") << "\n    {\"I\": " << io::format_double(intensity)
              << ", \"beta\": " << io::format_double(beta)
              << ", \"rate\": " << io::format_double(beta * intensity) << "}";
    first = false;
    std::printf("I = %6.2f  beta = %.6e  beta*I = %.6e  N_end = %.6f\n", intensity,
                beta, beta * intensity, traj.stretched.back());
  }
  beta_json << "\n  ]\n}\n";
  io::write_text(beta_json.str(), out_path(opts, "pump_beta.json"));
  return 0;
}

int cmd_steady(const CommonOpts& opts, double phi0_min, double phi0_max, int n) {
  const Loaded l = load_scenario(opts);
  if (phi0_min == 0.0 && phi0_max == 0.0 && l.has_protocol) {
    phi0_min = std::min(l.protocol.phi0_start, l.protocol.phi0_end);
    phi0_max = std::max(l.protocol.phi0_start, l.protocol.phi0_end);
  }
  if (!(phi0_max > phi0_min))
    throw std::invalid_argument("steady: need --phi0-min < --phi0-max (or a ramp preset)");
  const BranchDiagram diagram = branch_diagram(l.params, phi0_min, phi0_max, n);
  io::write_branch_csv(diagram, out_path(opts, "branches.csv"));

  std::size_t multi = 0;
  for (const auto& b : diagram.branches)
    if (b.size() > 1) ++multi;
  std::printf("grid points: %zu, multi-root points: %zu\n",
              diagram.phi0_grid.size(), multi);
  std::printf("turning points:");
  for (double tp : diagram.turning_points) std::printf(" %.6f", tp);
  std::printf("\n");
  if (l.params.beta == 0.0) {
    try {
      std::printf("I_bist = %.6g\n", bistability_threshold(l.params));
    } catch (const std::invalid_argument&) {
    }
  }
  return 0;
}

int cmd_map(const CommonOpts& opts, std::pair<double, double> phi0_range,
            std::pair<double, double> drive_range, int n_phi, int n_drive) {
  const Loaded l = load_scenario(opts);
  const InstabilityMap map =
      instability_map(l.params, phi0_range.first, phi0_range.second, n_phi,
                      drive_range.first, drive_range.second, n_drive);
  io::write_map_csv(map, out_path(opts, "map.csv"));
  if (opts.format == "svg") io::write_map_svg(map, out_path(opts, "map.svg"));
  std::size_t unstable = 0, failed = 0;
  for (const auto& c : map.cells) {
    if (c.failed) ++failed;
    for (auto cls : c.classes)
      if (cls == StabilityClass::UnstableFocus) {
        ++unstable;
        break;
      }
  }
  std::printf("cells: %zu, with UnstableFocus: %zu, failed: %zu\n",
              map.cells.size(), unstable, failed);
  return failed == map.cells.size() && !map.cells.empty() ? 2 : 0;
}

int cmd_scan(const CommonOpts& opts, bool forward_only) {
  const Loaded l = load_scenario(opts);
  if (!l.has_protocol)
    throw std::invalid_argument("scan: preset/config must define a protocol");

  // ramps start dark at the scan edge; static and drift runs start on the
  // lowest fixed point (slightly perturbed so an unstable focus can unwind)
  SystemState state;
  if (l.protocol.kind != ScanKind::LinearPhaseRamp) {
    ModelParams q = l.params;
    q.phi0 = l.protocol.phi0_start;
    const auto fps = find_fixed_points(q);
    if (!fps.empty()) {
      state.field =
          steady_field(q, fps.front().intensity, fps.front().orientation) * 1.001;
      state.orientation = fps.front().orientation;
    }
  }
  const ScanTrace fwd = integrate(l.params, l.protocol, state, opts.tol);
  io::write_trace_csv(fwd, out_path(opts, "trace_forward.csv"));
  if (opts.format == "svg")
    io::write_trace_svg(fwd, out_path(opts, "trace_forward.svg"));

  std::vector<SwitchEvent> events = detect_switches(fwd, l.params.kappa);
  ScanTrace bwd;
  if (!forward_only && l.protocol.kind == ScanKind::LinearPhaseRamp) {
    SystemState end_state;
    end_state.field = {std::sqrt(std::max(fwd.intensity.back(), 0.0)), 0.0};
    end_state.orientation = fwd.orientation.back();
    const ScanProtocol back = ScanProtocol::linear_ramp(
        l.protocol.phi0_end, l.protocol.phi0_start, l.protocol.duration);
    bwd = integrate(l.params, back, end_state, opts.tol);
    io::write_trace_csv(bwd, out_path(opts, "trace_backward.csv"));
    if (opts.format == "svg")
      io::write_trace_svg(bwd, out_path(opts, "trace_backward.svg"));
    auto back_events = detect_switches(bwd, l.params.kappa);
    for (auto& e : back_events) e.time += l.protocol.duration;
    events.insert(events.end(), back_events.begin(), back_events.end());
  }

  CycleReport cycle;
  if (l.protocol.kind == ScanKind::StaticPhase) {
    cycle = detect_limit_cycle(fwd, 0.35);
  }
  io::write_text(io::scan_summary_json(events, cycle),
                 out_path(opts, "summary.json"));
  for (const auto& e : events)
    std::printf("switch %-4s at t = %.6g (|dP| = %.4g)\n",
                e.upward ? "up" : "down", e.time, std::abs(e.delta_power));
  if (cycle.detected)
    std::printf("limit cycle: period %.6g (frequency %.6g Gamma)\n", cycle.period,
                cycle.frequency());
  return 0;
}

int cmd_convert(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw std::invalid_argument("convert: need --config");
  const auto kv = io::parse_config_file(opts.config_path);
  const io::RunConfig rc = io::apply_config(kv);
  const ModelParams& p = rc.params;
  std::printf("delta = %s\n", io::format_double(p.delta).c_str());
  std::printf("phi0 = %s\n", io::format_double(p.phi0).c_str());
  std::printf("gamma_cav = %s\n", io::format_double(p.gamma_cav).c_str());
  std::printf("kappa = %s\n", io::format_double(p.kappa).c_str());
  std::printf("cooperativity = %s\n", io::format_double(p.cooperativity).c_str());
  std::printf("beta = %s\n", io::format_double(p.beta).c_str());
  std::printf("gamma_p = %s\n", io::format_double(p.gamma_p).c_str());
  std::printf("drive = %s\n", io::format_double(p.drive).c_str());
  std::printf("variant = %s\n", p.variant == ModelVariant::Simple ? "simple" : "saturated");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cold-atom cavity nonlinear dynamics simulator"};
  app.require_subcommand(1);

  CommonOpts pump_opts, steady_opts, map_opts, scan_opts, convert_opts;

  auto* pump = app.add_subcommand("pump", "Zeeman optical-pumping curves and beta table");
  std::vector<double> intensities{1, 5, 10, 12, 15, 20, 30, 40, 60};
  double pump_delta = 40.0, pump_t_end = 0.0;
  int pump_points = 600;
  pump->add_option("--intensities", intensities, "intensity list")
      ->delimiter(',')
      ->capture_default_str();
  pump->add_option("--delta", pump_delta, "detuning 2(w0-wL)/Gamma")->capture_default_str();
  pump->add_option("--t-end", pump_t_end, "integration span (0 = auto)");
  pump->add_option("--n-points", pump_points, "samples per curve")->capture_default_str();
  bool pump_populations = false;
  pump->add_flag("--populations", pump_populations,
                 "include the 20 sublevel populations in the CSV");
  add_common(pump, pump_opts, false);

  auto* steady = app.add_subcommand("steady", "fixed points / branch diagram");
  double phi0_min = 0.0, phi0_max = 0.0;
  int steady_n = 400;
  steady->add_option("--phi0-min", phi0_min, "sweep start");
  steady->add_option("--phi0-max", phi0_max, "sweep end");
  steady->add_option("--n", steady_n, "grid points")->capture_default_str();
  add_common(steady, steady_opts);

  auto* mapc = app.add_subcommand("map", "stability classification over (phi0, drive)");
  std::pair<double, double> phi0_range{-1.45, -1.05}, drive_range{1.0, 7.0};
  int n_phi = 80, n_drive = 40;
  mapc->add_option("--phi0-range", phi0_range, "min max")->capture_default_str();
  mapc->add_option("--drive-range", drive_range, "min max")->capture_default_str();
  mapc->add_option("--n-phi", n_phi, "phi0 resolution")->capture_default_str();
  mapc->add_option("--n-drive", n_drive, "drive resolution")->capture_default_str();
  add_common(mapc, map_opts);

  auto* scan = app.add_subcommand("scan", "time-domain run from preset or config");
  bool forward_only = false;
  scan->add_flag("--forward-only", forward_only, "skip the reverse ramp");
  add_common(scan, scan_opts);

  auto* convert = app.add_subcommand("convert", "PhysicalConfig -> ModelParams dump");
  add_common(convert, convert_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the offending flag / valid choices
    return code == 0 ? 0 : 1;      // help exits 0, any usage error exits 1
  }

  try {
    if (pump->parsed())
      return cmd_pump(pump_opts, intensities, pump_delta, pump_t_end, pump_points,
                      pump_populations);
    if (steady->parsed()) return cmd_steady(steady_opts, phi0_min, phi0_max, steady_n);
    if (mapc->parsed())
      return cmd_map(map_opts, phi0_range, drive_range, n_phi, n_drive);
    if (scan->parsed()) return cmd_scan(scan_opts, forward_only);
    if (convert->parsed()) return cmd_convert(convert_opts);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const coldcav::numerical_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const coldcav::io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  }
  return 0;
}
