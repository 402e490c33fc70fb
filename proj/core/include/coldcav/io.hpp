#pragma once

#include <map>
#include <string>

#include "coldcav/dynamics.hpp"
#include "coldcav/physical.hpp"
#include "coldcav/steady_state.hpp"
#include "coldcav/zeeman.hpp"

namespace coldcav::io {

// Doubles are written with 17 significant digits so CSV round-trips are
// bit-exact; identical runs produce byte-identical files.

std::string format_double(double v);

void write_trace_csv(const ScanTrace& trace, const std::string& path);
ScanTrace read_trace_csv(const std::string& path);

void write_pump_csv(const zeeman::PumpTrajectory& trajectory,
                    const std::string& path, bool include_populations = false);

void write_branch_csv(const BranchDiagram& diagram, const std::string& path);
void write_map_csv(const InstabilityMap& map, const std::string& path);

std::string cycle_report_json(const CycleReport& report);
std::string scan_summary_json(const std::vector<SwitchEvent>& events,
                              const CycleReport& cycle);
void write_text(const std::string& content, const std::string& path);

void write_trace_svg(const ScanTrace& trace, const std::string& path);
void write_map_svg(const InstabilityMap& map, const std::string& path);

// Flat key=value configuration with '#' comments and blank lines.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Builds run inputs from a parsed config: physical keys (when present) are
// converted via to_dimensionless, then direct model keys override, then
// protocol keys. Unknown keys throw std::invalid_argument.
struct RunConfig {
  ModelParams params;
  ScanProtocol protocol;
  bool has_protocol = false;
};
RunConfig apply_config(const std::map<std::string, std::string>& kv);

}  // namespace coldcav::io
