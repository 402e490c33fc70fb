#include "coldcav/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "coldcav/errors.hpp"

namespace coldcav::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw io_error("bad number '" + std::string(s) + "' in " + context);
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(const ScanTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "t,P_out,I,p,phi_cav\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_double(trace.times[i]) << ',' << format_double(trace.output_power[i])
        << ',' << format_double(trace.intensity[i]) << ','
        << format_double(trace.orientation[i]) << ','
        << format_double(trace.phi_cav[i]) << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

ScanTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty trace file: " + path);
  if (trim(line) != "t,P_out,I,p,phi_cav")
    throw io_error("unexpected trace header in " + path);
  ScanTrace trace;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 5) throw io_error("bad trace row in " + path);
    trace.times.push_back(parse_double(cols[0], path));
    trace.output_power.push_back(parse_double(cols[1], path));
    trace.intensity.push_back(parse_double(cols[2], path));
    trace.orientation.push_back(parse_double(cols[3], path));
    trace.phi_cav.push_back(parse_double(cols[4], path));
  }
  return trace;
}

void write_pump_csv(const zeeman::PumpTrajectory& trajectory,
                    const std::string& path, bool include_populations) {
  auto out = open_out(path);
  out << "t,N";
  if (include_populations) {
    for (int m = -4; m <= 4; ++m) out << ",g" << m;
    for (int mp = -5; mp <= 5; ++mp) out << ",e" << mp;
  }
  out << '\n';
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    out << format_double(trajectory.times[i]) << ','
        << format_double(trajectory.stretched[i]);
    if (include_populations) {
      const auto& p = trajectory.populations.at(i);
      for (double g : p.ground) out << ',' << format_double(g);
      for (double e : p.excited) out << ',' << format_double(e);
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_branch_csv(const BranchDiagram& diagram, const std::string& path) {
  auto out = open_out(path);
  out << "phi0,n_roots,I1,p1,class1,I2,p2,class2,I3,p3,class3\n";
  for (std::size_t i = 0; i < diagram.phi0_grid.size(); ++i) {
    const auto& fps = diagram.branches[i];
    out << format_double(diagram.phi0_grid[i]) << ',' << fps.size();
    for (std::size_t k = 0; k < 3; ++k) {
      if (k < fps.size()) {
        out << ',' << format_double(fps[k].intensity) << ','
            << format_double(fps[k].orientation) << ',' << to_string(fps[k].stability);
      } else {
        out << ",,,";
      }
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_map_csv(const InstabilityMap& map, const std::string& path) {
  auto out = open_out(path);
  out << "phi0,drive,n_roots,class1,class2,class3\n";
  for (const auto& cell : map.cells) {
    out << format_double(cell.phi0) << ',' << format_double(cell.drive) << ',';
    if (cell.failed) {
      out << "-1,failed,,";
    } else {
      out << cell.n_roots;
      for (std::size_t k = 0; k < 3; ++k) {
        out << ',';
        if (k < cell.classes.size()) out << to_string(cell.classes[k]);
      }
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

std::string cycle_report_json(const CycleReport& report) {
  std::ostringstream out;
  out << "{\n"
      << "  \"amplitude\": " << format_double(report.amplitude) << ",\n"
      << "  \"detected\": " << (report.detected ? "true" : "false") << ",\n"
      << "  \"frequency\": " << format_double(report.frequency()) << ",\n"
      << "  \"period\": " << format_double(report.period) << ",\n"
      << "  \"window_end\": " << format_double(report.window_end) << ",\n"
      << "  \"window_start\": " << format_double(report.window_start) << "\n"
      << "}\n";
  return out.str();
}

std::string scan_summary_json(const std::vector<SwitchEvent>& events,
                              const CycleReport& cycle) {
  std::ostringstream out;
  out << "{\n  \"cycle\": {\n"
      << "    \"amplitude\": " << format_double(cycle.amplitude) << ",\n"
      << "    \"detected\": " << (cycle.detected ? "true" : "false") << ",\n"
      << "    \"frequency\": " << format_double(cycle.frequency()) << ",\n"
      << "    \"period\": " << format_double(cycle.period) << "\n  },\n"
      << "  \"switches\": [";
  for (std::size_t i = 0; i < events.size(); ++i) {
    out << (i ? ",\n" : "\n") << "    {\"delta_power\": "
        << format_double(events[i].delta_power)
        << ", \"direction\": \"" << (events[i].upward ? "up" : "down")
        << "\", \"time\": " << format_double(events[i].time) << "}";
  }
  out << (events.empty() ? "" : "\n  ") << "]\n}\n";
  return out.str();
}

void write_text(const std::string& content, const std::string& path) {
  auto out = open_out(path);
  out << content;
  if (!out) throw io_error("write failed: " + path);
}

namespace {

struct SvgFrame {
  static constexpr int width = 840, height = 520;
  static constexpr int ml = 64, mr = 16, mt = 16, mb = 44;
  double x0, x1, y0, y1;

  double px(double x) const {
    return ml + (x - x0) / (x1 - x0) * (width - ml - mr);
  }
  double py(double y) const {
    return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb);
  }
};

void svg_axes(std::ostream& out, const SvgFrame& f, const std::string& xlabel,
              const std::string& ylabel) {
  out << "<rect x=\"" << f.ml << "\" y=\"" << f.mt << "\" width=\""
      << f.width - f.ml - f.mr << "\" height=\"" << f.height - f.mt - f.mb
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    char xbuf[32], ybuf[32];
    std::snprintf(xbuf, sizeof xbuf, "%.4g", xv);
    std::snprintf(ybuf, sizeof ybuf, "%.4g", yv);
    out << "<text x=\"" << f.px(xv) << "\" y=\"" << f.height - f.mb + 18
        << "\" font-size=\"12\" text-anchor=\"middle\">" << xbuf << "</text>\n";
    out << "<text x=\"" << f.ml - 6 << "\" y=\"" << f.py(yv) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << ybuf << "</text>\n";
  }
  out << "<text x=\"" << (f.ml + f.width - f.mr) / 2 << "\" y=\"" << f.height - 8
      << "\" font-size=\"13\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"14\" y=\"" << (f.mt + f.height - f.mb) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << (f.mt + f.height - f.mb) / 2 << ")\">" << ylabel << "</text>\n";
}

const char* class_color(StabilityClass c) {
  switch (c) {
    case StabilityClass::StableNode: return "#2166ac";
    case StabilityClass::StableFocus: return "#92c5de";
    case StabilityClass::Saddle: return "#fddbc7";
    case StabilityClass::UnstableFocus: return "#d6604d";
    case StabilityClass::UnstableNode: return "#b2182b";
  }
  return "#999999";
}

StabilityClass dominant_class(const StabilityCell& cell) {
  // most unstable class present, for the raster color
  auto rank = [](StabilityClass c) {
    switch (c) {
      case StabilityClass::UnstableFocus: return 4;
      case StabilityClass::UnstableNode: return 3;
      case StabilityClass::Saddle: return 2;
      case StabilityClass::StableFocus: return 1;
      case StabilityClass::StableNode: return 0;
    }
    return 0;
  };
  StabilityClass best = StabilityClass::StableNode;
  int best_rank = -1;
  for (auto c : cell.classes) {
    if (rank(c) > best_rank) {
      best_rank = rank(c);
      best = c;
    }
  }
  return best;
}

}  // namespace

void write_trace_svg(const ScanTrace& trace, const std::string& path) {
  auto out = open_out(path);
  SvgFrame f{};
  f.x0 = trace.times.empty() ? 0.0 : trace.times.front();
  f.x1 = trace.times.empty() ? 1.0 : trace.times.back();
  f.y0 = 0.0;
  f.y1 = 1.0;
  if (!trace.output_power.empty()) {
    f.y1 = *std::max_element(trace.output_power.begin(), trace.output_power.end());
    if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width
      << "\" height=\"" << f.height << "\">\n";
  svg_axes(out, f, "t [1/Gamma]", "P_out [arb]");
  if (trace.size() >= 2) {
    out << "<polyline fill=\"none\" stroke=\"#1b6ea8\" stroke-width=\"1\" points=\"";
    const std::size_t stride = std::max<std::size_t>(1, trace.size() / 4000);
    for (std::size_t i = 0; i < trace.size(); i += stride) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", f.px(trace.times[i]),
                    f.py(trace.output_power[i]));
      out << buf;
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw io_error("write failed: " + path);
}

void write_map_svg(const InstabilityMap& map, const std::string& path) {
  auto out = open_out(path);
  const int n_phi = static_cast<int>(map.phi0_grid.size());
  const int n_drive = static_cast<int>(map.drive_grid.size());
  SvgFrame f{};
  f.x0 = map.phi0_grid.front();
  f.x1 = map.phi0_grid.back();
  f.y0 = map.drive_grid.front();
  f.y1 = map.drive_grid.back();
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width
      << "\" height=\"" << f.height << "\">\n";
  const double cw = static_cast<double>(f.width - f.ml - f.mr) / n_phi;
  const double ch = static_cast<double>(f.height - f.mt - f.mb) / n_drive;
  for (int id = 0; id < n_drive; ++id) {
    for (int ip = 0; ip < n_phi; ++ip) {
      const auto& cell = map.at(id, ip);
      const char* color = cell.failed ? "#999999" : class_color(dominant_class(cell));
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                    "fill=\"%s\"%s/>\n",
                    f.ml + ip * cw, f.mt + (n_drive - 1 - id) * ch, cw + 0.5,
                    ch + 0.5, color,
                    cell.n_roots > 1 ? " stroke=\"#333\" stroke-width=\"0.3\"" : "");
      out << buf;
    }
  }
  svg_axes(out, f, "phi0 [rad]", "drive a_in");
  out << "</svg>\n";
  if (!out) throw io_error("write failed: " + path);
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw io_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw io_error(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

RunConfig apply_config(const std::map<std::string, std::string>& kv) {
  static const char* physical_keys[] = {
      "gamma_over_2pi", "wavelength",  "cavity_length", "input_transmission",
      "extra_loss",     "waist",       "dipole",        "saturation_intensity",
      "atom_number",    "atomic_detuning", "input_power"};
  static const char* model_keys[] = {"delta",   "phi0",  "gamma_cav",
                                     "kappa",   "cooperativity", "beta",
                                     "gamma_p", "drive", "variant"};
  static const char* protocol_keys[] = {"kind",       "phi0_start",
                                        "phi0_end",   "ramp_rate",
                                        "atom_decay_rate", "duration"};

  auto has = [&](const char* k) { return kv.count(k) > 0; };
  auto num = [&](const char* k) { return parse_double(kv.at(k), std::string("config key ") + k); };

  for (const auto& [key, value] : kv) {
    const bool known =
        std::any_of(std::begin(physical_keys), std::end(physical_keys),
                    [&](const char* k) { return key == k; }) ||
        std::any_of(std::begin(model_keys), std::end(model_keys),
                    [&](const char* k) { return key == k; }) ||
        std::any_of(std::begin(protocol_keys), std::end(protocol_keys),
                    [&](const char* k) { return key == k; });
    if (!known) throw std::invalid_argument("unknown config key '" + key + "'");
  }

  RunConfig rc;
  const bool any_physical =
      std::any_of(std::begin(physical_keys), std::end(physical_keys), has);
  if (any_physical) {
    PhysicalConfig pc;
    if (has("gamma_over_2pi")) pc.gamma_over_2pi = num("gamma_over_2pi");
    if (has("wavelength")) pc.wavelength = num("wavelength");
    if (has("cavity_length")) pc.cavity_length = num("cavity_length");
    if (has("input_transmission")) pc.input_transmission = num("input_transmission");
    if (has("extra_loss")) pc.extra_loss = num("extra_loss");
    if (has("waist")) pc.waist = num("waist");
    if (has("dipole")) pc.dipole = num("dipole");
    if (has("saturation_intensity")) pc.saturation_intensity = num("saturation_intensity");
    if (has("atom_number")) pc.atom_number = num("atom_number");
    if (has("atomic_detuning")) pc.atomic_detuning = num("atomic_detuning");
    if (has("input_power")) pc.input_power = num("input_power");
    rc.params = to_dimensionless(pc);
  }
  if (has("delta")) rc.params.delta = num("delta");
  if (has("phi0")) rc.params.phi0 = num("phi0");
  if (has("gamma_cav")) rc.params.gamma_cav = num("gamma_cav");
  if (has("kappa")) rc.params.kappa = num("kappa");
  if (has("cooperativity")) rc.params.cooperativity = num("cooperativity");
  if (has("beta")) rc.params.beta = num("beta");
  if (has("gamma_p")) rc.params.gamma_p = num("gamma_p");
  if (has("drive")) rc.params.drive = num("drive");
  if (has("variant")) {
    const std::string v = kv.at("variant");
    if (v == "simple") rc.params.variant = ModelVariant::Simple;
    else if (v == "saturated") rc.params.variant = ModelVariant::Saturated;
    else throw std::invalid_argument("config: variant must be simple|saturated");
  }

  if (has("kind")) {
    const std::string k = kv.at("kind");
    if (!has("duration")) throw std::invalid_argument("config: protocol needs duration");
    const double duration = num("duration");
    if (k == "static") {
      rc.protocol = ScanProtocol::static_phase(
          has("phi0_start") ? num("phi0_start") : rc.params.phi0, duration);
    } else if (k == "ramp") {
      if (!has("phi0_start") || !has("phi0_end"))
        throw std::invalid_argument("config: ramp needs phi0_start and phi0_end");
      rc.protocol = ScanProtocol::linear_ramp(num("phi0_start"), num("phi0_end"), duration);
    } else if (k == "atom_decay") {
      if (!has("atom_decay_rate"))
        throw std::invalid_argument("config: atom_decay needs atom_decay_rate");
      rc.protocol = ScanProtocol::atom_decay(
          has("phi0_start") ? num("phi0_start") : rc.params.phi0,
          num("atom_decay_rate"), duration);
    } else {
      throw std::invalid_argument("config: kind must be static|ramp|atom_decay");
    }
    rc.has_protocol = true;
  }
  return rc;
}

}  // namespace coldcav::io
