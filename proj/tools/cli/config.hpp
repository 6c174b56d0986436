#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinlink/network.hpp"
#include "spinlink/transport.hpp"

namespace spinlink::cli {

/// One problem found in a config file, located by path and 1-based line
/// (0 when the problem is the absence of something).
struct ConfigIssue {
  std::string path;
  int line = 0;
  std::string message;

  std::string str() const;
};

struct RunConfig {
  std::vector<ChannelConfig> channels;  // sorted by id
  ReservoirConfig reservoir;
  TransportOptions transport;
};

struct ConfigReport {
  std::optional<RunConfig> config;  // set only when there are no errors
  std::vector<ConfigIssue> errors;
  std::vector<std::string> warnings;
  /// Canonical echo of the parsed file with every key present; keys that
  /// were filled in are marked `# default`.
  std::string normalized;
};

/// Parses INI-style text:
///
///   [reservoir]      gamma_c_hz, gamma_s_hz, gamma_opt_hz, delta_b_hz, larmor_hz, memory_modes
///   [channel.<id>]   control_phase_rad, probe_phase_rad, control_rabi_hz, probe_rabi_hz,
///                    probe_on, polarization
///   [transport]      visibility, floor_fraction, peak_transmission
///   [edge.<i>.<j>]   gamma_c_hz
///
/// `gamma_*_hz` are rates in 1/s; `delta_b_hz` and `larmor_hz` are cyclic
/// frequencies converted to rad/s; Rabi frequencies are used as given.
/// Phases accept plain numbers or multiples of pi (`pi/2`, `-0.5*pi`).
/// All errors are collected rather than stopping at the first.
ConfigReport parse_config(std::string_view text, const std::string& path);

ConfigReport validate_config(const std::filesystem::path& path);

}  // namespace spinlink::cli
