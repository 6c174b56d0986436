#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <system_error>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "cli/config.hpp"
#include "spinlink/dynamics.hpp"
#include "spinlink/errors.hpp"
#include "spinlink/gaussian.hpp"
#include "spinlink/network.hpp"
#include "spinlink/transport.hpp"

#ifndef SPINLINK_VERSION
#define SPINLINK_VERSION "0.0.0"
#endif

namespace spinlink::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kPhaseGridDefault = 361;
constexpr std::size_t kDetuningGridDefault = 401;
constexpr std::size_t kSpectrumGridDefault = 4096;
// Transport grid spans this many EIT half-widths either side of resonance.
constexpr double kTransportSpanWidths = 5.0;
// Spectrum grid spans this many slowest decay rates either side of ω_L.
constexpr double kSpectrumSpanRates = 50.0;

struct Computation {
  OutputFiles files;
  Json extra = Json::object();
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < length; ++k) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return hex.str();
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string number(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

Json mode_labels(const CoupledModeNetwork& net) {
  Json labels = Json::array();
  for (const auto& m : net.modes) labels.push_back(m.label);
  return labels;
}

Computation phase_sweep_command(const RunConfig& cfg, std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  const auto sweep = phase_sweep(cfg.channels, cfg.reservoir, grid, cfg.transport.visibility);
  std::ostringstream csv;
  write_phase_sweep_csv(csv, sweep);
  Computation out;
  out.files["phase_sweep.csv"] = csv.str();
  out.extra["beam_splitter_ratio"] = beam_splitter_ratio(cfg.reservoir);
  return out;
}

Computation transport_command(const RunConfig& cfg, std::size_t points) {
  double width = 0.0;
  for (const auto& c : cfg.channels) {
    if (c.id == 1 || c.id == 2) {
      width = std::max(width, eit_linewidth(c.control_rabi, cfg.reservoir.optical_decay,
                                            cfg.reservoir.spin_decay));
    }
  }
  if (width == 0.0) {
    throw StructuralError("transport needs channels 1 and 2");
  }
  const auto grid = uniform_grid(0.0, kTransportSpanWidths * width, points);
  const auto result = transport_spectrum(cfg.channels, cfg.reservoir, grid, cfg.transport);
  std::ostringstream csv;
  write_transport_csv(csv, result);
  std::ostringstream meta;
  meta << "isolation_db=" << number(result.isolation_db) << '\n'
       << "floor=" << number(result.floor) << '\n'
       << "beam_splitter_ratio=" << number(beam_splitter_ratio(cfg.reservoir)) << '\n';
  Computation out;
  out.files["transport.csv"] = csv.str();
  out.files["transport_meta.txt"] = meta.str();
  return out;
}

std::vector<Observable> channel_observables(const CoupledModeNetwork& net) {
  const auto n = net.n_modes();
  std::vector<Observable> obs;
  std::vector<std::pair<int, std::size_t>> channels;
  for (std::size_t m = 0; m < n; ++m) {
    if (net.modes[m].kind == ModeKind::channel) channels.push_back({net.modes[m].channel_id, m});
  }
  for (const auto& [id, m] : channels) {
    const auto s = std::to_string(id);
    obs.push_back(quadrature_observable(n, m, Quadrature::x, "var_x" + s));
    obs.push_back(quadrature_observable(n, m, Quadrature::p, "var_p" + s));
  }
  for (std::size_t a = 0; a < channels.size(); ++a) {
    for (std::size_t b = a + 1; b < channels.size(); ++b) {
      const auto i = std::to_string(channels[a].first);
      const auto j = std::to_string(channels[b].first);
      const ModePair pair(channels[a].second, channels[b].second);
      obs.push_back(joint_observable(n, pair, Sign::minus, Quadrature::x,
                                     "var_x" + i + "_minus_x" + j));
      obs.push_back(joint_observable(n, pair, Sign::plus, Quadrature::p,
                                     "var_p" + i + "_plus_p" + j));
    }
  }
  return obs;
}

Computation noise_spectrum_command(const RunConfig& cfg, std::size_t points) {
  const auto net = build_network(cfg.channels, cfg.reservoir);
  const auto dd = drift_diffusion(net);
  const auto hurwitz = hurwitz_check(dd.drift);
  if (!hurwitz.stable) {
    // noise_spectrum raises the instability with the eigenvalue.
    noise_spectrum(dd, {}, {cfg.reservoir.larmor_frequency});
  }
  const double slowest = -hurwitz.max_real_part;
  const auto grid = uniform_grid(cfg.reservoir.larmor_frequency, kSpectrumSpanRates * slowest, points);
  const auto spectrum = noise_spectrum(dd, channel_observables(net), grid);

  std::ostringstream csv;
  write_spectrum_csv(csv, spectrum);
  const auto nearest = static_cast<std::size_t>(
      std::min_element(grid.begin(), grid.end(),
                       [&](double a, double b) {
                         return std::abs(a - cfg.reservoir.larmor_frequency) <
                                std::abs(b - cfg.reservoir.larmor_frequency);
                       }) -
      grid.begin());
  std::ostringstream meta;
  meta << "omega_rad_s=" << number(grid[nearest]) << '\n';
  for (std::size_t o = 0; o < spectrum.names.size(); ++o) {
    meta << spectrum.names[o] << "_db=" << number(spectrum.db_rel_shot[o][nearest]) << '\n';
  }
  Computation out;
  out.files["noise_spectrum.csv"] = csv.str();
  out.files["spectrum_meta.txt"] = meta.str();
  out.extra["mode_labels"] = mode_labels(net);
  return out;
}

Computation discord_command(const RunConfig& cfg) {
  const auto net = build_network(cfg.channels, cfg.reservoir);
  const auto sigma = steady_state_covariance(drift_diffusion(net));

  std::ostringstream csv;
  csv << "channel_i,channel_j,discord,witness_lhs,witness_rhs\n";
  for (std::size_t a = 0; a < cfg.channels.size(); ++a) {
    for (std::size_t b = a + 1; b < cfg.channels.size(); ++b) {
      const int i = cfg.channels[a].id;
      const int j = cfg.channels[b].id;
      const std::size_t mi = net.channel_mode(i);
      const std::size_t mj = net.channel_mode(j);
      const double d = gaussian_discord(reduce(sigma, {mi, mj}));
      const ModePair pair(mi, mj);
      const double lhs = joint_quadrature_variance(sigma, pair, Sign::minus, Quadrature::x) +
                         joint_quadrature_variance(sigma, pair, Sign::plus, Quadrature::p);
      const auto xi = CovarianceMatrix::x_index(mi), xj = CovarianceMatrix::x_index(mj);
      const auto pi = CovarianceMatrix::p_index(mi), pj = CovarianceMatrix::p_index(mj);
      const double rhs =
          0.5 * (sigma(xi, xi) + sigma(xj, xj)) + 0.5 * (sigma(pi, pi) + sigma(pj, pj));
      csv << i << ',' << j << ',' << number(d) << ',' << number(lhs) << ',' << number(rhs) << '\n';
    }
  }
  std::ostringstream cov;
  write_covariance_csv(cov, sigma);
  Computation out;
  out.files["discord.csv"] = csv.str();
  out.files["steady_state_covariance.csv"] = cov.str();
  out.extra["mode_labels"] = mode_labels(net);
  return out;
}

bool directory_has_entries(const fs::path& dir) {
  return fs::exists(dir) && fs::directory_iterator(dir) != fs::directory_iterator();
}

// Writes every file into a staging directory inside `out`, then moves them
// into place. Any failure removes what was written.
void commit(const fs::path& out, const OutputFiles& files) {
  fs::create_directories(out);
  const fs::path staging = out / ".spinlink-staging";
  fs::remove_all(staging);
  fs::create_directory(staging);
  std::vector<fs::path> placed;
  try {
    for (const auto& [name, content] : files) {
      std::ofstream f(staging / name, std::ios::binary);
      f << content;
      f.close();
      if (!f) throw fs::filesystem_error("cannot write", staging / name, std::make_error_code(std::errc::io_error));
    }
    for (const auto& [name, content] : files) {
      fs::rename(staging / name, out / name);
      placed.push_back(out / name);
    }
    fs::remove_all(staging);
  } catch (...) {
    std::error_code ignored;
    for (const auto& p : placed) fs::remove(p, ignored);
    fs::remove_all(staging, ignored);
    throw;
  }
}

}  // namespace

std::string tool_version() { return SPINLINK_VERSION; }

int run_validate(const fs::path& config, std::ostream& out, std::ostream& err) {
  const auto report = validate_config(config);
  for (const auto& e : report.errors) err << "error: " << e.str() << '\n';
  if (!report.errors.empty()) return kConfigError;
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  out << report.normalized;
  return kOk;
}

int run_simulation(const std::string& command, const RunOptions& options, std::ostream& log,
                   std::ostream& err) {
  const std::string started = utc_now();
  const auto report = validate_config(options.config);
  for (const auto& e : report.errors) err << "error: " << e.str() << '\n';
  if (!report.errors.empty()) return kConfigError;
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  const RunConfig& cfg = *report.config;

  if (fs::exists(options.out) && !fs::is_directory(options.out)) {
    err << "error: output path " << options.out << " exists and is not a directory\n";
    return kConfigError;
  }
  if (directory_has_entries(options.out) && !options.force) {
    err << "error: output directory " << options.out << " is not empty (use --force)\n";
    return kConfigError;
  }
  if (options.grid_points && *options.grid_points < 2) {
    err << "error: --grid-points must be at least 2\n";
    return kConfigError;
  }

  Computation result;
  std::size_t points = 0;
  try {
    if (command == "phase-sweep") {
      points = options.grid_points.value_or(kPhaseGridDefault);
      result = phase_sweep_command(cfg, points);
    } else if (command == "transport") {
      points = options.grid_points.value_or(kDetuningGridDefault);
      result = transport_command(cfg, points);
    } else if (command == "noise-spectrum") {
      points = options.grid_points.value_or(kSpectrumGridDefault);
      result = noise_spectrum_command(cfg, points);
    } else if (command == "discord") {
      result = discord_command(cfg);
    } else {
      err << "error: unknown command '" << command << "'\n";
      return kConfigError;
    }
  } catch (const InstabilityError& e) {
    err << "error: model instability: " << e.what() << '\n';
    return kInstability;
  } catch (const NumericError& e) {
    err << "error: numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  Json manifest;
  manifest["tool"] = "spinlink";
  manifest["tool_version"] = tool_version();
  manifest["command"] = command;
  manifest["config_path"] = options.config.string();
  manifest["config_sha256"] = sha256_hex(read_file(options.config));
  manifest["seed"] = options.seed;
  if (points > 0) manifest["grid_points"] = points;
  manifest["started_utc"] = started;
  manifest["finished_utc"] = utc_now();
  manifest["outputs"] = Json::array();
  for (const auto& [name, content] : result.files) manifest["outputs"].push_back(name);
  manifest["warnings"] = report.warnings;
  for (const auto& [key, value] : result.extra.items()) manifest[key] = value;
  result.files["manifest.json"] = manifest.dump(2) + "\n";

  try {
    commit(options.out, result.files);
  } catch (const std::exception& e) {
    err << "error: writing outputs to " << options.out << " failed: " << e.what() << '\n';
    return kConfigError;
  }
  for (const auto& [name, content] : result.files) log << (options.out / name).string() << '\n';
  return kOk;
}

}  // namespace spinlink::cli
