#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace spinlink::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,  // also usage and output-directory errors
  kInstability = 2,
  kNumericFailure = 3,
};

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  bool force = false;
  std::optional<std::size_t> grid_points;
};

/// Output files of a command, keyed by file name, in write order.
using OutputFiles = std::map<std::string, std::string>;

/// `validate`: prints the normalized config (or every error) and returns the exit code.
int run_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// phase-sweep, transport, noise-spectrum or discord. Everything is computed
/// before the first file is written; on failure nothing is left in `out`.
int run_simulation(const std::string& command, const RunOptions& options, std::ostream& log,
                   std::ostream& err);

std::string tool_version();

}  // namespace spinlink::cli
