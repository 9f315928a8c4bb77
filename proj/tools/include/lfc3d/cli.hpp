#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfc3d/fields.hpp"

namespace lfc3d::cli {

/// Everything a run depends on. Unset optionals fall back to
/// command-specific defaults.
struct RunConfig {
  std::string preset = "leveque-static";
  PresetOverrides overrides;
  std::optional<int> kappa;  ///< default 6; `convergence` runs 2, 4, 6 when unset
  int nodes = 64;            ///< nNodeS
  std::optional<int> nodes_t;  ///< nNodeT, defaults to nodes
  double xi = 0.0;
  std::vector<int> levels{32, 64, 128};
  std::string out;  ///< empty: standard output
  std::string format = "vtk";
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0: LFC3D_THREADS or hardware parallelism
  std::optional<int> resolution;  ///< tessellation (classify/verify) or export lattice
  int points = 200;               ///< classify seed count
};

/// Bad flags, config keys or values. Maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a TOML run file. Unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& toml_text, const std::string& source = "<string>");

/// Range checks shared by every subcommand.
void validate(const RunConfig& config);

/// Runs `lfc3d <args...>` (args exclude the program name). Returns 0 on
/// success, 1 on a usage or validation error and 2 when a numerical gate
/// or identity check fails.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lfc3d::cli
