#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "driftlab/kernels.hpp"
#include "driftlab/measures.hpp"
#include "driftlab/vec.hpp"

namespace driftlab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Malformed or missing config field; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

/// Parsed YAML document plus what is needed to stamp reports.
struct RunConfig {
  YAML::Node root;
  std::string text;
  std::uint64_t hash = 0;
  /// Directory relative file references resolve against.
  std::filesystem::path base_dir;

  bool has(const char* key) const { return static_cast<bool>(root[key]); }
  double number(const char* key) const;
  double number_or(const char* key, double fallback) const;
  int integer(const char* key) const;
  int integer_or(const char* key, int fallback) const;
  std::string text_field(const char* key) const;
  std::string text_or(const char* key, std::string fallback) const;
  Vec vector(const char* key) const;
  std::vector<Vec> points(const char* key, int dim) const;
  std::uint64_t seed(const CommonOptions& options, std::uint64_t fallback) const;
};

/// `-` reads stdin. Throws ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::string text, std::filesystem::path base_dir = ".");

/// Reads `kernel` (grammar text) and `dim`.
KernelSpec config_kernel(const RunConfig& config);

/// dirac(x=..), atoms(file=..) or atoms(x=[..], w=[..]), powerlaw(m=.., dim=..),
/// tilt(m=.., n=..), satellite(base=<measure>, eps=.., z=..). Densities are
/// discretized on a graded grid (optional cells=.., r_max=..) and normalized.
DiscreteMeasure parse_measure(std::string_view text, int dim, const std::filesystem::path& base_dir = ".");

/// One atom per CSV row, coordinates then weight; '#' lines skipped.
DiscreteMeasure read_atoms_csv(const std::filesystem::path& path, int dim);

/// Runs one subcommand and returns its exit code. Diagnostics go to `log`.
int run_command(std::string_view command, const CommonOptions& options, std::ostream& log);

/// Subcommands, in help order.
const std::vector<std::string>& command_names();

}  // namespace driftlab::cli
