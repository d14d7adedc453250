#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spinshell/basis.hpp"
#include "spinshell/spectral.hpp"

namespace spinshell {

enum class Command { spectrum, entropy, shells, fit, volume, page };

enum class ShellPolicyKind { peak_dos, by_center, by_window };

/// Fully validated description of one run. Every numeric field satisfies the
/// preconditions of the operations it feeds; the seed is always explicit so
/// every number in an output file is reproducible.
struct ExperimentConfig {
  int sites = 0;
  int left_sites = 0;                // l1
  int scan_min = 1;                  // volume scan range, inclusive
  int scan_max = 0;                  // 0 = floor(N/2)
  std::vector<double> delta2{0.0};
  std::size_t window_count = 0;      // 0 = max(20, total/300)
  double edge_trim = 0.02;

  ShellPolicyKind shell_policy = ShellPolicyKind::peak_dos;
  double shell_center = 0.0;
  double shell_width = 0.0;
  std::size_t shell_window = 0;

  /// Width of the central shell used for gamma estimates, as a fraction of
  /// the retained spectral span. Window-sized shells are too narrow here:
  /// the predicted exponent needs ln d_E on the scale of ln(DOS).
  double gamma_width_fraction = 0.10;

  std::size_t samples = 500;
  std::uint64_t seed = 0;
  double diag_tol = 1e-8;
  int threads = 0;

  std::filesystem::path outdir = ".";
  std::filesystem::path cache_dir;  // empty = <outdir>/cache
  bool use_cache = true;

  std::uint64_t page_d1 = 0;  // page command only
  std::uint64_t page_d2 = 0;
};

struct ParsedInvocation {
  Command command = Command::spectrum;
  ExperimentConfig config;
};

/// Parses argv-style arguments (without the program name). Supports a plain
/// key = value config file via --config, with command line flags taking
/// precedence, and named presets via --preset. Throws UsageError naming the
/// offending field on any invalid input.
ParsedInvocation parse_config(const std::vector<std::string>& args);

/// Help text for the CLI (also documents every default).
std::string usage_text();

struct FileRecord {
  std::string name;     // path relative to outdir
  std::uint64_t bytes = 0;
  std::string fnv1a64;  // hex digest of the file contents
};

/// What a run produced: config echo, emitted files with checksums, and
/// wall-clock per stage. Everything except the timings is reproducible
/// byte-for-byte given the same config and seed.
struct RunManifest {
  std::string command;
  std::string version;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<FileRecord> files;
  std::vector<std::pair<std::string, double>> timings_ms;
};

/// Executes one command end to end: obtains spectra (from the cache unless
/// disabled), runs the requested analysis, writes the CSV outputs and the
/// manifest.json into the output directory. `log` receives human-oriented
/// progress lines and the page command's numbers.
RunManifest run_command(const ParsedInvocation& invocation, std::ostream& log);

/// Environment variable overriding the spectra cache location.
inline constexpr const char* kCacheDirEnvVar = "SPINSHELL_CACHE_DIR";

}  // namespace spinshell
