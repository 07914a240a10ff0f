#pragma once

// Experiment front-end: one binary with subcommands
//   measure, decay, sobolev-probe, pigeonhole, roth, detect.
// Parameters come from flags or a JSON config file (--config); flags win.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracprog::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kPreconditionError = 3,
  kResourceError = 4,
};

inline constexpr const char* kVersion = "1.0.0";

struct ExperimentConfig {
  std::string subcommand;
  // Every parameter other than the subcommand, keyed by long flag name
  // ("J", "seed", "out", "family", ...). Values are already typed.
  nlohmann::json params = nlohmann::json::object();
  bool show_help = false;
  std::string help_text;
};

// Flag names accepted by a subcommand (global ones included).
std::vector<std::string> accepted_keys(const std::string& subcommand);

// Parses argv (argv[0] is the program name). Throws ConfigError on malformed
// input, unknown keys or out-of-range values.
ExperimentConfig parse_arguments(const std::vector<std::string>& args);

// Runs a parsed config; the JSON report goes to --out or to `out`.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

// parse_arguments + run with exceptions mapped to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

// Writes `bytes` to a temp file next to `path` and renames it into place.
void write_atomically(const std::string& path, const std::string& bytes);

// "%.17g".
std::string format_double(double v);

}  // namespace fracprog::cli
