#pragma once

#include <stdexcept>
#include <string>

namespace adjg::scenario {

// Exit codes of the scenario runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;

// Structural problems: unreadable file, malformed JSON, unknown or missing
// keys, wrong value types.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Schema-valid configs whose values the owning module rejects.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Loads, validates and dispatches one scenario config; writes the scenario's
// JSON/CSV outputs into its output_dir. On failure prints one machine-readable
// error record to stderr and returns the matching exit code.
int run_scenario(const std::string& config_path);

// Reads just enough of the config to name its kind.
std::string config_kind(const std::string& config_path);

// Documentation of every file and CSV column the given kind emits.
std::string describe_output(const std::string& kind);

}  // namespace adjg::scenario
