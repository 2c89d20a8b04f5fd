#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace workbench::tools {

inline constexpr int kSchemaVersion = 1;

enum class ParamType { real, integer, text, choice };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::real;
  /// Empty when the parameter is optional with no default.
  std::string default_value;
  std::string help;
  std::vector<std::string> choices;
  bool required = false;
};

struct ExperimentInfo {
  std::string name;  // "<group> <command>", e.g. "queue simulate"
  std::string summary;
  std::vector<ParamSpec> params;
  bool stochastic = false;  // needs a seed
  bool has_csv = false;     // can emit a CSV path or density
};

struct ExperimentConfig {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::optional<std::uint64_t> seed;
  std::uint64_t replications = 1;
  std::string output = "json";
  std::string output_path;  // empty: standard output
};

struct Report {
  nlohmann::json document;
  std::optional<std::string> csv;
};

/// All experiments, sorted by name.
const std::vector<ExperimentInfo>& list_experiments();
const ExperimentInfo& find_experiment(const std::string& name);
nlohmann::json catalogue_json();

/// Validates the config against the experiment's schema and runs it. Throws
/// DomainError for schema violations and lets ModelError from the modules
/// propagate.
Report run(const ExperimentConfig& config);

/// The text written for a report in the requested output format.
std::string render(const Report& report, const std::string& output);

/// The echoed config of a report ("config" member) back as a config.
ExperimentConfig config_from_json(const nlohmann::json& echoed);

/// Flat key=value lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Applies the reserved keys (command, seed, replications, output,
/// output_path) of a key=value map to the config and treats the rest as
/// experiment parameters.
void apply_key_values(ExperimentConfig& config, const std::map<std::string, std::string>& values);

std::uint64_t parse_seed(const std::string& text);

/// Writes to a temporary file next to `path` and renames it into place.
void write_atomically(const std::string& path, const std::string& content);

/// 0 on success, 2 for validation errors, 3 for model errors.
int exit_code_for_current_exception();

}  // namespace workbench::tools
