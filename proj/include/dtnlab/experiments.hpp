#pragma once

#include "dtnlab/common.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace dtnlab {

/// Invalid configuration; the message names the offending key.
class ConfigError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Parsed `key = value` configuration. Lines are trimmed, `#` starts a
/// comment, keys may appear once. Tolerance overrides are written
/// `tol.<check id or prefix> = value`.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> entries;
  std::uint64_t seed = 1234;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  /// Override for a check id (longest matching prefix), or the default.
  double tolerance(const std::string& check_id, double fallback) const;

  /// Builds every catalog object the config names; throws ConfigError.
  void validate() const;
};

/// Experiment names accepted by `experiment`, `all` last.
const std::vector<std::string>& experiment_names();

struct CheckRecord {
  std::string check_id;
  std::string ref;  // descriptive label of the identity or oracle
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int jobs = 0;  // 0 keeps the OpenMP default
};

/// Runs the configured experiment(s) and writes manifest.json, one JSON
/// record file per experiment and CSV curves. Returns 0 if every check
/// passed, 1 otherwise; configuration errors throw ConfigError.
int run_experiments(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

struct ReportSummary {
  int checks = 0;
  int failures = 0;
  std::string table;
};
/// Reads the artifacts in `dir`; throws ContractError if the manifest is missing.
ReportSummary report_directory(const std::filesystem::path& dir);

}  // namespace dtnlab
