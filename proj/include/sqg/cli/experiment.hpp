#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqg/lattice.hpp"

namespace sqg::cli {

using Json = nlohmann::ordered_json;

enum class Experiment {
  partition_check,
  verify_identity,
  constants,
  solve,
  illpose_step1,
  illpose_step2,
  illpose_step3,
};

const char* to_string(Experiment e) noexcept;
// Throws PreconditionError for an unknown name.
Experiment parse_experiment(const std::string& name);
std::vector<std::string> experiment_names();

// Parsed experiment configuration. `params` holds the per-experiment
// parameters with every default filled in, so the echo is complete.
struct ExperimentConfig {
  Experiment experiment = Experiment::partition_check;
  int lattice_size = 64;
  double lattice_spacing = 0.25;
  std::uint64_t seed = 1;
  std::filesystem::path output = "sqglab-out";
  int threads = 1;
  Json params = Json::object();

  // Parses and validates; throws PreconditionError naming the offending key.
  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);

  // Rejects parameters that violate a precondition of the invoked modules.
  void validate() const;
  FrequencyLattice lattice() const;
  Json to_json() const;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "in"
  double threshold = 0.0;
  double threshold_high = 0.0;  // upper end for "in"
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<Table> tables;
  std::vector<Check> checks;
  Json summary = Json::object();
  // Set when the run stopped early; the tables hold what was computed.
  std::optional<std::string> aborted;
  double wall_seconds = 0.0;

  bool passed() const;
  Table& table(const std::string& name);
  const Table& table(const std::string& name) const;
  Json to_json() const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

enum class Format { csv, json };

// Writes the report into config.output: report.json, or one CSV per table
// plus checks.csv and summary.csv. Wall-clock time goes to timing.json so
// that the report files are identical for identical configurations.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, Format format);

// Formats a double with 17 significant digits.
std::string format_number(double v);

}  // namespace sqg::cli
