#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdelab::experiment {

enum class Command { logistic_check, iterate_t, beta, coupling, assignment, identity_check };
enum class OutputFormat { csv, json };

std::string to_string(Command command);
Command command_from_string(const std::string& name);

struct GridSettings {
  double x_max = 40.0;
  double step = 0.01;
  std::size_t resolution = 10000;

  bool operator==(const GridSettings&) const = default;
};

struct IterationSettings {
  std::size_t max_iters = 200;
  double tolerance = 1e-9;
  std::string seed_function = "logistic-tail-squared";  // or "logistic-tail"
  std::size_t n_max = 50;
  double stop_tolerance = 1e-6;
  std::size_t x_stride = 10;   // CSV thinning for iterate-t
  std::size_t s_stride = 100;  // CSV thinning for beta

  bool operator==(const IterationSettings&) const = default;
};

struct BoundarySettings {
  std::string kind = "logistic";  // logistic | point_mass | uniform
  double a = 0.0;
  double b = 0.0;

  bool operator==(const BoundarySettings&) const = default;
};

struct MonteCarloSettings {
  std::vector<std::size_t> depths{0, 2, 4, 6, 8, 10};
  std::size_t replicates = 10000;
  double xi_cutoff = 30.0;
  BoundarySettings boundary{};
  std::vector<std::size_t> n{1, 2, 3, 5, 10, 50, 100};
  std::string law = "exponential";
  std::size_t identity_samples = 20;

  bool operator==(const MonteCarloSettings&) const = default;
};

struct OutputSettings {
  OutputFormat format = OutputFormat::csv;
  std::string path;  // empty: $RDELAB_OUTPUT_DIR, else ./rdelab-out

  bool operator==(const OutputSettings&) const = default;
};

struct ExperimentConfig {
  Command command = Command::logistic_check;
  std::uint64_t seed = 20240601;
  GridSettings grid{};
  IterationSettings iteration{};
  MonteCarloSettings monte_carlo{};
  OutputSettings output{};

  bool operator==(const ExperimentConfig&) const = default;
};

// Parse or range failure, tagged with the JSON path of the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& reason)
      : std::invalid_argument(field + ": " + reason), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses JSON text into a config, applying defaults for absent fields.
// Unknown fields, wrong types and out-of-range values throw ConfigError.
// Empty or whitespace-only text yields the default config.
ExperimentConfig validate_config(const std::string& raw);

// Range checks shared by the parser and by flag overrides.
void check_ranges(const ExperimentConfig& config);

// Canonical JSON: sorted keys, two-space indent, shortest round-trip numbers.
std::string to_canonical_json(const ExperimentConfig& config);

struct RunContext {
  std::filesystem::path output_dir;
  std::size_t workers = 1;
  std::string version;
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;  // result files, manifest last
  std::string summary;                       // human-readable lines
};

// Executes the configured experiment and writes results plus manifest.json
// into context.output_dir. Throws ConfigError, IoError or InvariantViolation.
RunOutcome run(const ExperimentConfig& config, const RunContext& context);

// Reads the config stored in a manifest written by run().
ExperimentConfig config_from_manifest(const std::filesystem::path& manifest);

// Output directory when the config leaves it empty.
std::filesystem::path default_output_dir();

std::string library_version();

}  // namespace rdelab::experiment
