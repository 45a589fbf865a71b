#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stacost {

/// A scan grid: explicit values or `points` samples between `from` and `to`.
struct DurationGrid {
  std::vector<double> values;
  double from = 0.0;
  double to = 0.0;
  int points = 0;
  bool log_spacing = true;

  std::vector<double> resolve() const;
  bool empty() const { return values.empty() && points <= 0; }
};

struct LzSettings {
  double gap = 0.1;
  double g0 = -0.2;
  double g1 = 0.2;
  double epsilon = 0.1;         // blend of the optimised counterdiabatic ramp
  double steepness = 40.0;
  double bob_amplitude = 100.0;
  double gap_factor = 2.0;      // second crossover search at gap * gap_factor
  std::vector<double> oc_durations;
  int oc_n_max = 30;
  double oc_gamma = 5e-3;
  std::size_t oc_max_evaluations = 24000;
};

struct OscillatorSettings {
  double omega0 = 1.0;
  double omega1 = 10.0;
  double beta = 3.0;
};

struct JcSettings {
  double cavity = 1.0;
  double detuning = 0.1;
  double g0 = 0.0;
  double g1 = 0.2;
  double alpha = 2.0;
  int cutoff = 40;
  bool direct_sum_cost = false;
};

struct ExperimentConfig {
  std::string name = "custom";
  std::string model = "lz";                 // lz | oscillator | jc
  std::vector<std::string> protocols;
  /// Durations with time-resolved output; the string "qsl" in JSON means the speed-limit time.
  std::vector<double> trajectory_durations;
  bool trajectory_at_qsl = false;
  DurationGrid scan;
  std::uint64_t seed = 1;
  int threads = 1;
  std::size_t steps = 10000;
  std::size_t record_points = 401;
  LzSettings lz;
  OscillatorSettings oscillator;
  JcSettings jc;
};

/// Parses a JSON config; unknown keys and malformed values throw std::invalid_argument.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical config with the thread count removed.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t h);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);
std::string preset_description(const std::string& name);

struct ValidationReport {
  std::vector<std::string> errors;    // schema or parameter problems; a run refuses these
  std::vector<std::string> warnings;  // physics validity; a run records them as cell failures
  bool ok() const { return errors.empty() && warnings.empty(); }
};

/// Schema and physics checks without running anything.
ValidationReport validate(const ExperimentConfig& cfg);

struct CellFailure {
  std::string cell;
  std::string message;
};

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::vector<CellFailure> failures;
  nlohmann::json summary;
};

/// Writes CSVs and summary.json under out_dir; a failing scan cell is recorded and skipped.
/// Throws std::invalid_argument when validation reports errors.
RunReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace stacost
