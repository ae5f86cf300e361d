#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polent::harness {

/// One squeezed source, stored linear after parsing. Config files may give
/// the variances in dB (sq_db / asq_db) or linear (sq / asq), never both.
struct SourceConfig {
  double v_sq = 1.0;
  double v_asq = 1.0;
  double theta_sq_deg = 4.5;
  double s3_mean = 1.0;  // metadata only
};

enum class GainStrategy { fixed, paper_formula, brute_force };

struct ImperfectionConfig {
  double efficiency_c = 1.0;
  double efficiency_d = 1.0;
  double visibility = 1.0;
  double angle_error_c_deg = 0.0;
  double angle_error_d_deg = 0.0;
};

struct McSettings {
  long long samples = 1'000'000;
  std::uint64_t seed = 20260810;
};

/// Optional raw spectrum-analyser readings for the dBm arithmetic rows.
struct SpectrumConfig {
  double signal_dbm = 0.0;
  double shot_dbm = 0.0;
  double electronic_floor_dbm = -85.5;
  double rbw_hz = 300e3;
  double vbw_hz = 30.0;
  double frequency_hz = 17.5e6;
};

struct SweepConfig {
  std::string axis;
  std::vector<double> grid;
};

struct OutputConfig {
  std::string csv;        // empty: do not write
  std::string json;       // empty: do not write
  std::string plots_dir;  // empty: do not write (sweeps only)
};

/// Parsed, validated experiment description. Unknown config keys are
/// rejected at parse time (strict schema, version 1).
struct ExperimentConfig {
  int schema_version = 1;
  std::string scenario;
  SourceConfig source_a;
  SourceConfig source_b;
  double t = 0.5;
  double relative_phase_deg = 90.0;
  ImperfectionConfig imperfections;
  GainStrategy gain_strategy = GainStrategy::brute_force;
  double fixed_gain = 1.0;
  McSettings mc;
  int oracle_n_max = 8;
  std::optional<SpectrumConfig> spectrum;
  std::optional<SweepConfig> sweep;
  OutputConfig output;
};

extern const char* const kScenarioNames[5];

/// Parse and validate a config file; throws ConfigError with a field path
/// (or a parse location) on any violation.
ExperimentConfig parse_config_file(const std::string& path);

/// Same, from an in-memory string; `origin` names the source in diagnostics.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin);

/// Fixed-key-order serialization of the parsed config, including defaults.
/// Semantically identical configs canonicalize to identical bytes.
std::string canonical_json(const ExperimentConfig& cfg);

/// FNV-1a (64-bit) over canonical_json, as a 16-digit hex string. Embedded
/// in every result file so outputs can be traced to their exact inputs.
std::string config_hash_hex(const ExperimentConfig& cfg);

}  // namespace polent::harness
