#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polent/criteria.hpp"

namespace polent::harness {

inline constexpr const char* kToolVersion = "1.0.0";

/// Provenance tags carried by every emitted quantity.
inline constexpr const char* kPaperReproduction = "paper-reproduction";
inline constexpr const char* kDerived = "derived";
inline constexpr const char* kModelExtension = "model-extension";

struct ResultRow {
  std::string label;
  double linear = 0.0;
  std::optional<double> db;  // absent where dB is meaningless
  std::string provenance;
  std::string reference;
};

struct RunMeta {
  std::string scenario;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::string config_hash;
  /// dBm metadata echoed exactly as configured, two decimals.
  std::vector<std::pair<std::string, double>> dbm_metadata;
};

/// Scalar result table; CSV and JSON mirrors are byte-stable for identical
/// inputs (fixed row order, fixed key order, shortest round-trip floats,
/// no timestamps).
struct ResultTable {
  RunMeta meta;
  std::vector<ResultRow> rows;

  std::string to_csv() const;
  std::string to_json() const;

  void add(std::string label, double linear, std::optional<double> db,
           std::string provenance, std::string reference);
};

/// One row per grid point, one column per reported series.
struct SweepTable {
  RunMeta meta;
  std::string axis;
  std::vector<std::string> series;
  std::vector<double> x;
  std::vector<std::vector<double>> values;  // values[point][series]

  std::string to_csv() const;
  std::string to_json() const;
  static SweepTable from_json(const std::string& text);

  /// One two-column (x value) text file per series, named <series>.dat.
  void write_plot_files(const std::string& directory) const;
};

/// Fixed serialization of a WitnessReport (field names and units frozen).
std::string witness_report_json(const WitnessReport& report);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_shortest(double value);

/// Fixed two-decimal form used for dBm metadata.
std::string format_dbm(double value);

void write_file(const std::string& path, const std::string& bytes);

}  // namespace polent::harness
