#include "polent/harness/results.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polent/errors.hpp"

namespace polent::harness {

namespace {

using nlohmann::ordered_json;

ordered_json meta_json(const RunMeta& meta) {
  ordered_json m;
  m["scenario"] = meta.scenario;
  m["tool_version"] = meta.tool_version;
  m["seed"] = meta.seed;
  m["config_hash"] = meta.config_hash;
  if (!meta.dbm_metadata.empty()) {
    ordered_json dbm;
    for (const auto& [key, value] : meta.dbm_metadata) {
      dbm[key] = format_dbm(value);
    }
    m["dbm"] = dbm;
  }
  return m;
}

std::string csv_meta_header(const RunMeta& meta) {
  std::ostringstream out;
  out << "# scenario=" << meta.scenario << "\n";
  out << "# tool_version=" << meta.tool_version << "\n";
  out << "# seed=" << meta.seed << "\n";
  out << "# config_hash=" << meta.config_hash << "\n";
  for (const auto& [key, value] : meta.dbm_metadata) {
    out << "# " << key << "=" << format_dbm(value) << "\n";
  }
  return out.str();
}

}  // namespace

std::string format_shortest(double value) {
  char buffer[64];
  const auto [end, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

std::string format_dbm(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return std::string(buffer);
}

void ResultTable::add(std::string label, double linear,
                      std::optional<double> db, std::string provenance,
                      std::string reference) {
  rows.push_back(ResultRow{std::move(label), linear, db, std::move(provenance),
                           std::move(reference)});
}

std::string ResultTable::to_csv() const {
  std::ostringstream out;
  out << csv_meta_header(meta);
  out << "label,linear,db,provenance,reference\n";
  for (const ResultRow& row : rows) {
    out << row.label << ',' << format_shortest(row.linear) << ',';
    if (row.db) out << format_shortest(*row.db);
    out << ',' << row.provenance << ",\"" << row.reference << "\"\n";
  }
  return out.str();
}

std::string ResultTable::to_json() const {
  ordered_json root;
  root["meta"] = meta_json(meta);
  root["type"] = "table";
  root["rows"] = ordered_json::array();
  for (const ResultRow& row : rows) {
    ordered_json r;
    r["label"] = row.label;
    r["linear"] = row.linear;
    if (row.db) {
      r["db"] = *row.db;
    } else {
      r["db"] = nullptr;
    }
    r["provenance"] = row.provenance;
    r["reference"] = row.reference;
    root["rows"].push_back(r);
  }
  return root.dump(2) + "\n";
}

std::string SweepTable::to_csv() const {
  std::ostringstream out;
  out << csv_meta_header(meta);
  out << axis;
  for (const std::string& name : series) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_shortest(x[i]);
    for (double value : values[i]) out << ',' << format_shortest(value);
    out << '\n';
  }
  return out.str();
}

std::string SweepTable::to_json() const {
  ordered_json root;
  root["meta"] = meta_json(meta);
  root["type"] = "sweep";
  root["axis"] = axis;
  root["series"] = series;
  root["x"] = x;
  root["values"] = values;
  return root.dump(2) + "\n";
}

SweepTable SweepTable::from_json(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError("results", std::string("parse error: ") + err.what());
  }
  if (!root.contains("type") || root["type"] != "sweep") {
    throw ConfigError("results", "not a sweep result file");
  }
  SweepTable table;
  table.axis = root.at("axis").get<std::string>();
  table.series = root.at("series").get<std::vector<std::string>>();
  table.x = root.at("x").get<std::vector<double>>();
  table.values = root.at("values").get<std::vector<std::vector<double>>>();
  const auto& meta = root.at("meta");
  table.meta.scenario = meta.at("scenario").get<std::string>();
  table.meta.tool_version = meta.at("tool_version").get<std::string>();
  table.meta.seed = meta.at("seed").get<std::uint64_t>();
  table.meta.config_hash = meta.at("config_hash").get<std::string>();
  return table;
}

void SweepTable::write_plot_files(const std::string& directory) const {
  std::filesystem::create_directories(directory);
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::ostringstream out;
    out << "# " << axis << ' ' << series[s] << "  (config " << meta.config_hash
        << ", seed " << meta.seed << ")\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      out << format_shortest(x[i]) << ' ' << format_shortest(values[i][s])
          << '\n';
    }
    write_file((std::filesystem::path(directory) / (series[s] + ".dat"))
                   .string(),
               out.str());
  }
}

std::string witness_report_json(const WitnessReport& report) {
  ordered_json root;
  root["combo_variance_1"] = report.v1;  // shot-noise units
  root["combo_variance_2"] = report.v2;
  root["product_root"] = report.product_root;
  root["nonseparable"] = report.nonseparable;
  root["epr_product"] =
      report.epr_product ? ordered_json(*report.epr_product) : nullptr;
  root["epr_verdict"] =
      report.epr_verdict ? ordered_json(*report.epr_verdict) : nullptr;
  root["eof_ebits"] =
      report.eof_ebits ? ordered_json(*report.eof_ebits) : nullptr;
  return root.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& bytes) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace polent::harness
