#include "polent/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polent/errors.hpp"
#include "polent/metrology.hpp"

namespace polent::harness {

namespace {

using nlohmann::ordered_json;

const char* const kRootKeys[] = {"schema_version", "scenario", "sources",
                                 "beam_splitter", "imperfections",
                                 "gain_strategy", "fixed_gain", "mc",
                                 "oracle_n_max", "spectrum", "sweep", "output"};

void reject_unknown_keys(const ordered_json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(path + "." + item.key(), "unknown field");
    }
  }
}

double require_number(const ordered_json& obj, const std::string& path,
                      const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key, "missing field");
  if (!obj[key].is_number()) {
    throw ConfigError(path + "." + key, "expected a number");
  }
  return obj[key].get<double>();
}

double number_or(const ordered_json& obj, const std::string& path,
                 const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw ConfigError(path + "." + key, "expected a number");
  }
  return obj[key].get<double>();
}

std::string string_or(const ordered_json& obj, const std::string& path,
                      const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    throw ConfigError(path + "." + key, "expected a string");
  }
  return obj[key].get<std::string>();
}

SourceConfig parse_source(const ordered_json& obj, const std::string& path) {
  reject_unknown_keys(obj, path,
                      {"sq_db", "asq_db", "sq", "asq", "theta_sq_deg",
                       "s3_mean"});
  const bool has_db = obj.contains("sq_db") || obj.contains("asq_db");
  const bool has_lin = obj.contains("sq") || obj.contains("asq");
  if (has_db && has_lin) {
    throw ConfigError(path, "dB and linear variance fields are mutually "
                            "exclusive per source");
  }
  if (!has_db && !has_lin) {
    throw ConfigError(path, "source needs sq_db/asq_db or sq/asq");
  }
  SourceConfig src;
  if (has_db) {
    src.v_sq = db_to_lin(require_number(obj, path, "sq_db"));
    src.v_asq = db_to_lin(require_number(obj, path, "asq_db"));
  } else {
    src.v_sq = require_number(obj, path, "sq");
    src.v_asq = require_number(obj, path, "asq");
  }
  src.theta_sq_deg = number_or(obj, path, "theta_sq_deg", 4.5);
  src.s3_mean = number_or(obj, path, "s3_mean", 1.0);
  return src;
}

GainStrategy parse_gain_strategy(const std::string& name) {
  if (name == "fixed") return GainStrategy::fixed;
  if (name == "paper-formula") return GainStrategy::paper_formula;
  if (name == "brute-force") return GainStrategy::brute_force;
  throw ConfigError("gain_strategy",
                    "expected fixed | paper-formula | brute-force, got '" +
                        name + "'");
}

const char* gain_strategy_name(GainStrategy s) {
  switch (s) {
    case GainStrategy::fixed: return "fixed";
    case GainStrategy::paper_formula: return "paper-formula";
    case GainStrategy::brute_force: return "brute-force";
  }
  return "?";
}

}  // namespace

const char* const kScenarioNames[5] = {"characterize_squeezing",
                                       "entangle_sq_basis",
                                       "entangle_opt_basis", "witnesses",
                                       "sweep"};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError(origin, std::string("parse error: ") + err.what());
  }
  if (!root.is_object()) throw ConfigError(origin, "top level must be an object");

  reject_unknown_keys(root, "config",
                      std::set<std::string>(std::begin(kRootKeys),
                                            std::end(kRootKeys)));

  ExperimentConfig cfg;
  if (!root.contains("schema_version") ||
      !root["schema_version"].is_number_integer()) {
    throw ConfigError("config.schema_version", "missing or non-integer");
  }
  cfg.schema_version = root["schema_version"].get<int>();
  if (cfg.schema_version != 1) {
    throw ConfigError("config.schema_version",
                      "unrecognized version " +
                          std::to_string(cfg.schema_version));
  }

  cfg.scenario = string_or(root, "config", "scenario", "");
  if (cfg.scenario.empty()) {
    throw ConfigError("config.scenario", "missing field");
  }
  bool known = false;
  for (const char* name : kScenarioNames) known |= cfg.scenario == name;
  if (!known) {
    throw ConfigError("config.scenario", "unknown scenario '" + cfg.scenario +
                                             "'");
  }

  if (!root.contains("sources") || !root["sources"].is_object()) {
    throw ConfigError("config.sources", "missing object");
  }
  reject_unknown_keys(root["sources"], "config.sources", {"a", "b"});
  if (!root["sources"].contains("a") || !root["sources"].contains("b")) {
    throw ConfigError("config.sources", "needs both a and b");
  }
  cfg.source_a = parse_source(root["sources"]["a"], "config.sources.a");
  cfg.source_b = parse_source(root["sources"]["b"], "config.sources.b");
  if (std::abs(cfg.source_a.theta_sq_deg - cfg.source_b.theta_sq_deg) > 1e-9) {
    throw ConfigError("config.sources",
                      "sources must share theta_sq_deg (common dark-plane "
                      "frame)");
  }

  if (!root.contains("beam_splitter") || !root["beam_splitter"].is_object()) {
    throw ConfigError("config.beam_splitter", "missing object");
  }
  const auto& bs = root["beam_splitter"];
  reject_unknown_keys(bs, "config.beam_splitter", {"t", "relative_phase_deg"});
  cfg.t = require_number(bs, "config.beam_splitter", "t");
  cfg.relative_phase_deg =
      number_or(bs, "config.beam_splitter", "relative_phase_deg", 90.0);

  if (root.contains("imperfections")) {
    const auto& imp = root["imperfections"];
    if (!imp.is_object()) throw ConfigError("config.imperfections", "expected object");
    reject_unknown_keys(imp, "config.imperfections",
                        {"efficiency_c", "efficiency_d", "visibility",
                         "angle_error_c_deg", "angle_error_d_deg"});
    cfg.imperfections.efficiency_c =
        number_or(imp, "config.imperfections", "efficiency_c", 1.0);
    cfg.imperfections.efficiency_d =
        number_or(imp, "config.imperfections", "efficiency_d", 1.0);
    cfg.imperfections.visibility =
        number_or(imp, "config.imperfections", "visibility", 1.0);
    cfg.imperfections.angle_error_c_deg =
        number_or(imp, "config.imperfections", "angle_error_c_deg", 0.0);
    cfg.imperfections.angle_error_d_deg =
        number_or(imp, "config.imperfections", "angle_error_d_deg", 0.0);
  }

  cfg.gain_strategy = parse_gain_strategy(
      string_or(root, "config", "gain_strategy", "brute-force"));
  cfg.fixed_gain = number_or(root, "config", "fixed_gain", 1.0);
  if (!(cfg.fixed_gain > 0.0)) {
    throw ConfigError("config.fixed_gain", "must be > 0");
  }

  if (root.contains("mc")) {
    const auto& mc = root["mc"];
    if (!mc.is_object()) throw ConfigError("config.mc", "expected object");
    reject_unknown_keys(mc, "config.mc", {"samples", "seed"});
    if (mc.contains("samples")) {
      if (!mc["samples"].is_number_integer()) {
        throw ConfigError("config.mc.samples", "expected an integer");
      }
      cfg.mc.samples = mc["samples"].get<long long>();
      if (cfg.mc.samples < 10'000) {
        throw ConfigError("config.mc.samples", "must be >= 10000");
      }
    }
    if (mc.contains("seed")) {
      if (!mc["seed"].is_number_unsigned() && !mc["seed"].is_number_integer()) {
        throw ConfigError("config.mc.seed", "expected an integer");
      }
      cfg.mc.seed = mc["seed"].get<std::uint64_t>();
    }
  }

  if (root.contains("oracle_n_max")) {
    if (!root["oracle_n_max"].is_number_integer()) {
      throw ConfigError("config.oracle_n_max", "expected an integer");
    }
    cfg.oracle_n_max = root["oracle_n_max"].get<int>();
    if (cfg.oracle_n_max < 1 || cfg.oracle_n_max > 32) {
      throw ConfigError("config.oracle_n_max", "must lie in [1, 32]");
    }
  }

  if (root.contains("spectrum")) {
    const auto& sp = root["spectrum"];
    if (!sp.is_object()) throw ConfigError("config.spectrum", "expected object");
    reject_unknown_keys(sp, "config.spectrum",
                        {"signal_dbm", "shot_dbm", "electronic_floor_dbm",
                         "rbw_hz", "vbw_hz", "frequency_hz"});
    SpectrumConfig block;
    block.signal_dbm = require_number(sp, "config.spectrum", "signal_dbm");
    block.shot_dbm = require_number(sp, "config.spectrum", "shot_dbm");
    block.electronic_floor_dbm =
        number_or(sp, "config.spectrum", "electronic_floor_dbm", -85.5);
    block.rbw_hz = number_or(sp, "config.spectrum", "rbw_hz", 300e3);
    block.vbw_hz = number_or(sp, "config.spectrum", "vbw_hz", 30.0);
    block.frequency_hz = number_or(sp, "config.spectrum", "frequency_hz", 17.5e6);
    cfg.spectrum = block;
  }

  if (root.contains("sweep")) {
    const auto& sw = root["sweep"];
    if (!sw.is_object()) throw ConfigError("config.sweep", "expected object");
    reject_unknown_keys(sw, "config.sweep", {"axis", "grid"});
    SweepConfig sweep;
    sweep.axis = string_or(sw, "config.sweep", "axis", "");
    if (sweep.axis.empty()) throw ConfigError("config.sweep.axis", "missing field");
    if (!sw.contains("grid") || !sw["grid"].is_array()) {
      throw ConfigError("config.sweep.grid", "expected an array");
    }
    for (const auto& value : sw["grid"]) {
      if (!value.is_number()) {
        throw ConfigError("config.sweep.grid", "expected numbers");
      }
      sweep.grid.push_back(value.get<double>());
    }
    cfg.sweep = sweep;
  } else if (cfg.scenario == "sweep") {
    throw ConfigError("config.sweep", "scenario 'sweep' needs a sweep block");
  }

  if (root.contains("output")) {
    const auto& out = root["output"];
    if (!out.is_object()) throw ConfigError("config.output", "expected object");
    reject_unknown_keys(out, "config.output", {"csv", "json", "plots_dir"});
    cfg.output.csv = string_or(out, "config.output", "csv", "");
    cfg.output.json = string_or(out, "config.output", "json", "");
    cfg.output.plots_dir = string_or(out, "config.output", "plots_dir", "");
  }

  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

std::string canonical_json(const ExperimentConfig& cfg) {
  ordered_json root;
  root["schema_version"] = cfg.schema_version;
  root["scenario"] = cfg.scenario;
  for (const auto& [name, src] :
       {std::pair<const char*, const SourceConfig*>{"a", &cfg.source_a},
        std::pair<const char*, const SourceConfig*>{"b", &cfg.source_b}}) {
    ordered_json s;
    s["sq"] = src->v_sq;
    s["asq"] = src->v_asq;
    s["theta_sq_deg"] = src->theta_sq_deg;
    s["s3_mean"] = src->s3_mean;
    root["sources"][name] = s;
  }
  root["beam_splitter"]["t"] = cfg.t;
  root["beam_splitter"]["relative_phase_deg"] = cfg.relative_phase_deg;
  root["imperfections"]["efficiency_c"] = cfg.imperfections.efficiency_c;
  root["imperfections"]["efficiency_d"] = cfg.imperfections.efficiency_d;
  root["imperfections"]["visibility"] = cfg.imperfections.visibility;
  root["imperfections"]["angle_error_c_deg"] =
      cfg.imperfections.angle_error_c_deg;
  root["imperfections"]["angle_error_d_deg"] =
      cfg.imperfections.angle_error_d_deg;
  root["gain_strategy"] = gain_strategy_name(cfg.gain_strategy);
  root["fixed_gain"] = cfg.fixed_gain;
  root["mc"]["samples"] = cfg.mc.samples;
  root["mc"]["seed"] = cfg.mc.seed;
  root["oracle_n_max"] = cfg.oracle_n_max;
  if (cfg.spectrum) {
    root["spectrum"]["signal_dbm"] = cfg.spectrum->signal_dbm;
    root["spectrum"]["shot_dbm"] = cfg.spectrum->shot_dbm;
    root["spectrum"]["electronic_floor_dbm"] = cfg.spectrum->electronic_floor_dbm;
    root["spectrum"]["rbw_hz"] = cfg.spectrum->rbw_hz;
    root["spectrum"]["vbw_hz"] = cfg.spectrum->vbw_hz;
    root["spectrum"]["frequency_hz"] = cfg.spectrum->frequency_hz;
  }
  if (cfg.sweep) {
    root["sweep"]["axis"] = cfg.sweep->axis;
    root["sweep"]["grid"] = cfg.sweep->grid;
  }
  return root.dump();
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  const std::string bytes = canonical_json(cfg);
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(hex);
}

}  // namespace polent::harness
