// Config-driven experiment runner for the polarisation-entanglement model.
//
// Subcommands:
//   run <config>                     scenario table -> CSV + JSON
//   sweep <config> [--axis --grid]   parameter sweep -> CSV + JSON + plot data
//   oracle <config>                  Fock / Monte Carlo oracle checks
//   verify                           acceptance criteria (exit 4 on failure)
//   emit-plots <results.json> <dir>  regenerate per-series plot files
//
// Exit codes: 0 success, 2 config error, 3 numerical/model inconsistency,
// 4 acceptance-check failure. POLENT_VERBOSITY=0|1|2 selects output volume.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polent/errors.hpp"
#include "polent/harness/acceptance.hpp"
#include "polent/harness/config.hpp"
#include "polent/harness/results.hpp"
#include "polent/harness/scenarios.hpp"

namespace {

int verbosity() {
  const char* env = std::getenv("POLENT_VERBOSITY");
  if (env == nullptr) return 1;
  return std::atoi(env);
}

struct OutputPaths {
  std::string csv;
  std::string json;
  std::string plots_dir;
};

OutputPaths resolve_outputs(const polent::harness::ExperimentConfig& cfg,
                            const std::string& out_prefix) {
  OutputPaths paths{cfg.output.csv, cfg.output.json, cfg.output.plots_dir};
  if (!out_prefix.empty()) {
    paths.csv = out_prefix + ".csv";
    paths.json = out_prefix + ".json";
    if (paths.plots_dir.empty()) paths.plots_dir = out_prefix + "_plots";
  }
  return paths;
}

void report_written(const std::string& path) {
  if (verbosity() >= 1) std::cout << "wrote " << path << "\n";
}

void print_table_summary(const polent::harness::ResultTable& table) {
  if (verbosity() < 1) return;
  std::cout << "scenario " << table.meta.scenario << " (config "
            << table.meta.config_hash << ", seed " << table.meta.seed << ")\n";
  if (verbosity() >= 2) {
    for (const auto& row : table.rows) {
      std::cerr << "  " << row.label << " = "
                << polent::harness::format_shortest(row.linear) << "\n";
    }
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  // Either comma-separated values or lo:hi:count.
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    char sep1 = 0;
    char sep2 = 0;
    std::istringstream in(spec);
    if (!(in >> lo >> sep1 >> hi >> sep2 >> count) || sep1 != ':' ||
        sep2 != ':' || count < 2) {
      throw polent::ConfigError("--grid", "expected lo:hi:count with count >= 2");
    }
    for (int i = 0; i < count; ++i) {
      grid.push_back(lo + (hi - lo) * i / static_cast<double>(count - 1));
    }
    return grid;
  }
  std::istringstream in(spec);
  std::string token;
  while (std::getline(in, token, ',')) {
    try {
      grid.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw polent::ConfigError("--grid", "not a number: '" + token + "'");
    }
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-variable polarisation entanglement simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_prefix;
  std::string axis_flag;
  std::string grid_flag;
  std::string results_path;
  std::string plots_dir;

  CLI::App* run = app.add_subcommand("run", "run a scenario from a config");
  run->add_option("config", config_path, "config file (JSON, schema v1)")
      ->required();
  run->add_option("--out", out_prefix, "output path prefix (overrides config)");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("--axis", axis_flag,
                    "t | v_asq | angle_error | efficiency | visibility | gain");
  sweep->add_option("--grid", grid_flag, "v1,v2,... or lo:hi:count");
  sweep->add_option("--out", out_prefix, "output path prefix");

  CLI::App* oracle = app.add_subcommand("oracle", "run the oracle checks");
  oracle->add_option("config", config_path, "config file")->required();
  oracle->add_option("--out", out_prefix, "output path prefix");

  app.add_subcommand("verify", "run the acceptance criteria");

  CLI::App* emit = app.add_subcommand("emit-plots",
                                      "regenerate plot data from results");
  emit->add_option("results", results_path, "sweep results JSON")->required();
  emit->add_option("outdir", plots_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = polent::harness::parse_config_file(config_path);
      const auto table = polent::harness::run_scenario(cfg);
      print_table_summary(table);
      const OutputPaths paths = resolve_outputs(cfg, out_prefix);
      if (!paths.csv.empty()) {
        polent::harness::write_file(paths.csv, table.to_csv());
        report_written(paths.csv);
      }
      if (!paths.json.empty()) {
        polent::harness::write_file(paths.json, table.to_json());
        report_written(paths.json);
      }
      if (paths.csv.empty() && paths.json.empty()) {
        std::cout << table.to_csv();
      }
      return 0;
    }

    if (sweep->parsed()) {
      auto cfg = polent::harness::parse_config_file(config_path);
      std::string axis = axis_flag;
      std::vector<double> grid;
      if (!grid_flag.empty()) grid = parse_grid(grid_flag);
      if (axis.empty() && cfg.sweep) axis = cfg.sweep->axis;
      if (grid.empty() && cfg.sweep) grid = cfg.sweep->grid;
      if (axis.empty() || grid.empty()) {
        throw polent::ConfigError(
            "sweep", "needs --axis/--grid or a sweep block in the config");
      }
      const auto table = polent::harness::run_sweep(cfg, axis, grid);
      const OutputPaths paths = resolve_outputs(cfg, out_prefix);
      if (!paths.csv.empty()) {
        polent::harness::write_file(paths.csv, table.to_csv());
        report_written(paths.csv);
      }
      if (!paths.json.empty()) {
        polent::harness::write_file(paths.json, table.to_json());
        report_written(paths.json);
      }
      if (!paths.plots_dir.empty()) {
        table.write_plot_files(paths.plots_dir);
        report_written(paths.plots_dir + "/<series>.dat");
      }
      if (paths.csv.empty() && paths.json.empty()) {
        std::cout << table.to_csv();
      }
      return 0;
    }

    if (oracle->parsed()) {
      const auto cfg = polent::harness::parse_config_file(config_path);
      const auto outcome = polent::harness::run_oracles(cfg);
      print_table_summary(outcome.table);
      const OutputPaths paths = resolve_outputs(cfg, out_prefix);
      if (!paths.csv.empty()) {
        polent::harness::write_file(paths.csv, outcome.table.to_csv());
        report_written(paths.csv);
      }
      if (!paths.json.empty()) {
        polent::harness::write_file(paths.json, outcome.table.to_json());
        report_written(paths.json);
      }
      if (paths.csv.empty() && paths.json.empty()) {
        std::cout << outcome.table.to_csv();
      }
      if (!outcome.failures.empty()) {
        std::cerr << "oracle checks failed:";
        for (const auto& name : outcome.failures) std::cerr << ' ' << name;
        std::cerr << "\n";
        return 3;
      }
      return 0;
    }

    if (app.get_subcommand("verify")->parsed()) {
      const int failures = polent::harness::run_acceptance(std::cout);
      return failures == 0 ? 0 : 4;
    }

    if (emit->parsed()) {
      std::ifstream in(results_path, std::ios::binary);
      if (!in) {
        throw polent::ConfigError(results_path, "cannot open results file");
      }
      std::ostringstream buffer;
      buffer << in.rdbuf();
      const auto table = polent::harness::SweepTable::from_json(buffer.str());
      table.write_plot_files(plots_dir);
      report_written(plots_dir + "/<series>.dat");
      return 0;
    }
  } catch (const polent::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "model error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
