#pragma once

#include <string>
#include <vector>

#include "polent/criteria.hpp"
#include "polent/entangle.hpp"
#include "polent/harness/config.hpp"
#include "polent/harness/results.hpp"
#include "polent/mc.hpp"

namespace polent::harness {

/// Everything derivable from one config: the sources, the splitter, the
/// input covariance and the detected output covariances in both observation
/// bases.
struct BuiltScenario {
  PolSqueezedSource a;
  PolSqueezedSource b;
  BeamSplitterSpec bs;
  DetectionImperfections imp;
  double theta_sq;   // radians
  double theta_opt;  // theta_sq - gamma
  CovarianceModel input;
  CovarianceModel sq_output;   // [C(th), C(th+), D(th), D(th+)] after detection
  CovarianceModel opt_output;  // [C(opt), C(opt+), D(opt), D(opt+)] after detection
};

BuiltScenario build_scenario(const ExperimentConfig& cfg);

/// The four tracked correlation combos of a built scenario, gains resolved
/// per the config's strategy. Order: sum(sq), difference(asq), opt k-combo,
/// opt l-combo.
struct TrackedCombos {
  CorrelationCombo sum_sq;
  CorrelationCombo diff_asq;
  CorrelationCombo opt_k;
  CorrelationCombo opt_l;
};

TrackedCombos resolve_combos(const ExperimentConfig& cfg,
                             const BuiltScenario& scenario);

/// Deterministic result table for the config's scenario. Output files are
/// written by the CLI, not here.
ResultTable run_scenario(const ExperimentConfig& cfg);

/// One row per grid point; both observation bases reported per point.
/// Grid points are evaluated in parallel but assembled in grid order, so the
/// output is independent of scheduling. Empty grid or unknown axis throws
/// std::invalid_argument. Axes: t, v_asq, angle_error, efficiency,
/// visibility, gain.
SweepTable run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                     const std::vector<double>& grid,
                     mc::Exec exec = mc::Exec::openmp);

struct OracleOutcome {
  ResultTable table;
  std::vector<std::string> failures;  // empty when every oracle check passed
};

/// Fock-space commutator and shot-noise-normalization checks plus Monte
/// Carlo z-scores for the scenario's tracked combos.
OracleOutcome run_oracles(const ExperimentConfig& cfg);

}  // namespace polent::harness
