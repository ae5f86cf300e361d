#include "polent/harness/scenarios.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "polent/errors.hpp"
#include "polent/fock.hpp"
#include "polent/metrology.hpp"

namespace polent::harness {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

double to_db(double v) { return lin_to_db(v); }

DetectionImperfections build_imperfections(const ImperfectionConfig& imp) {
  DetectionImperfections out;
  out.efficiency_c = imp.efficiency_c;
  out.efficiency_d = imp.efficiency_d;
  out.visibility = imp.visibility;
  out.angle_error_c = imp.angle_error_c_deg * kDegree;
  out.angle_error_d = imp.angle_error_d_deg * kDegree;
  out.validate();
  return out;
}

RunMeta make_meta(const ExperimentConfig& cfg) {
  RunMeta meta;
  meta.scenario = cfg.scenario;
  meta.seed = cfg.mc.seed;
  meta.config_hash = config_hash_hex(cfg);
  if (cfg.spectrum) {
    meta.dbm_metadata = {
        {"signal_dbm", cfg.spectrum->signal_dbm},
        {"shot_dbm", cfg.spectrum->shot_dbm},
        {"electronic_floor_dbm", cfg.spectrum->electronic_floor_dbm},
    };
  }
  return meta;
}

double resolve_gain(const ExperimentConfig& cfg, const BuiltScenario& scenario,
                    const CovarianceModel& cov, const CorrelationCombo& combo,
                    GainCoupling coupling) {
  switch (cfg.gain_strategy) {
    case GainStrategy::fixed:
      return cfg.fixed_gain;
    case GainStrategy::paper_formula: {
      const double v_sq = (scenario.a.v_sq() + scenario.b.v_sq()) / 2.0;
      const double v_asq = (scenario.a.v_asq() + scenario.b.v_asq()) / 2.0;
      return closed_form_gain(scenario.bs.t, scenario.bs.r(), v_sq, v_asq);
    }
    case GainStrategy::brute_force:
      return optimize_gain(cov, combo, coupling, 1).g_opt;
  }
  return 1.0;
}

void add_spectrum_rows(const ExperimentConfig& cfg, ResultTable& table) {
  if (!cfg.spectrum) return;
  const SpectrumConfig& sp = *cfg.spectrum;
  CalibratedTrace trace;
  trace.signal = {sp.signal_dbm, sp.rbw_hz, sp.vbw_hz, sp.frequency_hz};
  trace.shot_reference = {sp.shot_dbm, sp.rbw_hz, sp.vbw_hz, sp.frequency_hz};
  trace.electronic_floor = {sp.electronic_floor_dbm, sp.rbw_hz, sp.vbw_hz,
                            sp.frequency_hz};
  const double corrected = subtract_electronic_noise(trace, true);
  const double signal_only = subtract_electronic_noise(trace, false);
  table.add("corrected_shot_ratio", corrected, to_db(corrected), kDerived,
            "noise traces corrected for the reported electronic noise floor");
  table.add("corrected_signal_only_ratio", signal_only, to_db(signal_only),
            kDerived, "alternative correction: raw shot reference");
}

void add_individual_rows(const CovarianceModel& cov, const char* suffix,
                         const char* ref, ResultTable& table) {
  const char* names[4] = {"C", "C_conj", "D", "D_conj"};
  for (int i = 0; i < 4; ++i) {
    const double v = cov.matrix()(i, i);
    table.add(std::string("individual_") + names[i] + suffix, v, to_db(v),
              kDerived, ref);
  }
}

ResultTable characterize_squeezing(const ExperimentConfig& cfg,
                                   const BuiltScenario& scenario) {
  ResultTable table;
  table.meta = make_meta(cfg);
  const double t = scenario.bs.t;

  struct Entry {
    const char* name;
    double v_sq;
    double v_asq;
    const char* ref;
  };
  const Entry entries[2] = {
      {"A", scenario.a.v_sq(), scenario.a.v_asq(),
       "reported input squeezing -4.2 dB / +19.7 dB"},
      {"B", scenario.b.v_sq(), scenario.b.v_asq(),
       "reported input squeezing -4.0 dB / +19.6 dB"},
  };
  for (const Entry& e : entries) {
    table.add(std::string("input_sq_") + e.name, e.v_sq, to_db(e.v_sq),
              kPaperReproduction, e.ref);
    table.add(std::string("input_asq_") + e.name, e.v_asq, to_db(e.v_asq),
              kPaperReproduction, e.ref);
    // Blocked-arm measurement: the open port admits vacuum, so both outputs
    // show reduced squeezing (C via the t route, D via the r route); the
    // input level is then inferred back.
    const double measured_sq = forward_blocked(e.v_sq, t);
    const double measured_sq_d = forward_blocked(e.v_sq, 1.0 - t);
    const double measured_asq = forward_blocked(e.v_asq, t);
    table.add(std::string("blocked_measured_sq_") + e.name, measured_sq,
              to_db(measured_sq), kDerived,
              "blocked input mode, vacuum noise at the splitter (port C)");
    table.add(std::string("blocked_measured_sq_") + e.name + "_at_D",
              measured_sq_d, to_db(measured_sq_d), kDerived,
              "blocked input mode, vacuum noise at the splitter (port D)");
    table.add(std::string("blocked_measured_asq_") + e.name, measured_asq,
              to_db(measured_asq), kDerived,
              "blocked input mode, vacuum noise at the splitter (port C)");
    const double inferred = blocked_arm_inference(measured_sq, t);
    table.add(std::string("inferred_input_sq_") + e.name, inferred,
              to_db(inferred), kDerived,
              "inference taking the beam-splitter vacuum into account");
    const double product = uncertainty_product(e.v_sq, e.v_asq);
    table.add(std::string("uncertainty_product_") + e.name, product,
              to_db(product), kDerived, "dark-plane bound: product >= 1");
  }
  add_spectrum_rows(cfg, table);
  return table;
}

ResultTable entangle_basis(const ExperimentConfig& cfg,
                           const BuiltScenario& scenario, bool opt_basis) {
  ResultTable table;
  table.meta = make_meta(cfg);
  const TrackedCombos combos = resolve_combos(cfg, scenario);
  const CovarianceModel& cov =
      opt_basis ? scenario.opt_output : scenario.sq_output;

  if (opt_basis) {
    const double gamma_deg = optimized_gamma(scenario.bs) / kDegree;
    table.add("gamma_deg", gamma_deg, std::nullopt, kDerived,
              "cos(gamma) = sqrt(T); approximately 45 deg for a symmetric "
              "splitter");
    add_individual_rows(cov, "_opt", "individual mode noise, around 16.1 dB",
                        table);
    const double v_k = normalized_combo_variance(
        cov, combo_weights(cov.basis(), combos.opt_k));
    const double v_l = normalized_combo_variance(
        cov, combo_weights(cov.basis(), combos.opt_l));
    table.add("opt_correlation_k", v_k, to_db(v_k), kDerived,
              "0.44 +- 0.03 (-3.6 dB) along the rotated pair");
    table.add("opt_correlation_l", v_l, to_db(v_l), kDerived,
              "0.46 +- 0.03 (-3.4 dB) along the rotated pair");
    table.add("gain_k", combos.opt_k.gain_first, std::nullopt, kDerived,
              "electronic gain optimised to maximise the correlations");
    table.add("gain_l", combos.opt_l.gain_second, std::nullopt, kDerived,
              "electronic gain optimised to maximise the correlations");
  } else {
    add_individual_rows(cov, "_sq", "individual mode noise, around 16 dB",
                        table);
    const double v_sum = normalized_combo_variance(
        cov, combo_weights(cov.basis(), combos.sum_sq));
    const double v_diff = normalized_combo_variance(
        cov, combo_weights(cov.basis(), combos.diff_asq));
    table.add("sum_correlation_sq", v_sum, to_db(v_sum), kDerived,
              "0.39 +- 0.03 (-4.1 dB) below shot noise");
    table.add("difference_correlation_asq", v_diff, to_db(v_diff), kDerived,
              "0.55 +- 0.03 (-2.6 dB) below shot noise");
    table.add("gain_g", combos.sum_sq.gain_second, std::nullopt, kDerived,
              "variable gain g in the detection system");
    table.add("gain_h", combos.diff_asq.gain_second, std::nullopt, kDerived,
              "gain h of the conjugate measurement");
    const SplitRatio inferred = infer_splitting_from_asq_correlation(
        v_diff, scenario.a, scenario.b);
    table.add("inferred_t_from_asq", inferred.t, std::nullopt, kDerived,
              "splitting ratio explaining the asq correlation level");
  }
  add_spectrum_rows(cfg, table);
  return table;
}

ResultTable witnesses(const ExperimentConfig& cfg,
                      const BuiltScenario& scenario) {
  ResultTable table;
  table.meta = make_meta(cfg);

  const WitnessReport reported_sq = witness_from_pair(0.39, 0.55);
  table.add("reported_pair_sq_product_root", reported_sq.product_root, std::nullopt,
            kPaperReproduction, "sqrt(0.39 * 0.55) = 0.46 +- 0.03 < 1");
  const WitnessReport reported_opt = witness_from_pair(0.44, 0.46);
  table.add("reported_pair_opt_product_root", reported_opt.product_root,
            std::nullopt, kPaperReproduction,
            "sqrt(0.44 * 0.46) = 0.45 +- 0.03 < 1");

  const TrackedCombos combos = resolve_combos(cfg, scenario);
  const WitnessReport model_sq = nonseparability_product(
      scenario.sq_output, combos.sum_sq, combos.diff_asq);
  table.add("model_sq_product_root", model_sq.product_root, std::nullopt,
            kDerived, "product witness on the simulated sq-basis pair");
  table.add("model_sq_nonseparable", model_sq.nonseparable ? 1.0 : 0.0,
            std::nullopt, kDerived, "verdict against the unit bound");

  const WitnessReport model_opt = nonseparability_product(
      scenario.opt_output, combos.opt_k, combos.opt_l);
  table.add("model_opt_product_root", model_opt.product_root, std::nullopt,
            kDerived, "product witness on the simulated opt-basis pair");
  table.add("model_opt_nonseparable", model_opt.nonseparable ? 1.0 : 0.0,
            std::nullopt, kDerived, "verdict against the unit bound");

  const double theta = scenario.theta_sq;
  const double conj = theta + std::numbers::pi / 2.0;
  const double epr = epr_reid(
      scenario.sq_output, {{"C", theta}, {"D", theta}},
      {{"C", conj}, {"D", conj}});
  table.add("epr_product_sq_pair", epr, std::nullopt, kModelExtension,
            "model value; the measurements report no EPR number");

  // EOF from the sq-basis pair: those auto-variances stay symmetric even for
  // slightly unequal sources, unlike the rotated-basis pair.
  try {
    const auto eof = eof_for_state(scenario.sq_output, combos.sum_sq,
                                   combos.diff_asq, model_sq.v1, model_sq.v2);
    if (eof) {
      table.add("eof_ebits_sq_pair", *eof, std::nullopt, kModelExtension,
                "per the cited symmetric-state closed form, not a measured "
                "value");
    }
  } catch (const NotApplicableError&) {
    // Asymmetric state: the symmetric-state measure is simply not reported.
  }
  add_spectrum_rows(cfg, table);
  return table;
}

}  // namespace

BuiltScenario build_scenario(const ExperimentConfig& cfg) {
  const double theta = cfg.source_a.theta_sq_deg * kDegree;
  PolSqueezedSource a(cfg.source_a.v_sq, cfg.source_a.v_asq, {theta},
                      cfg.source_a.s3_mean);
  PolSqueezedSource b(cfg.source_b.v_sq, cfg.source_b.v_asq, {theta},
                      cfg.source_b.s3_mean);
  BeamSplitterSpec bs(cfg.t, cfg.relative_phase_deg * kDegree);
  DetectionImperfections imp = build_imperfections(cfg.imperfections);

  CovarianceModel input = input_covariance(a, b);
  CovarianceModel sq_output =
      apply_detection(propagate(entangling_bs_map(bs, theta), input), imp);
  CovarianceModel opt_output =
      apply_detection(propagate(optimized_direction_map(bs, theta), input), imp);

  return BuiltScenario{std::move(a),
                       std::move(b),
                       bs,
                       imp,
                       theta,
                       theta - optimized_gamma(bs),
                       std::move(input),
                       std::move(sq_output),
                       std::move(opt_output)};
}

TrackedCombos resolve_combos(const ExperimentConfig& cfg,
                             const BuiltScenario& scenario) {
  const double theta = scenario.theta_sq;
  const double conj = theta + std::numbers::pi / 2.0;
  const double opt = scenario.theta_opt;
  const double opt_conj = opt + std::numbers::pi / 2.0;

  TrackedCombos combos;
  combos.sum_sq = {{"C", theta}, {"D", theta}, 1.0, 1.0, 1.0, 1.0};
  combos.diff_asq = {{"C", conj}, {"D", conj}, 1.0, -1.0, 1.0, 1.0};
  combos.opt_k = {{"C", opt}, {"D", opt_conj}, 1.0, 1.0, 1.0, 1.0};
  combos.opt_l = {{"C", opt_conj}, {"D", opt}, 1.0, 1.0, 1.0, 1.0};

  const double g = resolve_gain(cfg, scenario, scenario.sq_output,
                                combos.sum_sq, GainCoupling::g_and_unity);
  combos.sum_sq.gain_second = g;
  const double h = resolve_gain(cfg, scenario, scenario.sq_output,
                                combos.diff_asq, GainCoupling::g_and_unity);
  combos.diff_asq.gain_second = h;

  // Opt combos carry (g, 1/g); the optimizer and the fixed strategy set g on
  // the first slot of the k chain and the second slot of the l chain.
  const double k = cfg.gain_strategy == GainStrategy::brute_force
                       ? optimize_gain(scenario.opt_output, combos.opt_k,
                                       GainCoupling::g_and_inverse, 0)
                             .g_opt
                       : resolve_gain(cfg, scenario, scenario.opt_output,
                                      combos.opt_k,
                                      GainCoupling::g_and_inverse);
  combos.opt_k.gain_first = k;
  combos.opt_k.gain_second = 1.0 / k;

  const double l = cfg.gain_strategy == GainStrategy::brute_force
                       ? optimize_gain(scenario.opt_output, combos.opt_l,
                                       GainCoupling::g_and_inverse, 1)
                             .g_opt
                       : resolve_gain(cfg, scenario, scenario.opt_output,
                                      combos.opt_l,
                                      GainCoupling::g_and_inverse);
  combos.opt_l.gain_second = l;
  combos.opt_l.gain_first = 1.0 / l;
  return combos;
}

ResultTable run_scenario(const ExperimentConfig& cfg) {
  const BuiltScenario scenario = build_scenario(cfg);
  if (cfg.scenario == "characterize_squeezing") {
    return characterize_squeezing(cfg, scenario);
  }
  if (cfg.scenario == "entangle_sq_basis") {
    return entangle_basis(cfg, scenario, false);
  }
  if (cfg.scenario == "entangle_opt_basis") {
    return entangle_basis(cfg, scenario, true);
  }
  if (cfg.scenario == "witnesses") {
    return witnesses(cfg, scenario);
  }
  throw ConfigError("config.scenario",
                    "run: scenario '" + cfg.scenario +
                        "' is not a table scenario (use sweep)");
}

SweepTable run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                     const std::vector<double>& grid, mc::Exec exec) {
  if (grid.empty()) {
    throw std::invalid_argument("run_sweep: empty grid");
  }
  const bool known_axis = axis == "t" || axis == "v_asq" ||
                          axis == "angle_error" || axis == "efficiency" ||
                          axis == "visibility" || axis == "gain";
  if (!known_axis) {
    throw std::invalid_argument("run_sweep: unknown axis '" + axis + "'");
  }

  SweepTable table;
  table.meta = make_meta(cfg);
  table.axis = axis;
  table.series = {"sum_correlation_sq", "difference_correlation_asq",
                  "opt_correlation_k", "opt_correlation_l"};
  table.x = grid;
  table.values.assign(grid.size(), std::vector<double>(4, 0.0));

  const auto n = static_cast<long long>(grid.size());
  std::exception_ptr failure;

  auto evaluate_point = [&](long long i) {
    ExperimentConfig point = cfg;
    const double value = grid[static_cast<std::size_t>(i)];
    if (axis == "t") {
      point.t = value;
    } else if (axis == "v_asq") {
      point.source_a.v_asq = value;
      point.source_b.v_asq = value;
    } else if (axis == "angle_error") {
      point.imperfections.angle_error_c_deg = value;
      point.imperfections.angle_error_d_deg = value;
    } else if (axis == "efficiency") {
      point.imperfections.efficiency_c = value;
      point.imperfections.efficiency_d = value;
    } else if (axis == "visibility") {
      point.imperfections.visibility = value;
    } else {  // gain
      point.gain_strategy = GainStrategy::fixed;
      point.fixed_gain = value;
    }
    const BuiltScenario scenario = build_scenario(point);
    const TrackedCombos combos = resolve_combos(point, scenario);
    auto& row = table.values[static_cast<std::size_t>(i)];
    row[0] = normalized_combo_variance(
        scenario.sq_output,
        combo_weights(scenario.sq_output.basis(), combos.sum_sq));
    row[1] = normalized_combo_variance(
        scenario.sq_output,
        combo_weights(scenario.sq_output.basis(), combos.diff_asq));
    row[2] = normalized_combo_variance(
        scenario.opt_output,
        combo_weights(scenario.opt_output.basis(), combos.opt_k));
    row[3] = normalized_combo_variance(
        scenario.opt_output,
        combo_weights(scenario.opt_output.basis(), combos.opt_l));
  };

  if (exec == mc::Exec::openmp) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
      try {
        evaluate_point(i);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (long long i = 0; i < n; ++i) evaluate_point(i);
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

OracleOutcome run_oracles(const ExperimentConfig& cfg) {
  OracleOutcome outcome;
  outcome.table.meta = make_meta(cfg);
  ResultTable& table = outcome.table;

  // Fock-space algebra on the protected subspace.
  const fock::TruncatedTwoModeSpace space(cfg.oracle_n_max);
  const int triples[4][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}, {2, 1, 3}};
  for (const auto& triple : triples) {
    const double residual =
        fock::commutator_residual(space, triple[0], triple[1], triple[2]);
    const std::string label = "commutator_residual_" +
                              std::to_string(triple[0]) +
                              std::to_string(triple[1]) +
                              std::to_string(triple[2]);
    table.add(label, residual, std::nullopt, kDerived,
              "SU(2) algebra of the Stokes operators");
    if (!(residual <= 1e-12)) outcome.failures.push_back(label);
  }
  for (int k = 1; k <= 3; ++k) {
    const double residual = fock::s0_commutator_residual(space, k);
    const std::string label = "s0_commutator_residual_" + std::to_string(k);
    table.add(label, residual, std::nullopt, kDerived,
              "S0 commutes with all other Stokes operators");
    if (!(residual <= 1e-12)) outcome.failures.push_back(label);
  }

  // Shot-noise normalization: coherent dark-plane variance equals |<S3>|.
  const fock::TruncatedTwoModeSpace coherent_space(16);
  const std::complex<double> alpha(std::sqrt(2.0), 0.0);
  const double thetas[3] = {0.0, std::numbers::pi / 4.0,
                            std::numbers::pi / 2.0};
  const char* theta_names[3] = {"0", "pi4", "pi2"};
  for (int i = 0; i < 3; ++i) {
    const auto result =
        fock::coherent_dark_plane_variance(alpha, thetas[i], coherent_space);
    const std::string label =
        std::string("coherent_shot_ratio_theta_") + theta_names[i];
    const double ratio = result.shot_ratio.value_or(0.0);
    table.add(label, ratio, std::nullopt, kDerived,
              "coherent dark-plane variance over |<S3>|, exact oracle");
    if (!(std::abs(ratio - 1.0) <= 0.01)) outcome.failures.push_back(label);
  }

  // Monte Carlo against the closed-form path for every tracked combo.
  const BuiltScenario scenario = build_scenario(cfg);
  const TrackedCombos combos = resolve_combos(cfg, scenario);
  const double theta = scenario.theta_sq;
  const mc::McConfig mc_cfg{cfg.mc.samples, cfg.mc.seed};
  const LinearMap bs_map = entangling_bs_map(scenario.bs, theta);
  const LinearMap opt_map = optimized_direction_map(scenario.bs, theta);

  struct Tracked {
    const char* name;
    const LinearMap* map;
    const CorrelationCombo* combo;
  };
  const Tracked tracked[4] = {
      {"sum_sq", &bs_map, &combos.sum_sq},
      {"diff_asq", &bs_map, &combos.diff_asq},
      {"opt_k", &opt_map, &combos.opt_k},
      {"opt_l", &opt_map, &combos.opt_l},
  };
  for (const Tracked& item : tracked) {
    const Eigen::VectorXd w =
        combo_weights(item.map->output_basis(), *item.combo);
    const mc::McReport report =
        mc::mc_validate(scenario.input, *item.map, w, mc_cfg);
    table.add(std::string("mc_analytic_") + item.name, report.analytic,
              std::nullopt, kDerived, "closed-form normalized combo variance");
    table.add(std::string("mc_empirical_") + item.name, report.empirical,
              std::nullopt, kDerived, "seeded Monte Carlo estimate");
    table.add(std::string("mc_z_") + item.name, report.z_score, std::nullopt,
              kDerived, "agreement in standard errors");
    if (!(std::abs(report.z_score) < 4.0)) {
      outcome.failures.push_back(std::string("mc_z_") + item.name);
    }
  }

  // Determinism: the same seed must reproduce the estimate bit for bit.
  {
    const Eigen::VectorXd w =
        combo_weights(bs_map.output_basis(), combos.sum_sq);
    const double first =
        mc::mc_validate(scenario.input, bs_map, w, mc_cfg).empirical;
    const double second =
        mc::mc_validate(scenario.input, bs_map, w, mc_cfg).empirical;
    const bool identical =
        std::memcmp(&first, &second, sizeof(double)) == 0;
    table.add("mc_determinism_ok", identical ? 1.0 : 0.0, std::nullopt,
              kDerived, "fixed seed reproduces the estimate bit-exactly");
    if (!identical) outcome.failures.push_back("mc_determinism_ok");
  }

  return outcome;
}

}  // namespace polent::harness
