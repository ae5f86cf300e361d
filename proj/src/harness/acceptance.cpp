#include "polent/harness/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "polent/criteria.hpp"
#include "polent/entangle.hpp"
#include "polent/fock.hpp"
#include "polent/gaussian.hpp"
#include "polent/harness/scenarios.hpp"
#include "polent/mc.hpp"
#include "polent/metrology.hpp"

namespace polent::harness {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;
constexpr std::uint64_t kAcceptanceSeed = 20260810;

struct Criterion {
  int number;
  std::string description;
  bool passed;
  std::string detail;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Reported input squeezing levels: -4.2/+19.7 dB and -4.0/+19.6 dB.
PolSqueezedSource source_a() {
  return PolSqueezedSource(db_to_lin(-4.2), db_to_lin(19.7),
                           {4.5 * kDegree}, 1.0);
}
PolSqueezedSource source_b() {
  return PolSqueezedSource(db_to_lin(-4.0), db_to_lin(19.6),
                           {4.5 * kDegree}, 1.0);
}
// Symmetrized equivalent (average squeezing/anti-squeezing) used where the
// two arms are treated as statistically identical.
PolSqueezedSource source_avg() {
  const double v_sq = (db_to_lin(-4.2) + db_to_lin(-4.0)) / 2.0;
  const double v_asq = (db_to_lin(19.7) + db_to_lin(19.6)) / 2.0;
  return PolSqueezedSource(v_sq, v_asq, {4.5 * kDegree}, 1.0);
}

double theta() { return 4.5 * kDegree; }

CorrelationCombo sum_sq_combo(double th, double g = 1.0) {
  return {{"C", th}, {"D", th}, 1.0, 1.0, 1.0, g};
}
CorrelationCombo diff_asq_combo(double th, double h = 1.0) {
  const double conj = th + std::numbers::pi / 2.0;
  return {{"C", conj}, {"D", conj}, 1.0, -1.0, 1.0, h};
}
CorrelationCombo opt_k_combo(double th_opt, double k = 1.0) {
  const double conj = th_opt + std::numbers::pi / 2.0;
  return {{"C", th_opt}, {"D", conj}, 1.0, 1.0, k, 1.0 / k};
}
CorrelationCombo opt_l_combo(double th_opt, double l = 1.0) {
  const double conj = th_opt + std::numbers::pi / 2.0;
  return {{"C", conj}, {"D", th_opt}, 1.0, 1.0, 1.0 / l, l};
}

double inferred_t() {
  return infer_splitting_from_asq_correlation(0.55, source_a(), source_b()).t;
}

Criterion criterion_1_sum_correlation() {
  const double start = now_seconds();
  Criterion c{1, "squeezed-direction sum correlation -4.10 dB, t-independent",
              true, ""};
  const CovarianceModel input = input_covariance(source_a(), source_b());
  std::vector<double> values;
  for (double t : {0.45, 0.5, 0.521, 0.55}) {
    const CovarianceModel out =
        propagate(entangling_bs_map(BeamSplitterSpec(t), theta()), input);
    values.push_back(normalized_combo_variance(
        out, combo_weights(out.basis(), sum_sq_combo(theta()))));
  }
  double lo = values[0];
  double hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double db = lin_to_db(values[0]);
  const double elapsed = now_seconds() - start;
  std::ostringstream detail;
  detail << "value " << values[0] << " (" << db << " dB), spread " << hi - lo
         << ", " << elapsed << " s";
  c.detail = detail.str();
  c.passed = std::abs(db - (-4.1)) <= 0.05 && (hi - lo) <= 1e-12 &&
             elapsed < 1.0;
  return c;
}

Criterion criterion_2_asymmetry_inference() {
  Criterion c{2, "splitting inference from 0.55 and exact round trip", true,
              ""};
  const auto split =
      infer_splitting_from_asq_correlation(0.55, source_a(), source_b());
  const double imbalance = split.t - split.r;
  const CovarianceModel out = propagate(
      entangling_bs_map(BeamSplitterSpec(split.t), theta()),
      input_covariance(source_a(), source_b()));
  const double replay = normalized_combo_variance(
      out, combo_weights(out.basis(), diff_asq_combo(theta())));
  std::ostringstream detail;
  detail << "|T-R| = " << imbalance << ", round trip 0.55 -> " << replay;
  c.detail = detail.str();
  c.passed = std::abs(imbalance - 0.042) <= 0.003 &&
             std::abs(replay - 0.55) <= 1e-9;
  return c;
}

Criterion criterion_3_witness_products() {
  Criterion c{3, "witness products 0.46 and 0.45 at two decimals, both < 1",
              true, ""};
  const WitnessReport first = witness_from_pair(0.39, 0.55);
  const WitnessReport second = witness_from_pair(0.44, 0.46);
  std::ostringstream detail;
  detail << "sqrt(0.39*0.55) = " << first.product_root
         << ", sqrt(0.44*0.46) = " << second.product_root;
  c.detail = detail.str();
  c.passed = std::abs(first.product_root - 0.46) <= 0.005 &&
             std::abs(second.product_root - 0.45) <= 0.005 &&
             first.nonseparable && second.nonseparable;
  return c;
}

Criterion criterion_4_optimized_direction() {
  Criterion c{4,
              "optimized-direction floor 0.389 at g^2 = sqrt(T/R); angle "
              "error <= 1.5 deg reaches the 0.44-0.46 window",
              true, ""};
  const PolSqueezedSource avg = source_avg();
  const double t = inferred_t();
  const BeamSplitterSpec bs(t);
  const double th_opt = theta() - optimized_gamma(bs);
  const CovarianceModel input = input_covariance(avg, avg);
  const LinearMap opt_map = optimized_direction_map(bs, theta());

  const CovarianceModel ideal = propagate(opt_map, input);
  const GainOptResult opt = optimize_gain(ideal, opt_k_combo(th_opt),
                                          GainCoupling::g_and_inverse, 0);
  const double floor_error = std::abs(opt.v_min - avg.v_sq()) / avg.v_sq();
  const double gain_sq_error =
      std::abs(opt.g_opt * opt.g_opt - std::sqrt(t / (1.0 - t)));

  // Sweep the wave-plate misset on both beams; the brute-force optimum must
  // match the closed-form leakage cos^2 V_sq + sin^2 V_asq and must pass
  // through the measured 0.44-0.46 window at some error <= 1.5 deg.
  bool window_reached = false;
  double window_at_deg = -1.0;
  double worst_closed_form_gap = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double deg = 0.1 * i;
    DetectionImperfections imp;
    imp.angle_error_c = deg * kDegree;
    imp.angle_error_d = deg * kDegree;
    const CovarianceModel detected = apply_detection(ideal, imp);
    const GainOptResult res = optimize_gain(detected, opt_k_combo(th_opt),
                                            GainCoupling::g_and_inverse, 0);
    const double closed_form =
        std::cos(deg * kDegree) * std::cos(deg * kDegree) * avg.v_sq() +
        std::sin(deg * kDegree) * std::sin(deg * kDegree) * avg.v_asq();
    worst_closed_form_gap =
        std::max(worst_closed_form_gap, std::abs(res.v_min - closed_form));
    if (!window_reached && res.v_min >= 0.44 && res.v_min <= 0.46 &&
        deg <= 1.5) {
      window_reached = true;
      window_at_deg = deg;
    }
  }

  std::ostringstream detail;
  detail << "floor " << opt.v_min << " (rel err " << floor_error
         << "), g^2 err " << gain_sq_error << ", window at " << window_at_deg
         << " deg, closed-form gap " << worst_closed_form_gap;
  c.detail = detail.str();
  c.passed = floor_error <= 1e-6 && gain_sq_error <= 1e-6 && window_reached &&
             worst_closed_form_gap <= 1e-9 &&
             std::abs(opt.v_min - 0.389) <= 5e-4;
  return c;
}

Criterion criterion_5_excess_noise() {
  Criterion c{5, "individual output modes in [16.0, 17.0] dB at t ~ 0.52",
              true, ""};
  const CovarianceModel input = input_covariance(source_a(), source_b());
  double lo = 1e9;
  double hi = -1e9;
  for (double t : {0.52, inferred_t()}) {
    const CovarianceModel out =
        propagate(entangling_bs_map(BeamSplitterSpec(t), theta()), input);
    for (int i = 0; i < 4; ++i) {
      const double db = lin_to_db(out.matrix()(i, i));
      lo = std::min(lo, db);
      hi = std::max(hi, db);
    }
  }
  std::ostringstream detail;
  detail << "output-mode noise spans [" << lo << ", " << hi << "] dB";
  c.detail = detail.str();
  c.passed = lo >= 16.0 && hi <= 17.0;
  return c;
}

Criterion criterion_6_fock_oracle() {
  Criterion c{6, "Fock oracle: commutators exact, coherent variance = |<S3>|",
              true, ""};
  double worst_residual = 0.0;
  for (int n_max : {3, 8}) {
    const fock::TruncatedTwoModeSpace space(n_max);
    const int triples[3][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};
    for (const auto& triple : triples) {
      worst_residual = std::max(
          worst_residual,
          fock::commutator_residual(space, triple[0], triple[1], triple[2]));
    }
    for (int k = 1; k <= 3; ++k) {
      worst_residual =
          std::max(worst_residual, fock::s0_commutator_residual(space, k));
    }
  }
  const fock::TruncatedTwoModeSpace space(16);
  const std::complex<double> alpha(std::sqrt(2.0), 0.0);  // |alpha|^2 = 2
  double worst_ratio_error = 0.0;
  for (double th : {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0}) {
    const auto result = fock::coherent_dark_plane_variance(alpha, th, space);
    worst_ratio_error = std::max(
        worst_ratio_error, std::abs(result.shot_ratio.value_or(0.0) - 1.0));
  }
  std::ostringstream detail;
  detail << "max commutator residual " << worst_residual
         << ", max |ratio - 1| = " << worst_ratio_error;
  c.detail = detail.str();
  c.passed = worst_residual <= 1e-12 && worst_ratio_error <= 0.01;
  return c;
}

Criterion criterion_7_monte_carlo() {
  const double start = now_seconds();
  Criterion c{7, "Monte Carlo within 1% and |z| < 4 on criteria 1-4 combos; "
                 "bit-exact replay",
              true, ""};
  const double t_star = inferred_t();
  const double th = theta();
  const PolSqueezedSource avg = source_avg();
  const double th_opt = th - optimized_gamma(BeamSplitterSpec(t_star));

  struct Case {
    CovarianceModel input;
    LinearMap map;
    CorrelationCombo combo;
  };
  std::vector<Case> cases;
  cases.push_back({input_covariance(source_a(), source_b()),
                   entangling_bs_map(BeamSplitterSpec(0.5), th),
                   sum_sq_combo(th)});
  cases.push_back({input_covariance(source_a(), source_b()),
                   entangling_bs_map(BeamSplitterSpec(t_star), th),
                   sum_sq_combo(th)});
  cases.push_back({input_covariance(source_a(), source_b()),
                   entangling_bs_map(BeamSplitterSpec(t_star), th),
                   diff_asq_combo(th)});
  const double k_opt = std::pow(t_star / (1.0 - t_star), 0.25);
  cases.push_back({input_covariance(avg, avg),
                   optimized_direction_map(BeamSplitterSpec(t_star), th),
                   opt_k_combo(th_opt, k_opt)});
  cases.push_back({input_covariance(avg, avg),
                   optimized_direction_map(BeamSplitterSpec(t_star), th),
                   opt_l_combo(th_opt, k_opt)});

  const mc::McConfig cfg{1'000'000, kAcceptanceSeed};
  double worst_rel = 0.0;
  double worst_z = 0.0;
  for (const Case& item : cases) {
    const Eigen::VectorXd w =
        combo_weights(item.map.output_basis(), item.combo);
    const mc::McReport report = mc::mc_validate(item.input, item.map, w, cfg);
    worst_rel = std::max(
        worst_rel,
        std::abs(report.empirical - report.analytic) / report.analytic);
    worst_z = std::max(worst_z, std::abs(report.z_score));
  }

  const Eigen::VectorXd w0 =
      combo_weights(cases[0].map.output_basis(), cases[0].combo);
  const double replay_a =
      mc::mc_validate(cases[0].input, cases[0].map, w0, cfg).empirical;
  const double replay_b =
      mc::mc_validate(cases[0].input, cases[0].map, w0, cfg).empirical;
  const bool bit_exact = std::memcmp(&replay_a, &replay_b, sizeof(double)) == 0;

  const double elapsed = now_seconds() - start;
  std::ostringstream detail;
  detail << "worst rel dev " << worst_rel << ", worst |z| " << worst_z
         << ", bit-exact replay " << (bit_exact ? "yes" : "no") << ", "
         << elapsed << " s";
  c.detail = detail.str();
  c.passed = worst_rel <= 0.01 && worst_z < 4.0 && bit_exact && elapsed < 30.0;
  return c;
}

Criterion criterion_8_witness_cross_checks() {
  Criterion c{8, "optimizer dominates candidate gains; EPR 0.60 +- 0.02; "
                 "EOF matches its closed form",
              true, ""};
  // 50 randomized scenarios: the brute-force optimum must dominate both the
  // unit gain and the closed-form gain.
  bool dominated = true;
  for (int i = 0; i < 50; ++i) {
    const auto draw = [&](std::uint64_t lane, double lo, double hi) {
      const auto bits = mc::detail::splitmix64_at(
          kAcceptanceSeed + 1000 + static_cast<std::uint64_t>(i), lane);
      return lo + (hi - lo) * mc::detail::to_unit_interval(bits);
    };
    const double t = draw(0, 0.3, 0.7);
    const double v_sq = draw(1, 0.2, 0.9);
    const double excess = draw(2, 1.0, 100.0);
    const PolSqueezedSource src(v_sq, excess / v_sq, {0.0}, 1.0);
    const BeamSplitterSpec bs(t);
    const double th_opt = -optimized_gamma(bs);
    const CovarianceModel out =
        propagate(optimized_direction_map(bs, 0.0), input_covariance(src, src));
    const auto eval = [&](double g) {
      return normalized_combo_variance(
          out, combo_weights(out.basis(), opt_k_combo(th_opt, g)));
    };
    const GainOptResult res =
        optimize_gain(out, opt_k_combo(th_opt), GainCoupling::g_and_inverse, 0);
    const double g_closed =
        closed_form_gain(t, 1.0 - t, src.v_sq(), src.v_asq());
    if (res.v_min > eval(1.0) + 1e-12 || res.v_min > eval(g_closed) + 1e-12) {
      dominated = false;
    }
  }

  // EPR product on the symmetric-splitter scenario (derived model value).
  const CovarianceModel out = propagate(
      entangling_bs_map(BeamSplitterSpec(0.5), theta()),
      input_covariance(source_a(), source_b()));
  const double conj = theta() + std::numbers::pi / 2.0;
  const double epr = epr_reid(out, {{"C", theta()}, {"D", theta()}},
                              {{"C", conj}, {"D", conj}});

  // EOF of the 0.46-product state (the measured 0.39/0.55 pair), checked
  // against an independent evaluation of the same symmetric-state closed
  // form via the two-mode-squeezing parametrization.
  const double eof = eof_symmetric(0.39, 0.55).value();
  const double delta = std::sqrt(0.39 * 0.55);
  const double r = -0.5 * std::log(delta);
  const double ch2 = std::cosh(r) * std::cosh(r);
  const double sh2 = std::sinh(r) * std::sinh(r);
  const double eof_oracle = ch2 * std::log2(ch2) - sh2 * std::log2(sh2);

  std::ostringstream detail;
  detail << "gain domination " << (dominated ? "yes" : "no") << ", EPR " << epr
         << ", EOF " << eof << " ebits (closed form " << eof_oracle << ")";
  c.detail = detail.str();
  c.passed = dominated && std::abs(epr - 0.60) <= 0.02 &&
             std::abs(eof - eof_oracle) <= 0.01 &&
             std::abs(eof - eof_oracle) / eof_oracle <= 1e-9;
  return c;
}

Criterion criterion_9_map_invariants() {
  Criterion c{9, "1000 random t: orthogonality, vacuum preservation, "
                 "t-independent sum correlation",
              true, ""};
  const CovarianceModel input = input_covariance(source_a(), source_b());
  const FluctuationBasis in_basis = input.basis();
  const CovarianceModel vacuum = CovarianceModel::shot_noise(in_basis);

  double worst_orth = 0.0;
  double worst_vacuum = 0.0;
  double corr_lo = 1e300;
  double corr_hi = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const double u = mc::detail::to_unit_interval(
        mc::detail::splitmix64_at(kAcceptanceSeed + 2000, i));
    const double t = 0.001 + 0.998 * u;
    const LinearMap map = entangling_bs_map(BeamSplitterSpec(t), theta());
    worst_orth = std::max(worst_orth, map.orthogonality_residual());
    const CovarianceModel out = propagate(map, vacuum);
    worst_vacuum = std::max(
        worst_vacuum,
        (out.matrix() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff());
    const double corr = normalized_combo_variance(
        propagate(map, input),
        combo_weights(map.output_basis(), sum_sq_combo(theta())));
    corr_lo = std::min(corr_lo, corr);
    corr_hi = std::max(corr_hi, corr);
  }
  std::ostringstream detail;
  detail << "orthogonality " << worst_orth << ", vacuum residual "
         << worst_vacuum << ", correlation spread " << corr_hi - corr_lo;
  c.detail = detail.str();
  c.passed = worst_orth <= 1e-12 && worst_vacuum <= 1e-12 &&
             (corr_hi - corr_lo) <= 1e-12;
  return c;
}

}  // namespace

int run_acceptance(std::ostream& out) {
  const Criterion criteria[] = {
      criterion_1_sum_correlation(),   criterion_2_asymmetry_inference(),
      criterion_3_witness_products(),  criterion_4_optimized_direction(),
      criterion_5_excess_noise(),      criterion_6_fock_oracle(),
      criterion_7_monte_carlo(),       criterion_8_witness_cross_checks(),
      criterion_9_map_invariants(),
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    out << (c.passed ? "[PASS]" : "[FAIL]") << " criterion " << c.number
        << ": " << c.description << " | " << c.detail << "\n";
    if (!c.passed) ++failures;
  }
  out << (failures == 0 ? "acceptance: all criteria passed\n"
                        : "acceptance: " + std::to_string(failures) +
                              " criterion(s) failed\n");
  return failures;
}

}  // namespace polent::harness
