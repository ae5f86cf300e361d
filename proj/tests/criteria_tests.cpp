#include "polent/criteria.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polent/entangle.hpp"
#include "polent/errors.hpp"
#include "polent/metrology.hpp"
#include "test_util.hpp"

using namespace polent;
using testutil::check;
using testutil::check_close;
using testutil::check_throws;
using testutil::run_test;

namespace {

constexpr double pi = std::numbers::pi;

PolSqueezedSource src_a() {
  return PolSqueezedSource(db_to_lin(-4.2), db_to_lin(19.7), {0.0}, 1.0);
}
PolSqueezedSource src_b() {
  return PolSqueezedSource(db_to_lin(-4.0), db_to_lin(19.6), {0.0}, 1.0);
}
PolSqueezedSource src_avg() {
  return PolSqueezedSource((src_a().v_sq() + src_b().v_sq()) / 2.0,
                           (src_a().v_asq() + src_b().v_asq()) / 2.0, {0.0},
                           1.0);
}

CovarianceModel bs_output(double t, const PolSqueezedSource& a,
                          const PolSqueezedSource& b) {
  return propagate(entangling_bs_map(BeamSplitterSpec(t), 0.0),
                   input_covariance(a, b));
}

CovarianceModel opt_output(double t, const PolSqueezedSource& a,
                           const PolSqueezedSource& b) {
  return propagate(optimized_direction_map(BeamSplitterSpec(t), 0.0),
                   input_covariance(a, b));
}

CorrelationCombo opt_k_combo(double t, double k = 1.0) {
  const double theta_opt = -optimized_gamma(BeamSplitterSpec(t));
  return {{"C", theta_opt}, {"D", theta_opt + pi / 2.0}, 1.0, 1.0, k, 1.0 / k};
}

}  // namespace

int main() {
  run_test("witness arithmetic on the measured pairs", [] {
    const WitnessReport first = witness_from_pair(0.39, 0.55);
    check_close(first.product_root, 0.4631414470763764, 1e-12,
                "sqrt(0.39 * 0.55) = 0.46");
    check(first.nonseparable, "0.46 < 1");

    const WitnessReport second = witness_from_pair(0.44, 0.46);
    check_close(second.product_root, 0.4498888751680797, 1e-12,
                "sqrt(0.44 * 0.46) = 0.45");
    check(second.nonseparable, "0.45 < 1");

    const WitnessReport boundary = witness_from_pair(1.0, 1.0);
    check_close(boundary.product_root, 1.0, 0.0, "coherent boundary");
    check(!boundary.nonseparable, "boundary is separable");
  });

  run_test("product witness on the simulated state", [] {
    const SplitRatio split =
        infer_splitting_from_asq_correlation(0.55, src_a(), src_b());
    const CovarianceModel out = bs_output(split.t, src_a(), src_b());
    const WitnessReport report = same_direction_witness(out, 0.0, 1.0, 1.0);
    check_close(report.v1, 0.3891482834370292, 1e-10, "sum combo 0.389");
    check_close(report.v2, 0.55, 1e-9, "difference combo 0.55");
    check_close(report.product_root, 0.4626354459943229, 1e-9,
                "product root 0.46");
    check(report.nonseparable, "nonseparable verdict");
  });

  run_test("witness is symmetric under exchanging C and D", [] {
    const CovarianceModel out = bs_output(0.57, src_a(), src_b());
    const CorrelationCombo sum{{"C", 0.0}, {"D", 0.0}, 1.0, 1.0, 1.0, 1.0};
    const CorrelationCombo sum_swapped{
        {"D", 0.0}, {"C", 0.0}, 1.0, 1.0, 1.0, 1.0};
    const CorrelationCombo diff{
        {"C", pi / 2.0}, {"D", pi / 2.0}, 1.0, -1.0, 1.0, 1.0};
    const CorrelationCombo diff_swapped{
        {"D", pi / 2.0}, {"C", pi / 2.0}, 1.0, -1.0, 1.0, 1.0};
    const WitnessReport a = nonseparability_product(out, sum, diff);
    const WitnessReport b =
        nonseparability_product(out, sum_swapped, diff_swapped);
    check_close(a.product_root, b.product_root, 1e-14, "exchange symmetry");
  });

  run_test("cross pairing equals the rotated same-direction pairing", [] {
    const CovarianceModel out = bs_output(0.54, src_a(), src_b());
    const WitnessReport via_rotation =
        cross_direction_witness(out, 0.0, 1.3, 0.8);
    // Direct evaluation of S_C(0) + g S_D(pi/2) and S_C(pi/2) + h S_D(0).
    const CorrelationCombo direct1{
        {"C", 0.0}, {"D", pi / 2.0}, 1.0, 1.0, 1.0, 1.3};
    const CorrelationCombo direct2{
        {"C", pi / 2.0}, {"D", 0.0}, 1.0, 1.0, 1.0, 0.8};
    const WitnessReport direct = nonseparability_product(out, direct1, direct2);
    check_close(via_rotation.v1, direct.v1, 1e-12, "first combo agrees");
    check_close(via_rotation.v2, direct.v2, 1e-12, "second combo agrees");
  });

  run_test("entanglement survives the ideal map for squeezed inputs", [] {
    // Property over t in [0.3, 0.7]: with V_sq < 1 inputs and ideal
    // detection, the gain-optimized rotated-basis witness stays below 1 for
    // every splitting ratio; its floor is sqrt(V_A,sq V_B,sq). The unit-gain
    // same-direction pairing, by contrast, degrades with asymmetry.
    const double floor = std::sqrt(src_a().v_sq() * src_b().v_sq());
    for (int i = 0; i < 40; ++i) {
      const double t = 0.3 + 0.4 * i / 39.0;
      const CovarianceModel out = opt_output(t, src_a(), src_b());
      const CorrelationCombo k = opt_k_combo(t);
      const double theta_opt = -optimized_gamma(BeamSplitterSpec(t));
      const CorrelationCombo l{{"C", theta_opt + pi / 2.0},
                               {"D", theta_opt},
                               1.0,
                               1.0,
                               1.0,
                               1.0};
      const double v_k =
          optimize_gain(out, k, GainCoupling::g_and_inverse, 0).v_min;
      const double v_l =
          optimize_gain(out, l, GainCoupling::g_and_inverse, 1).v_min;
      const WitnessReport report = witness_from_pair(v_k, v_l);
      check(report.nonseparable, "nonseparable at t = " + std::to_string(t));
      check_close(report.product_root, floor, 1e-6,
                  "floor sqrt(V_A,sq V_B,sq) at every t");
    }
    // The same-direction unit-gain witness is lost at strong asymmetry.
    const WitnessReport degraded =
        same_direction_witness(bs_output(0.7, src_a(), src_b()), 0.0, 1.0, 1.0);
    check(degraded.product_root > 1.0,
          "unit-gain sq-basis witness fails at t = 0.7");
  });

  run_test("gain optimization at the symmetric splitter", [] {
    const CovarianceModel out = opt_output(0.5, src_avg(), src_avg());
    const GainOptResult res =
        optimize_gain(out, opt_k_combo(0.5), GainCoupling::g_and_inverse, 0);
    check_close(res.g_opt, 1.0, 1e-9, "g = 1 for a symmetric beam splitter");
    check_close(res.v_min, src_avg().v_sq(), 1e-9, "floor is the squeezing");

    // Squeezed-direction sum with a fixed-unity partner: g = 1 by symmetry.
    const CovarianceModel sq_out = bs_output(0.5, src_a(), src_b());
    const CorrelationCombo sum{{"C", 0.0}, {"D", 0.0}, 1.0, 1.0, 1.0, 1.0};
    const GainOptResult sum_res =
        optimize_gain(sq_out, sum, GainCoupling::g_and_unity, 1);
    check_close(sum_res.g_opt, 1.0, 1e-9, "unit gain optimum");
    check_close(sum_res.v_min, (src_a().v_sq() + src_b().v_sq()) / 2.0, 1e-12,
                "v_min is the mean input squeezing");
  });

  run_test("gain optimization at the asymmetric splitter", [] {
    // Brute force lands on g^2 = sqrt(T/R) with the floor at the input
    // squeezing, exposing the open question about the closed-form gain.
    const double t = 0.521;
    const CovarianceModel out = opt_output(t, src_avg(), src_avg());
    const GainOptResult res =
        optimize_gain(out, opt_k_combo(t), GainCoupling::g_and_inverse, 0);
    check_close(res.v_min, 0.3891482834370292, 1e-6 * 0.389, "v_min = 0.389");
    check_close(res.g_opt * res.g_opt, std::sqrt(t / (1.0 - t)), 1e-6,
                "g^2 = sqrt(T/R)");

    // With the true (unequal) sources the k-combo floor is V_A,sq.
    const CovarianceModel out_asym = opt_output(t, src_a(), src_b());
    const GainOptResult res_asym =
        optimize_gain(out_asym, opt_k_combo(t), GainCoupling::g_and_inverse, 0);
    check_close(res_asym.v_min, src_a().v_sq(), 1e-6 * 0.38,
                "asymmetric floor V_A,sq");
  });

  run_test("closed-form gain", [] {
    check_close(closed_form_gain(0.5, 0.5, 0.38, 93.3), 1.0, 1e-15,
                "symmetric splitter gives g = 1");
    check_close(closed_form_gain(0.37, 0.63, 5.0, 5.0), 1.0, 1e-15,
                "equal variances give g = 1 for any t");
    check_close(closed_form_gain(0.521, 0.479, 0.389, 92.3),
                0.9793797798803979, 1e-12, "reported-scenario value 0.979");
    check_throws<std::invalid_argument>(
        [] { closed_form_gain(0.0, 1.0, 1.0, 1.0); },
        "non-positive arguments rejected");
  });

  run_test("optimizer dominates both candidate gains", [] {
    const double t = 0.58;
    const CovarianceModel out = opt_output(t, src_avg(), src_avg());
    const GainOptResult res =
        optimize_gain(out, opt_k_combo(t), GainCoupling::g_and_inverse, 0);
    const auto eval = [&](double g) {
      return normalized_combo_variance(
          out, combo_weights(out.basis(), opt_k_combo(t, g)));
    };
    check(res.v_min <= eval(1.0) + 1e-12, "dominates g = 1");
    const double g_paper =
        closed_form_gain(t, 1.0 - t, src_avg().v_sq(), src_avg().v_asq());
    check(res.v_min <= eval(g_paper) + 1e-12, "dominates the closed-form gain");
  });

  run_test("flat profile returns the canonical gain", [] {
    const CovarianceModel vac = CovarianceModel::shot_noise(
        FluctuationBasis::pair_basis("C", "D", 0.0));
    const CorrelationCombo combo{{"C", 0.0}, {"D", 0.0}, 1.0, 1.0, 1.0, 1.0};
    const GainOptResult res =
        optimize_gain(vac, combo, GainCoupling::g_and_unity, 1);
    check_close(res.g_opt, 1.0, 0.0, "g = 1 on the flat profile");
    check_close(res.v_min, 1.0, 1e-12, "shot-noise floor");
  });

  run_test("non-unimodal profile raises the ambiguity error", [] {
    // Wrong-sign combo: the correlated coordinates are added with the sign
    // that maximizes the variance at g = 1, so the profile rises then falls.
    const CovarianceModel out = bs_output(0.5, src_a(), src_b());
    const CorrelationCombo wrong{{"C", 0.0}, {"D", 0.0}, 1.0, -1.0, 1.0, 1.0};
    try {
      optimize_gain(out, wrong, GainCoupling::g_and_unity, 1);
      check(false, "expected OptimizerAmbiguityError");
    } catch (const OptimizerAmbiguityError& err) {
      check(!err.samples().empty(), "error carries the sampled profile");
    }
  });

  run_test("EPR criterion on the symmetric-splitter scenario", [] {
    const CovarianceModel out = bs_output(0.5, src_a(), src_b());
    const std::pair<CoordLabel, CoordLabel> pair_x{{"C", 0.0}, {"D", 0.0}};
    const std::pair<CoordLabel, CoordLabel> pair_p{{"C", pi / 2.0},
                                                   {"D", pi / 2.0}};
    const double product = epr_reid(out, pair_x, pair_p);
    check_close(product, 0.600667862247453, 1e-9,
                "conditional-variance product 0.60");
    check(product < 1.0, "EPR demonstrated on the model state");
    // Each conditional variance is 0.775.
    const double v = out.variance_of({"C", 0.0});
    const double c = out.covariance_of({"C", 0.0}, {"D", 0.0});
    check_close(v - c * c / v, 0.7750276525695409, 1e-9,
                "single conditional variance");

    // Gain invariance: rescaling the conditioning arm changes nothing.
    Eigen::MatrixXd scale = Eigen::MatrixXd::Identity(4, 4);
    scale(2, 2) = 3.7;
    scale(3, 3) = 3.7;
    const CovarianceModel rescaled(
        out.basis(), (scale * out.matrix() * scale).eval());
    check_close(epr_reid(rescaled, pair_x, pair_p), product, 1e-9,
                "invariant under remote gain");
  });

  run_test("EPR degenerate cases", [] {
    const CovarianceModel vac = CovarianceModel::shot_noise(
        FluctuationBasis::pair_basis("C", "D", 0.0));
    const std::pair<CoordLabel, CoordLabel> pair_x{{"C", 0.0}, {"D", 0.0}};
    const std::pair<CoordLabel, CoordLabel> pair_p{{"C", pi / 2.0},
                                                   {"D", pi / 2.0}};
    check_close(epr_reid(vac, pair_x, pair_p), 1.0, 1e-12,
                "uncorrelated coherent beams give 1");

    Eigen::MatrixXd degenerate = Eigen::MatrixXd::Identity(4, 4);
    degenerate(2, 2) = 0.0;
    const CovarianceModel cov(FluctuationBasis::pair_basis("C", "D", 0.0),
                              degenerate);
    check_throws<std::domain_error>(
        [&] { epr_reid(cov, pair_x, pair_p); },
        "zero conditioning variance rejected");
  });

  run_test("EPR implies nonseparability on the simulated family", [] {
    for (int i = 0; i < 30; ++i) {
      const double t = 0.35 + 0.3 * i / 29.0;
      const CovarianceModel out = bs_output(t, src_a(), src_b());
      const double epr = epr_reid(out, {{"C", 0.0}, {"D", 0.0}},
                                  {{"C", pi / 2.0}, {"D", pi / 2.0}});
      const WitnessReport witness =
          same_direction_witness(out, 0.0, 1.0, 1.0);
      if (epr < 1.0) {
        check(witness.product_root < 1.0,
              "EPR is the stricter witness at t = " + std::to_string(t));
      }
    }
  });

  run_test("entanglement of formation closed form", [] {
    // Delta = 0.46: direct evaluation of the symmetric-state closed form.
    const auto eof = eof_symmetric(0.46, 0.46);
    check(eof.has_value(), "entangled state has an EOF value");
    check_close(*eof, 0.6670436303397595, 1e-9, "closed form at 0.46");

    // Independent route: two-mode-squeezing parametrization of the same
    // formula, r = -ln(Delta)/2.
    const double r = -0.5 * std::log(0.46);
    const double ch2 = std::cosh(r) * std::cosh(r);
    const double sh2 = std::sinh(r) * std::sinh(r);
    check_close(*eof, ch2 * std::log2(ch2) - sh2 * std::log2(sh2), 1e-12,
                "agrees with the squeezing parametrization");

    check(!eof_symmetric(1.0, 1.0).has_value(),
          "Delta = 1 certifies nothing (0 ebits)");
    check(!eof_symmetric(1.3, 0.9).has_value(), "Delta > 1 gives no value");
  });

  run_test("EOF is monotone decreasing in Delta", [] {
    double previous = 1e300;
    for (double delta : {0.05, 0.1, 0.2, 0.3, 0.46, 0.6, 0.8, 0.95, 0.999}) {
      const double value = eof_symmetric(delta, delta).value();
      check(value < previous,
            "strictly decreasing at Delta = " + std::to_string(delta));
      previous = value;
    }
    check(eof_symmetric(1e-6, 1e-6).value() > 15.0,
          "EOF grows without bound as Delta -> 0");
  });

  run_test("EOF symmetry precondition", [] {
    const CovarianceModel out = bs_output(0.5, src_a(), src_b());
    const CorrelationCombo sum{{"C", 0.0}, {"D", 0.0}, 1.0, 1.0, 1.0, 1.0};
    const CorrelationCombo diff{
        {"C", pi / 2.0}, {"D", pi / 2.0}, 1.0, -1.0, 1.0, 1.0};
    const WitnessReport report = nonseparability_product(out, sum, diff);
    const auto eof = eof_for_state(out, sum, diff, report.v1, report.v2);
    check(eof.has_value(), "symmetric state gets a value");

    // Break the symmetry beyond 1%: the measure refuses.
    Eigen::MatrixXd skew = Eigen::MatrixXd::Identity(4, 4);
    skew(2, 2) = 1.05;
    skew(3, 3) = 1.05;
    const CovarianceModel asym(out.basis(),
                               (skew * out.matrix() * skew).eval());
    check_throws<NotApplicableError>(
        [&] { eof_for_state(asym, sum, diff, report.v1, report.v2); },
        "asymmetric beams rejected");
  });

  return testutil::finish("criteria_tests");
}
