#include "polent/entangle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polent/criteria.hpp"
#include "polent/errors.hpp"
#include "polent/mc.hpp"
#include "polent/metrology.hpp"
#include "test_util.hpp"

using namespace polent;
using testutil::check;
using testutil::check_close;
using testutil::check_throws;
using testutil::run_test;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kDeg = pi / 180.0;

PolSqueezedSource src_a() {
  return PolSqueezedSource(db_to_lin(-4.2), db_to_lin(19.7), {0.0}, 1.0);
}
PolSqueezedSource src_b() {
  return PolSqueezedSource(db_to_lin(-4.0), db_to_lin(19.6), {0.0}, 1.0);
}
PolSqueezedSource coherent() {
  return PolSqueezedSource(1.0, 1.0, {0.0}, 1.0);
}

double uniform(std::uint64_t stream, std::uint64_t i, double lo, double hi) {
  return lo + (hi - lo) * mc::detail::to_unit_interval(
                              mc::detail::splitmix64_at(stream, i));
}

double sum_sq_corr(const CovarianceModel& out) {
  Eigen::VectorXd w(4);
  w << 1.0, 0.0, 1.0, 0.0;
  return normalized_combo_variance(out, w);
}

double diff_asq_corr(const CovarianceModel& out) {
  Eigen::VectorXd w(4);
  w << 0.0, 1.0, 0.0, -1.0;
  return normalized_combo_variance(out, w);
}

}  // namespace

int main() {
  run_test("input covariance of the reported sources", [] {
    const CovarianceModel cov = input_covariance(src_a(), src_b());
    check_close(cov.matrix()(0, 0), 0.3801893963205612, 1e-12, "V_A,sq");
    check_close(cov.matrix()(1, 1), 93.32543007969909, 1e-10, "V_A,asq");
    check_close(cov.matrix()(2, 2), 0.3981071705534973, 1e-12, "V_B,sq");
    check_close(cov.matrix()(3, 3), 91.201083935591, 1e-10, "V_B,asq");
    Eigen::MatrixXd off = cov.matrix();
    off.diagonal().setZero();
    check_close(off.cwiseAbs().maxCoeff(), 0.0, 0.0,
                "independent sources: zero cross blocks");

    const CovarianceModel swapped = input_covariance(src_b(), src_a());
    check_close(swapped.matrix()(0, 0), cov.matrix()(2, 2), 0.0,
                "swapping A and B permutes labels only");

    const CovarianceModel vac = input_covariance(coherent(), coherent());
    check((vac.matrix() - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0,
          "coherent inputs give the identity");
  });

  run_test("entangling map coefficient rows", [] {
    const LinearMap map = entangling_bs_map(BeamSplitterSpec(0.5), 0.0);
    // Printed coefficients at T = R = 1/2: C(sq) row is (T, rt, R, -rt).
    check_close(map.matrix()(0, 0), 0.5, 1e-15, "T");
    check_close(map.matrix()(0, 1), 0.5, 1e-15, "+sqrt(RT)");
    check_close(map.matrix()(0, 2), 0.5, 1e-15, "R");
    check_close(map.matrix()(0, 3), -0.5, 1e-15, "-sqrt(RT)");

    const LinearMap routing = entangling_bs_map(BeamSplitterSpec(1.0), 0.0);
    check((routing.matrix() - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0,
          "t = 1 is identity routing (C = A, D = B)");
  });

  run_test("map orthogonality over random t", [] {
    for (std::uint64_t i = 0; i < 200; ++i) {
      const double t = uniform(21, i, 0.0, 1.0);
      const LinearMap map = entangling_bs_map(BeamSplitterSpec(t), 0.0);
      check(map.orthogonality_residual() <= 1e-12,
            "orthogonal at t = " + std::to_string(t));
    }
  });

  run_test("non-pi/2 phase rejected", [] {
    check_throws<UnsupportedConfigError>(
        [] { entangling_bs_map(BeamSplitterSpec(0.5, pi / 3.0), 0.0); },
        "only the locked pi/2 phase is modeled");
    check_throws<std::invalid_argument>([] { BeamSplitterSpec(1.2); },
                                        "t outside [0, 1] rejected");
  });

  run_test("optimized direction map and gamma", [] {
    check_close(optimized_gamma(BeamSplitterSpec(0.5)), pi / 4.0, 1e-15,
                "gamma = pi/4 for the symmetric splitter");
    check_close(optimized_gamma(BeamSplitterSpec(1.0)), 0.0, 1e-15,
                "gamma = 0 at t = 1");
    check_close(optimized_gamma(BeamSplitterSpec(0.521)) / kDeg,
                43.79643460498526, 1e-9, "gamma(0.521) = 43.8 deg");

    // Construction asserts the rotated-map identity internally.
    const LinearMap opt = optimized_direction_map(BeamSplitterSpec(0.521), 0.0);
    check(opt.orthogonality_residual() <= 1e-12, "opt map orthogonal");
    const LinearMap routing = optimized_direction_map(BeamSplitterSpec(1.0), 0.0);
    check((routing.matrix() - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0,
          "t = 1 reduces to identity routing");
  });

  run_test("squeezed-direction sum correlation is splitter independent", [] {
    const CovarianceModel input = input_covariance(src_a(), src_b());
    const double expected = (src_a().v_sq() + src_b().v_sq()) / 2.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const double t = uniform(23, i, 0.001, 0.999);
      const CovarianceModel out =
          propagate(entangling_bs_map(BeamSplitterSpec(t), 0.0), input);
      check_close(sum_sq_corr(out), expected, 1e-12,
                  "sum correlation at t = " + std::to_string(t));
    }
  });

  run_test("anti-squeezed difference correlation formula", [] {
    const CovarianceModel input = input_covariance(src_a(), src_b());
    const double sum_sq = src_a().v_sq() + src_b().v_sq();
    const double sum_asq = src_a().v_asq() + src_b().v_asq();
    double previous = -1.0;
    for (double t : {0.5, 0.52, 0.55, 0.6, 0.7}) {
      const CovarianceModel out =
          propagate(entangling_bs_map(BeamSplitterSpec(t), 0.0), input);
      const double imbalance_sq = (2.0 * t - 1.0) * (2.0 * t - 1.0);
      const double expected =
          (imbalance_sq * sum_asq + (1.0 - imbalance_sq) * sum_sq) / 2.0;
      const double value = diff_asq_corr(out);
      check_close(value, expected, 1e-10, "closed form at t");
      check(value > previous, "monotone in |T - R|");
      previous = value;
    }
  });

  run_test("blocked arm forward and inference", [] {
    check_close(forward_blocked(0.3801893963205612, 0.5), 0.6900946981602806,
                1e-14, "forward 0.380 -> 0.690");
    check_close(lin_to_db(forward_blocked(0.3801893963205612, 0.5)),
                -1.6109130916635185, 1e-9, "-1.6 dB at the output");
    check_close(blocked_arm_inference(1.0, 0.37), 1.0, 1e-12,
                "coherent in, coherent out");
    for (std::uint64_t i = 0; i < 100; ++i) {
      const double v = uniform(31, 2 * i, 0.05, 50.0);
      const double t = uniform(31, 2 * i + 1, 0.05, 0.999);
      check_close(blocked_arm_inference(forward_blocked(v, t), t), v,
                  1e-9 * std::max(1.0, v), "round trip");
    }
    check_throws<std::domain_error>(
        [] { blocked_arm_inference(0.4, 0.5); },
        "measured below the vacuum contribution rejected");
  });

  run_test("splitting inference from the 0.55 correlation", [] {
    const SplitRatio split =
        infer_splitting_from_asq_correlation(0.55, src_a(), src_b());
    check_close(split.t - split.r, 0.04184237047880186, 1e-10, "|T - R|");
    check_close(split.t, 0.5209211852394009, 1e-10, "t root >= 1/2");

    // Round trip: forward simulation at the inferred t reproduces 0.55.
    const CovarianceModel out = propagate(
        entangling_bs_map(BeamSplitterSpec(split.t), 0.0),
        input_covariance(src_a(), src_b()));
    check_close(diff_asq_corr(out), 0.55, 1e-9, "round trip to 1e-9");

    const double floor = (src_a().v_sq() + src_b().v_sq()) / 2.0;
    const SplitRatio symmetric =
        infer_splitting_from_asq_correlation(floor, src_a(), src_b());
    check_close(symmetric.t, 0.5, 1e-9, "floor maps to t = 1/2");
    check_throws<NumericalError>(
        [&] {
          infer_splitting_from_asq_correlation(floor - 0.01, src_a(), src_b());
        },
        "below the floor is inconsistent");
  });

  run_test("detection identity and full loss", [] {
    const CovarianceModel out = propagate(
        entangling_bs_map(BeamSplitterSpec(0.52), 0.0),
        input_covariance(src_a(), src_b()));
    const CovarianceModel same = apply_detection(out, ideal_detection());
    check_close((same.matrix() - out.matrix()).cwiseAbs().maxCoeff(), 0.0,
                1e-12, "eta = 1, v = 1, no misset: identity");

    DetectionImperfections blind;
    blind.efficiency_c = 0.0;
    blind.efficiency_d = 0.0;
    const CovarianceModel vac = apply_detection(out, blind);
    check_close((vac.matrix() - Eigen::MatrixXd::Identity(4, 4))
                    .cwiseAbs()
                    .maxCoeff(),
                0.0, 1e-12, "eta = 0: pure vacuum");
  });

  run_test("loss never pulls coherent auto-variances below shot noise", [] {
    const CovarianceModel vac = CovarianceModel::shot_noise(
        FluctuationBasis::pair_basis("C", "D", 0.0));
    for (std::uint64_t i = 0; i < 50; ++i) {
      DetectionImperfections imp;
      imp.efficiency_c = uniform(41, 3 * i, 0.0, 1.0);
      imp.efficiency_d = uniform(41, 3 * i + 1, 0.0, 1.0);
      imp.visibility = uniform(41, 3 * i + 2, 0.5, 1.0);
      const CovarianceModel out = apply_detection(vac, imp);
      for (int k = 0; k < 4; ++k) {
        check(out.matrix()(k, k) >= 1.0 - 1e-12,
              "coherent auto-variance stays at shot noise");
      }
    }
  });

  run_test("visibility and efficiency closed forms on the sum combo", [] {
    const CovarianceModel out = propagate(
        entangling_bs_map(BeamSplitterSpec(0.5), 0.0),
        input_covariance(src_a(), src_b()));
    const double ideal = sum_sq_corr(out);

    DetectionImperfections vis;
    vis.visibility = 0.98;
    check_close(sum_sq_corr(apply_detection(out, vis)),
                0.98 * 0.98 * ideal + (1.0 - 0.98 * 0.98), 1e-12,
                "v^2 attenuation with vacuum complement");

    DetectionImperfections loss;
    loss.efficiency_c = 0.9;
    loss.efficiency_d = 0.9;
    check_close(sum_sq_corr(apply_detection(out, loss)),
                0.9 * ideal + 0.1, 1e-12, "common loss mixes vacuum");
  });

  run_test("angle error leakage brackets the measured 0.44-0.46", [] {
    // Wave-plate misset of 1.2 deg on each beam: the optimized-direction
    // correlation rises from 0.389 toward the measured window; the
    // brute-force optimum equals cos^2 V_sq + sin^2 V_asq exactly.
    const SplitRatio split =
        infer_splitting_from_asq_correlation(0.55, src_a(), src_b());
    const BeamSplitterSpec bs(split.t);
    const double misset = 1.2 * kDeg;
    const double theta_opt = -optimized_gamma(bs);

    DetectionImperfections imp;
    imp.angle_error_c = misset;
    imp.angle_error_d = misset;

    // Unequal reported sources: floor V_A,sq.
    const CovarianceModel detected = apply_detection(
        propagate(optimized_direction_map(bs, 0.0),
                  input_covariance(src_a(), src_b())),
        imp);
    const CorrelationCombo k_combo{{"C", theta_opt},
                                   {"D", theta_opt + pi / 2.0},
                                   1.0,
                                   1.0,
                                   1.0,
                                   1.0};
    const GainOptResult res =
        optimize_gain(detected, k_combo, GainCoupling::g_and_inverse, 0);
    check(res.v_min >= 0.42 && res.v_min <= 0.48,
          "1.2 deg misset lands in [0.42, 0.48]");
    const double closed_asym =
        std::cos(misset) * std::cos(misset) * src_a().v_sq() +
        std::sin(misset) * std::sin(misset) * src_a().v_asq();
    check_close(res.v_min, closed_asym, 1e-9, "closed-form leakage (asym)");
    check_close(res.v_min, 0.4209537801114742, 1e-9, "frozen value");

    // Symmetrized sources: floor (V_A,sq + V_B,sq)/2.
    const double v_sq = (src_a().v_sq() + src_b().v_sq()) / 2.0;
    const double v_asq = (src_a().v_asq() + src_b().v_asq()) / 2.0;
    const PolSqueezedSource avg(v_sq, v_asq, {0.0}, 1.0);
    const CovarianceModel detected_sym = apply_detection(
        propagate(optimized_direction_map(bs, 0.0), input_covariance(avg, avg)),
        imp);
    const GainOptResult res_sym =
        optimize_gain(detected_sym, k_combo, GainCoupling::g_and_inverse, 0);
    check_close(res_sym.v_min, 0.4294428848705746, 1e-9,
                "frozen value (symmetrized)");
  });

  run_test("imperfection validation", [] {
    DetectionImperfections imp;
    imp.efficiency_c = 1.4;
    check_throws<std::invalid_argument>(
        [&] {
          apply_detection(CovarianceModel::shot_noise(
                              FluctuationBasis::pair_basis("C", "D", 0.0)),
                          imp);
        },
        "efficiency outside [0, 1] rejected");
  });

  return testutil::finish("entangle_tests");
}
