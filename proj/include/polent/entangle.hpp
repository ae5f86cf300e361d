#pragma once

#include <numbers>

#include "polent/gaussian.hpp"
#include "polent/stokes.hpp"

namespace polent {

/// Entangling beam splitter. Only the intensity transmittance is stored;
/// r = 1 - t is always derived. The locked relative optical phase between
/// the input carriers is pi/2; other phases are rejected by the maps.
struct BeamSplitterSpec {
  double t = 0.5;
  double relative_phase = std::numbers::pi / 2.0;

  /// Throws std::invalid_argument outside t in [0, 1]. The degenerate values
  /// 0 and 1 are allowed (identity routing) but rejected by the splitting
  /// inference, where no correlation exists.
  BeamSplitterSpec(double transmittance, double phase = std::numbers::pi / 2.0);

  double r() const noexcept { return 1.0 - t; }
};

/// Non-idealities between the splitter and the recorded variances.
/// Efficiencies and visibility mix in vacuum; angle errors are wave-plate
/// missets rotating each beam's measured dark-plane axes.
struct DetectionImperfections {
  double efficiency_c = 1.0;
  double efficiency_d = 1.0;
  double visibility = 1.0;
  double angle_error_c = 0.0;  // radians
  double angle_error_d = 0.0;  // radians

  /// Throws std::invalid_argument when efficiencies or visibility leave [0, 1].
  void validate() const;
};

/// Ideal identity imperfections.
inline DetectionImperfections ideal_detection() { return {}; }

/// 4x4 diagonal covariance of two independent squeezed sources on the
/// standard input basis [A(th), A(th+pi/2), B(th), B(th+pi/2)].
/// The sources must share the squeezing angle (common dark-plane frame).
CovarianceModel input_covariance(const PolSqueezedSource& a,
                                 const PolSqueezedSource& b);

/// Beam-splitter input-output map for dark-plane Stokes parameters at pi/2
/// relative carrier phase, from [A(sq), A(asq), B(sq), B(asq)] to
/// [C(sq), C(asq), D(sq), D(asq)]:
///
///   S_C(th)       =  T S_A(th)      + R S_B(th)      + rt S_A(th+) - rt S_B(th+)
///   S_C(th+pi/2)  = -rt S_A(th)     + rt S_B(th)     + T S_A(th+)  + R S_B(th+)
///   S_D(th)       =  R S_A(th)      + T S_B(th)      - rt S_A(th+) + rt S_B(th+)
///   S_D(th+pi/2)  =  rt S_A(th)     - rt S_B(th)     + R S_A(th+)  + T S_B(th+)
///
/// with rt = sqrt(R T). The map is orthogonal for every t (the splitter adds
/// no noise); the residual is asserted to 1e-12.
LinearMap entangling_bs_map(const BeamSplitterSpec& bs, double theta_sq = 0.0);

/// Measurement rotation gamma with cos(gamma) = sqrt(T): the dark-plane
/// direction along which correlations are robust to splitter asymmetry.
double optimized_gamma(const BeamSplitterSpec& bs);

/// Map straight from the inputs to the rotated observation directions
/// [C(opt), C(opt+), D(opt), D(opt+)] with opt = theta_sq - gamma:
///
///   S_opt,C   = sqrt(T) S_A(th)  - sqrt(R) S_B(th+)
///   S_opt+,C  = sqrt(R) S_B(th)  + sqrt(T) S_A(th+)
///   S_opt,D   = sqrt(T) S_B(th)  - sqrt(R) S_A(th+)
///   S_opt+,D  = sqrt(R) S_A(th)  + sqrt(T) S_B(th+)
///
/// Equals entangling_bs_map followed by a per-beam rotation by -gamma;
/// the identity is asserted to 1e-12.
LinearMap optimized_direction_map(const BeamSplitterSpec& bs,
                                  double theta_sq = 0.0);

/// Detection chain on an output covariance (beam-grouped conjugate pairs,
/// beams C then D): visibility mixes vacuum into the interfered fluctuations
/// with weight 1 - v^2 (cross terms scale by v^2), then the angle errors
/// rotate each beam's measured axes, then each detector's loss eta mixes
/// vacuum (V -> eta V + 1 - eta, cross terms scale by sqrt(eta_c eta_d)).
CovarianceModel apply_detection(const CovarianceModel& cov,
                                const DetectionImperfections& imp);

/// Variance seen at a splitter output when the other input carries vacuum:
/// t v_in + (1 - t). Used by the blocked-arm characterisation.
double forward_blocked(double v_in, double t);

/// Inverse of forward_blocked: the input variance inferred from a blocked-arm
/// measurement, (measured - (1 - t)) / t. Throws std::domain_error when
/// measured <= 1 - t (below the vacuum contribution, unphysical).
double blocked_arm_inference(double measured, double t);

struct SplitRatio {
  double t = 0.5;
  double r = 0.5;
};

/// Solves the anti-squeezed difference correlation
///   measured = [(T-R)^2 (V_A,asq + V_B,asq) + 4RT (V_A,sq + V_B,sq)] / 2
/// for the splitting ratio, returning the t >= 1/2 root. Throws
/// NumericalError when measured lies below the symmetric-splitter floor
/// (V_A,sq + V_B,sq) / 2 or above the fully asymmetric ceiling.
SplitRatio infer_splitting_from_asq_correlation(double measured_norm,
                                                const PolSqueezedSource& a,
                                                const PolSqueezedSource& b);

}  // namespace polent
