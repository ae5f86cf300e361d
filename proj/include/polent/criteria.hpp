#pragma once

#include <cstddef>
#include <optional>

#include "polent/gaussian.hpp"

namespace polent {

/// A signed, gain-weighted combination of two measured Stokes signals.
/// The shot-noise reference of the combination is the sum of squared gains
/// (each beam contributes gain^2 units of shot noise to the photocurrent).
struct CorrelationCombo {
  CoordLabel first;
  CoordLabel second;
  double sign_first = 1.0;
  double sign_second = 1.0;
  double gain_first = 1.0;
  double gain_second = 1.0;

  /// Throws std::invalid_argument unless both gains are > 0.
  void validate() const;
};

/// Weight vector of the combo on `basis` (signs folded into the gains).
Eigen::VectorXd combo_weights(const FluctuationBasis& basis,
                              const CorrelationCombo& combo);

/// Evaluated entanglement witnesses for one conjugate pair of combinations.
struct WitnessReport {
  double v1 = 0.0;  // normalized variance of the first combination
  double v2 = 0.0;  // normalized variance of the second combination
  double product_root = 0.0;  // sqrt(v1 * v2)
  bool nonseparable = false;  // product_root < 1
  std::optional<double> epr_product;
  std::optional<bool> epr_verdict;
  std::optional<double> eof_ebits;
};

/// Product-form non-separability witness: both combos evaluated as
/// normalized variances, geometric mean compared against the unit bound.
/// The weaker sum-form criterion is recoverable from the report as
/// (v1 + v2) / 2 < 1; it is not a separate code path.
WitnessReport nonseparability_product(const CovarianceModel& cov,
                                      const CorrelationCombo& combo1,
                                      const CorrelationCombo& combo2);

/// Witness arithmetic on two already-measured normalized variances.
WitnessReport witness_from_pair(double v1, double v2);

/// Same-direction pairing: S_C(theta) + g S_D(theta) against
/// S_C(theta+pi/2) - h S_D(theta+pi/2).
WitnessReport same_direction_witness(const CovarianceModel& cov, double theta,
                                     double g, double h);

/// Cross pairing S_C(theta) + g S_D(theta+pi/2) against
/// S_C(theta+pi/2) + h S_D(theta). The two pairings are equivalent: this one
/// is evaluated by rotating beam D's observation axes by pi/2 (the half-wave
/// plate relabeling S_D(theta) -> -S_D(theta+pi/2)) and delegating to the
/// same-direction path.
WitnessReport cross_direction_witness(const CovarianceModel& cov, double theta,
                                      double g, double h);

enum class GainCoupling {
  g_and_inverse,  // gains (g, 1/g), the optimized-direction convention
  g_and_unity,    // gains (g, 1) with a fixed-unity partner
};

struct GainOptResult {
  double g_opt = 1.0;
  double v_min = 0.0;
};

/// Minimizes the normalized combo variance over g in [1e-3, 1e3] by
/// golden-section search on log g to relative tolerance 1e-10. `g_slot`
/// (0 or 1) says which signal carries g; the partner follows the coupling.
/// Unimodality of the sampled profile is asserted first; a non-unimodal
/// profile throws OptimizerAmbiguityError carrying the samples. A profile
/// flat within tolerance returns the canonical g = 1.
GainOptResult optimize_gain(const CovarianceModel& cov,
                            const CorrelationCombo& combo,
                            GainCoupling coupling, std::size_t g_slot = 0);

/// The closed-form gain ((T V_sq + R V_asq) / (T V_asq + R V_sq))^(1/4),
/// reported alongside the brute-force optimum for comparison. Which objective
/// this expression optimizes is a documented ambiguity; the two need not
/// coincide.
double closed_form_gain(double t, double r, double v_sq, double v_asq);

/// EPR criterion: product of conditional variances
/// D(u|w) = V_u - Cov(u, w)^2 / V_w over the two labeled pairs, in shot
/// units. EPR correlations are demonstrated iff the product is < 1.
/// A vanishing conditioning variance throws std::domain_error.
double epr_reid(const CovarianceModel& cov,
                const std::pair<CoordLabel, CoordLabel>& pair_x,
                const std::pair<CoordLabel, CoordLabel>& pair_p);

/// Entanglement of formation of a symmetric two-mode Gaussian state from the
/// two normalized correlation variances, Delta = sqrt(v1 v2):
///   c+- = (Delta^(-1/2) +- Delta^(1/2))^2 / 4,
///   EOF = c+ log2 c+ - c- log2 c-   (ebits).
/// Returns nullopt when Delta >= 1 (no entanglement certified). The closed
/// form is the standard symmetric-state result from the literature; callers
/// report it as such.
std::optional<double> eof_symmetric(double v1, double v2);

/// eof_symmetric with the symmetry precondition enforced on the state:
/// the auto-variances of the C and D coordinates entering the combos must
/// agree within 1%, else NotApplicableError.
std::optional<double> eof_for_state(const CovarianceModel& cov,
                                    const CorrelationCombo& combo1,
                                    const CorrelationCombo& combo2, double v1,
                                    double v2);

}  // namespace polent
