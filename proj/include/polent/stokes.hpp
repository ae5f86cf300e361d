#pragma once

#include <Eigen/Dense>

namespace polent {

/// Direction within the dark (S1-S2) plane of a circularly polarized beam,
/// interpreted modulo 2*pi. theta and theta + pi/2 index a maximally
/// conjugate pair; a shift by pi flips the sign of the measured parameter.
struct DarkPlaneAngle {
  double radians = 0.0;

  DarkPlaneAngle conjugate() const;
  /// Canonical representative in [0, 2*pi).
  double wrapped() const;
};

/// Mean Stokes vector in photon-number units (per detection interval).
/// The circular states used here have s1 = s2 = 0 and |s3| = s0.
struct StokesMean {
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
};

/// A polarisation-squeezed input beam, reduced to its dark-plane statistics.
/// Variances are shot-noise normalized: a coherent beam of the same |<S3>|
/// has dark-plane variance 1. <S3> is carried as metadata only; the
/// normalized model never multiplies by it.
class PolSqueezedSource {
 public:
  /// Throws std::invalid_argument unless v_sq, v_asq > 0 and
  /// v_sq * v_asq >= 1 (dark-plane uncertainty relation in shot units).
  PolSqueezedSource(double v_sq, double v_asq, DarkPlaneAngle theta_sq,
                    double s3_mean);

  double v_sq() const noexcept { return v_sq_; }
  double v_asq() const noexcept { return v_asq_; }
  DarkPlaneAngle theta_sq() const noexcept { return theta_sq_; }
  double s3_mean() const noexcept { return s3_mean_; }

 private:
  double v_sq_;
  double v_asq_;
  DarkPlaneAngle theta_sq_;
  double s3_mean_;
};

/// 2x2 rotation sending coordinates (S(theta), S(theta+pi/2)) to
/// (S(theta+delta), S(theta+delta+pi/2)). Orthogonal with determinant +1;
/// composition law rot(d1) * rot(d2) = rot(d1 + d2).
Eigen::Matrix2d dark_plane_rotation(double delta);

/// v_a * v_b, to be compared against the uncertainty bound by the caller
/// (bound = 1 in shot-noise units for the dark plane).
/// Throws std::invalid_argument for non-positive variances.
double uncertainty_product(double v_a, double v_b);

/// True iff the source is polarisation squeezed in normalized form:
/// v_sq < 1 and v_asq > 1.
bool is_polarisation_squeezed(const PolSqueezedSource& src);

}  // namespace polent
