#include "polent/stokes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polent {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Slack for the uncertainty-product bound so that minimum-uncertainty pairs
// like (v, 1/v) survive rounding.
constexpr double kProductSlack = 1e-12;
}  // namespace

DarkPlaneAngle DarkPlaneAngle::conjugate() const {
  return {radians + std::numbers::pi / 2.0};
}

double DarkPlaneAngle::wrapped() const {
  double a = std::fmod(radians, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

PolSqueezedSource::PolSqueezedSource(double v_sq, double v_asq,
                                     DarkPlaneAngle theta_sq, double s3_mean)
    : v_sq_(v_sq), v_asq_(v_asq), theta_sq_(theta_sq), s3_mean_(s3_mean) {
  if (!(v_sq > 0.0) || !(v_asq > 0.0)) {
    throw std::invalid_argument("PolSqueezedSource: variances must be > 0");
  }
  if (v_sq * v_asq < 1.0 - kProductSlack) {
    throw std::invalid_argument(
        "PolSqueezedSource: v_sq * v_asq < 1 violates the dark-plane "
        "uncertainty relation");
  }
}

Eigen::Matrix2d dark_plane_rotation(double delta) {
  const double c = std::cos(delta);
  const double s = std::sin(delta);
  Eigen::Matrix2d m;
  m << c, s, -s, c;
  return m;
}

double uncertainty_product(double v_a, double v_b) {
  if (!(v_a > 0.0) || !(v_b > 0.0)) {
    throw std::invalid_argument("uncertainty_product: variances must be > 0");
  }
  return v_a * v_b;
}

bool is_polarisation_squeezed(const PolSqueezedSource& src) {
  return src.v_sq() < 1.0 && src.v_asq() > 1.0;
}

}  // namespace polent
