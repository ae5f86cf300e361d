#include "polent/stokes.hpp"

#include <numbers>
#include <stdexcept>

#include "polent/mc.hpp"
#include "test_util.hpp"

using namespace polent;
using testutil::check;
using testutil::check_close;
using testutil::check_throws;
using testutil::run_test;

namespace {

constexpr double pi = std::numbers::pi;

double random_angle(std::uint64_t i) {
  return (mc::detail::to_unit_interval(mc::detail::splitmix64_at(7, i)) - 0.5) *
         4.0 * pi;
}

}  // namespace

int main() {
  run_test("rotation identity and quarter turn", [] {
    const Eigen::Matrix2d id = dark_plane_rotation(0.0);
    check_close(id(0, 0), 1.0, 0.0, "identity (0,0)");
    check_close(id(0, 1), 0.0, 0.0, "identity (0,1)");

    // delta = pi/2: (S(th), S(th+pi/2)) -> (S(th+pi/2), -S(th)).
    const Eigen::Matrix2d quarter = dark_plane_rotation(pi / 2.0);
    check_close(quarter(0, 0), 0.0, 1e-15, "quarter (0,0)");
    check_close(quarter(0, 1), 1.0, 1e-15, "quarter (0,1)");
    check_close(quarter(1, 0), -1.0, 1e-15, "quarter (1,0)");
    check_close(quarter(1, 1), 0.0, 1e-15, "quarter (1,1)");

    // Rotation by pi flips the sign of both coordinates.
    const Eigen::Matrix2d half = dark_plane_rotation(pi);
    check_close((half + Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 0.0,
                1e-15, "rotation by pi = -identity");
  });

  run_test("rotation maps the measurement axis onto theta_sq", [] {
    // 4.5 deg applied to the theta = 0 basis lands on the squeezing angle.
    const double theta_sq = 4.5 * pi / 180.0;
    const LinearMap map = dark_plane_rotation_map("A", {0.0}, theta_sq);
    check(map.output_basis().label(0).matches({"A", theta_sq}),
          "output axis is theta_sq");
    check_close(map.matrix()(0, 0), std::cos(theta_sq), 1e-15, "cos entry");
  });

  run_test("rotation composition law on random angles", [] {
    for (std::uint64_t i = 0; i < 200; ++i) {
      const double d1 = random_angle(2 * i);
      const double d2 = random_angle(2 * i + 1);
      const Eigen::Matrix2d composed =
          dark_plane_rotation(d1) * dark_plane_rotation(d2);
      const double gap =
          (composed - dark_plane_rotation(d1 + d2)).cwiseAbs().maxCoeff();
      check(gap <= 1e-12, "composition residual " + std::to_string(gap));
      const Eigen::Matrix2d m = dark_plane_rotation(d1);
      const double orth =
          (m * m.transpose() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
      check(orth <= 1e-12, "orthogonality residual " + std::to_string(orth));
      check_close(m.determinant(), 1.0, 1e-12, "determinant +1");
    }
  });

  run_test("uncertainty product", [] {
    check_close(uncertainty_product(1.0, 1.0), 1.0, 0.0,
                "coherent state saturates the bound");
    // Reported squeezing levels: -4.2 dB and +19.7 dB.
    check_close(uncertainty_product(std::pow(10.0, -0.42),
                                    std::pow(10.0, 1.97)),
                35.48133892335754, 1e-10, "reported source product");
    check(uncertainty_product(0.5, 0.5) < 1.0,
          "0.25 < 1 must be reported as a violation by the caller");
    check(uncertainty_product(2.0, 3.0) == uncertainty_product(3.0, 2.0),
          "symmetry");
    check_throws<std::invalid_argument>(
        [] { uncertainty_product(0.0, 1.0); }, "non-positive variance");
  });

  run_test("polarisation squeezing predicate", [] {
    check(is_polarisation_squeezed(
              PolSqueezedSource(0.38, 93.3, {0.0}, 1.0)),
          "reported source is squeezed");
    check(!is_polarisation_squeezed(PolSqueezedSource(1.0, 1.0, {0.0}, 1.0)),
          "coherent state is not");
    check(is_polarisation_squeezed(
              PolSqueezedSource(0.9, 1.0 / 0.9, {0.0}, 1.0)),
          "minimum-uncertainty squeezed state");
  });

  run_test("source constructor rejects uncertainty violations", [] {
    check_throws<std::invalid_argument>(
        [] { PolSqueezedSource(0.5, 0.5, {0.0}, 1.0); },
        "v_sq * v_asq < 1 rejected");
    check_throws<std::invalid_argument>(
        [] { PolSqueezedSource(-1.0, 2.0, {0.0}, 1.0); },
        "negative variance rejected");
    // Products within rounding of the bound are accepted.
    PolSqueezedSource ok(0.9, 1.0 / 0.9, {0.0}, 1.0);
    check(ok.v_sq() == 0.9, "minimum-uncertainty source constructed");
  });

  run_test("angle wrapping and conjugation", [] {
    const DarkPlaneAngle a{-pi / 2.0};
    check_close(a.wrapped(), 1.5 * pi, 1e-12, "wrap into [0, 2pi)");
    check_close(a.conjugate().radians, 0.0, 1e-12, "conjugate adds pi/2");
  });

  return testutil::finish("stokes_tests");
}
